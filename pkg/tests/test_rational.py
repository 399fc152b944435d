"""Both rational backends must agree with each other and with Fraction."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skipsim import _ratpy
from skipsim.rational import (
    RAT_BACKEND,
    as_pair,
    exact_div,
    format_decimal,
    parse_rat,
    rat,
    rat_str,
)

try:
    from skipsim import _ratc

    BACKENDS = [_ratpy, _ratc]
except ImportError:
    BACKENDS = [_ratpy]


@pytest.fixture(params=BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def backend(request):
    return request.param


def test_demotion_to_int(backend):
    assert backend.make_rat(4, 2) == 2
    assert isinstance(backend.make_rat(4, 2), int)
    assert isinstance(backend.make_rat(0, 7), int)
    r = backend.make_rat(3, 4)
    assert (r.n, r.d) == (3, 4)


def test_arithmetic_demotes(backend):
    half = backend.make_rat(1, 2)
    assert isinstance(half + half, int)
    assert half + half == 1
    assert isinstance(half * 2, int)
    assert half - half == 0


def test_mixed_int_ops(backend):
    q = backend.make_rat(3, 4)
    assert q + 1 == backend.make_rat(7, 4)
    assert 1 + q == backend.make_rat(7, 4)
    assert 1 - q == backend.make_rat(1, 4)
    assert q * 4 == 3
    assert 3 / q == 4
    assert q / 3 == backend.make_rat(1, 4)


def test_negative_normalization(backend):
    r = backend.Rat(3, -6)
    assert (r.n, r.d) == (-1, 2)
    assert -r == backend.make_rat(1, 2)
    assert abs(r) == backend.make_rat(1, 2)


def test_comparisons(backend):
    assert backend.make_rat(7, 2) < 4
    assert backend.make_rat(7, 2) > 3
    assert backend.make_rat(1, 3) <= backend.make_rat(2, 3)
    assert backend.make_rat(5, 1) == 5
    assert not (backend.make_rat(1, 3) == backend.make_rat(1, 4))


def test_zero_denominator_raises(backend):
    with pytest.raises(ZeroDivisionError):
        backend.make_rat(1, 0)
    with pytest.raises(ZeroDivisionError):
        backend.make_rat(1, 2) / 0


def test_unhashable(backend):
    with pytest.raises(TypeError):
        hash(backend.make_rat(1, 2))


def test_str_repr(backend):
    assert str(backend.make_rat(3, 4)) == "3/4"
    assert str(backend.Rat(4, 1)) == "4"
    assert repr(backend.make_rat(-1, 3)) == "Rat(-1, 3)"


@settings(max_examples=300, deadline=None)
@given(
    a=st.integers(-50, 50),
    b=st.integers(1, 30),
    c=st.integers(-50, 50),
    d=st.integers(1, 30),
)
def test_backends_match_fraction(a, b, c, d):
    for backend in BACKENDS:
        x = backend.make_rat(a, b)
        y = backend.make_rat(c, d)
        fx, fy = Fraction(a, b), Fraction(c, d)
        for op, fop in (
            (lambda u, v: u + v, fx + fy),
            (lambda u, v: u - v, fx - fy),
            (lambda u, v: u * v, fx * fy),
        ):
            got = op(x, y)
            assert as_pair(got) == (fop.numerator, fop.denominator)
        if fy != 0:
            got = exact_div(x, y)
            expect = fx / fy
            assert as_pair(got) == (expect.numerator, expect.denominator)
        assert (x < y) == (fx < fy)
        assert (x == y) == (fx == fy)


@settings(max_examples=300, deadline=None)
@given(
    a=st.integers(-60, 60),
    b=st.integers(1, 24),
    k=st.integers(-40, 40),
)
def test_mixed_int_fast_paths_match_fraction(a, b, k):
    for backend in BACKENDS:
        x = backend.make_rat(a, b)
        fx = Fraction(a, b)
        cases = [
            (x + k, fx + k),
            (k + x, k + fx),
            (x - k, fx - k),
            (k - x, k - fx),
            (x * k, fx * k),
            (k * x, k * fx),
        ]
        if k != 0 and not isinstance(x, int):
            cases.append((x / k, fx / k))
        if fx != 0 and not isinstance(x, int):
            cases.append((k / x, k / fx))
        for got, expect in cases:
            assert as_pair(got) == (expect.numerator, expect.denominator)
            if expect.denominator == 1:
                assert isinstance(got, int)


def test_helpers():
    assert rat_str(rat(6, 4)) == "3/2"
    assert rat_str(5) == "5"
    assert parse_rat("3/4") == rat(3, 4)
    assert parse_rat("1.15") == rat(23, 20)
    assert parse_rat("7") == 7
    assert parse_rat("-1.5") == rat(-3, 2)
    assert format_decimal(rat(11, 20)) == "0.550000"
    assert format_decimal(rat(23, 20)) == "1.150000"
    assert format_decimal(3) == "3.000000"
    assert exact_div(1, 3) == rat(1, 3)
    assert exact_div(rat(1, 2), 2) == rat(1, 4)


def test_backend_selected():
    assert RAT_BACKEND in ("compiled", "python")
