"""Exact rational time arithmetic with a compiled fast path.

The simulator represents every instant and duration exactly, as either a
plain ``int`` or a normalized fraction. The fraction type lives in two
interchangeable backends: ``skipsim._ratc`` (Cython) and ``skipsim._ratpy``
(pure Python). The compiled backend is preferred when importable; set
``SKIPSIM_PURE_PYTHON=1`` to force the fallback.
"""

import os

if os.environ.get("SKIPSIM_PURE_PYTHON"):
    from skipsim._ratpy import Rat, make_rat

    RAT_BACKEND = "python"
else:
    try:
        from skipsim._ratc import Rat, make_rat

        RAT_BACKEND = "compiled"
    except ImportError:
        from skipsim._ratpy import Rat, make_rat

        RAT_BACKEND = "python"

__all__ = [
    "Rat",
    "make_rat",
    "RAT_BACKEND",
    "rat",
    "as_pair",
    "rat_str",
    "parse_rat",
    "format_decimal",
    "exact_div",
]


def rat(n, d=1):
    """Normalized rational from an integer pair; exact integers come back as int."""
    return make_rat(n, d)


def exact_div(a, b):
    """a / b staying exact when both operands are plain ints."""
    if isinstance(a, int) and isinstance(b, int):
        return make_rat(a, b)
    return a / b


def as_pair(x):
    """(numerator, denominator) of an int or Rat."""
    if isinstance(x, int):
        return x, 1
    return x.n, x.d


def rat_str(x):
    """Serialize exactly: ``"7"`` for integers, ``"num/den"`` otherwise."""
    if isinstance(x, int):
        return str(x)
    return "%d/%d" % (x.n, x.d)


def parse_rat(text):
    """Parse ``"3"``, ``"3/4"`` or a plain decimal like ``"0.25"`` exactly."""
    s = text.strip()
    if "/" in s:
        num, den = s.split("/", 1)
        return make_rat(int(num), int(den))
    if "." in s:
        whole, frac = s.split(".", 1)
        sign = -1 if whole.lstrip().startswith("-") else 1
        whole_i = int(whole) if whole not in ("", "-", "+") else 0
        scale = 10 ** len(frac)
        frac_i = int(frac) if frac else 0
        return make_rat(whole_i * scale + sign * frac_i, scale)
    return int(s)


def format_decimal(x, places=6):
    """Exact fixed-point rendering with round-half-up, no float involved."""
    n, d = as_pair(x)
    sign = "-" if n < 0 else ""
    n = abs(n)
    q = 10 ** places
    scaled = (n * q + d // 2) // d
    whole, frac = divmod(scaled, q)
    return "%s%d.%0*d" % (sign, whole, places, frac)
