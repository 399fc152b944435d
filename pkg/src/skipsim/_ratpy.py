"""Pure-Python exact rational arithmetic.

This is the fallback implementation of the hot numeric kernel. The compiled
twin in ``_ratc`` implements the identical semantics; ``skipsim.rational``
picks one at import time.

Semantics that both backends must honour:

* values are always normalized (gcd-reduced, positive denominator);
* any arithmetic result with denominator 1 is demoted to a plain ``int``,
  so integral quantities stay ordinary Python integers throughout;
* mixed operations with ``int`` are supported on both sides;
* instances are immutable and unhashable (times are never dict keys).
"""

from math import gcd

__all__ = ["Rat", "make_rat"]


def make_rat(n, d=1):
    """Build a normalized rational, demoting exact integers to int."""
    if d == 0:
        raise ZeroDivisionError("rational with zero denominator")
    if d < 0:
        n, d = -n, -d
    g = gcd(n, d)
    if g > 1:
        n //= g
        d //= g
    if d == 1:
        return n
    r = object.__new__(Rat)
    r.n = n
    r.d = d
    return r


def _pair(x):
    if isinstance(x, int):
        return x, 1
    if isinstance(x, Rat):
        return x.n, x.d
    return None


class Rat:
    """An exact fraction n/d with d > 1 after normalization."""

    __slots__ = ("n", "d")

    def __init__(self, n, d=1):
        if d == 0:
            raise ZeroDivisionError("rational with zero denominator")
        if d < 0:
            n, d = -n, -d
        g = gcd(n, d)
        self.n = n // g if g > 1 else n
        self.d = d // g if g > 1 else d

    # -- arithmetic ------------------------------------------------------
    # Int fast paths skip renormalization where the gcd provably stays 1:
    # gcd(n + k*d, d) == gcd(n, d) == 1, so int add/sub never reduces.

    def _raw(self, n, d):
        if d == 1:  # direct-built Rat(n, 1) operands stay demotable
            return n
        r = object.__new__(Rat)
        r.n = n
        r.d = d
        return r

    def __add__(self, other):
        if isinstance(other, int):
            return self._raw(self.n + other * self.d, self.d)
        if not isinstance(other, Rat):
            return NotImplemented
        return make_rat(self.n * other.d + other.n * self.d, self.d * other.d)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            return self._raw(self.n - other * self.d, self.d)
        if not isinstance(other, Rat):
            return NotImplemented
        return make_rat(self.n * other.d - other.n * self.d, self.d * other.d)

    def __rsub__(self, other):
        if isinstance(other, int):
            return self._raw(other * self.d - self.n, self.d)
        if not isinstance(other, Rat):
            return NotImplemented
        return make_rat(other.n * self.d - self.n * other.d, self.d * other.d)

    def __mul__(self, other):
        if isinstance(other, int):
            g = gcd(other, self.d)
            d = self.d // g
            n = self.n * (other // g)
            return n if d == 1 else self._raw(n, d)
        if not isinstance(other, Rat):
            return NotImplemented
        return make_rat(self.n * other.n, self.d * other.d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, int):
            if other == 0:
                raise ZeroDivisionError("rational division by zero")
            n, k = (self.n, other) if other > 0 else (-self.n, -other)
            g = gcd(n, k)
            return self._raw(n // g, self.d * (k // g))
        if not isinstance(other, Rat):
            return NotImplemented
        return make_rat(self.n * other.d, self.d * other.n)

    def __rtruediv__(self, other):
        if isinstance(other, int):
            return make_rat(other * self.d, self.n)
        if not isinstance(other, Rat):
            return NotImplemented
        return make_rat(other.n * self.d, other.d * self.n)

    def __neg__(self):
        return make_rat(-self.n, self.d)

    def __abs__(self):
        return make_rat(abs(self.n), self.d)

    # -- comparisons -----------------------------------------------------

    def __eq__(self, other):
        p = _pair(other)
        if p is None:
            return NotImplemented
        on, od = p
        return self.n == on and self.d == od

    def __ne__(self, other):
        p = _pair(other)
        if p is None:
            return NotImplemented
        on, od = p
        return self.n != on or self.d != od

    def __lt__(self, other):
        p = _pair(other)
        if p is None:
            return NotImplemented
        on, od = p
        return self.n * od < on * self.d

    def __le__(self, other):
        p = _pair(other)
        if p is None:
            return NotImplemented
        on, od = p
        return self.n * od <= on * self.d

    def __gt__(self, other):
        p = _pair(other)
        if p is None:
            return NotImplemented
        on, od = p
        return self.n * od > on * self.d

    def __ge__(self, other):
        p = _pair(other)
        if p is None:
            return NotImplemented
        on, od = p
        return self.n * od >= on * self.d

    __hash__ = None

    # -- conversions -----------------------------------------------------

    def __bool__(self):
        return self.n != 0

    def __float__(self):
        return self.n / self.d

    def __floor__(self):
        return self.n // self.d

    def __str__(self):
        if self.d == 1:
            return str(self.n)
        return "%d/%d" % (self.n, self.d)

    def __repr__(self):
        return "Rat(%d, %d)" % (self.n, self.d)
