# cython: language_level=3
"""Compiled exact rational arithmetic.

Semantics must match ``skipsim._ratpy`` exactly: normalized fractions,
integral results demoted to plain int, mixed int operands supported,
instances immutable and unhashable. Values that fit comfortably in 64 bits
take a C fast path; anything larger falls back to arbitrary-precision
Python integers, so results are always exact.
"""

from cpython.long cimport PyLong_AsLongLongAndOverflow

from math import gcd as _gcd

__all__ = ["Rat", "make_rat"]

# products of two values below this bound stay well inside long long range
DEF LIM = 1073741824  # 1 << 30


cdef inline long long _ll_gcd(long long a, long long b):
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        a, b = b, a % b
    return a


cdef inline object _demote(object n, object d):
    # assumes d > 0 and gcd(n, d) == 1
    if d == 1:
        return n
    cdef Rat r = Rat.__new__(Rat)
    r.n = n
    r.d = d
    return r


cdef inline object _demote_ll(long long n, long long d):
    if d == 1:
        return n
    cdef Rat r = Rat.__new__(Rat)
    r.n = n
    r.d = d
    return r


cdef inline bint _small3(object a, object b, object c,
                         long long* x, long long* y, long long* z):
    cdef int o1 = 0, o2 = 0, o3 = 0
    x[0] = 0
    y[0] = 0
    z[0] = 0
    x[0] = PyLong_AsLongLongAndOverflow(a, &o1)
    if o1:
        return False
    y[0] = PyLong_AsLongLongAndOverflow(b, &o2)
    if o2:
        return False
    z[0] = PyLong_AsLongLongAndOverflow(c, &o3)
    if o3:
        return False
    return (-LIM < x[0] < LIM) and (-LIM < y[0] < LIM) and (-LIM < z[0] < LIM)


cpdef object make_rat(object n, object d=1):
    """Build a normalized rational, demoting exact integers to int."""
    if d == 0:
        raise ZeroDivisionError("rational with zero denominator")
    if d < 0:
        n = -n
        d = -d
    g = _gcd(n, d)
    if g > 1:
        n = n // g
        d = d // g
    return _demote(n, d)


cdef class Rat:
    """An exact fraction n/d with d > 1 after normalization."""

    cdef readonly object n
    cdef readonly object d

    def __init__(self, n, d=1):
        if d == 0:
            raise ZeroDivisionError("rational with zero denominator")
        if d < 0:
            n = -n
            d = -d
        g = _gcd(n, d)
        if g > 1:
            n = n // g
            d = d // g
        self.n = n
        self.d = d

    # -- arithmetic ------------------------------------------------------
    # Int fast paths skip renormalization where the gcd provably stays 1:
    # gcd(n + k*d, d) == gcd(n, d) == 1, so int add/sub never reduces.

    def __add__(self, other):
        cdef Rat o
        cdef long long sn, sd, k
        if isinstance(other, int):
            if _small3(self.n, self.d, other, &sn, &sd, &k):
                return _demote_ll(sn + k * sd, sd)
            return _demote(self.n + other * self.d, self.d)
        if isinstance(other, Rat):
            o = <Rat>other
            return _rat_add(self, o, 1)
        return NotImplemented

    def __radd__(self, other):
        cdef long long sn, sd, k
        if isinstance(other, int):
            if _small3(self.n, self.d, other, &sn, &sd, &k):
                return _demote_ll(sn + k * sd, sd)
            return _demote(self.n + other * self.d, self.d)
        return NotImplemented

    def __sub__(self, other):
        cdef Rat o
        cdef long long sn, sd, k
        if isinstance(other, int):
            if _small3(self.n, self.d, other, &sn, &sd, &k):
                return _demote_ll(sn - k * sd, sd)
            return _demote(self.n - other * self.d, self.d)
        if isinstance(other, Rat):
            o = <Rat>other
            return _rat_add(self, o, -1)
        return NotImplemented

    def __rsub__(self, other):
        cdef long long sn, sd, k
        if isinstance(other, int):
            if _small3(self.n, self.d, other, &sn, &sd, &k):
                return _demote_ll(k * sd - sn, sd)
            return _demote(other * self.d - self.n, self.d)
        return NotImplemented

    def __mul__(self, other):
        cdef Rat o
        cdef long long sn, sd, k, g
        if isinstance(other, int):
            if _small3(self.n, self.d, other, &sn, &sd, &k):
                g = _ll_gcd(k, sd)
                return _demote_ll(sn * (k // g), sd // g)
            gg = _gcd(other, self.d)
            return _demote(self.n * (other // gg), self.d // gg)
        if isinstance(other, Rat):
            o = <Rat>other
            return _rat_mul(self, o)
        return NotImplemented

    def __rmul__(self, other):
        cdef long long sn, sd, k, g
        if isinstance(other, int):
            if _small3(self.n, self.d, other, &sn, &sd, &k):
                g = _ll_gcd(k, sd)
                return _demote_ll(sn * (k // g), sd // g)
            gg = _gcd(other, self.d)
            return _demote(self.n * (other // gg), self.d // gg)
        return NotImplemented

    def __truediv__(self, other):
        cdef Rat o
        cdef long long sn, sd, k, g
        if isinstance(other, int):
            if other == 0:
                raise ZeroDivisionError("rational division by zero")
            if _small3(self.n, self.d, other, &sn, &sd, &k):
                if k < 0:
                    sn = -sn
                    k = -k
                g = _ll_gcd(sn, k)
                return _demote_ll(sn // g, sd * (k // g))
            n, kk = (self.n, other) if other > 0 else (-self.n, -other)
            gg = _gcd(n, kk)
            return _demote(n // gg, self.d * (kk // gg))
        if isinstance(other, Rat):
            o = <Rat>other
            return make_rat(self.n * o.d, self.d * o.n)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, int):
            return make_rat(other * self.d, self.n)
        return NotImplemented

    def __neg__(self):
        return _demote(-self.n, self.d)

    def __abs__(self):
        return _demote(-self.n if self.n < 0 else self.n, self.d)

    # -- comparisons -----------------------------------------------------

    def __eq__(self, other):
        cdef Rat o
        if isinstance(other, Rat):
            o = <Rat>other
            return self.n == o.n and self.d == o.d
        if isinstance(other, int):
            return self.d == 1 and self.n == other
        return NotImplemented

    def __ne__(self, other):
        cdef Rat o
        if isinstance(other, Rat):
            o = <Rat>other
            return self.n != o.n or self.d != o.d
        if isinstance(other, int):
            return self.d != 1 or self.n != other
        return NotImplemented

    def __lt__(self, other):
        return _cmp(self, other, 0)

    def __le__(self, other):
        return _cmp(self, other, 1)

    def __gt__(self, other):
        return _cmp(self, other, 2)

    def __ge__(self, other):
        return _cmp(self, other, 3)

    def __hash__(self):
        raise TypeError("unhashable type: 'Rat'")

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


cdef object _rat_add(Rat a, Rat b, int sign):
    cdef long long an, ad, bn, bd, num, den, g
    cdef int o1 = 0, o2 = 0, o3 = 0, o4 = 0
    an = PyLong_AsLongLongAndOverflow(a.n, &o1)
    ad = PyLong_AsLongLongAndOverflow(a.d, &o2)
    bn = PyLong_AsLongLongAndOverflow(b.n, &o3)
    bd = PyLong_AsLongLongAndOverflow(b.d, &o4)
    if not (o1 or o2 or o3 or o4) and -LIM < an < LIM and -LIM < ad < LIM \
            and -LIM < bn < LIM and -LIM < bd < LIM:
        num = an * bd + sign * bn * ad
        den = ad * bd
        g = _ll_gcd(num, den)
        if g > 1:
            num //= g
            den //= g
        return _demote_ll(num, den)
    if sign > 0:
        return make_rat(a.n * b.d + b.n * a.d, a.d * b.d)
    return make_rat(a.n * b.d - b.n * a.d, a.d * b.d)


cdef object _rat_mul(Rat a, Rat b):
    cdef long long an, ad, bn, bd, num, den, g
    cdef int o1 = 0, o2 = 0, o3 = 0, o4 = 0
    an = PyLong_AsLongLongAndOverflow(a.n, &o1)
    ad = PyLong_AsLongLongAndOverflow(a.d, &o2)
    bn = PyLong_AsLongLongAndOverflow(b.n, &o3)
    bd = PyLong_AsLongLongAndOverflow(b.d, &o4)
    if not (o1 or o2 or o3 or o4) and -LIM < an < LIM and -LIM < ad < LIM \
            and -LIM < bn < LIM and -LIM < bd < LIM:
        num = an * bn
        den = ad * bd
        g = _ll_gcd(num, den)
        if g > 1:
            num //= g
            den //= g
        return _demote_ll(num, den)
    return make_rat(a.n * b.n, a.d * b.d)


cdef object _cmp(Rat a, object other, int op):
    # op: 0 <, 1 <=, 2 >, 3 >=
    cdef Rat o
    cdef long long an, ad, bn, bd, lhs, rhs
    cdef int o1 = 0, o2 = 0, o3 = 0, o4 = 0
    if isinstance(other, Rat):
        o = <Rat>other
        an = PyLong_AsLongLongAndOverflow(a.n, &o1)
        ad = PyLong_AsLongLongAndOverflow(a.d, &o2)
        bn = PyLong_AsLongLongAndOverflow(o.n, &o3)
        bd = PyLong_AsLongLongAndOverflow(o.d, &o4)
        if not (o1 or o2 or o3 or o4) and -LIM < an < LIM and -LIM < ad < LIM \
                and -LIM < bn < LIM and -LIM < bd < LIM:
            lhs = an * bd
            rhs = bn * ad
        else:
            big_l = a.n * o.d
            big_r = o.n * a.d
            if op == 0:
                return big_l < big_r
            if op == 1:
                return big_l <= big_r
            if op == 2:
                return big_l > big_r
            return big_l >= big_r
    elif isinstance(other, int):
        an = PyLong_AsLongLongAndOverflow(a.n, &o1)
        ad = PyLong_AsLongLongAndOverflow(a.d, &o2)
        bn = PyLong_AsLongLongAndOverflow(other, &o3)
        if not (o1 or o2 or o3) and -LIM < an < LIM and -LIM < ad < LIM \
                and -LIM < bn < LIM:
            lhs = an
            rhs = bn * ad
        else:
            big_l = a.n
            big_r = other * a.d
            if op == 0:
                return big_l < big_r
            if op == 1:
                return big_l <= big_r
            if op == 2:
                return big_l > big_r
            return big_l >= big_r
    else:
        return NotImplemented
    if op == 0:
        return lhs < rhs
    if op == 1:
        return lhs <= rhs
    if op == 2:
        return lhs > rhs
    return lhs >= rhs
