"""Bernoulli numbers, even zeta values and polylogarithms at
nonpositive integer order, all exact.

Li_{-p}(z) is the rational function N_p(z) / (1-z)^(p+1) obtained by
applying z d/dz to Li_0 = z/(1-z) p times; its Taylor coefficients are
[z^m] Li_{-p} = m^p, which downstream code reads off the expansion of
the rational function rather than assuming.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

_BERNOULLI_CACHE = {0: Fraction(1), 1: Fraction(-1, 2)}


def bernoulli(m: int) -> Fraction:
    """Bernoulli number B_m (B_1 = -1/2 convention).

    Only m = 0, 1 and even m are meaningful inputs here; odd m > 1 is
    rejected rather than silently returning zero.
    """
    if not isinstance(m, int) or m < 0:
        raise ValueError("m must be a nonnegative integer")
    if m % 2 == 1 and m > 1:
        raise ValueError(f"B_{m} vanishes; refusing odd index above 1")
    if m in _BERNOULLI_CACHE:
        return _BERNOULLI_CACHE[m]
    top = max(_BERNOULLI_CACHE) + 1
    for n in range(top, m + 1):
        acc = Fraction(0)
        for k in range(n):
            acc += math.comb(n + 1, k) * _BERNOULLI_CACHE[k]
        _BERNOULLI_CACHE[n] = -acc / (n + 1)
    return _BERNOULLI_CACHE[m]


def zeta_even(m: int) -> Fraction:
    """zeta(m) / pi^m for positive even m, as an exact Fraction."""
    if not isinstance(m, int) or m <= 0 or m % 2:
        raise ValueError("zeta_even needs a positive even integer")
    half = m // 2
    return Fraction((-1) ** (half + 1) * 2 ** (m - 1)) * bernoulli(m) / math.factorial(m)


def _poly_trim(c):
    c = list(c)
    while len(c) > 1 and not c[-1]:
        c.pop()
    return tuple(c)


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return _poly_trim(out)


def _poly_deriv(a):
    if len(a) == 1:
        return (Fraction(0),)
    return _poly_trim([i * a[i] for i in range(1, len(a))])


def _poly_eval(a, z):
    acc = 0
    for c in reversed(a):
        acc = acc * z + c
    return acc


def _poly_div_one_minus_z(a):
    # a(z) = (1 - z) q(z), valid only when a(1) = 0
    if _poly_eval(a, Fraction(1)):
        raise ValueError("polynomial does not vanish at z = 1")
    q = []
    carry = Fraction(0)
    for i in range(len(a) - 1):
        carry = carry + a[i]
        q.append(carry)
    return _poly_trim(q) if q else (Fraction(0),)


@dataclass(frozen=True)
class RationalFunction:
    """num(z) / (1 - z)^den_power, kept with no common (1 - z) factor."""

    num: tuple
    den_power: int

    @classmethod
    def make(cls, num, den_power: int) -> "RationalFunction":
        num = _poly_trim(Fraction(c) for c in num)
        den_power = int(den_power)
        if den_power < 0:
            raise ValueError("den_power must be nonnegative")
        while den_power > 0 and num != (Fraction(0),) and not _poly_eval(num, Fraction(1)):
            num = _poly_div_one_minus_z(num)
            den_power -= 1
        return cls(num, den_power)

    def z_deriv(self) -> "RationalFunction":
        """z * d/dz, the shift operator on Taylor coefficients."""
        k = self.den_power
        npoly = self.num
        # d/dz: (N'(1-z) + kN) / (1-z)^(k+1)
        term1 = _poly_mul(_poly_deriv(npoly), (Fraction(1), Fraction(-1)))
        term2 = tuple(k * c for c in npoly)
        m = max(len(term1), len(term2))
        summed = [Fraction(0)] * m
        for i, c in enumerate(term1):
            summed[i] += c
        for i, c in enumerate(term2):
            summed[i] += c
        shifted = (Fraction(0),) + _poly_trim(summed)
        return RationalFunction.make(shifted, k + 1)

    def eval(self, z):
        if isinstance(z, int):
            z = Fraction(z)
        den = (1 - z) ** self.den_power if self.den_power else 1
        if not den:
            raise ZeroDivisionError("pole at z = 1")
        return _poly_eval(self.num, z) / den

    def series(self, order: int):
        """Taylor coefficients [z^0 .. z^order] as Fractions."""
        out = [Fraction(0)] * (order + 1)
        k = self.den_power
        if k == 0:
            for i, c in enumerate(self.num[: order + 1]):
                out[i] = c
            return out
        # (1-z)^-k has coefficients C(k-1+j, j)
        geom = [Fraction(math.comb(k - 1 + j, j)) for j in range(order + 1)]
        for i, c in enumerate(self.num):
            if not c or i > order:
                continue
            for j in range(order + 1 - i):
                out[i + j] += c * geom[j]
        return out


_POLYLOG_CACHE = {}


def polylog_nonpos(p: int) -> RationalFunction:
    """Li_{-p} for p >= 0 as a rational function with denominator
    (1 - z)^(p + 1)."""
    if not isinstance(p, int) or p < 0:
        raise ValueError("p must be a nonnegative integer")
    if p in _POLYLOG_CACHE:
        return _POLYLOG_CACHE[p]
    if 0 not in _POLYLOG_CACHE:
        _POLYLOG_CACHE[0] = RationalFunction.make((Fraction(0), Fraction(1)), 1)
    top = max(_POLYLOG_CACHE)
    for n in range(top + 1, p + 1):
        _POLYLOG_CACHE[n] = _POLYLOG_CACHE[n - 1].z_deriv()
    return _POLYLOG_CACHE[p]


def polylog_eval(p: int, z):
    """Li_{-p}(z) at a point away from z = 1."""
    return polylog_nonpos(p).eval(z)
