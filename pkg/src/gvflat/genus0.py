"""Genus-zero potential as an exact bi-series and its numeric twin.

Coefficients live in Z[pi, 1/pi, i] with rational weights (PiNumber),
so the identity

    -(1/(2 pi i)) d/dt (potential) = d/dv (recovered series)

can be checked coefficient by coefficient with no floats involved.
The series variable lam is 2 pi times the time coordinate t, hence
d/dt = 2 pi d/dlam, and numeric evaluation substitutes lam = 2 pi t.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import specialfn
from ._backend import hot


class PiNumber:
    """Sum of terms c * pi^a * i^b with c rational, a integer, b in
    {0, 1}.  Exact and closed under ring operations."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for (a, b), c in terms.items():
                c = Fraction(c)
                if c:
                    clean[(int(a), int(b) & 1)] = c
        self.terms = clean

    @classmethod
    def make(cls, c, pi_pow: int = 0, i_pow: int = 0):
        c = Fraction(c)
        if i_pow % 4 in (2, 3):
            c = -c
        return cls({(pi_pow, i_pow % 2): c})

    @classmethod
    def zero(cls):
        return cls({})

    def __add__(self, other):
        if not isinstance(other, PiNumber):
            return NotImplemented
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = out.get(k, Fraction(0)) + c
            if v:
                out[k] = v
            elif k in out:
                del out[k]
        return PiNumber(out)

    def __neg__(self):
        return PiNumber({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, PiNumber):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = PiNumber.make(other)
        if not isinstance(other, PiNumber):
            return NotImplemented
        out = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                c = c1 * c2
                b = b1 + b2
                if b == 2:
                    b, c = 0, -c
                k = (a1 + a2, b)
                v = out.get(k, Fraction(0)) + c
                if v:
                    out[k] = v
                elif k in out:
                    del out[k]
        return PiNumber(out)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, PiNumber):
            return NotImplemented
        return self.terms == other.terms

    def to_complex(self) -> complex:
        acc = 0j
        for (a, b), c in self.terms.items():
            v = float(c) * math.pi ** a
            acc += 1j * v if b else v
        return acc

    def __repr__(self):
        if not self.terms:
            return "PiNumber(0)"
        bits = []
        for (a, b), c in sorted(self.terms.items()):
            s = f"{c}"
            if a:
                s += f"*pi^{a}"
            if b:
                s += "*i"
            bits.append(s)
        return "PiNumber(" + " + ".join(bits) + ")"


_I = PiNumber.make(1, 0, 1)


class FormalBiSeries:
    """Finite sum of terms coeff * lam^a * Q^m with PiNumber
    coefficients, a >= 0 and m >= 1."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for (a, m), c in terms.items():
                if not isinstance(c, PiNumber):
                    c = PiNumber.make(c)
                if not c.is_zero():
                    clean[(int(a), int(m))] = c
        self.terms = clean

    def coefficient(self, a: int, m: int) -> PiNumber:
        return self.terms.get((a, m), PiNumber.zero())

    def scale(self, c: PiNumber) -> "FormalBiSeries":
        return FormalBiSeries({k: v * c for k, v in self.terms.items()})

    def __sub__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = self.coefficient(*k) - c
        return FormalBiSeries(out)

    def d_dt(self) -> "FormalBiSeries":
        """d/dt = 2 pi d/dlam since lam = 2 pi t."""
        out = {}
        for (a, m), c in self.terms.items():
            if a >= 1:
                out[(a - 1, m)] = c * PiNumber.make(2 * a, 1)
        return FormalBiSeries(out)

    def d_dv(self) -> "FormalBiSeries":
        """d/dv acting on Q = exp(2 pi i v): multiplies Q^m by 2 pi i m."""
        out = {}
        for (a, m), c in self.terms.items():
            out[(a, m)] = c * PiNumber.make(2 * m, 1, 1)
        return FormalBiSeries(out)

    def eval(self, t: float, v: complex) -> complex:
        """Numeric value at lam = 2 pi t, Q = exp(2 pi i v)."""
        q = np.exp(2j * np.pi * v)
        lam = 2 * math.pi * t
        acc = 0j
        for (a, m), c in self.terms.items():
            acc += c.to_complex() * lam ** a * q ** m
        return complex(acc)

    def __eq__(self, other):
        if not isinstance(other, FormalBiSeries):
            return NotImplemented
        return self.terms == other.terms

    def __repr__(self):
        bits = [f"lam^{a} Q^{m}: {c!r}" for (a, m), c in sorted(self.terms.items())]
        return "FormalBiSeries(" + "; ".join(bits) + ")"


def potential_series(n0: int, g_max: int, n_q: int) -> FormalBiSeries:
    """Genus expansion of the potential of a single genus-zero class:

        coeff(lam^(2g-1) Q^m) = n0 * B_{2g}/(2g)! * (2 pi)^(2g-1) * m^(2g-2),

    where the Q^m weights are read off the rational-function expansion
    of Li_{2-2g}."""
    if g_max < 1 or n_q < 1:
        raise ValueError("need g_max >= 1 and n_q >= 1")
    terms = {}
    for g in range(1, g_max + 1):
        li = specialfn.polylog_nonpos(2 * g - 2).series(n_q)
        base = Fraction(n0) * specialfn.bernoulli(2 * g) / math.factorial(2 * g)
        base *= Fraction(2) ** (2 * g - 1)
        for m in range(1, n_q + 1):
            c = base * li[m]
            if c:
                terms[(2 * g - 1, m)] = PiNumber.make(c, 2 * g - 1)
    return FormalBiSeries(terms)


def gv_genus0_series(n0: int, g_max: int, n_q: int) -> FormalBiSeries:
    """Series recovered from the potential by the flatness identity:

        coeff(lam^(2g-2) Q^m) = n0 * B_{2g}/((2g) (2g-2)!) * (2 pi)^(2g-2) * m^(2g-3)

    for g >= 2 (the lam^0 layer is the anomalous order and is left
    out)."""
    if g_max < 2 or n_q < 1:
        raise ValueError("need g_max >= 2 and n_q >= 1")
    terms = {}
    for g in range(2, g_max + 1):
        li = specialfn.polylog_nonpos(2 * g - 3).series(n_q)
        base = Fraction(n0) * specialfn.bernoulli(2 * g)
        base /= (2 * g) * math.factorial(2 * g - 2)
        base *= Fraction(2) ** (2 * g - 2)
        for m in range(1, n_q + 1):
            c = base * li[m]
            if c:
                terms[(2 * g - 2, m)] = PiNumber.make(c, 2 * g - 2)
    return FormalBiSeries(terms)


@dataclass
class Theorem1Report:
    ok: bool
    checked: int
    mismatches: list
    details: list

    def __bool__(self):
        return self.ok


def theorem1_compare(pot: FormalBiSeries, gvs: FormalBiSeries) -> Theorem1Report:
    """Check -(1/(2 pi i)) d/dt pot == d/dv gvs on every strictly
    positive lam power, exactly."""
    # -(1/(2 pi i)) = (1/2) pi^-1 i
    lhs = pot.d_dt().scale(PiNumber.make(Fraction(1, 2), -1, 1))
    rhs = gvs.d_dv()
    keys = {k for k in lhs.terms if k[0] >= 1} | {k for k in rhs.terms if k[0] >= 1}
    mismatches = []
    details = []
    for k in sorted(keys):
        a, m = k
        left, right = lhs.coefficient(a, m), rhs.coefficient(a, m)
        g = (a + 2) // 2  # lam^(2g-2) layer
        same = left == right
        details.append((g, a, m, same))
        if not same:
            mismatches.append((g, a, m, left, right))
    return Theorem1Report(not mismatches, len(keys), mismatches, details)


def theorem1_check(n0: int, g_max: int, n_q: int) -> Theorem1Report:
    pot = potential_series(n0, g_max, n_q)
    gvs = gv_genus0_series(n0, g_max, n_q)
    return theorem1_compare(pot, gvs)


@hot
def _resummed_double_sum(t, vre, vim, k_max, n_max):
    k = np.arange(1, k_max + 1).reshape((-1, 1)).astype(np.float64)
    n = np.arange(1, n_max + 1).astype(np.float64)
    phase = np.exp(2j * np.pi * n * (vre + 1j * vim))
    a = (2.0 * np.pi / k) * t
    lor = a / (1.0 + (a * n) ** 2)
    return np.sum((lor / (np.pi * k)) * phase)


def genus0_potential_numeric(n0: int, t: float, v: complex, k_max: int = 60, n_max: int = 60):
    """Resummed genus-zero potential of n0 point-like classes at time
    t and Kahler parameter v (Im v > 0).

    Returns (value, tail_bound) where tail_bound controls both
    truncations.  The value is odd in t.
    """
    if t == 0:
        return 0j, 0.0
    if v.imag <= 0:
        raise ValueError("Im v must be positive")
    rho = math.exp(-2 * math.pi * v.imag)
    s = n0 * _resummed_double_sum(float(abs(t)), float(v.real), float(v.imag), int(k_max), int(n_max))
    # n-tail per k is at most (2t/k) rho^(n_max+1)/(1-rho); summed over
    # k it stays below 2t (1+log k_max) rho^(n_max+1)/(1-rho).  The
    # k-tail is bounded by 2t rho/((1-rho) k_max).
    n_tail = 2 * abs(t) * (1 + math.log(k_max)) * rho ** (n_max + 1) / (1 - rho)
    k_tail = 2 * abs(t) * rho / ((1 - rho) * k_max)
    bound = abs(n0) * (n_tail + k_tail)
    val = complex(s) if t > 0 else -complex(s)
    return val, bound
