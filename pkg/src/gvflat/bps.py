"""Stable-pairs generating functions from an integer invariant table.

The connected series in degree d is

    F_d(q) = sum_g sum_{r | d} n_{g, d/r} * (-1)^(g-1)/r * X_r^(g-1),
    X_r = (-q)^r - 2 + (-q)^(-r),

where the g = 0 factor X_r^(-1) is expanded one-sidedly in positive
powers of q.  Exponentiating sum_d F_d x_d in the twisted algebra
produces the disconnected coefficients; taking the log goes back.

The same module holds the multiple-cover counts of the torsion theory,
    dt(n, d) = sum_{k | d, k | n} n0(d / k) / k^2,
with k | 0 read as true for every k.
"""

from __future__ import annotations

from fractions import Fraction

from .series import (
    LaurentPoly,
    TwistedSeries,
    WindowError,
    laurent_pow,
    twisted_exp,
    twisted_log,
)


class GvTable:
    """Integer table n_{g, d} indexed by genus g >= 0 and degree d >= 1.

    Negative genus entries are rejected: nothing downstream consumes
    them and silently accepting them hides input mistakes.
    """

    __slots__ = ("entries",)

    def __init__(self, entries):
        clean = {}
        for (g, d), n in dict(entries).items():
            g, d = int(g), int(d)
            if g < 0:
                raise ValueError(f"negative genus {g}")
            if d < 1:
                raise ValueError(f"degree must be positive, got {d}")
            if not isinstance(n, int):
                raise ValueError(f"invariant n_{{{g},{d}}} must be an integer")
            if n:
                clean[(g, d)] = n
        self.entries = clean

    def get(self, g: int, d: int) -> int:
        return self.entries.get((g, d), 0)

    def degrees(self):
        return sorted({d for (_, d) in self.entries})

    def genus_range(self, d: int):
        gs = [g for (g, dd) in self.entries if dd == d]
        return (min(gs), max(gs)) if gs else (0, -1)

    def genus0_row(self):
        """Degree -> n_{0, d} for the torsion-theory formulas."""
        return {d: n for (g, d), n in self.entries.items() if g == 0}

    def items(self):
        return sorted(self.entries.items())

    def __eq__(self, other):
        if not isinstance(other, GvTable):
            return NotImplemented
        return self.entries == other.entries

    def __repr__(self):
        return f"GvTable({self.entries!r})"


def bps_kernel(g: int, r: int, window) -> LaurentPoly:
    """Contribution of one (g, r) pair to the connected series, without
    the n_{g, d/r} weight."""
    if g < 0:
        raise ValueError("genus must be nonnegative")
    if r < 1:
        raise ValueError("r must be a positive integer")
    lo, hi = window
    if g == 0:
        # X_r^(-1) expanded upward: (-1/r) sum_{m >= 1} m (-1)^(rm) q^(rm)
        coeffs = {}
        m = 1
        while r * m <= hi:
            if r * m >= lo:
                coeffs[r * m] = Fraction(-((-1) ** (r * m)) * m, r)
            m += 1
        return LaurentPoly(coeffs, window, truncated=True)
    if g == 1:
        return LaurentPoly({0: Fraction(1, r)}, window)
    span = r * (g - 1)
    if span > hi or -span < lo:
        raise WindowError(
            f"window {window} cannot hold exponents +-{span} of the genus {g} kernel"
        )
    sign = (-1) ** r
    x = LaurentPoly({r: Fraction(sign), 0: Fraction(-2), -r: Fraction(sign)}, window)
    return laurent_pow(x, g - 1) * Fraction((-1) ** (g - 1), r)


def connected_series(gv: GvTable, d: int, window) -> LaurentPoly:
    """F_d(q), the connected pairs series in degree d."""
    if d < 1:
        raise ValueError("degree must be positive")
    acc = LaurentPoly.zero(window)
    for r in range(1, d + 1):
        if d % r:
            continue
        for (g, dd), n in gv.entries.items():
            if dd == d // r:
                acc = acc + bps_kernel(g, r, window) * n
    return acc


def connected_to_disconnected(f: TwistedSeries) -> TwistedSeries:
    return twisted_exp(f)


def disconnected_to_connected(z: TwistedSeries) -> TwistedSeries:
    return twisted_log(z)


class PairsTable:
    """Connected and disconnected pairs coefficients of one table, up
    to a degree cutoff and inside a q-window."""

    __slots__ = ("gv", "cutoff", "window", "connected", "disconnected")

    def __init__(self, gv, cutoff, window, connected, disconnected):
        self.gv = gv
        self.cutoff = cutoff
        self.window = window
        self.connected = connected
        self.disconnected = disconnected

    def connected_coeff(self, n: int, d: int) -> Fraction:
        return self.connected.get((d, n), Fraction(0))

    def disconnected_coeff(self, n: int, d: int) -> Fraction:
        return self.disconnected.get((d, n), Fraction(0))

    def rows(self):
        keys = sorted(set(self.connected) | set(self.disconnected))
        for d, n in keys:
            yield d, n, self.connected.get((d, n), Fraction(0)), self.disconnected.get(
                (d, n), Fraction(0)
            )


def pairs_table(gv: GvTable, cutoff: int, window) -> PairsTable:
    """Run the full pipeline: connected series per degree, then the
    twisted exponential for the disconnected theory."""
    terms = {}
    for d in range(1, cutoff + 1):
        fd = connected_series(gv, d, window)
        for e, c in fd.coeffs.items():
            terms[(d, e)] = c
    f_total = TwistedSeries(terms, cutoff, window)
    z_total = connected_to_disconnected(f_total)
    disconnected = {k: c for k, c in z_total.terms.items() if k[0] >= 1}
    return PairsTable(gv, cutoff, window, dict(terms), disconnected)


def dt_torsion(n: int, d: int, n0) -> Fraction:
    """Multiple-cover value of the torsion theory at (n, d).

    n0 maps degree -> genus-zero invariant.  Depends on n only through
    divisibility, so dt(n, d) = dt(-n, d).
    """
    if d < 1:
        raise ValueError("degree must be positive")
    acc = Fraction(0)
    for k in range(1, d + 1):
        if d % k:
            continue
        if n % k:  # 0 % k == 0, so n = 0 admits every divisor of d
            continue
        acc += Fraction(n0.get(d // k, 0), k * k)
    return acc


def dt_rank_one(n: int, d: int, gv: GvTable, window=None) -> Fraction:
    """Rank-one invariant at (n, d), which is the disconnected pairs
    coefficient of the pipeline."""
    if window is None:
        # negative exponents are bounded by d*(g-1) per factor, so a
        # window this wide keeps every product that can land on (n, d)
        gmax = max((g for (g, _) in gv.entries), default=1)
        pad = abs(n) + d * d * max(gmax - 1, 1) + 2
        window = (-pad, pad)
    return pairs_table(gv, d, window).disconnected_coeff(n, d)
