"""Exact series arithmetic: windowed Laurent polynomials in q,
truncated Taylor series with pluggable coefficient rings, and the
twisted monomial algebra used to pass between connected and
disconnected generating functions.

All coefficients are kept exact.  The two coefficient rings used in
practice are Fraction and QComplex (Gaussian rationals); float/complex
coefficients also work wherever no division by a coefficient happens.
"""

from __future__ import annotations

from fractions import Fraction

from . import lattice


class WindowError(ValueError):
    pass


def _check_window(window):
    lo, hi = window
    lo, hi = int(lo), int(hi)
    if lo > hi:
        raise WindowError(f"empty window {window!r}")
    return (lo, hi)


def _ring_one(x):
    # x ** 0 is the multiplicative identity for Fraction, QComplex and
    # the builtin numeric types alike
    return x ** 0


def _ring_inv(x):
    if hasattr(x, "inverse"):
        return x.inverse()
    return _ring_one(x) / x


class QComplex:
    """Gaussian rational a + b*i with Fraction components."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def i(cls):
        return cls(0, 1)

    def times_i(self) -> "QComplex":
        return QComplex(-self.im, self.re)

    def inverse(self) -> "QComplex":
        n = self.re * self.re + self.im * self.im
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return QComplex(self.re / n, -self.im / n)

    def __add__(self, other):
        other = _as_qcomplex(other)
        if other is NotImplemented:
            return NotImplemented
        return QComplex(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_qcomplex(other)
        if other is NotImplemented:
            return NotImplemented
        return QComplex(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _as_qcomplex(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __neg__(self):
        return QComplex(-self.re, -self.im)

    def __mul__(self, other):
        other = _as_qcomplex(other)
        if other is NotImplemented:
            return NotImplemented
        return QComplex(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_qcomplex(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("QComplex powers must be nonnegative integers")
        out = QComplex(1, 0)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        other = _as_qcomplex(other)
        if other is NotImplemented:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re or self.im)

    def to_complex(self) -> complex:
        return complex(self.re) + 1j * complex(self.im)

    def __repr__(self):
        return f"QComplex({self.re}, {self.im})"


def _as_qcomplex(x):
    if isinstance(x, QComplex):
        return x
    if isinstance(x, (int, Fraction)):
        return QComplex(x, 0)
    return NotImplemented


class LaurentPoly:
    """Laurent polynomial in q supported on a fixed exponent window.

    Binary operations require identical windows.  Multiplication drops
    products that leave the window and marks the result truncated;
    everything kept is exact.
    """

    __slots__ = ("coeffs", "window", "truncated")

    def __init__(self, coeffs, window, truncated=False):
        window = _check_window(window)
        lo, hi = window
        clean = {}
        for e, c in coeffs.items():
            if not (lo <= e <= hi):
                raise WindowError(f"exponent {e} outside window {window}")
            c = Fraction(c) if isinstance(c, int) else c
            if c:
                clean[int(e)] = c
        self.coeffs = clean
        self.window = window
        self.truncated = bool(truncated)

    @classmethod
    def zero(cls, window):
        return cls({}, window)

    @classmethod
    def unit(cls, window):
        return cls({0: Fraction(1)}, window)

    @classmethod
    def monomial(cls, e, c, window):
        return cls({e: c}, window)

    def coefficient(self, e):
        return self.coeffs.get(e, Fraction(0))

    def support(self):
        return sorted(self.coeffs)

    def _binary_window(self, other):
        if self.window != other.window:
            raise WindowError(f"window mismatch {self.window} vs {other.window}")

    def __add__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        self._binary_window(other)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out.get(e, Fraction(0)) + c
        return LaurentPoly(out, self.window, self.truncated or other.truncated)

    def __neg__(self):
        return LaurentPoly({e: -c for e, c in self.coeffs.items()}, self.window, self.truncated)

    def __sub__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return LaurentPoly(
                {e: c * other for e, c in self.coeffs.items()}, self.window, self.truncated
            )
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        self._binary_window(other)
        lo, hi = self.window
        out = {}
        dropped = False
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                if lo <= e <= hi:
                    out[e] = out.get(e, Fraction(0)) + c1 * c2
                else:
                    dropped = True
        return LaurentPoly(out, self.window, self.truncated or other.truncated or dropped)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.window == other.window and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.window, tuple(sorted(self.coeffs.items()))))

    def __repr__(self):
        terms = ", ".join(f"{e}: {c}" for e, c in sorted(self.coeffs.items()))
        flag = ", truncated" if self.truncated else ""
        return f"LaurentPoly({{{terms}}}, window={self.window}{flag})"


def _dict_mul(a, b):
    out = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = e1 + e2
            v = out.get(e, Fraction(0)) + c1 * c2
            if v:
                out[e] = v
            elif e in out:
                del out[e]
    return out


def laurent_pow(p: LaurentPoly, k: int) -> LaurentPoly:
    """p**k with integer k.  Negative k inverts the lowest term and
    expands the one-sided geometric series, truncated to the window."""
    if k >= 0:
        out = LaurentPoly.unit(p.window)
        base = p
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out
    if not p.coeffs:
        raise ZeroDivisionError("negative power of zero")
    m = min(p.coeffs)
    c = p.coeffs[m]
    # u = p * q^-m / c - 1 has support in [1, ...), so the geometric
    # series for the inverse terminates once i * min(supp u) leaves
    # the window
    u = {}
    for e, a in p.coeffs.items():
        if e != m:
            u[e - m] = a / c
    lo, hi = p.window
    inv = {0: Fraction(1)}
    if u:
        step = min(u)
        term = {0: Fraction(1)}
        i = 0
        while (i + 1) * step <= hi - m:
            i += 1
            term = _dict_mul(term, {e: -a for e, a in u.items()})
            for e, a in term.items():
                v = inv.get(e, Fraction(0)) + a
                if v:
                    inv[e] = v
                elif e in inv:
                    del inv[e]
    shifted = {}
    dropped = bool(u)
    for e, a in inv.items():
        ee = e - m
        if lo <= ee <= hi:
            shifted[ee] = a / c
        else:
            dropped = True
    result = LaurentPoly(shifted, p.window, p.truncated or dropped)
    if k == -1:
        return result
    return laurent_pow(result, -k)


class TaylorSeries:
    """Truncated power series sum_k c_k u^k, exact through u^order."""

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs, order=None):
        coeffs = list(coeffs)
        if order is None:
            order = len(coeffs) - 1
        if order < 0:
            raise ValueError("order must be nonnegative")
        if len(coeffs) < order + 1:
            pad = Fraction(0) if not coeffs else coeffs[0] * 0
            coeffs = coeffs + [pad] * (order + 1 - len(coeffs))
        self.coeffs = tuple(coeffs[: order + 1])
        self.order = order

    @classmethod
    def zero(cls, order, like=Fraction(0)):
        return cls([like * 0] * (order + 1), order)

    @classmethod
    def one(cls, order, like=Fraction(1)):
        z = like * 0
        return cls([_ring_one(like)] + [z] * order, order)

    def coefficient(self, k):
        if k < 0:
            raise IndexError("negative exponent in a Taylor series")
        if k > self.order:
            raise IndexError(f"coefficient {k} beyond truncation order {self.order}")
        return self.coeffs[k]

    def truncate(self, order):
        if order > self.order:
            raise ValueError("cannot extend a truncated series")
        return TaylorSeries(self.coeffs[: order + 1], order)

    def _align(self, other):
        n = min(self.order, other.order)
        return self.truncate(n), other.truncate(n)

    def __add__(self, other):
        if not isinstance(other, TaylorSeries):
            return NotImplemented
        a, b = self._align(other)
        return TaylorSeries([x + y for x, y in zip(a.coeffs, b.coeffs)], a.order)

    def __neg__(self):
        return TaylorSeries([-x for x in self.coeffs], self.order)

    def __sub__(self, other):
        if not isinstance(other, TaylorSeries):
            return NotImplemented
        return self + (-other)

    def scalar_mul(self, c):
        return TaylorSeries([c * x for x in self.coeffs], self.order)

    def __mul__(self, other):
        if not isinstance(other, TaylorSeries):
            return self.scalar_mul(other)
        a, b = self._align(other)
        n = a.order
        z = a.coeffs[0] * 0
        out = [z] * (n + 1)
        for i, x in enumerate(a.coeffs):
            if not x:
                continue
            for j in range(0, n - i + 1):
                y = b.coeffs[j]
                if y:
                    out[i + j] = out[i + j] + x * y
        return TaylorSeries(out, n)

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("TaylorSeries powers must be nonnegative integers")
        out = TaylorSeries.one(self.order, like=_ring_one(self.coeffs[0]))
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def derivative(self):
        if self.order == 0:
            return TaylorSeries([self.coeffs[0] * 0], 0)
        out = [(k * _ring_one(self.coeffs[k])) * self.coeffs[k] for k in range(1, self.order + 1)]
        return TaylorSeries(out, self.order - 1)

    def __eq__(self, other):
        if not isinstance(other, TaylorSeries):
            return NotImplemented
        return self.order == other.order and all(
            x == y for x, y in zip(self.coeffs, other.coeffs)
        )

    def __repr__(self):
        return f"TaylorSeries({list(self.coeffs)!r})"


def taylor_inverse(ts: TaylorSeries) -> TaylorSeries:
    """Multiplicative inverse of a series with invertible constant term."""
    a0 = ts.coeffs[0]
    if not a0:
        raise ZeroDivisionError("constant term is zero")
    inv0 = _ring_inv(a0)
    out = [inv0]
    for k in range(1, ts.order + 1):
        acc = ts.coeffs[0] * 0
        for j in range(1, k + 1):
            acc = acc + ts.coeffs[j] * out[k - j]
        out.append(-(inv0 * acc))
    return TaylorSeries(out, ts.order)


class LaurentTaylor:
    """Series sum_{k >= lead} c_k u^k with a finite principal part,
    exact through u^order."""

    __slots__ = ("lead", "coeffs", "order")

    def __init__(self, lead, coeffs, order=None):
        coeffs = list(coeffs)
        lead = int(lead)
        if order is None:
            order = lead + len(coeffs) - 1
        n = order - lead + 1
        if n <= 0:
            raise ValueError("order below lead")
        if len(coeffs) < n:
            pad = Fraction(0) if not coeffs else coeffs[0] * 0
            coeffs = coeffs + [pad] * (n - len(coeffs))
        self.lead = lead
        self.coeffs = tuple(coeffs[:n])
        self.order = order

    def coefficient(self, e):
        if e < self.lead:
            return self.coeffs[0] * 0
        if e > self.order:
            raise IndexError(f"coefficient {e} beyond truncation order {self.order}")
        return self.coeffs[e - self.lead]

    def principal_part(self):
        """Pairs (e, c) with e < 0 and c nonzero."""
        return [
            (self.lead + i, c)
            for i, c in enumerate(self.coeffs)
            if self.lead + i < 0 and c
        ]

    def regular_part(self) -> TaylorSeries:
        z = self.coeffs[0] * 0
        out = [z] * (self.order + 1)
        for i, c in enumerate(self.coeffs):
            e = self.lead + i
            if e >= 0:
                out[e] = c
        return TaylorSeries(out, self.order)

    def derivative(self) -> "LaurentTaylor":
        out = []
        for i, c in enumerate(self.coeffs):
            e = self.lead + i
            out.append((e * _ring_one(c)) * c if c else c)
        # term e -> e-1; the e=0 slot differentiates to zero and is
        # dropped by coefficient bookkeeping, not by reindexing
        return LaurentTaylor(self.lead - 1, out, self.order - 1)

    def scalar_mul(self, c):
        return LaurentTaylor(self.lead, [c * x for x in self.coeffs], self.order)

    def __add__(self, other):
        if isinstance(other, TaylorSeries):
            other = LaurentTaylor(0, list(other.coeffs), other.order)
        if not isinstance(other, LaurentTaylor):
            return NotImplemented
        lead = min(self.lead, other.lead)
        order = min(self.order, other.order)
        z = self.coeffs[0] * 0
        out = [z] * (order - lead + 1)
        for src in (self, other):
            for i, c in enumerate(src.coeffs):
                e = src.lead + i
                if e <= order:
                    out[e - lead] = out[e - lead] + c
        return LaurentTaylor(lead, out, order)

    __radd__ = __add__

    def __neg__(self):
        return LaurentTaylor(self.lead, [-c for c in self.coeffs], self.order)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, TaylorSeries):
            other = LaurentTaylor(0, list(other.coeffs), other.order)
        if not isinstance(other, LaurentTaylor):
            return self.scalar_mul(other)
        lead = self.lead + other.lead
        order = min(self.order + other.lead, other.order + self.lead)
        z = self.coeffs[0] * 0
        out = [z] * (order - lead + 1)
        for i, x in enumerate(self.coeffs):
            if not x:
                continue
            e1 = self.lead + i
            for j, y in enumerate(other.coeffs):
                if not y:
                    continue
                e = e1 + other.lead + j
                if e <= order:
                    out[e - lead] = out[e - lead] + x * y
        return LaurentTaylor(lead, out, order)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, LaurentTaylor):
            return NotImplemented
        lo = min(self.lead, other.lead)
        hi = min(self.order, other.order)
        return all(self.coefficient(e) == other.coefficient(e) for e in range(lo, hi + 1))

    def __repr__(self):
        terms = ", ".join(
            f"u^{self.lead + i}: {c}" for i, c in enumerate(self.coeffs) if c
        )
        return f"LaurentTaylor({terms or '0'}, order={self.order})"


def taylor_sin_power(r: int, e: int, order: int):
    """(2 sin(r u / 2))**e as an exact series in u.

    Nonnegative e gives a TaylorSeries, negative even e a LaurentTaylor
    with lead exponent e.  Odd negative exponents are rejected since
    the corresponding fractional-power branch is never needed.
    """
    if r < 1:
        raise ValueError("r must be a positive integer")
    if e < 0 and e % 2:
        raise ValueError("negative odd exponents are not supported")
    # 2 sin(ru/2) = u * T(u) with T(0) = r; T has the (2j+1)!
    # denominators of the sine series
    slack = order + abs(e)
    half = Fraction(r, 2)
    t = []
    for k in range(0, slack + 1):
        if k % 2 == 0:
            j = k // 2
            num = Fraction((-1) ** j * 2) * half ** (2 * j + 1)
            den = 1
            for i in range(2, 2 * j + 2):
                den *= i
            t.append(num / den)
        else:
            t.append(Fraction(0))
    tser = TaylorSeries(t, slack)
    if e >= 0:
        full = tser ** e  # this is (S/u)^e, shift by u^e
        z = Fraction(0)
        out = [z] * (order + 1)
        for k in range(0, order - e + 1):
            out[k + e] = full.coeffs[k]
        return TaylorSeries(out, order)
    m = -e
    inv = taylor_inverse(tser) ** m
    return LaurentTaylor(e, list(inv.coeffs[: order - e + 1]), order)


def taylor_compose_exp(v, order: int) -> TaylorSeries:
    """exp(i u v) as a series in u.

    Exact (QComplex coefficients) when v is a QComplex, Fraction or
    int; complex floats otherwise.
    """
    if isinstance(v, (int, Fraction)):
        v = QComplex(v, 0)
    if isinstance(v, QComplex):
        iv = v.times_i()
        one = QComplex(1, 0)
    else:
        iv = 1j * complex(v)
        one = 1.0 + 0.0j
    out = [one]
    term = one
    for k in range(1, order + 1):
        term = term * iv
        if isinstance(term, QComplex):
            term = term * QComplex(Fraction(1, k), 0)
        else:
            term = term / k
        out.append(term)
    return TaylorSeries(out, order)


class TwistedSeries:
    """Element of the twisted algebra spanned by q^n x_d, with d a
    curve degree between 0 and a cutoff and n a q-exponent in a fixed
    window.  The product twists by the sign of the skew pairing of the
    underlying torsion charges (always +1 here, but routed through the
    lattice so the convention lives in one place)."""

    __slots__ = ("terms", "cutoff", "window")

    def __init__(self, terms, cutoff, window):
        window = _check_window(window)
        lo, hi = window
        cutoff = int(cutoff)
        if cutoff < 0:
            raise ValueError("cutoff must be nonnegative")
        clean = {}
        for (d, n), c in terms.items():
            if d < 0:
                raise ValueError("negative curve degree")
            if d > cutoff or not (lo <= n <= hi):
                continue
            c = Fraction(c) if isinstance(c, int) else c
            if c:
                clean[(int(d), int(n))] = c
        self.terms = clean
        self.cutoff = cutoff
        self.window = window

    @classmethod
    def one(cls, cutoff, window):
        return cls({(0, 0): Fraction(1)}, cutoff, window)

    def coefficient(self, d, n):
        return self.terms.get((d, n), Fraction(0))

    def _compat(self, other):
        if self.cutoff != other.cutoff or self.window != other.window:
            raise WindowError("cutoff/window mismatch")

    def __add__(self, other):
        if not isinstance(other, TwistedSeries):
            return NotImplemented
        self._compat(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + c
        return TwistedSeries(out, self.cutoff, self.window)

    def __neg__(self):
        return TwistedSeries(
            {k: -c for k, c in self.terms.items()}, self.cutoff, self.window
        )

    def __sub__(self, other):
        if not isinstance(other, TwistedSeries):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return TwistedSeries(
                {k: c * other for k, c in self.terms.items()}, self.cutoff, self.window
            )
        if not isinstance(other, TwistedSeries):
            return NotImplemented
        self._compat(other)
        lo, hi = self.window
        out = {}
        for (d1, n1), c1 in self.terms.items():
            for (d2, n2), c2 in other.terms.items():
                d, n = d1 + d2, n1 + n2
                if d > self.cutoff or not (lo <= n <= hi):
                    continue
                sign = lattice.twisted_sign(
                    lattice.torsion_class(n1, d1), lattice.torsion_class(n2, d2)
                )
                out[(d, n)] = out.get((d, n), Fraction(0)) + sign * c1 * c2
        return TwistedSeries(out, self.cutoff, self.window)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, TwistedSeries):
            return NotImplemented
        return (
            self.cutoff == other.cutoff
            and self.window == other.window
            and self.terms == other.terms
        )

    def degree_zero_part(self):
        return {k: c for k, c in self.terms.items() if k[0] == 0}

    def __repr__(self):
        terms = ", ".join(
            f"q^{n} x_{d}: {c}" for (d, n), c in sorted(self.terms.items())
        )
        return f"TwistedSeries({terms or '0'})"


def _degree_slices(terms):
    out = {}
    for (d, n), c in terms.items():
        out.setdefault(d, {})[n] = c
    return out


def _slice_product_into(acc, part_a, deg_a, part_b, deg_b, weight, window):
    lo, hi = window
    for n1, c1 in part_a.items():
        for n2, c2 in part_b.items():
            n = n1 + n2
            if not (lo <= n <= hi):
                continue
            sign = lattice.twisted_sign(
                lattice.torsion_class(n1, deg_a), lattice.torsion_class(n2, deg_b)
            )
            acc[n] = acc.get(n, Fraction(0)) + weight * sign * c1 * c2


def twisted_exp(f: TwistedSeries) -> TwistedSeries:
    """exp of a series with no degree-zero part.

    Built from the grading recursion d z_d = sum_k k f_k z_{d-k} rather
    than the power series: the window clip makes the product
    non-associative, and only the recursion form stays exactly
    invertible under truncation (twisted_log solves the same recursion
    the other way, so the round trip cancels term by term).  Where
    nothing clips the two forms agree.
    """
    if f.degree_zero_part():
        raise ValueError("exp requires a series with no degree-zero terms")
    fd = _degree_slices(f.terms)
    zd = {0: {0: Fraction(1)}}
    for d in range(1, f.cutoff + 1):
        acc = {}
        for k in range(1, d + 1):
            if k in fd and (d - k) in zd:
                _slice_product_into(acc, fd[k], k, zd[d - k], d - k,
                                    Fraction(k), f.window)
        zd[d] = {n: c / d for n, c in acc.items() if c}
    terms = {(d, n): c for d, part in zd.items() for n, c in part.items()}
    return TwistedSeries(terms, f.cutoff, f.window)


def twisted_log(g: TwistedSeries) -> TwistedSeries:
    """log of a series with degree-zero part exactly 1.  Inverts the
    recursion used by twisted_exp, so the pair is exactly mutually
    inverse within the cutoff and window."""
    dz = g.degree_zero_part()
    if dz != {(0, 0): Fraction(1)}:
        raise ValueError("log requires degree-zero part equal to 1")
    zd = _degree_slices(g.terms)
    fd = {}
    for d in range(1, g.cutoff + 1):
        acc = {n: d * c for n, c in zd.get(d, {}).items()}
        for k in range(1, d):
            if k in fd and (d - k) in zd:
                _slice_product_into(acc, fd[k], k, zd[d - k], d - k,
                                    Fraction(-k), g.window)
        fd[d] = {n: c / d for n, c in acc.items() if c}
    terms = {(d, n): c for d, part in fd.items() for n, c in part.items()}
    return TwistedSeries(terms, g.cutoff, g.window)
