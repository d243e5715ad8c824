"""Fourier-Laplace integrals for one- and two-vertex flat-section terms.

A vertex with central charge Z contributes the ray integral

    H(Z, t)    = (1/2 pi i) int_0^inf  t e^{-w} / (Z - t w)  dw,
    Hhat(Z, t) = (1/2 pi i) int_0^inf  2 t Z e^{-w} / (Z^2 - t^2 w^2) dw,

obtained from the ray R_{>0} Z by the substitution z = Z/w.  Hhat is
the odd (in t) combination H(t) - H(-t).  For real t and Im Z > 0 the
contour rotates onto the imaginary axis, giving the fast paths

    Hhat = -(1/pi)   int_0^inf  t / (1 + (s t)^2)  e^{i s Z} ds,
    H    = -(1/2 pi) int_0^inf  t / (1 + i s t)    e^{i s Z} ds.

Two-vertex terms iterate the same shapes: the inner section is
evaluated at Z_1 / w while the outer variable runs over its ray.  The
inner evaluation is batched across all outer quadrature nodes.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .lattice import LatticeClass, skew_pair
from .quadrature import integrate_halfline, integrate_halfline_batch

DEFAULT_TOL = 1e-10
DEFAULT_ANGLE_MARGIN = 0.02

# The iterated integrals drop the outer region w < _W_FLOOR: it
# contributes O(w log w) while sending the inner evaluation points
# Z_1/w beyond any fixed quadrature range.  The jacobian w cosh(u)
# makes the cut invisible to the outer trapezoid (jump ~ 1e-29).
_W_FLOOR = 1e-12


class RayPoleError(ValueError):
    """The evaluation point sits on (or too close to) an integration ray."""


def _angle_to_ray(t, z) -> float:
    """Unsigned angle between t and the ray R_{>0} z, in (0, pi]."""
    a = cmath.phase(complex(t) / complex(z))
    return abs(a)


@dataclass(frozen=True)
class RayIntegrand:
    """Evaluation data for a single vertex: central charge and point."""
    zalpha: complex
    t: complex

    def __post_init__(self):
        if self.zalpha == 0:
            raise ValueError("zalpha must be nonzero")
        if self.t == 0:
            raise ValueError("t must be nonzero")

    def check_h(self, margin: float = 1e-9):
        if _angle_to_ray(self.t, self.zalpha) <= margin:
            raise RayPoleError("t lies on the ray of zalpha")

    def check_hhat(self, margin: float = 1e-9):
        if min(_angle_to_ray(self.t, self.zalpha),
               _angle_to_ray(self.t, -self.zalpha)) <= margin:
            raise RayPoleError("t lies on the ray of +-zalpha")


@dataclass(frozen=True)
class WeightValue:
    """Specialized graph weight: dt factor(s), lead class, skew pairing.

    For one vertex pair is irrelevant and defaults to 1.  The scalar
    weight carried into the symmetrization identities is dt_value * pair;
    classes that pair to zero kill the whole two-vertex term exactly.
    """
    dt_value: Fraction
    cls: LatticeClass
    pair: int = 1

    @property
    def scalar(self):
        return self.dt_value * self.pair

    @property
    def vanishes(self) -> bool:
        return self.scalar == 0


def weight_two_vertex(dt1, dt2, cls1: LatticeClass, cls2: LatticeClass) -> WeightValue:
    return WeightValue(dt_value=Fraction(dt1) * Fraction(dt2), cls=cls1,
                       pair=skew_pair(cls1, cls2))


def h_single(zalpha: complex, t: complex, tol: float = DEFAULT_TOL) -> complex:
    """One-vertex section H(Z, t)."""
    ri = RayIntegrand(complex(zalpha), complex(t))
    ri.check_h()
    z, tv = ri.zalpha, ri.t
    if tv.imag == 0 and z.imag > 0:
        tr = tv.real

        def rotated(s):
            return -(tr / (2 * np.pi)) * np.exp(1j * s * z) / (1.0 + 1j * s * tr)

        return integrate_halfline(rotated, rtol=tol, atol=tol * 1e-2).value

    def ray(w):
        return (tv / (2j * np.pi)) * np.exp(-w) / (z - tv * w)

    return integrate_halfline(ray, rtol=tol, atol=tol * 1e-2).value


def hhat_single(zalpha: complex, t: complex, tol: float = DEFAULT_TOL) -> complex:
    """One-vertex symmetrized section Hhat(Z, t) = H(t) - H(-t)."""
    ri = RayIntegrand(complex(zalpha), complex(t))
    ri.check_hhat()
    z, tv = ri.zalpha, ri.t
    if tv.imag == 0 and z.imag > 0:
        tr = tv.real

        def rotated(s):
            return -(tr / np.pi) * np.exp(1j * s * z) / (1.0 + (s * tr) ** 2)

        return integrate_halfline(rotated, rtol=tol, atol=tol * 1e-2).value

    def ray(w):
        return (2 * tv * z / (2j * np.pi)) * np.exp(-w) / (z * z - (tv * w) ** 2)

    return integrate_halfline(ray, rtol=tol, atol=tol * 1e-2).value


def _hhat_batch(z2: complex, zvals: np.ndarray, tol: float,
                max_level: int = 13) -> np.ndarray:
    """Hhat(Z_2, z_i) for an array of evaluation points, batched.

    The points z_i = Z_1/w span many orders of magnitude, and for large
    |z_i| the pole at u = |Z_2/z_i| falls below the resolved node range.
    Substituting u = a_i x with a_i = min(1, |Z_2/z_i|) moves every pole
    to |x| >= 1, where the node density always resolves it.
    """
    zv = np.asarray(zvals, dtype=np.complex128)
    a = np.minimum(1.0, np.abs(z2) / np.abs(zv))

    def fmat(x, rows):
        zz = zv[rows].reshape(-1, 1)
        aa = a[rows].reshape(-1, 1)
        u = aa * x
        vals = aa * (2 * zz * z2 / (2j * np.pi)) * np.exp(-u) \
            / (z2 * z2 - (zz * u) ** 2)
        # hard-zero the e^{-u} tail so the outermost nodes carry exact
        # zeros; a slowly decaying boundary costs an O(h) error
        return np.where(u <= 50.0, vals, 0.0)

    res = integrate_halfline_batch(fmat, zv.size, rtol=tol, atol=tol * 1e-2,
                                   max_level=max_level)
    return np.array([r.value for r in res], dtype=np.complex128)


def _h_batch(z2: complex, zvals: np.ndarray, tol: float,
             max_level: int = 13) -> np.ndarray:
    """H(Z_2, z_i) for an array of evaluation points, batched.  Same
    per-row rescaling as _hhat_batch."""
    zv = np.asarray(zvals, dtype=np.complex128)
    a = np.minimum(1.0, np.abs(z2) / np.abs(zv))

    def fmat(x, rows):
        zz = zv[rows].reshape(-1, 1)
        aa = a[rows].reshape(-1, 1)
        u = aa * x
        vals = aa * (zz / (2j * np.pi)) * np.exp(-u) / (z2 - zz * u)
        return np.where(u <= 50.0, vals, 0.0)

    res = integrate_halfline_batch(fmat, zv.size, rtol=tol, atol=tol * 1e-2,
                                   max_level=max_level)
    return np.array([r.value for r in res], dtype=np.complex128)


def _check_double_angles(z1: complex, z2: complex, t: complex,
                         margin: float, symmetric: bool):
    """Ray-collision guards for the iterated integral.

    The outer pole sits at w = Z_1/t (and -Z_1/t in the symmetric
    case); the inner integration points z = Z_1/w run along the ray of
    Z_1, so the inner pole at u = Z_2/z approaches the contour when the
    rays of Z_1 and Z_2 are nearly aligned (or anti-aligned in the
    symmetric case).
    """
    outer = _angle_to_ray(t, z1)
    if symmetric:
        outer = min(outer, _angle_to_ray(t, -z1))
    if outer <= margin:
        raise RayPoleError("outer pole too close to the w contour")
    inner = _angle_to_ray(z2, z1)
    if symmetric:
        inner = min(inner, _angle_to_ray(z2, -z1))
    if inner <= margin:
        raise RayPoleError("inner and outer rays nearly collide")


def h_double(zalpha: complex, zalpha2: complex, t: complex,
             tol: float = 1e-9, inner=None,
             angle_margin: float = DEFAULT_ANGLE_MARGIN) -> complex:
    """Two-vertex symmetrized section Hhat(Z_1, Z_2; t).

        (1/2 pi i) int_0^inf  2 t Z_1 e^{-w} / (Z_1^2 - t^2 w^2)
                              * Hhat(Z_2, Z_1/w)  dw.

    inner, if given, replaces the inner section: a callable taking an
    array of evaluation points and returning an array.  The inner
    quadrature runs at tol/10 (outer tolerance is the looser one).
    """
    z1, z2, tv = complex(zalpha), complex(zalpha2), complex(t)
    if z1 == 0 or z2 == 0:
        raise ValueError("central charges must be nonzero")
    if tv == 0:
        raise ValueError("t must be nonzero")
    _check_double_angles(z1, z2, tv, angle_margin, symmetric=True)
    if inner is None:
        def inner(zv):
            return _hhat_batch(z2, zv, tol * 0.1)

    def outer(w):
        pref = (2 * tv * z1 / (2j * np.pi)) * np.exp(-w) \
            / (z1 * z1 - (tv * w) ** 2)
        live = np.nonzero((pref != 0) & (w >= _W_FLOOR))[0]
        vals = np.zeros_like(pref)
        if live.size:
            vals[live] = np.asarray(inner(z1 / w[live]),
                                    dtype=np.complex128)
        return pref * vals

    return integrate_halfline(outer, rtol=tol, atol=tol * 1e-2).value


def h_double_plain(zalpha: complex, zalpha2: complex, t: complex,
                   tol: float = 1e-9, inner=None,
                   angle_margin: float = DEFAULT_ANGLE_MARGIN) -> complex:
    """Two-vertex section H(Z_1, Z_2; t) with the unsymmetrized kernels."""
    z1, z2, tv = complex(zalpha), complex(zalpha2), complex(t)
    if z1 == 0 or z2 == 0:
        raise ValueError("central charges must be nonzero")
    if tv == 0:
        raise ValueError("t must be nonzero")
    _check_double_angles(z1, z2, tv, angle_margin, symmetric=False)
    if inner is None:
        def inner(zv):
            return _h_batch(z2, zv, tol * 0.1)

    def outer(w):
        pref = (tv / (2j * np.pi)) * np.exp(-w) / (z1 - tv * w)
        live = np.nonzero((pref != 0) & (w >= _W_FLOOR))[0]
        vals = np.zeros_like(pref)
        if live.size:
            vals[live] = np.asarray(inner(z1 / w[live]),
                                    dtype=np.complex128)
        return pref * vals

    return integrate_halfline(outer, rtol=tol, atol=tol * 1e-2).value


def symmetrization_check(zalpha: complex, t: complex, dtval,
                         tol: float = 1e-9) -> float:
    """Residual of the one-vertex identity H(Z) - H(-Z) = Hhat(Z).

    Both sides carry the common weight dt * (class vector); the check
    compares the scalar parts, scaled by |dt|.  A zero dt value makes
    the residual exactly zero without quadrature.
    """
    w = float(abs(dtval))
    if w == 0.0:
        return 0.0
    lhs = h_single(zalpha, t, tol) - h_single(-complex(zalpha), t, tol)
    rhs = hhat_single(zalpha, t, tol)
    return w * abs(lhs - rhs)


def symmetrization_check_double(zalpha: complex, zalpha2: complex, t: complex,
                                weight: WeightValue,
                                tol: float = 1e-8,
                                angle_margin: float = DEFAULT_ANGLE_MARGIN) -> float:
    """Residual of the two-vertex identity.

    sum over signs (s1, s2) of  s2 * H(s1 Z_1, s2 Z_2; t)  equals
    Hhat(Z_1, Z_2; t); the inner sign sum reproduces the inner Hhat and
    the outer pair combines into the even kernel.  Weights with zero
    skew pairing vanish identically and short-circuit the quadrature.
    """
    if weight.vanishes:
        return 0.0
    z1, z2 = complex(zalpha), complex(zalpha2)
    total = 0.0 + 0.0j
    for s1 in (1, -1):
        for s2 in (1, -1):
            total += s2 * h_double_plain(s1 * z1, s2 * z2, t, tol,
                                         angle_margin=angle_margin)
    rhs = h_double(z1, z2, t, tol, angle_margin=angle_margin)
    return float(abs(weight.scalar)) * abs(total - rhs)


@dataclass(frozen=True)
class VanishingFit:
    slope: float
    lambdas: tuple
    values: tuple


def vanishing_experiment(m: int, r_list, G: complex, lambda_grid,
                         t: float = 0.3, v: complex = 0.4 + 0.5j,
                         tol: float = 1e-8) -> VanishingFit:
    """Large-framing decay of one- and two-vertex contributions.

    The vertex charges are Z_v = -n_v + v + r_v * lambda * G with
    n = (0,) for m = 1 and n = (0, 3) for m = 2; the offsets keep the
    two rays separated.  Fits log|value| against log lambda by least
    squares and returns the slope; the decay bound is -m/2.
    """
    if m not in (1, 2):
        raise ValueError("m must be 1 or 2")
    r = tuple(r_list)
    if len(r) != m or any(x < 1 for x in r):
        raise ValueError("r_list must contain %d positive ranks" % m)
    if complex(G).real <= 0:
        raise ValueError("Re(G) must be positive")
    lams = [float(l) for l in lambda_grid]
    if len(lams) < 2:
        raise ValueError("need at least two lambda values")
    offsets = (0.0,) if m == 1 else (0.0, 3.0)
    vals = []
    for lam in lams:
        zs = [v - n + rv * lam * complex(G) for n, rv in zip(offsets, r)]
        if m == 1:
            val = hhat_single(zs[0], t, tol)
        else:
            val = h_double(zs[0], zs[1], t, tol, angle_margin=1e-4)
        vals.append(abs(val))
    x = np.log(np.array(lams))
    y = np.log(np.array(vals))
    slope = float(np.polyfit(x, y, 1)[0])
    return VanishingFit(slope=slope, lambdas=tuple(lams), values=tuple(vals))


def prefactor_scan(re_values, im: float = 1.0, lam: float = 20.0,
                   r: int = 1, t: float = 0.3, v: complex = 0.4 + 0.5j,
                   tol: float = 1e-8):
    """|Hhat| at fixed lambda as Re(G) grows: the decay prefactor."""
    out = []
    for re in re_values:
        if re <= 0:
            raise ValueError("Re(G) must be positive")
        g = complex(re, im)
        out.append(abs(hhat_single(v + r * lam * g, t, tol)))
    return out
