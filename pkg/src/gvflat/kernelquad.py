"""Poisson kernel calculus and finite-part integrals against it.

The half-line pairings in this package all have the shape

    integral over (0, inf) of  kappa_eps(sigma) * F(sigma) dsigma,

where kappa_eps(sigma) = (1/pi) eps / (eps^2 + sigma^2) and F is smooth
except possibly for a known principal part at sigma = 0 and real poles
away from the origin.  This module provides the kernel, its exact sigma
derivatives, the first-order PDE it satisfies, finite-part integration
with those singularities removed, and Richardson extrapolation in eps
with an explicit divergent tower.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._backend import hot
from .quadrature import QuadResult, integrate_halfline


@hot
def _kernel_vals(eps, sigma):
    return (eps / np.pi) / (eps * eps + sigma * sigma)


@hot
def _pde_residual_vals(eps, sigma):
    den = eps * eps + sigma * sigma
    den2 = den * den
    d_eps = (sigma * sigma - eps * eps) / (np.pi * den2)
    sig_term = -2.0 * eps * eps / (np.pi * den2)
    scale_term = 1.0 / (np.pi * den)
    return d_eps - sig_term - scale_term


def kernel(eps: float, sigma):
    """kappa_eps(sigma), vectorized over sigma (real or complex)."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    sig = np.asarray(sigma)
    if np.iscomplexobj(sig):
        return (eps / np.pi) / (eps * eps + sig * sig)
    return _kernel_vals(float(eps), sig.astype(np.float64))


def kernel_deriv(eps: float, sigma, j: int):
    """j-th sigma derivative of kappa_eps.

    Partial fractions give, for j >= 0,

        kappa^(j)(sigma) = (1/(2 pi i)) (-1)^j j! [ (sigma - i eps)^-(j+1)
                                                  - (sigma + i eps)^-(j+1) ].
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if j < 0:
        raise ValueError("derivative order must be nonnegative")
    sig = np.asarray(sigma, dtype=np.complex128)
    pref = ((-1) ** j) * math.factorial(j) / (2.0j * np.pi)
    out = pref * ((sig - 1j * eps) ** (-(j + 1)) - (sig + 1j * eps) ** (-(j + 1)))
    if not np.iscomplexobj(np.asarray(sigma)):
        # real argument: the two branches are conjugate, so the value is real
        return out.real if out.shape else complex(out).real
    return out


def kernel_deriv_at_zero(eps: float, j: int):
    """Exact kappa^(j)(0): zero for odd j, (-1)^h (2h)!/(pi eps^(2h+1)) for j = 2h."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if j < 0:
        raise ValueError("derivative order must be nonnegative")
    if j % 2 == 1:
        return 0.0
    h = j // 2
    return ((-1) ** h) * math.factorial(2 * h) / (np.pi * eps ** (2 * h + 1))


def pde_residual(eps, sigma):
    """Residual of (d/d eps - eps sigma^-1 d/d sigma - 1/eps) kappa_eps.

    The kernel satisfies this first-order equation identically; the
    residual is the numerical defect of the three closed-form pieces.
    sigma = 0 is rejected because of the sigma^-1 coefficient.
    """
    eps_arr = np.asarray(eps, dtype=np.float64)
    sig_arr = np.asarray(sigma, dtype=np.float64)
    if np.any(eps_arr <= 0):
        raise ValueError("eps must be positive")
    if np.any(sig_arr == 0):
        raise ValueError("sigma = 0 is outside the PDE domain")
    return _pde_residual_vals(eps_arr, sig_arr)


@dataclass(frozen=True)
class FinitePartSpec:
    """Principal part of an integrand at sigma = 0.

    terms maps a negative integer power p to the coefficient of sigma^p.
    An empty spec means the integrand is already integrable at 0.
    """
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        for p in self.terms:
            if not isinstance(p, int) or p >= 0:
                raise ValueError("principal part powers must be negative integers")

    def evaluate(self, sigma):
        sig = np.asarray(sigma, dtype=np.complex128)
        out = np.zeros_like(sig)
        for p, c in self.terms.items():
            out = out + c * sig ** p
        return out


def _dip_path(s, dip):
    """Contour sigma(s) = s - i dip tanh(s) and its Jacobian.

    Interior real poles of the integrand are interpreted as boundary
    values from Im sigma < 0, realized by dipping the path below the
    axis away from the origin.  dip must stay below eps so the kernel
    pole at -i eps is not crossed.
    """
    sig = s - 1j * dip * np.tanh(s)
    jac = 1.0 - 1j * dip / np.cosh(s) ** 2
    return sig, jac


def finite_part_integral(f, fp: FinitePartSpec, eps: float,
                         tol: float = 1e-10, envelope=None,
                         regular_near_origin=None, switch: float = 0.0,
                         contour_dip: float = 0.0,
                         max_level: int | None = None) -> QuadResult:
    """Finite part of integral kappa_eps * envelope * f over (0, inf).

    The returned value is the integral of

        kappa_eps(sigma) * envelope(sigma) * (f(sigma) - fp(sigma)),

    i.e. the principal part is removed inside the envelope.  Near the
    origin the naive difference cancels catastrophically, so when switch
    is positive the caller-supplied regular_near_origin(sigma) is used
    for |sigma| < switch; it must equal f - fp there (typically a series
    evaluation).  A positive contour_dip moves the path below the real
    axis away from 0 to step around interior poles of f; it must be
    smaller than eps.
    """
    if contour_dip < 0 or contour_dip >= eps:
        raise ValueError("contour_dip must lie in [0, eps)")
    if switch > 0 and regular_near_origin is None:
        raise ValueError("switch > 0 requires regular_near_origin")

    def integrand(s):
        if contour_dip > 0:
            sig, jac = _dip_path(s, contour_dip)
        else:
            sig, jac = s.astype(np.complex128), 1.0
        core = np.empty_like(sig)
        if switch > 0:
            near = np.abs(sig) < switch
            far = ~near
            if np.any(near):
                core[near] = regular_near_origin(sig[near])
            if np.any(far):
                core[far] = f(sig[far]) - fp.evaluate(sig[far])
        else:
            core = f(sig) - fp.evaluate(sig)
        vals = kernel(eps, sig) * core * jac
        if envelope is not None:
            vals = vals * envelope(sig)
        return vals

    kwargs = {}
    if max_level is not None:
        kwargs["max_level"] = max_level
    return integrate_halfline(integrand, rtol=tol, atol=tol * 1e-2, **kwargs)


@dataclass(frozen=True)
class RichardsonFit:
    limit: complex
    error: float
    cond: float
    coefficients: tuple
    ill_conditioned: bool

    def __iter__(self):
        yield self.limit
        yield self.error


def eps_grid(start: float = 0.2, factor: float = 2.0, count: int = 9):
    """Geometric eps grid start, start/factor, ..., count points."""
    if start <= 0 or factor <= 1 or count < 1:
        raise ValueError("need start > 0, factor > 1, count >= 1")
    return [start / factor ** i for i in range(count)]


def richardson_limit(samples, known_divergent_orders=(), weights=None,
                     log_terms: bool = True) -> RichardsonFit:
    """Extrapolate eps -> 0 with an explicit divergent tower.

    samples is a sequence of (eps, value) pairs.  The model is

        value(eps) = sum_k c_k eps^-k  (k in known_divergent_orders)
                     + L + a eps ln(1/eps) + b eps
                     + c eps^2 ln(1/eps) + d eps^2,

    fitted by column-scaled weighted least squares; L is returned.  The
    eps ln(1/eps) columns reflect the half-line kernel tails and can be
    disabled with log_terms=False.  weights, if given, multiply the rows
    (use 1/noise for per-sample error bounds).  The error estimate is
    the standard deviation of the L coefficient under the residual
    variance; with zero degrees of freedom the unit variance is used.
    """
    eps_vals = np.array([float(e) for e, _ in samples], dtype=np.float64)
    y = np.array([complex(v) for _, v in samples], dtype=np.complex128)
    n = eps_vals.size
    if n < 2:
        raise ValueError("need at least two samples")
    cols = []
    for k in sorted(set(int(k) for k in known_divergent_orders), reverse=True):
        if k <= 0:
            raise ValueError("divergent orders must be positive integers")
        cols.append(eps_vals ** (-k))
    const_index = len(cols)
    cols.append(np.ones_like(eps_vals))
    ln = np.log(1.0 / eps_vals)
    if log_terms:
        cols.append(eps_vals * ln)
    cols.append(eps_vals)
    if log_terms:
        cols.append(eps_vals ** 2 * ln)
    cols.append(eps_vals ** 2)
    a = np.stack(cols, axis=1)
    ncols = a.shape[1]
    if n < ncols:
        # drop trailing smooth columns until the system is determined
        a = a[:, :n]
        ncols = n
        if const_index >= ncols:
            raise ValueError("too few samples for the divergent tower")
    if weights is not None:
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != eps_vals.shape:
            raise ValueError("weights must match samples")
        if np.any(w <= 0):
            raise ValueError("weights must be positive")
    else:
        w = np.ones_like(eps_vals)
    scale = np.max(np.abs(a), axis=0)
    scale[scale == 0] = 1.0
    aw = (a / scale) * w[:, None]
    yw = y * w
    coef_scaled, _, rank, sv = np.linalg.lstsq(aw, yw, rcond=None)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else float("inf")
    coef = coef_scaled / scale
    resid = yw - aw @ coef_scaled
    dof = n - ncols
    s2 = float(np.sum(np.abs(resid) ** 2) / dof) if dof > 0 else 1.0
    gram_inv = np.linalg.pinv(aw.conj().T @ aw)
    var_l = float(np.real(gram_inv[const_index, const_index])) * s2
    err = math.sqrt(max(var_l, 0.0)) / scale[const_index]
    ill = rank < ncols or cond > 1e12
    return RichardsonFit(limit=complex(coef[const_index]), error=float(err),
                         cond=cond, coefficients=tuple(coef),
                         ill_conditioned=bool(ill))
