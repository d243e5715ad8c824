"""Poisson kernel closed forms, finite-part integration and
Richardson extrapolation."""

import numpy as np
import pytest

from gvflat import (
    FinitePartSpec,
    eps_grid,
    finite_part_integral,
    integrate_halfline,
    kernel,
    kernel_deriv,
    kernel_deriv_at_zero,
    pde_residual,
    richardson_limit,
)

# mpmath.diff oracles for kappa(sigma) = (eps/pi)/(eps^2 + sigma^2)
# at eps = 0.7, sigma = 1.3
KAPPA_07_13 = 0.1022095964810337018699
KAPPA_DERIVS_07_13 = {
    1: -0.1219013536012328554412,
    2: 0.1970035989744694699791,
    3: -0.3693669497217728133897,
    4: 0.6776940777122952383046,
}
KAPPA_DERIVS_07_AT_0 = {
    2: -1.856034321771374178063,
    4: 45.45390175766630640154,
    6: -2782.891944346916718461,
}


def test_kernel_closed_form():
    assert kernel(0.7, 1.3) == pytest.approx(KAPPA_07_13, rel=1e-14)
    assert kernel(1.0, 0.0) == pytest.approx(1 / np.pi, rel=1e-14)
    sig = np.array([0.0, 1.3, -1.3])
    vals = kernel(0.7, sig)
    assert vals.shape == (3,)
    assert vals[1] == vals[2]  # even in sigma


def test_kernel_half_mass():
    res = integrate_halfline(lambda s: kernel(0.35, s), rtol=1e-12)
    assert res.value == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("j", sorted(KAPPA_DERIVS_07_13))
def test_kernel_deriv_against_mpmath(j):
    got = kernel_deriv(0.7, 1.3, j)
    assert complex(got).real == pytest.approx(KAPPA_DERIVS_07_13[j], rel=1e-12)


def test_kernel_deriv_j0_is_kernel():
    sig = np.linspace(0.1, 5.0, 7)
    assert np.allclose(kernel_deriv(0.7, sig, 0), kernel(0.7, sig), rtol=1e-14)


def test_kernel_deriv_at_zero():
    for j in (1, 3, 5):
        assert kernel_deriv_at_zero(0.7, j) == 0.0
    for j, want in KAPPA_DERIVS_07_AT_0.items():
        assert kernel_deriv_at_zero(0.7, j) == pytest.approx(want, rel=1e-12)
        assert complex(kernel_deriv(0.7, 0.0, j)).real == pytest.approx(want, rel=1e-10)


def test_pde_residual_small_on_grid():
    rng = np.random.default_rng(7)
    eps = rng.uniform(0.1, 3.0, 3000)
    sig = rng.uniform(0.01, 10.0, 3000)
    assert float(np.max(np.abs(pde_residual(eps, sig)))) < 1e-13


class TestFinitePart:
    def test_spec_validation(self):
        with pytest.raises(ValueError):
            FinitePartSpec({2: 1.0})
        with pytest.raises(ValueError):
            FinitePartSpec({0: 1.0})

    def test_empty_spec_is_plain_quadrature(self):
        f = lambda s: np.exp(-s)
        got = finite_part_integral(f, FinitePartSpec({}), eps=0.5, tol=1e-11)
        want = integrate_halfline(lambda s: kernel(0.5, s) * np.exp(-s),
                                  rtol=1e-11)
        assert got.value == pytest.approx(want.value, abs=1e-11)

    def test_exact_pole_cancels(self):
        f = lambda s: 2.0 / s ** 3
        got = finite_part_integral(f, FinitePartSpec({-3: 2.0}), eps=0.5)
        assert abs(got.value) < 1e-14

    def test_switch_requires_series(self):
        with pytest.raises(ValueError):
            finite_part_integral(lambda s: 1 / s, FinitePartSpec({-1: 1.0}),
                                 eps=0.5, switch=0.1)

    def test_switch_matches_direct_difference(self):
        # f - 1/sigma = (e^-sigma - 1)/sigma, evaluated stably both ways
        f = lambda s: np.exp(-s) / s
        fp = FinitePartSpec({-1: 1.0})
        direct = finite_part_integral(f, fp, eps=0.5, tol=1e-11)
        switched = finite_part_integral(
            f, fp, eps=0.5, tol=1e-11, switch=0.4,
            regular_near_origin=lambda s: np.expm1(-s) / s)
        assert switched.value == pytest.approx(direct.value, abs=1e-10)

    def test_contour_dip_invariance(self):
        # interior pole at sigma = 2 read as a boundary value from below;
        # the answer must not depend on the dip depth
        f = lambda s: np.exp(-s) / (s - 2.0)
        a = finite_part_integral(f, FinitePartSpec({}), eps=0.5, tol=1e-10,
                                 contour_dip=0.15, max_level=14)
        b = finite_part_integral(f, FinitePartSpec({}), eps=0.5, tol=1e-10,
                                 contour_dip=0.35, max_level=14)
        assert a.value == pytest.approx(b.value, abs=1e-9)
        assert abs(a.value.imag) > 1e-3  # the half residue is picked up

    def test_dip_bounded_by_eps(self):
        with pytest.raises(ValueError):
            finite_part_integral(lambda s: s, FinitePartSpec({}), eps=0.2,
                                 contour_dip=0.2)


class TestEpsGrid:
    def test_descending_geometric(self):
        assert eps_grid(0.2, 2.0, 3) == pytest.approx([0.2, 0.1, 0.05])

    def test_validation(self):
        for bad in ((0.0, 2.0, 3), (0.1, 1.0, 3), (0.1, 2.0, 0)):
            with pytest.raises(ValueError):
                eps_grid(*bad)


class TestRichardson:
    def test_smooth_limit_recovery(self):
        grid = eps_grid(0.2, 2.0, 9)
        L = 0.7 - 0.2j
        samples = [(e, L + 0.3 * e * np.log(1 / e) + 0.1 * e - 0.05 * e * e)
                   for e in grid]
        fit = richardson_limit(samples)
        assert fit.limit == pytest.approx(L, abs=1e-10)

    def test_divergent_tower_recovery(self):
        # the eps^-3 column spans 5 octaves ~ 3e4 in magnitude; much
        # longer grids trade recovery accuracy for conditioning
        grid = eps_grid(0.2, 2.0, 7)
        L = -1.3 + 0.4j
        samples = [(e, 2.0 / e - 0.5 / e ** 3 + L + 0.2 * e) for e in grid]
        fit = richardson_limit(samples, known_divergent_orders=(1, 3))
        assert fit.limit == pytest.approx(L, abs=1e-7)

    def test_unpacks(self):
        limit, error = richardson_limit([(e, 1.0 + e) for e in eps_grid(0.2, 2.0, 6)])
        assert limit == pytest.approx(1.0, abs=1e-9)
        assert error >= 0.0

    def test_weights_validation(self):
        samples = [(e, 1.0) for e in eps_grid(0.2, 2.0, 6)]
        with pytest.raises(ValueError):
            richardson_limit(samples, weights=np.ones(3))
        with pytest.raises(ValueError):
            richardson_limit(samples, weights=np.zeros(6))

    def test_too_few_samples(self):
        with pytest.raises(ValueError):
            richardson_limit([(0.1, 1.0)])
        with pytest.raises(ValueError):
            richardson_limit([(0.2, 1.0), (0.1, 1.0)],
                             known_divergent_orders=(1, 2, 3))

    def test_polynomial_data_without_logs(self):
        grid = eps_grid(0.3, 2.0, 8)
        samples = [(e, 2.0 + 0.5 * e - 0.1 * e * e) for e in grid]
        fit = richardson_limit(samples, log_terms=False)
        assert fit.limit == pytest.approx(2.0, abs=1e-12)
