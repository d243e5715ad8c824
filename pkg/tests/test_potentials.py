"""Framed potentials, the derivative ladder, asymptotic extraction and
the reconstruction pipeline."""

from fractions import Fraction

import numpy as np
import pytest
import sympy as sp

from gvflat import (
    GvTable,
    ReconstructionError,
    framed_potential,
    framed_potential_finiteG,
    genus0_regularized,
    genus1_extract,
    gv_derivatives,
    phi_inner,
    reconstruct_taylor,
    stable_pairs_weights,
    synthetic_asymptotic_samples,
    theorem2_check,
    unframed_potential,
)
from gvflat.potentials import _l_coeff, _tower, apply_L, potential_grid

GV21 = GvTable({(2, 1): 1})
V = 0.3 + 1.0j

# hand-derived from the mode expansion of the framed genus-2 sum:
# D_1 = 2i, D_2 = -4v, D_3 = 2i(-3v^2 - 1), D_4 = 8(v^3 + v)
D_FROZEN = {
    0: 0j,
    1: 2j,
    2: -1.2 - 4j,
    3: 3.6 + 3.46j,
    4: -4.584 + 2.16j,
}


class TestGvDerivatives:
    def test_frozen_values(self):
        dv = gv_derivatives(GV21, 1, V, 2, 4)
        for j, want in D_FROZEN.items():
            assert dv.values[j] == pytest.approx(want, abs=1e-12)
            assert dv.value(j) == dv.values[j]

    def test_exact_lane_matches_floats(self):
        dv = gv_derivatives(GV21, 1, V, 2, 4)
        for j in range(5):
            assert dv.exact[j].to_complex() == dv.values[j]

    def test_linear_in_table(self):
        dv1 = gv_derivatives(GV21, 1, V, 2, 3)
        dv7 = gv_derivatives(GvTable({(2, 1): 7}), 1, V, 2, 3)
        for j in range(4):
            assert dv7.values[j] == pytest.approx(7 * dv1.values[j], abs=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            gv_derivatives(GV21, 1, V, 2, -1)


def test_sigma_derivative_operator_identity():
    # d^j f = sum_b a_{j,b} s^(2b-j) (s^-1 d/ds)^b f, checked symbolically
    s = sp.symbols("s", positive=True)
    f = sp.exp(-s) * (s ** 3 + 2 * s)
    for j in range(1, 5):
        lhs = sp.diff(f, s, j)
        rhs = 0
        g = f
        for b in range(1, j + 1):
            g = sp.diff(g, s) / s  # b applications of s^-1 d/ds
            rhs += _l_coeff(j, b) * s ** (2 * b - j) * g
        assert sp.simplify(lhs - rhs) == 0


class TestFramedPotential:
    def test_genus1_exactly_zero(self):
        gv = GvTable({(1, 1): 3, (1, 2): 1})
        for eps in (0.5, 0.05):
            assert framed_potential(1, 2, gv, V, eps) == 0j

    def test_against_direct_weights_quadrature(self):
        # mpmath oracle: int kappa_.5(s) (e^{is(v+1)} - e^{is(v-1)})/2 ds
        want = -0.01765404151335457 + 0.08773676431789999j
        got = framed_potential(2, 1, GV21, V, 0.5, tol=1e-11)
        assert got == pytest.approx(want, abs=1e-11)

    def test_empty_modes_give_zero(self):
        assert framed_potential(3, 1, GvTable({(2, 1): 1}), V, 0.3) == 0j

    def test_validation(self):
        with pytest.raises(ValueError):
            framed_potential(0, 1, GV21, V, 0.5)
        with pytest.raises(ValueError):
            framed_potential(2, 1, GV21, V, -0.5)
        with pytest.raises(ValueError):
            framed_potential(2, 1, GV21, 0.3 - 1j, 0.5)


class TestStablePairsWeights:
    def test_single_genus2_class(self):
        assert stable_pairs_weights(GV21, 1) == {
            -1: Fraction(1), 1: Fraction(-1)}

    def test_no_upper_rows_empty(self):
        assert stable_pairs_weights(GvTable({(0, 1): 5}), 1) == {}


class TestPhiInner:
    def test_value_at_zero_is_half(self):
        assert phi_inner(0.0) == pytest.approx(0.5, abs=1e-10)

    def test_frozen_values(self):
        # mpmath oracles
        assert phi_inner(1.0) == pytest.approx(0.1978135591594612, abs=1e-10)
        assert phi_inner(0.5 + 0.3j) == pytest.approx(
            0.2589849361860789 - 0.0599818300252957j, abs=1e-10)

    def test_batched_shape(self):
        z = np.array([0.0, 1.0, 2.0 + 1j])
        out = phi_inner(z)
        assert out.shape == (3,)
        assert out[1] == pytest.approx(phi_inner(1.0), abs=1e-12)

    def test_negative_real_part_rejected(self):
        with pytest.raises(ValueError):
            phi_inner(-0.1)


class TestFiniteFraming:
    def test_validation(self):
        with pytest.raises(ValueError):
            framed_potential_finiteG(2, 1, GV21, V, 0.5, G=-1 + 1j)
        with pytest.raises(ValueError):
            framed_potential_finiteG(2, 1, GV21, 0.3 - 2j, 0.5, G=1 + 0j)

    def test_small_G_approaches_framed(self):
        lim = framed_potential(2, 1, GV21, V, 0.5, tol=1e-10)
        got = framed_potential_finiteG(2, 1, GV21, V, 0.5, G=1e-5 + 0j)
        assert abs(got - lim) < 1e-3


class TestGenus1Extraction:
    def test_expected_fraction(self):
        grid = [0.2 / 2 ** i for i in range(7)]
        lim, expected = genus1_extract(1, GvTable({(1, 1): 3}), V,
                                       eps_list=grid)
        assert expected == Fraction(3, 4)
        assert abs(lim - 0.75) < 1e-4

    def test_divisor_sum(self):
        gv = GvTable({(1, 1): 2, (1, 2): 1})
        grid = [0.2 / 2 ** i for i in range(7)]
        lim, expected = genus1_extract(2, gv, V, eps_list=grid)
        assert expected == Fraction(1, 2)
        assert abs(lim - 0.5) < 1e-4

    def test_empty_table_short_circuits(self):
        lim, expected = genus1_extract(1, GvTable({(2, 1): 1}), V)
        assert lim == 0j and expected == 0

    def test_unframed_shifted_sum_nonzero(self):
        val = unframed_potential(1, 1, GvTable({(1, 1): 3}), V, 0.2)
        assert abs(val) > 0.1  # the pi-shifted genus-1 sum survives framing


class TestPotentialGrid:
    def test_matches_scalar_framed(self):
        grid = potential_grid(2, 1, GV21, V, eps_list=[0.4, 0.2], tol=1e-11)
        for eps, val, err in grid.samples:
            assert val == pytest.approx(
                framed_potential(2, 1, GV21, V, eps, tol=1e-11), abs=1e-10)
            assert err >= 0.0

    def test_genus1_grid_is_zero(self):
        grid = potential_grid(1, 1, GvTable({(1, 1): 2}), V, eps_list=[0.2])
        assert grid.samples[0][1] == 0j

    def test_validation(self):
        with pytest.raises(ValueError):
            potential_grid(2, 1, GV21, V, eps_list=[0.2, -0.1])


class TestApplyL:
    def test_j0_is_identity(self):
        base = potential_grid(2, 1, GV21, V, eps_list=[0.2, 0.1], tol=1e-12)
        out = apply_L(0, base, mode="analytic")
        for a, b in zip(base.samples, out.samples):
            assert a[1] == pytest.approx(b[1], abs=1e-14)

    def test_numeric_matches_analytic(self):
        base = potential_grid(2, 1, GV21, V, eps_list=[0.2, 0.1], tol=1e-12)
        an = apply_L(2, base, mode="analytic", tol=1e-12)
        nu = apply_L(2, base, mode="numeric", tol=1e-12)
        for a, b in zip(an.samples, nu.samples):
            assert abs(a[1] - b[1]) / abs(a[1]) < 1e-6

    def test_order_tracked(self):
        base = potential_grid(2, 1, GV21, V, eps_list=[0.2])
        assert apply_L(3, base, mode="analytic").order == 3


class TestTower:
    def test_empty_for_low_j(self):
        assert _tower(0, 0.1, D_FROZEN) == 0
        # j = 1 reads D_0 = 0
        assert _tower(1, 0.1, D_FROZEN) == 0

    def test_j2_hand_value(self):
        # (1/2 pi) eps^-1 D_1 = i/(pi eps)
        assert _tower(2, 0.2, D_FROZEN) == pytest.approx(1j / (np.pi * 0.2))

    def test_j3_mixes_two_orders(self):
        # (1/2 pi)(-eps^-1 D_2 + 2 eps^-3 D_0); D_0 = 0 here
        want = -D_FROZEN[2] / (2 * np.pi * 0.1)
        assert _tower(3, 0.1, D_FROZEN) == pytest.approx(want)


def test_theorem2_single_order():
    rep = theorem2_check(2, 1, GV21, V, 1, tol=1e-12)
    assert rep.ok
    assert rep.rel_err < 1e-4
    assert rep.target == pytest.approx(-D_FROZEN[1] / 4)
    assert len(rep.samples) == len(rep.subtracted)


class TestReconstruction:
    def test_synthetic_recovery_to_solver_precision(self):
        eps_list = [0.2 / 2 ** i for i in range(9)]
        syn = synthetic_asymptotic_samples(2, 1, GV21, V, 4, eps_list)
        res = reconstruct_taylor(2, 1, GV21, V, 4, samples_by_j=syn)
        assert res.ok
        for got, want in zip(res.recovered, res.truth):
            assert abs(got - want) / max(abs(want), 1.0) < 1e-8

    def test_truth_column_matches_frozen(self):
        eps_list = [0.2 / 2 ** i for i in range(9)]
        syn = synthetic_asymptotic_samples(2, 1, GV21, V, 2, eps_list)
        res = reconstruct_taylor(2, 1, GV21, V, 2, samples_by_j=syn)
        for j, want in list(D_FROZEN.items())[:3]:
            assert res.truth[j] == pytest.approx(want, abs=1e-12)

    def test_corrupted_step_aborts_with_partial(self):
        eps_list = [0.2 / 2 ** i for i in range(9)]
        syn = synthetic_asymptotic_samples(2, 1, GV21, V, 4, eps_list)
        syn[2] = tuple((e, val + 5.0 * np.sin(1.0 / e), q)
                       for (e, val, q) in syn[2])
        with pytest.raises(ReconstructionError) as info:
            reconstruct_taylor(2, 1, GV21, V, 4, samples_by_j=syn)
        partial = info.value.partial
        assert partial.aborted_at == 2
        assert not partial.ok
        assert len(partial.recovered) == 3

    def test_genus_validation(self):
        with pytest.raises(ValueError):
            reconstruct_taylor(1, 1, GV21, V, 2)


class TestGenus0Regularized:
    def test_scaling_identity(self):
        # I_r(eps, v) = I_1(r eps, v/r), exact by substitution
        gv = GvTable({(0, 1): 1})
        a = genus0_regularized(2, gv, V, 0.1, tol=1e-10)
        b = genus0_regularized(1, gv, V / 2, 0.2, tol=1e-10)
        assert a == pytest.approx(b, rel=1e-9)

    def test_scales_with_n0(self):
        g1 = genus0_regularized(1, GvTable({(0, 1): 1}), V, 0.2)
        g5 = genus0_regularized(1, GvTable({(0, 1): 5}), V, 0.2)
        assert g5 == pytest.approx(5 * g1, rel=1e-12)

    def test_no_genus0_rows_gives_zero(self):
        assert genus0_regularized(1, GV21, V, 0.2) == 0j

    def test_validation(self):
        gv = GvTable({(0, 1): 1})
        with pytest.raises(ValueError):
            genus0_regularized(1, gv, V, -0.1)
        with pytest.raises(ValueError):
            genus0_regularized(1, gv, 0.3 - 1j, 0.1)
