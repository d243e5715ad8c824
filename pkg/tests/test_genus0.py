"""Exact genus-zero bi-series, the flatness identity, and the numeric
resummation twin."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from gvflat import genus0_potential_numeric, gv_genus0_series, potential_series, theorem1_check
from gvflat.genus0 import FormalBiSeries, PiNumber, theorem1_compare

rationals = st.fractions(min_value=-8, max_value=8, max_denominator=10)


class TestPiNumber:
    def test_make_normalizes_i_powers(self):
        assert PiNumber.make(3, 0, 2) == PiNumber.make(-3)
        assert PiNumber.make(1, 0, 5) == PiNumber.make(1, 0, 1)
        assert PiNumber.make(0).is_zero()

    @given(rationals, st.integers(-2, 2), st.integers(0, 3),
           rationals, st.integers(-2, 2), st.integers(0, 3))
    def test_to_complex_is_ring_homomorphism(self, c1, a1, b1, c2, a2, b2):
        x = PiNumber.make(c1, a1, b1)
        y = PiNumber.make(c2, a2, b2)
        zx, zy = x.to_complex(), y.to_complex()
        assert (x + y).to_complex() == pytest.approx(zx + zy, abs=1e-9)
        assert (x * y).to_complex() == pytest.approx(zx * zy, abs=1e-9)
        assert (x - y).to_complex() == pytest.approx(zx - zy, abs=1e-9)


def test_potential_series_frozen_coefficients():
    # g = 1 layer: n0 B_2/2! * 2 pi * m^0 = pi/6 on every Q^m
    # g = 2 layer: n0 B_4/4! * (2 pi)^3 * m^2 = -(m^2/90) pi^3
    pot = potential_series(1, 2, 3)
    for m in (1, 2, 3):
        assert pot.coefficient(1, m) == PiNumber.make(Fraction(1, 6), 1)
    assert pot.coefficient(3, 1) == PiNumber.make(Fraction(-1, 90), 3)
    assert pot.coefficient(3, 3) == PiNumber.make(Fraction(-1, 10), 3)
    assert pot.coefficient(0, 1).is_zero()


def test_gv_series_frozen_coefficients():
    # g = 2 layer: B_4/(4 * 2!) * (2 pi)^2 * m = -(m/60) pi^2
    gvs = gv_genus0_series(1, 2, 3)
    assert gvs.coefficient(2, 1) == PiNumber.make(Fraction(-1, 60), 2)
    assert gvs.coefficient(2, 2) == PiNumber.make(Fraction(-1, 30), 2)


def test_series_scale_with_n0():
    assert potential_series(5, 3, 4).terms == potential_series(1, 3, 4).scale(
        PiNumber.make(5)).terms


def test_derivative_operators():
    s = FormalBiSeries({(2, 3): PiNumber.make(Fraction(1, 2))})
    dt = s.d_dt()
    assert dt.coefficient(1, 3) == PiNumber.make(Fraction(2), 1)  # 2a pi / 2
    dv = s.d_dv()
    assert dv.coefficient(2, 3) == PiNumber.make(Fraction(3), 1, 1)


def test_flatness_identity_small_order():
    rep = theorem1_check(1, 3, 4)
    assert rep.ok
    assert not rep.mismatches
    assert all(ok for (_, _, _, ok) in rep.details)


def test_flatness_identity_detects_mutation():
    pot = potential_series(1, 3, 4)
    gvs = gv_genus0_series(1, 3, 4)
    broken = FormalBiSeries(dict(gvs.terms))
    key = (2, 1)
    broken.terms[key] = broken.terms[key] * PiNumber.make(Fraction(2))
    rep = theorem1_compare(pot, broken)
    assert not rep.ok
    assert any(m[:3] == (2, 2, 1) for m in rep.mismatches)


def test_biseries_eval_matches_hand_sum():
    s = FormalBiSeries({(1, 1): PiNumber.make(Fraction(1, 6), 1)})
    t, v = 0.1, 0.2 + 0.8j
    q = complex(math.e) ** (2j * math.pi * v)
    want = (math.pi / 6) * (2 * math.pi * t) * q
    assert s.eval(t, v) == pytest.approx(want)


class TestNumericResummation:
    # independent mpmath double-sum oracle, 18 digits
    ORACLE = -0.000216278951301276691 + 0.000663296661574667029j

    def test_tail_bound_contract(self):
        for kmax, nmax in ((60, 60), (400, 60), (2000, 200)):
            val, bound = genus0_potential_numeric(1, 0.2, 0.3 + 1j, kmax, nmax)
            assert abs(val - self.ORACLE) <= bound

    def test_bound_shrinks(self):
        _, b1 = genus0_potential_numeric(1, 0.2, 0.3 + 1j, 60, 60)
        _, b2 = genus0_potential_numeric(1, 0.2, 0.3 + 1j, 600, 80)
        assert b2 < b1

    def test_odd_in_t(self):
        vp, _ = genus0_potential_numeric(1, 0.15, 0.3 + 1j)
        vm, _ = genus0_potential_numeric(1, -0.15, 0.3 + 1j)
        assert vm == -vp

    def test_scales_with_n0(self):
        v1, _ = genus0_potential_numeric(1, 0.2, 0.3 + 1j)
        v3, _ = genus0_potential_numeric(3, 0.2, 0.3 + 1j)
        assert v3 == pytest.approx(3 * v1, rel=1e-12)

    def test_validation(self):
        assert genus0_potential_numeric(1, 0.0, 0.3 + 1j) == (0j, 0.0)
        with pytest.raises(ValueError):
            genus0_potential_numeric(1, 0.1, 0.3 - 0.2j)
