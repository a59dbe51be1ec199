"""Constitutive-law unit tests."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heleshaw_lab.errors import InvalidLawError
from heleshaw_lab.laws import (
    GrowthLaw,
    NutrientLaw,
    PressureLaw,
    asymptotic_speed,
    density_of_pressure,
    growth_potential,
    max_density,
    pressure_of_density,
    stiffness_constant,
)


class TestPressureLaw:
    def test_rejects_small_exponent(self):
        for m in (1.0, 0.5, -2.0):
            with pytest.raises(InvalidLawError):
                PressureLaw(m)

    def test_scalar_and_array(self):
        law = PressureLaw(2.0)
        assert pressure_of_density(0.5, law) == pytest.approx(1.0)
        np.testing.assert_allclose(
            pressure_of_density(np.array([0.0, 0.5, 1.0]), law), [0.0, 1.0, 2.0]
        )

    @given(
        m=st.floats(1.1, 20.0),
        rho=st.floats(1e-6, 2.0),
    )
    @settings(max_examples=200, deadline=None)
    def test_inverse_roundtrip(self, m, rho):
        law = PressureLaw(m)
        p = pressure_of_density(rho, law)
        back = density_of_pressure(p, law)
        assert back == pytest.approx(rho, rel=1e-9)

    @given(m=st.floats(1.1, 50.0), p_M=st.floats(0.1, 5.0))
    @settings(max_examples=200, deadline=None)
    def test_max_density_attains_bound(self, m, p_M):
        rho = max_density(m, p_M)
        assert pressure_of_density(rho, PressureLaw(m)) == pytest.approx(p_M, rel=1e-9)

    def test_max_density_increases_with_m(self):
        vals = [max_density(m, 1.0) for m in (2.0, 5.0, 20.0, 80.0)]
        assert all(b > a for a, b in zip(vals, vals[1:]))
        assert vals[-1] < 1.0  # always below the packing level for p_M = 1


class TestGrowthLaw:
    def test_linear_basics(self):
        law = GrowthLaw(a=5.0, p_M=1.0)
        assert law.phi(0.0) == pytest.approx(5.0)
        assert law.phi(1.0) == pytest.approx(0.0)
        assert law.dphi(0.3) == pytest.approx(-5.0)

    def test_linear_validation(self):
        with pytest.raises(InvalidLawError):
            GrowthLaw(a=-1.0, p_M=1.0)
        with pytest.raises(InvalidLawError):
            GrowthLaw(a=5.0, p_M=0.0)
        with pytest.raises(InvalidLawError):
            GrowthLaw(a=5.0)  # p_M missing

    def test_tabulated_matches_linear_knots(self):
        # linear knots: the monotone cubic reproduces the line exactly
        knots = [[0.0, 5.0], [0.5, 2.5], [1.0, 0.0]]
        tab = GrowthLaw(knots=knots)
        lin = GrowthLaw(a=5.0, p_M=1.0)
        ps = np.linspace(0.0, 1.0, 101)
        np.testing.assert_allclose(tab.phi(ps), lin.phi(ps), atol=1e-12)
        assert tab.p_M == pytest.approx(1.0)

    def test_tabulated_rejects_bad_knots(self):
        with pytest.raises(InvalidLawError):
            GrowthLaw(knots=[[0.0, 5.0], [1.0, 1.0]])  # does not vanish at the end
        with pytest.raises(InvalidLawError):
            GrowthLaw(knots=[[0.1, 5.0], [1.0, 0.0]])  # does not start at p = 0
        with pytest.raises(InvalidLawError):
            GrowthLaw(knots=[[0.0, 1.0], [0.5, 3.0], [1.0, 0.0]])  # not decreasing
        with pytest.raises(InvalidLawError):
            GrowthLaw(knots=[[0.0, 5.0]])  # too few knots

    def test_tabulated_out_of_range_raises(self):
        tab = GrowthLaw(knots=[[0.0, 5.0], [1.0, 0.0]])
        with pytest.raises(InvalidLawError):
            tab.phi(1.5)

    def test_equality_and_hash(self):
        a = GrowthLaw(a=5.0, p_M=1.0)
        b = GrowthLaw(a=5.0, p_M=1.0)
        c = GrowthLaw(a=4.0, p_M=1.0)
        assert a == b and hash(a) == hash(b)
        assert a != c


class TestDerivedQuantities:
    def test_growth_potential_linear_closed_form(self):
        law = GrowthLaw(a=5.0, p_M=1.0)
        for p in (0.0, 0.3, 1.0):
            assert growth_potential(p, law) == pytest.approx(5.0 * (p - p * p / 2.0), abs=1e-12)

    def test_growth_potential_tabulated_quadrature(self):
        tab = GrowthLaw(knots=[[0.0, 5.0], [0.5, 2.5], [1.0, 0.0]])
        assert growth_potential(1.0, tab) == pytest.approx(2.5, abs=1e-8)

    def test_stiffness_constant(self):
        assert stiffness_constant(GrowthLaw(a=5.0, p_M=1.0)) == pytest.approx(5.0)
        assert stiffness_constant(GrowthLaw(a=2.0, p_M=0.5)) == pytest.approx(1.0)
        tab = GrowthLaw(knots=[[0.0, 5.0], [0.5, 2.5], [1.0, 0.0]])
        assert stiffness_constant(tab) == pytest.approx(5.0, rel=1e-6)

    def test_asymptotic_speed(self):
        # sqrt(2 * Q(p_M)) = sqrt(a) * p_M for the linear law
        assert asymptotic_speed(GrowthLaw(a=5.0, p_M=1.0)) == pytest.approx(math.sqrt(5.0))
        assert asymptotic_speed(GrowthLaw(a=4.0, p_M=0.5)) == pytest.approx(1.0)


class TestNutrientLaw:
    def test_effective_homeostatic_pressure(self):
        base = GrowthLaw(a=1.0, p_M=1.0)
        nut = NutrientLaw(base, c1=1.0, c2=0.5, c_B=1.0)
        # base(p) = c2/(c_B + c1) = 0.25  =>  p = 0.75
        assert nut.p_M == pytest.approx(0.75, abs=1e-12)
        assert nut.phi(nut.p_M, nut.c_B) == pytest.approx(0.0, abs=1e-12)

    def test_rates(self):
        base = GrowthLaw(a=1.0, p_M=1.0)
        nut = NutrientLaw(base, c1=1.0, c2=0.5, c_B=1.0)
        assert nut.phi(0.0, 1.0) == pytest.approx(1.5)
        assert nut.psi(0.3, 0.7) == pytest.approx(0.7)  # consumption is the nutrient level
        assert nut.psi(0.3, 0.0) == 0.0

    def test_rejects_starved_far_field(self):
        base = GrowthLaw(a=1.0, p_M=1.0)
        with pytest.raises(InvalidLawError):
            NutrientLaw(base, c1=0.1, c2=10.0, c_B=0.1)  # growth never positive

    def test_rejects_nonpositive_constants(self):
        base = GrowthLaw(a=1.0, p_M=1.0)
        with pytest.raises(InvalidLawError):
            NutrientLaw(base, c1=0.0, c2=0.5, c_B=1.0)
