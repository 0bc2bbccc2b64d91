import math
import random
from fractions import Fraction

import mpmath
import pytest
import sympy

from flatbif.errors import InvalidInput, NonPositiveScal
from flatbif.towers import (ProductMetricData, hilbert_einstein_value,
                            lambda_zero, minimal_forcing_degree, singular_scal,
                            sphere_yamabe_threshold, tower_simulate)


def unit_s2_x_t2(lam=1):
    return ProductMetricData.build(scal_g="8*pi", vol_g=1, dim_m=2,
                                   scal_h=0, vol_h=1, dim_f=2, lam=lam)


class TestLambdaZero:
    def test_flat_second_factor(self):
        assert lambda_zero(1, 0) == 0

    def test_negative_curvature(self):
        lz = lambda_zero("8*pi", -2)
        assert float(lz) == pytest.approx(1 / (4 * math.pi))

    def test_positive_curvature_clamped(self):
        assert lambda_zero(3, 5) == 0

    def test_needs_positive_scal_g(self):
        with pytest.raises(InvalidInput):
            lambda_zero(-1, 0)


class TestHilbertEinstein:
    def test_flagship_value(self):
        a = hilbert_einstein_value(unit_s2_x_t2())
        assert sympy.simplify(a - 8 * sympy.pi) == 0

    def test_volume_homogeneity(self):
        # doubling the volume at n = 4 multiplies the value by sqrt(2)
        p1 = unit_s2_x_t2()
        p2 = ProductMetricData.build(scal_g="8*pi", vol_g=2, dim_m=2,
                                     scal_h=0, vol_h=1, dim_f=2, lam=1)
        ratio = hilbert_einstein_value(p2) / hilbert_einstein_value(p1)
        assert sympy.simplify(ratio - sympy.sqrt(2)) == 0

    def test_lambda_monotone_for_flat_factor(self):
        values = [float(hilbert_einstein_value(unit_s2_x_t2(lam)).evalf(20))
                  for lam in (1, 2, 4, 9)]
        assert values == sorted(values)

    def test_homothety_invariance(self):
        # scaling the whole product metric by c: scal -> scal/c, each
        # factor volume -> c^(dim/2) * volume; the value is unchanged
        rng = random.Random(11)
        base = ProductMetricData.build(scal_g="8*pi", vol_g=1, dim_m=2,
                                       scal_h=0, vol_h=1, dim_f=2, lam=1)
        for _ in range(10):
            c = sympy.Rational(rng.randint(1, 9), rng.randint(1, 9))
            scaled = ProductMetricData.build(
                scal_g=8 * sympy.pi / c, vol_g=c, dim_m=2,
                scal_h=0, vol_h=c, dim_f=2, lam=1)
            diff = hilbert_einstein_value(scaled) - hilbert_einstein_value(base)
            assert sympy.simplify(diff) == 0

    def test_nonpositive_scal_rejected(self):
        p = ProductMetricData.build(scal_g=1, vol_g=1, dim_m=3,
                                    scal_h=-8, vol_h=1, dim_f=2, lam=2)
        with pytest.raises(NonPositiveScal):
            hilbert_einstein_value(p)


class TestSphereThreshold:
    def test_dimension_four_closed_form(self):
        y = sphere_yamabe_threshold(4)
        assert sympy.simplify(y - 8 * sympy.sqrt(6) * sympy.pi) == 0
        assert float(y.evalf(20)) == pytest.approx(61.5624, abs=1e-4)

    def test_dimension_three(self):
        y = sphere_yamabe_threshold(3)
        assert float(y.evalf(20)) == pytest.approx(43.823, abs=1e-3)

    def test_matches_unit_round_sphere_value(self):
        # independent path: n(n-1) Vol(S^n)^(2/n) computed with mpmath Gamma
        for n in (3, 4, 5):
            y = float(sphere_yamabe_threshold(n).evalf(30))
            vol = float(2 * mpmath.pi ** ((n + 1) / 2) / mpmath.gamma((n + 1) / 2))
            assert y == pytest.approx(n * (n - 1) * vol ** (2 / n), rel=1e-12)

    def test_equals_functional_of_round_sphere(self):
        # radius-1 round sphere as a degenerate "product" with a point
        from flatbif.spectra import sphere_volume
        for n in (3, 4, 5):
            p = ProductMetricData.build(
                scal_g=n * (n - 1), vol_g=sphere_volume(n), dim_m=n,
                scal_h=0, vol_h=1, dim_f=0, lam=1)
            diff = hilbert_einstein_value(p) - sphere_yamabe_threshold(n)
            assert sympy.simplify(diff) == 0


class TestMinimalForcingDegree:
    def test_flagship_strictness(self):
        report = minimal_forcing_degree(unit_s2_x_t2())
        assert report.degree == 7
        assert report.equality_below
        assert report.margin_below_degree == pytest.approx(0.0, abs=1e-25)
        assert report.margin_at_degree > 0

    def test_already_above(self):
        p = ProductMetricData.build(scal_g="8*pi", vol_g=100, dim_m=2,
                                    scal_h=0, vol_h=1, dim_f=2, lam=1)
        report = minimal_forcing_degree(p)
        assert report.degree == 1

    def test_halving_volume_roughly_doubles_degree(self):
        base = minimal_forcing_degree(unit_s2_x_t2()).degree
        halved = minimal_forcing_degree(ProductMetricData.build(
            scal_g="8*pi", vol_g=1, dim_m=2, scal_h=0, vol_h="1/2",
            dim_f=2, lam=1)).degree
        assert halved in (2 * base - 1, 2 * base, 2 * base + 1)

    def test_certificates(self):
        rng = random.Random(19)
        for _ in range(5):
            vol = Fraction(rng.randint(1, 5), rng.randint(1, 5))
            p = ProductMetricData.build(scal_g="8*pi", vol_g=vol, dim_m=2,
                                        scal_h=0, vol_h=1, dim_f=2, lam=1)
            report = minimal_forcing_degree(p)
            if report.degree > 1:
                assert report.margin_below_degree <= 1e-20
            assert report.margin_at_degree > 0


class TestTowerSimulate:
    def test_flagship_chain(self):
        ledger = tower_simulate(unit_s2_x_t2(), [2, 2, 2])
        assert [lv.cumulative_degree for lv in ledger.levels] == [2, 4, 8]
        assert [lv.crossed for lv in ledger.levels] == [False, False, True]
        assert ledger.first_crossing == 3

    def test_degree_seven_crosses_immediately(self):
        ledger = tower_simulate(unit_s2_x_t2(), [7])
        assert ledger.first_crossing == 1

    def test_degree_six_equality_does_not_cross(self):
        ledger = tower_simulate(unit_s2_x_t2(), [6])
        assert ledger.first_crossing is None
        assert not ledger.levels[0].crossed

    def test_empty_chain(self):
        ledger = tower_simulate(unit_s2_x_t2(), [])
        assert ledger.levels == ()
        assert ledger.first_crossing is None

    def test_volume_multiplicativity(self):
        degrees = [2, 3, 2, 5]
        ledger = tower_simulate(unit_s2_x_t2(), degrees)
        cum = 1
        for lv, k in zip(ledger.levels, degrees):
            cum *= k
            assert lv.cumulative_degree == cum
            assert sympy.simplify(lv.volume - cum) == 0

    def test_a_values_distinct(self):
        ledger = tower_simulate(unit_s2_x_t2(), [2, 2])
        assert ledger.a_values_strictly_increase
        assert sympy.simplify(ledger.levels[0].a_value
                              - ledger.levels[1].a_value) != 0

    def test_bad_degree(self):
        with pytest.raises(InvalidInput):
            tower_simulate(unit_s2_x_t2(), [1])


class TestSingularScal:
    def test_reference_values(self):
        assert singular_scal(5, 1) == (4, "positive")
        assert singular_scal(4, 1) == (0, "zero")
        assert singular_scal(5, 2) == (-4, "negative")

    def test_regime_boundaries(self):
        for m in range(3, 13):
            for k in range(0, m - 1):
                value, regime = singular_scal(m, k)
                assert value == (m - 2 * k - 2) * (m - 1)
                if 2 * k < m - 2:
                    assert regime == "positive" and value > 0
                elif 2 * k == m - 2:
                    assert regime == "zero" and value == 0
                else:
                    assert regime == "negative" and value < 0

    def test_range_validation(self):
        with pytest.raises(InvalidInput):
            singular_scal(5, -1)
        with pytest.raises(InvalidInput):
            singular_scal(5, 4)
