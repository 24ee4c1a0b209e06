import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from randpred import (
    AsymptoticConstant,
    EngineConfig,
    SummarySequence,
    asymptotic_constant,
    binary_irp_pvalue,
    binary_irp_pvariable,
    dominating_pvalue,
    dominating_pvariable,
    exact_pvalue_k0,
    icp_pvalue,
    icp_pvariable,
    maximize_objective,
    objective,
    optimal_p_k1,
    verification_scan,
)

# ---------------------------------------------------------------------------
# Independent oracles.  Nothing below reuses the engine's maximizer.
# ---------------------------------------------------------------------------


def objective_direct(m: int, k: int, p: float) -> float:
    """Direct-power evaluation of the objective (safe for small m)."""
    return sum(
        math.comb(m, i) * p ** (i + 1) * (1.0 - p) ** (m - i) for i in range(k + 1)
    )


def grid_argmax(m: int, k: int, coarse_step: float = 1e-4, fine_step: float = 1e-8) -> float:
    """Two-stage dense-grid argmax of the objective.

    A global coarse scan brackets the maximum (the peak width is of order
    1/m, far above the coarse step for the m used here), then a fine scan
    at fine_step resolution pins the argmax.  No derivative-based
    refinement — this is the brute-force cross-check.
    """

    def values(ps: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore"):
            log_p = np.log(ps)
            log_q = np.log1p(-ps)
        total = np.zeros_like(ps)
        for i in range(k + 1):
            log_c = math.lgamma(m + 1) - math.lgamma(i + 1) - math.lgamma(m - i + 1)
            total += np.exp(log_c + (i + 1) * log_p + (m - i) * log_q)
        return total

    coarse = np.arange(coarse_step, 1.0, coarse_step)
    center = coarse[int(np.argmax(values(coarse)))]
    lo = max(center - 2 * coarse_step, fine_step)
    hi = min(center + 2 * coarse_step, 1.0)
    fine = np.arange(lo, hi, fine_step)
    return float(fine[int(np.argmax(values(fine)))])


GOLDEN_RATIO = (1.0 + math.sqrt(5.0)) / 2.0


def radical_c2() -> float:
    """Closed form for the k=2 stationarity root (cubic radicals)."""
    s = 3.0 * math.sqrt(114.0)
    return (1.0 + (37.0 - s) ** (1.0 / 3.0) + (37.0 + s) ** (1.0 / 3.0)) / 3.0


def radical_c3() -> float:
    """Closed form for the k=3 stationarity root (quartic radicals)."""
    u = (math.sqrt(778.0) - 7.0) ** (1.0 / 3.0)
    r = math.sqrt(4.0 * u - 36.0 / u + 9.0)
    return 0.25 + r / 4.0 + math.sqrt(-u + 9.0 / u + 4.5 + 61.0 / (2.0 * r)) / 2.0


# High-precision a_k values, frozen from an independent 50-digit
# computation of the stationarity root and the numerator sum.
A_K_REFERENCE = {
    0: 0.367879441171442,
    1: 0.839962094657175,
    2: 1.37110160490031,
    3: 1.94238093805015,
    4: 2.54353435408736,
    5: 3.16818481568948,
    6: 3.81202123019644,
    7: 4.47195396210389,
}


# ---------------------------------------------------------------------------
# objective
# ---------------------------------------------------------------------------


class TestObjective:
    def test_zero_at_p_zero(self):
        for m, k in [(1, 0), (5, 2), (50, 10)]:
            assert objective(m, k, 0.0) == 0.0

    def test_reduces_to_p_when_k_equals_m(self):
        for p in (0.0, 0.25, 0.5, 0.9, 1.0):
            assert objective(6, 6, p) == pytest.approx(p, rel=1e-12, abs=1e-15)

    def test_direct_substitution(self):
        assert objective(2, 0, 1.0 / 3.0) == pytest.approx(4.0 / 27.0, rel=1e-12)

    def test_one_at_p_one_only_when_degenerate(self):
        assert objective(4, 4, 1.0) == 1.0
        assert objective(4, 2, 1.0) == 0.0

    @settings(max_examples=200)
    @given(
        m=st.integers(1, 25),
        p=st.floats(0.0, 1.0, allow_nan=False),
        data=st.data(),
    )
    def test_matches_direct_powers(self, m, p, data):
        k = data.draw(st.integers(0, m))
        log_space = objective(m, k, p)
        direct = objective_direct(m, k, p)
        assert log_space == pytest.approx(direct, rel=1e-11, abs=1e-300)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            objective(0, 0, 0.5)
        with pytest.raises(ValueError):
            objective(3, 4, 0.5)
        with pytest.raises(ValueError):
            objective(3, 1, 1.5)


# ---------------------------------------------------------------------------
# binary_irp_pvalue / maximize_objective
# ---------------------------------------------------------------------------


class TestBinaryIrpPvalue:
    def test_m1_k0(self):
        assert binary_irp_pvalue(1, 0) == pytest.approx(0.25, rel=1e-10)

    def test_degenerate_k_equals_m(self):
        for m in (1, 3, 17, 100):
            assert binary_irp_pvalue(m, m) == 1.0

    def test_k1_closed_form_argmax_at_m100(self):
        p_star = (98.0 + math.sqrt(49600.0)) / 19998.0
        assert optimal_p_k1(100) == pytest.approx(p_star, rel=1e-14)
        assert binary_irp_pvalue(100, 1) == pytest.approx(
            objective(100, 1, p_star), rel=1e-12
        )
        assert grid_argmax(100, 1) == pytest.approx(p_star, abs=1e-6)

    def test_agrees_with_exact_k0_sampled(self):
        for m in (1, 2, 7, 33, 250, 1000):
            engine = binary_irp_pvalue(m, 0)
            exact = exact_pvalue_k0(m)
            assert engine == pytest.approx(exact, rel=1e-10)

    def test_agrees_with_verification_scan(self):
        for m in (3, 7, 12):
            for k in range(m):
                engine = binary_irp_pvalue(m, k)
                _, scanned = verification_scan(m, k)
                assert engine >= scanned - 1e-12
                assert engine - scanned <= 1e-7

    def test_argmax_reported_consistently(self):
        p_star, value = maximize_objective(9, 2)
        assert objective(9, 2, p_star) == pytest.approx(value, rel=1e-12)
        assert value == binary_irp_pvalue(9, 2)

    @settings(max_examples=60)
    @given(m=st.integers(1, 30), data=st.data())
    def test_monotone_in_k(self, m, data):
        k = data.draw(st.integers(0, m - 1)) if m > 1 else 0
        if m == 1:
            assert binary_irp_pvalue(1, 0) <= binary_irp_pvalue(1, 1)
        else:
            assert binary_irp_pvalue(m, k) <= binary_irp_pvalue(m, k + 1) + 1e-15

    @settings(max_examples=60)
    @given(m=st.integers(1, 40), data=st.data())
    def test_range(self, m, data):
        k = data.draw(st.integers(0, m))
        v = binary_irp_pvalue(m, k)
        assert 0.0 < v <= 1.0

    def test_custom_config(self):
        coarse = EngineConfig(grid_points=64)
        assert binary_irp_pvalue(5, 1, coarse) == pytest.approx(
            binary_irp_pvalue(5, 1), rel=1e-9
        )

    def test_config_validation(self):
        with pytest.raises(ValueError):
            EngineConfig(grid_points=8)
        with pytest.raises(ValueError):
            EngineConfig(refine_tol=0.0)
        with pytest.raises(ValueError):
            EngineConfig(constant_tol=-1e-9)

    def test_large_m_sharp_peak(self):
        # the argmax sits three orders of magnitude below the grid spacing;
        # the bracket-and-refine path must still find it
        m = 10**6
        value = binary_irp_pvalue(m, 0)
        assert value == pytest.approx(exact_pvalue_k0(m), rel=1e-9)


# ---------------------------------------------------------------------------
# exact_pvalue_k0
# ---------------------------------------------------------------------------


class TestExactK0:
    def test_small_m_closed_forms(self):
        assert exact_pvalue_k0(1) == pytest.approx(0.25, rel=1e-14)
        assert exact_pvalue_k0(2) == pytest.approx(4.0 / 27.0, rel=1e-14)

    def test_matches_exact_rational(self):
        for m in range(1, 51):
            exact = Fraction(m**m, (m + 1) ** (m + 1))
            assert exact_pvalue_k0(m) == pytest.approx(float(exact), rel=1e-13)

    def test_upper_bound_and_asymptotic_sharpness(self):
        for m in (1, 10, 1000, 10**6):
            v = exact_pvalue_k0(m)
            assert v <= math.exp(-1.0) / m
        v = exact_pvalue_k0(10**6)
        assert v >= 0.9 * math.exp(-1.0) / 10**6

    def test_rejects_bad_m(self):
        with pytest.raises(ValueError):
            exact_pvalue_k0(0)
        with pytest.raises(ValueError):
            exact_pvalue_k0(2.0)


# ---------------------------------------------------------------------------
# optimal_p_k1
# ---------------------------------------------------------------------------


class TestOptimalPK1:
    def test_m2_closed_form(self):
        assert optimal_p_k1(2) == pytest.approx(1.0 / math.sqrt(3.0), rel=1e-14)

    def test_golden_ratio_scaling(self):
        assert optimal_p_k1(1000) == pytest.approx(GOLDEN_RATIO / 1000.0, rel=5e-3)

    def test_stationarity_by_finite_differences(self):
        h = 1e-8
        for m in (2, 10, 100, 1000):
            p_star = optimal_p_k1(m)
            derivative = (objective(m, 1, p_star + h) - objective(m, 1, p_star - h)) / (
                2.0 * h
            )
            assert abs(derivative) < 1e-7

    def test_matches_grid_oracle(self):
        assert optimal_p_k1(10) == pytest.approx(grid_argmax(10, 1), abs=1e-6)

    def test_rejects_m1(self):
        with pytest.raises(ValueError):
            optimal_p_k1(1)


# ---------------------------------------------------------------------------
# asymptotic_constant
# ---------------------------------------------------------------------------


class TestAsymptoticConstant:
    def test_k0_exact(self):
        c = asymptotic_constant(0)
        assert c.c_star == pytest.approx(1.0, abs=1e-12)
        assert c.a_k == pytest.approx(math.exp(-1.0), rel=1e-12)

    def test_k1_is_golden_ratio(self):
        assert asymptotic_constant(1).c_star == pytest.approx(GOLDEN_RATIO, abs=1e-10)

    def test_k2_matches_cubic_radicals(self):
        assert asymptotic_constant(2).c_star == pytest.approx(radical_c2(), abs=1e-8)

    def test_k3_matches_quartic_radicals(self):
        assert asymptotic_constant(3).c_star == pytest.approx(radical_c3(), abs=1e-8)

    def test_a_k_reference_values(self):
        for k, expected in A_K_REFERENCE.items():
            assert asymptotic_constant(k).a_k == pytest.approx(expected, rel=1e-10)

    def test_stationarity_residual(self):
        for k in range(13):
            c = asymptotic_constant(k).c_star
            lhs = math.fsum(c**i / math.factorial(i) for i in range(k + 1))
            rhs = c ** (k + 1) / math.factorial(k)
            assert abs(lhs - rhs) <= 1e-12 * max(1.0, rhs)

    def test_numerator_is_stationary_at_c_star(self):
        def numerator(k, c):
            return math.exp(-c) * math.fsum(
                c ** (i + 1) / math.factorial(i) for i in range(k + 1)
            )

        h = 1e-6
        for k in range(8):
            c = asymptotic_constant(k).c_star
            derivative = (numerator(k, c + h) - numerator(k, c - h)) / (2.0 * h)
            assert abs(derivative) < 1e-8

    def test_superiority_below_rank_numerator(self):
        for k in range(8):
            assert asymptotic_constant(k).a_k < k + 1

    def test_solver_reaches_k64(self):
        c = asymptotic_constant(64)
        assert isinstance(c, AsymptoticConstant)
        assert 0.0 < c.c_star < 67.0
        assert math.isfinite(c.a_k) and 0.0 < c.a_k < 65.0
        # normalized residual of the stationarity equation at the root
        total = math.fsum(
            math.factorial(64) / (math.factorial(i) * c.c_star ** (65 - i))
            for i in range(65)
        )
        assert abs(total - 1.0) <= 1e-11

    def test_rejects_negative_k(self):
        with pytest.raises(ValueError):
            asymptotic_constant(-1)


# ---------------------------------------------------------------------------
# icp_pvalue / dominating_pvalue
# ---------------------------------------------------------------------------


class TestIcpPvalue:
    def test_only_test_counts_when_all_below(self):
        assert icp_pvalue([0.1, 0.2, 0.3], 0.9) == Fraction(1, 4)

    def test_all_equal_gives_one(self):
        assert icp_pvalue([0.5, 0.5, 0.5], 0.5) == Fraction(1, 1)

    def test_binary_ties_at_one(self):
        assert icp_pvalue([1, 1, 0, 0, 0], 1) == Fraction(3, 6)

    def test_returns_exact_rational(self):
        assert isinstance(icp_pvalue([0, 0], 1), Fraction)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            icp_pvalue([], 0.5)


class TestDominatingPvalue:
    def test_special_configuration(self):
        value = dominating_pvalue([0.1, 0.1, 0.1, 0.1], 0.9, 0.5)
        assert value == Fraction(256, 3125)
        assert float(value) == pytest.approx(0.08192, rel=1e-15)

    def test_falls_through_to_rank_value(self):
        alphas = [0.1, 0.6, 0.1, 0.1]
        assert dominating_pvalue(alphas, 0.9, 0.5) == icp_pvalue(alphas, 0.9)

    def test_threshold_comparisons_are_strict(self):
        # test summary exactly at the threshold: not the special case
        assert dominating_pvalue([0.1, 0.1], 0.5, 0.5) == icp_pvalue([0.1, 0.1], 0.5)
        # a calibration summary exactly at the threshold: not the special case
        assert dominating_pvalue([0.5, 0.1], 0.9, 0.5) == icp_pvalue([0.5, 0.1], 0.9)

    def test_special_value_beats_rank_value_everywhere(self):
        for m in range(1, 51):
            special = Fraction(m**m, (m + 1) ** (m + 1))
            assert special < Fraction(1, m + 1)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            dominating_pvalue([], 0.5, 0.5)


# ---------------------------------------------------------------------------
# p-variables over summary sequences
# ---------------------------------------------------------------------------


class TestPvariables:
    def test_conforming_test_summary_gives_one(self):
        seq = SummarySequence(calibration_summaries=(1, 0, 1), test_summary=0)
        assert binary_irp_pvariable(seq) == 1.0
        assert icp_pvariable(seq) == Fraction(1, 1)

    def test_engine_pvariable_matches_pvalue(self):
        seq = SummarySequence(calibration_summaries=(1, 0, 0, 0, 1), test_summary=1)
        assert binary_irp_pvariable(seq) == binary_irp_pvalue(5, 2)

    def test_icp_pvariable_counts_ties(self):
        seq = SummarySequence(calibration_summaries=(1, 1, 0, 0), test_summary=1)
        assert icp_pvariable(seq) == Fraction(3, 5)

    def test_dominating_pvariable_special_and_fallthrough(self):
        special = SummarySequence(calibration_summaries=(0, 0, 0, 0), test_summary=1)
        assert dominating_pvariable(special) == Fraction(256, 3125)
        ordinary = SummarySequence(calibration_summaries=(1, 0, 0, 0), test_summary=1)
        assert dominating_pvariable(ordinary) == icp_pvariable(ordinary)

    @settings(max_examples=60)
    @given(bits=st.lists(st.integers(0, 1), min_size=1, max_size=15), t=st.integers(0, 1))
    def test_domination_pointwise(self, bits, t):
        seq = SummarySequence(calibration_summaries=tuple(bits), test_summary=t)
        assert dominating_pvariable(seq) <= icp_pvariable(seq)
