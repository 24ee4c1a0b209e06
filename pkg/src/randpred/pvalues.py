"""Exact p-values over binary nonconformity summaries.

Given m calibration summaries containing k ones and a nonconforming test
summary, the worst-case IID probability of seeing something at least as
extreme is

    max_{p in [0,1]}  sum_{i=0}^{k} C(m,i) p^(i+1) (1-p)^(m-i),

the supremum over Bernoulli(p) product measures of the probability that
the test summary is 1 and at most k calibration summaries are.  This
module maximizes that objective robustly (dense grid bracket, then
golden-section refinement), provides the closed forms available at k=0
and k=1, computes the asymptotic constants a_k with
m * pvalue(m, k) -> a_k, and implements the rank-based conformal p-value
together with a construction that strictly dominates it.

The maximizer does not assume unimodality: the grid locates the global
maximum bracket first, and refinement only sharpens it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence, Tuple

import numpy as np

from .core import SummarySequence

__all__ = [
    "EngineConfig",
    "DEFAULT_CONFIG",
    "AsymptoticConstant",
    "objective",
    "maximize_objective",
    "verification_scan",
    "binary_irp_pvalue",
    "exact_pvalue_k0",
    "optimal_p_k1",
    "asymptotic_constant",
    "icp_pvalue",
    "dominating_pvalue",
    "binary_irp_pvariable",
    "icp_pvariable",
    "dominating_pvariable",
]

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_INV_PHI_SQ = (3.0 - math.sqrt(5.0)) / 2.0


@dataclass(frozen=True)
class EngineConfig:
    """Numerical knobs for the p-value engine.

    Parameters
    ----------
    grid_points : int
        Size of the initial dense grid over p used to bracket the global
        maximum.  At least 64.
    refine_tol : float
        Absolute bracket width at which golden-section refinement stops.
    constant_tol : float
        Relative tolerance for the stationarity residual of the
        asymptotic-constant solver (relative to the dominant term of the
        stationarity equation, whose magnitude grows like c^(k+1)/k!).
    """

    grid_points: int = 4096
    refine_tol: float = 1e-14
    constant_tol: float = 1e-13

    def __post_init__(self):
        if self.grid_points < 64:
            raise ValueError(f"grid_points must be >= 64, got {self.grid_points}")
        if not self.refine_tol > 0:
            raise ValueError(f"refine_tol must be positive, got {self.refine_tol}")
        if not self.constant_tol > 0:
            raise ValueError(f"constant_tol must be positive, got {self.constant_tol}")


DEFAULT_CONFIG = EngineConfig()


@dataclass(frozen=True)
class AsymptoticConstant:
    """Limit constant a_k with m * pvalue(m, k) -> a_k as m grows.

    c_star is the optimal Bernoulli rate scaled by m (p ~ c_star/m),
    the unique positive root of  sum_{i=0}^k c^i/i! = c^(k+1)/k!,
    and a_k = sum_{i=0}^k c_star^(i+1) exp(-c_star)/i!.
    """

    k: int
    c_star: float
    a_k: float


def _validate_mk(m: int, k: int) -> None:
    if not isinstance(m, int) or isinstance(m, bool) or m < 1:
        raise ValueError(f"m must be a positive integer, got {m!r}")
    if not isinstance(k, int) or isinstance(k, bool) or not 0 <= k <= m:
        raise ValueError(f"k must be an integer in [0, m={m}], got {k!r}")


@lru_cache(maxsize=65536)
def _log_binom(m: int, i: int) -> float:
    return math.lgamma(m + 1) - math.lgamma(i + 1) - math.lgamma(m - i + 1)


def objective(m: int, k: int, p: float) -> float:
    """Evaluate sum_{i=0}^k C(m,i) p^(i+1) (1-p)^(m-i) at a single p.

    Each term is computed in log space so that nothing overflows or
    underflows prematurely even for m around 10^6; the k+1 terms are
    combined with compensated summation.
    """
    _validate_mk(m, k)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    if p == 0.0:
        return 0.0
    if p == 1.0:
        return 1.0 if k == m else 0.0
    log_p = math.log(p)
    log_q = math.log1p(-p)
    return math.fsum(
        math.exp(_log_binom(m, i) + (i + 1) * log_p + (m - i) * log_q)
        for i in range(k + 1)
    )


def _grid_values(m: int, k: int, ps: np.ndarray) -> np.ndarray:
    """Vectorized objective over a grid of p values (k < m assumed)."""
    with np.errstate(divide="ignore"):
        log_p = np.log(ps)
        log_q = np.log1p(-ps)
    total = np.zeros_like(ps)
    for i in range(k + 1):
        total += np.exp(_log_binom(m, i) + (i + 1) * log_p + (m - i) * log_q)
    return total


def _golden_section(f, a: float, b: float, tol: float) -> Tuple[float, float]:
    """Shrink [a, b] around a maximum of f to width tol; return (x, f(x)).

    Ties keep the left subinterval: on the underflowed-to-zero plateau
    that can appear to the right of a sharp peak at large m, discarding
    the left side would discard the peak itself.
    """
    h = b - a
    x1 = a + _INV_PHI_SQ * h
    x2 = a + _INV_PHI * h
    f1 = f(x1)
    f2 = f(x2)
    while h > tol:
        if f1 >= f2:
            b = x2
            x2, f2 = x1, f1
            h = b - a
            x1 = a + _INV_PHI_SQ * h
            f1 = f(x1)
        else:
            a = x1
            x1, f1 = x2, f2
            h = b - a
            x2 = a + _INV_PHI * h
            f2 = f(x2)
    x_mid = 0.5 * (a + b)
    return x_mid, f(x_mid)


def maximize_objective(
    m: int, k: int, cfg: Optional[EngineConfig] = None
) -> Tuple[float, float]:
    """Maximize the objective over p in [0,1]; return (argmax, maximum).

    A dense grid locates the bracket containing the global maximum, then
    golden-section refinement sharpens it to cfg.refine_tol.  The better
    of the refined point and the best grid point is returned, so
    refinement can never lose to the scan.
    """
    _validate_mk(m, k)
    cfg = cfg or DEFAULT_CONFIG
    if k == m:
        return 1.0, 1.0
    ps = np.linspace(0.0, 1.0, cfg.grid_points)
    values = _grid_values(m, k, ps)
    best = int(np.argmax(values))
    lo = ps[max(best - 1, 0)]
    hi = ps[min(best + 1, cfg.grid_points - 1)]
    x, fx = _golden_section(lambda p: objective(m, k, p), lo, hi, cfg.refine_tol)
    if values[best] > fx:
        return float(ps[best]), float(values[best])
    return x, fx


def verification_scan(
    m: int, k: int, cfg: Optional[EngineConfig] = None, factor: int = 10
) -> Tuple[float, float]:
    """Exhaustive grid scan at factor times the configured resolution.

    A slow independent check on maximize_objective for use in tests and
    audits; returns (argmax, maximum) over the finer grid.
    """
    _validate_mk(m, k)
    cfg = cfg or DEFAULT_CONFIG
    if k == m:
        return 1.0, 1.0
    ps = np.linspace(0.0, 1.0, factor * cfg.grid_points)
    values = _grid_values(m, k, ps)
    best = int(np.argmax(values))
    return float(ps[best]), float(values[best])


@lru_cache(maxsize=65536)
def _pvalue_cached(m: int, k: int, cfg: EngineConfig) -> float:
    return maximize_objective(m, k, cfg)[1]


def binary_irp_pvalue(m: int, k: int, cfg: Optional[EngineConfig] = None) -> float:
    """Exact p-value for a nonconforming test summary with k calibration ones.

    Returns max_p sum_{i=0}^k C(m,i) p^(i+1) (1-p)^(m-i).  The degenerate
    k = m case returns exactly 1: the objective collapses to p and the
    event becomes sure under p = 1.
    """
    _validate_mk(m, k)
    if k == m:
        return 1.0
    return _pvalue_cached(m, k, cfg or DEFAULT_CONFIG)


def exact_pvalue_k0(m: int) -> float:
    """Closed-form p-value at k = 0: m^m / (m+1)^(m+1).

    Evaluated as exp(-log1p(m) - m*log1p(1/m)), an algebraic rearrangement
    of exp(m log m - (m+1) log(m+1)) that avoids cancelling two nearly
    equal large logarithms at large m.  Satisfies
    exact_pvalue_k0(m) <= exp(-1)/m for every m >= 1.
    """
    if not isinstance(m, int) or isinstance(m, bool) or m < 1:
        raise ValueError(f"m must be a positive integer, got {m!r}")
    return math.exp(-math.log1p(m) - m * math.log1p(1.0 / m))


def optimal_p_k1(m: int) -> float:
    """Argmax of the k = 1 objective: (m - 2 + sqrt(5m^2 - 4m)) / (2(m^2 - 1)).

    The stationarity condition at k = 1 is a quadratic in p; this is its
    root in [0, 1].  Grows like phi/m with phi the golden ratio.  m = 1
    is rejected: the denominator vanishes and k = 1 = m is the degenerate
    case handled by binary_irp_pvalue.
    """
    if not isinstance(m, int) or isinstance(m, bool) or m < 2:
        raise ValueError(f"m must be an integer >= 2, got {m!r}")
    return (m - 2 + math.sqrt(5.0 * m * m - 4.0 * m)) / (2.0 * (m * m - 1.0))


def _stationarity_residual(k: int, c: float) -> float:
    """Normalized stationarity residual  k! * sum_{i=0}^k c^i/i! / c^(k+1) - 1.

    Strictly decreasing in c > 0 (every summand k!/(i! c^(k+1-i)) is),
    diverging to +inf at 0+ and tending to -1 at infinity, so the sign
    change brackets the unique positive root of
    sum_{i=0}^k c^i/i! = c^(k+1)/k!.
    """
    total = 0.0
    term = 1.0 / c
    for j in range(k + 1):
        total += term
        term *= (k - j) / c
    return total - 1.0


def asymptotic_constant(k: int, cfg: Optional[EngineConfig] = None) -> AsymptoticConstant:
    """Solve the stationarity equation for c_star and compute a_k.

    Bisection on [1e-12, k+3]: the normalized residual is +inf near 0 and
    at c = k+3 the sum is below 1/(c-k) = 1/3, so the bracket always
    straddles the root.  Examples: c_star(0) = 1 with a_0 = exp(-1);
    c_star(1) is the golden ratio.
    """
    if not isinstance(k, int) or isinstance(k, bool) or k < 0:
        raise ValueError(f"k must be a nonnegative integer, got {k!r}")
    cfg = cfg or DEFAULT_CONFIG
    lo, hi = 1e-12, float(k + 3)
    r_lo = _stationarity_residual(k, lo)
    r_hi = _stationarity_residual(k, hi)
    if not (r_lo > 0 > r_hi):
        raise RuntimeError(
            "stationarity-root bracket failed: "
            f"residual({lo}) = {r_lo}, residual({hi}) = {r_hi} for k = {k}"
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _stationarity_residual(k, mid) > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= cfg.constant_tol * max(1.0, lo):
            break
    c = 0.5 * (lo + hi)

    # a_k = exp(-c) * sum_{i=0}^k c^(i+1)/i!, the i-th power term built
    # iteratively to keep every intermediate in range for k <= 64.
    terms = []
    term = c
    for i in range(k + 1):
        terms.append(term)
        term *= c / (i + 1)
    a_k = math.exp(-c) * math.fsum(terms)
    return AsymptoticConstant(k=k, c_star=c, a_k=a_k)


def icp_pvalue(calibration_alphas: Sequence[float], test_alpha: float) -> Fraction:
    """Rank-based conformal p-value (1 + #{alpha_j >= test}) / (m + 1).

    The test summary always counts itself.  Returned as an exact rational:
    the value is a multiple of 1/(m+1) by construction, and exact
    arithmetic makes downstream dominance comparisons bit-reliable.
    float() renders it when a real is needed.
    """
    alphas = list(calibration_alphas)
    if not alphas:
        raise ValueError("calibration_alphas must be nonempty")
    count = sum(1 for a in alphas if a >= test_alpha)
    return Fraction(1 + count, len(alphas) + 1)


def dominating_pvalue(
    calibration_alphas: Sequence[float], test_alpha: float, threshold_a: float
) -> Fraction:
    """A p-variable that strictly dominates the rank-based conformal one.

    Returns m^m/(m+1)^(m+1) when the test summary strictly exceeds
    threshold_a while every calibration summary lies strictly below it,
    and the rank-based value otherwise.  In the first case the rank-based
    value is 1/(m+1), which is strictly larger, so the construction is
    never worse and sometimes better.  Exact rationals throughout, so
    equality on the fall-through branch is exact.
    """
    alphas = list(calibration_alphas)
    if not alphas:
        raise ValueError("calibration_alphas must be nonempty")
    m = len(alphas)
    if test_alpha > threshold_a and all(a < threshold_a for a in alphas):
        return Fraction(m**m, (m + 1) ** (m + 1))
    return icp_pvalue(alphas, test_alpha)


def binary_irp_pvariable(seq: SummarySequence, cfg: Optional[EngineConfig] = None) -> float:
    """Engine p-variable on a binary summary sequence.

    A conforming test summary yields p-value 1 (the aggregating statistic
    max(test - mean, 0) is at its minimum, so the exceedance event is
    sure); a nonconforming one yields binary_irp_pvalue(m, k).
    """
    if seq.test_summary == 0:
        return 1.0
    return binary_irp_pvalue(seq.m, seq.k, cfg)


def icp_pvariable(seq: SummarySequence) -> Fraction:
    """Rank-based conformal p-variable on a binary summary sequence."""
    return icp_pvalue(seq.calibration_summaries, seq.test_summary)


def dominating_pvariable(seq: SummarySequence, threshold_a: float = 0.5) -> Fraction:
    """Dominating p-variable on a binary summary sequence.

    Any threshold_a strictly between 0 and 1 identifies the same event on
    bits: test summary 1 with zero calibration ones.
    """
    return dominating_pvalue(seq.calibration_summaries, seq.test_summary, threshold_a)
