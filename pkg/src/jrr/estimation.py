"""Unbiased count estimation and evaluation metrics.

The estimator (observed count - n*q)/(p - q) is shared by the independent and
the pairwise-correlated mechanisms; closed-form variances quantify their
utility. Estimates are deliberately not clipped to [0, n]: clipping would
bias the estimator.
"""

import math
from dataclasses import dataclass

import numpy as np

from jrr.errors import MetricUndefinedError, ParameterError


@dataclass(frozen=True)
class EstimationResult:
    """Per-value estimation summary for one report vector.

    counts are the observed per-value report counts (summing to n);
    estimates are unclamped, so individual entries may be negative or exceed
    n, but for a binary domain they sum to n exactly. var_closed is the
    closed-form estimator variance evaluated at the estimated count (None
    when the perturbation correlation is unknown).
    """

    counts: tuple[int, ...]
    estimates: tuple[float, ...]
    n: int
    var_closed: float | None = None

    def __post_init__(self):
        if sum(self.counts) != self.n:
            raise ParameterError("observed counts must sum to the cohort size")
        if len(self.counts) == 2:
            total = self.estimates[0] + self.estimates[1]
            if abs(total - self.n) > 1e-6 * max(1, self.n):
                raise ParameterError("binary estimates must sum to the cohort size")


def estimate_counts(reports, p: float, q: float, k: int = 2, rho: float | None = None) -> EstimationResult:
    """Estimate every value's count from a report vector.

    Args:
        reports: perturbed values in [0, k).
        p, q: perturbation parameters.
        k: domain size.
        rho: pair correlation; when given (binary domain), var_closed is the
            closed-form variance evaluated at the estimated count, clamped to
            [0, n] for the evaluation only.

    Returns:
        EstimationResult over values 0..k-1.
    """
    reports = np.asarray(reports)
    n = len(reports)
    counts = tuple(int(np.sum(reports == v)) for v in range(k))
    estimates = tuple(estimate(c, n, p, q) for c in counts)
    var_closed = None
    if rho is not None and k == 2 and n >= 2:
        n1_eval = min(max(int(round(estimates[1])), 0), n)
        var_closed = jrr_variance(n, n1_eval, p, rho)
    return EstimationResult(counts=counts, estimates=estimates, n=n, var_closed=var_closed)


def estimate(i_v: float, n: int, p: float, q: float) -> float:
    """Unbiased estimate of the number of contributors holding a value.

    Args:
        i_v: observed count of reports equal to the value.
        n: cohort size.
        p: truthful-report probability.
        q: probability of reporting this value untruthfully.

    Returns:
        (i_v - n*q) / (p - q), unclamped (may be negative or exceed n).
    """
    if p <= q:
        raise ParameterError(f"estimator requires p > q, got p={p}, q={q}")
    return (i_v - n * q) / (p - q)


def rr_variance(n: int, p: float) -> float:
    """Estimator variance under independent binary randomized response."""
    if not 0.5 < p <= 1.0:
        raise ParameterError(f"p must lie in (0.5, 1], got {p}")
    q = 1.0 - p
    return n * p * q / (p - q) ** 2


def jrr_variance(n: int, n1: int, p: float, rho: float) -> float:
    """Closed-form estimator variance under pairwise-correlated perturbation.

    Args:
        n: cohort size, n >= 2.
        n1: number of contributors with value 1.
        p: truthful-report probability.
        rho: correlation of the two truthfulness indicators in a pair.

    Returns:
        pq/(p-q)^2 * (n + rho*((2*n1 - n)^2 - n)/(n - 1)); strictly positive
        on the feasible domain and equal to the independent-mechanism variance
        at rho = 0.
    """
    if n < 2:
        raise ParameterError(f"need n >= 2, got {n}")
    if not 0 <= n1 <= n:
        raise ParameterError(f"n1 must lie in [0, n], got {n1}")
    q = 1.0 - p
    return p * q / (p - q) ** 2 * (n + rho * ((2 * n1 - n) ** 2 - n) / (n - 1))


def mse(estimates, truths) -> float:
    """Mean squared error of per-value count estimates."""
    estimates = np.asarray(estimates, dtype=float)
    truths = np.asarray(truths, dtype=float)
    if estimates.shape != truths.shape or estimates.size == 0:
        raise MetricUndefinedError("estimates and truths must be non-empty and congruent")
    return float(np.mean((estimates - truths) ** 2))


def are(estimates, truths) -> float:
    """Average relative error over values with non-zero true count.

    Values with a zero true count are excluded (relative error is undefined
    there); raises if every count is zero.
    """
    estimates = np.asarray(estimates, dtype=float)
    truths = np.asarray(truths, dtype=float)
    if estimates.shape != truths.shape or estimates.size == 0:
        raise MetricUndefinedError("estimates and truths must be non-empty and congruent")
    mask = truths > 0
    if not mask.any():
        raise MetricUndefinedError("relative error undefined: every true count is zero")
    return float(np.mean(np.abs(estimates[mask] - truths[mask]) / truths[mask]))


def relative_increase(mse_jrr: float, mse_rr: float) -> float:
    """Relative MSE increase of the correlated mechanism over the baseline."""
    if mse_rr <= 0:
        raise MetricUndefinedError(f"baseline MSE must be positive, got {mse_rr}")
    return (mse_jrr - mse_rr) / mse_rr


def underperforming_range(ratios, mse_jrr, mse_rr) -> float:
    """Width of the contiguous interval around ratio 0.5 where the correlated
    mechanism's MSE exceeds the baseline's.

    Each grid point is treated as covering one grid-step-wide cell, so a run
    of c consecutive underperforming points on a step-h grid has width c*h.
    Returns 0 when the grid point nearest 0.5 is not underperforming.
    """
    ratios = np.asarray(ratios, dtype=float)
    mse_jrr = np.asarray(mse_jrr, dtype=float)
    mse_rr = np.asarray(mse_rr, dtype=float)
    if not (len(ratios) == len(mse_jrr) == len(mse_rr)) or len(ratios) < 2:
        raise ParameterError("curves must share a common grid of at least two points")
    if np.any(np.diff(ratios) <= 0):
        raise ParameterError("ratio grid must be strictly increasing")
    worse = mse_jrr > mse_rr
    center = int(np.argmin(np.abs(ratios - 0.5)))
    if not worse[center]:
        return 0.0
    lo = center
    while lo > 0 and worse[lo - 1]:
        lo -= 1
    hi = center
    while hi < len(ratios) - 1 and worse[hi + 1]:
        hi += 1
    step = float(np.median(np.diff(ratios)))
    return (ratios[hi] - ratios[lo]) + step


def underperforming_boundary(n: int) -> tuple[float, float]:
    """Theoretical ratio interval where negative correlation hurts: the
    variance's rho term changes sign at 1/2 +- 1/(2*sqrt(n))."""
    half_width = 1.0 / (2.0 * math.sqrt(n))
    return 0.5 - half_width, 0.5 + half_width
