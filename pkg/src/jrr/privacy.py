"""Privacy accounting under collusion and the (p, rho) grid search.

A colluding group peer whose truthfulness is known shifts the target's
conditional truthful-report probability to one of four values; the accountant
bounds the resulting log-likelihood ratio for a worst-case mix of m colluders
among the n - 1 possible peers, and the search walks a (p, rho) grid for the
most negative correlation affordable under a budget.
"""

import math
from dataclasses import dataclass

import numpy as np

from jrr.errors import ParameterError

# Slack applied to the e^epsilon side of feasibility comparisons so grid
# points sitting exactly on the boundary do not flap on rounding.
FEASIBILITY_SLACK = 1e-12


@dataclass(frozen=True)
class PrivacyBudget:
    """Target budget epsilon with at most m_max colluders among n contributors."""

    epsilon: float
    m_max: int
    n: int

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ParameterError(f"epsilon must be positive, got {self.epsilon}")
        if not 0 <= self.m_max <= self.n - 1:
            raise ParameterError(
                f"m_max must lie in [0, n-1] = [0, {self.n - 1}], got {self.m_max}"
            )


@dataclass(frozen=True)
class SearchConfig:
    """Grid granularity of the parameter search."""

    delta_p: float = 1e-4
    delta_rho: float = 1e-4

    def __post_init__(self):
        if self.delta_p <= 0 or self.delta_rho <= 0:
            raise ParameterError("search steps must be positive")


def p_extremes(p: float, rho: float) -> tuple[float, float]:
    """Extreme conditional truthful-report probabilities given a peer's truthfulness.

    Returns:
        (p_max, p_min) = (max{(1-rho)p, p+rho*q}, min{(1-rho)q, q+rho*p}).
    """
    q = 1.0 - p
    p_max = max((1.0 - rho) * p, p + rho * q)
    p_min = min((1.0 - rho) * q, q + rho * p)
    return p_max, p_min


def effective_epsilon(p: float, rho: float, n: int, m: int) -> float:
    """Privacy level against a collector colluding with m contributors.

    Args:
        p: truthful-report probability.
        rho: pair correlation.
        n: cohort size.
        m: number of colluders, 0 <= m <= n - 1.

    Returns:
        ln((m*p_max + (n-m-1)*p) / (m*p_min + (n-m-1)*q)), or inf when the
        denominator is non-positive (no finite guarantee).
    """
    if not 0 <= m <= n - 1:
        raise ParameterError(f"m must lie in [0, n-1] = [0, {n - 1}], got {m}")
    q = 1.0 - p
    p_max, p_min = p_extremes(p, rho)
    num = m * p_max + (n - m - 1) * p
    den = m * p_min + (n - m - 1) * q
    if den <= 0.0:
        return math.inf
    return math.log(num / den)


def is_feasible(p: float, rho: float, budget: PrivacyBudget) -> bool:
    """Whether (p, rho) satisfies the budget with m = m_max colluders.

    Checks the privacy constraint together with the domain constraints
    0.5 < p <= 1 and 1 - 1/p <= rho <= 1. The e^epsilon comparison carries a
    1e-12 absolute slack so boundary grid points are accepted consistently.
    """
    if not 0.5 < p <= 1.0:
        return False
    if not 1.0 - 1.0 / p - FEASIBILITY_SLACK <= rho <= 1.0 + FEASIBILITY_SLACK:
        return False
    q = 1.0 - p
    p_max, p_min = p_extremes(p, rho)
    m = budget.m_max
    num = m * p_max + (budget.n - m - 1) * p
    den = m * p_min + (budget.n - m - 1) * q
    if den <= 0.0:
        return False
    return num <= (math.exp(budget.epsilon) + FEASIBILITY_SLACK) * den


def search_params(
    budget: PrivacyBudget, cfg: SearchConfig = SearchConfig()
) -> tuple[float, float] | None:
    """Grid search for the highest-p, most-negative-rho feasible pair.

    Starting from p = e^eps/(1+e^eps) - delta_p and descending, rho is scanned
    upward from its domain floor 1 - 1/p; the first feasible grid point wins.
    (p = e^eps/(1+e^eps) itself is skipped: only rho = 0 is feasible there.)

    Returns:
        (p, rho), or None when no grid point is feasible — which on this grid
        only happens when e^eps/(1+e^eps) - delta_p already falls at or below
        0.5, i.e. the budget is below the grid's resolution.
    """
    p_start = math.exp(budget.epsilon) / (1.0 + math.exp(budget.epsilon)) - cfg.delta_p
    i = 0
    while True:
        p = p_start - i * cfg.delta_p
        if p <= 0.5:
            return None
        rho = _first_feasible_rho(p, budget, cfg.delta_rho)
        if rho is not None:
            return p, rho
        i += 1


def _first_feasible_rho(p: float, budget: PrivacyBudget, delta_rho: float) -> float | None:
    """First feasible rho on the grid floor + j*delta_rho, floor = 1 - 1/p.

    Evaluated vectorized; identical to the sequential ascending scan.
    """
    floor = 1.0 - 1.0 / p
    count = int(math.floor((1.0 - floor) / delta_rho + FEASIBILITY_SLACK)) + 1
    rhos = floor + delta_rho * np.arange(count)
    q = 1.0 - p
    p_max = np.maximum((1.0 - rhos) * p, p + rhos * q)
    p_min = np.minimum((1.0 - rhos) * q, q + rhos * p)
    m = budget.m_max
    num = m * p_max + (budget.n - m - 1) * p
    den = m * p_min + (budget.n - m - 1) * q
    ok = (den > 0.0) & (num <= (math.exp(budget.epsilon) + FEASIBILITY_SLACK) * den)
    idx = int(np.argmax(ok))
    if not ok[idx]:
        return None
    return float(rhos[idx])
