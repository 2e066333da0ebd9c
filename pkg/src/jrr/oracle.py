"""Exact brute-force ground truth for small cohorts.

Everything here enumerates outcome spaces outright — report vectors over all
pairings, truthfulness vectors for privacy ratios, sampler paths — and is the
independent check on the closed forms and samplers elsewhere in the package.
Size caps are asserted, not silently truncated.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from jrr.errors import EnumerationSizeError, ParameterError
from jrr.estimation import estimate
from jrr.grouping import Pairing
from jrr.mechanisms import (
    PerturbParams,
    SamplerConfig,
    JointTable,
    joint_table,
    kary_joint_entries,
    sampler_decide,
)

MAX_REPORT_N = 12
MAX_PRIVACY_N = 6


@dataclass(frozen=True)
class ExactDistribution:
    """Exact distribution of a report vector over a small cohort.

    outcomes holds one report vector per row; probs the matching
    probabilities (summing to 1 within 1e-12). provenance records the
    enumeration inputs.
    """

    outcomes: np.ndarray
    probs: np.ndarray
    k: int
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.probs.min() < -1e-15:
            raise ParameterError("negative outcome probability")
        total = math.fsum(self.probs.tolist())
        if abs(total - 1.0) > 1e-12:
            raise ParameterError(f"outcome probabilities sum to {total}")

    @property
    def n(self) -> int:
        return self.outcomes.shape[1]

    def support(self) -> list[tuple[tuple[int, ...], float]]:
        """(report vector, probability) pairs, in enumeration order."""
        return [
            (tuple(int(v) for v in row), float(pr))
            for row, pr in zip(self.outcomes, self.probs)
        ]

    def count_distribution(self, value: int = 1) -> np.ndarray:
        """Exact distribution of the number of reports equal to `value`."""
        counts = (self.outcomes == value).sum(axis=1)
        out = np.zeros(self.n + 1)
        np.add.at(out, counts, self.probs)
        return out


def all_pairings(n: int) -> list[tuple[Pairing, int | None]]:
    """Every pairing of {0..n-1}: perfect matchings, or matchings plus one
    leftover index for odd n."""
    idx = list(range(n))
    if n % 2 == 0:
        return [(m, None) for m in _matchings(idx)]
    out = []
    for i, lo in enumerate(idx):
        rest = idx[:i] + idx[i + 1 :]
        out.extend((m, lo) for m in _matchings(rest))
    return out


def _matchings(idx: list[int]):
    if not idx:
        yield ()
        return
    a = idx[0]
    for j in range(1, len(idx)):
        b = idx[j]
        rest = idx[1:j] + idx[j + 1 :]
        for sub in _matchings(rest):
            yield ((a, b),) + sub


def _pair_outcome_matrix(xa: int, xb: int, params: PerturbParams) -> np.ndarray:
    """k x k matrix of Pr[(ya, yb)] for a pair with true values (xa, xb)."""
    k = params.k
    if k == 2:
        t = joint_table(params)
        probs = {(1, 1): t.p11, (1, 0): t.p10, (0, 1): t.p01, (0, 0): t.p00}
        m = np.empty((2, 2))
        for ya in (0, 1):
            for yb in (0, 1):
                m[ya, yb] = probs[(int(ya == xa), int(yb == xb))]
        return m
    both, one, neither = kary_joint_entries(params.p, params.q, params.rho, k)
    m = np.empty((k, k))
    for ya in range(k):
        for yb in range(k):
            if ya == xa and yb == xb:
                m[ya, yb] = both
            elif ya == xa or yb == xb:
                m[ya, yb] = one
            else:
                m[ya, yb] = neither
    return m


def _leftover_vector(x: int, params: PerturbParams) -> np.ndarray:
    v = np.full(params.k, params.q)
    v[x] = params.p
    return v


def _reports_for_pairing(
    values: np.ndarray, pairs: Pairing, leftover: int | None, params: PerturbParams
) -> np.ndarray:
    """Exact report-vector distribution for one fixed pairing, as a
    (k,)*n probability tensor indexed by contributor report."""
    n = len(values)
    order: list[int] = []
    tensor = np.ones(())
    for a, b in pairs:
        tensor = np.multiply.outer(tensor, _pair_outcome_matrix(values[a], values[b], params))
        order.extend((a, b))
    if leftover is not None:
        tensor = np.multiply.outer(tensor, _leftover_vector(values[leftover], params))
        order.append(leftover)
    # axes currently follow pair order; rearrange to contributor order
    inverse = np.argsort(np.array(order))
    return np.transpose(tensor, axes=inverse)


def enumerate_reports(
    values, params: PerturbParams, pairing: tuple[Pairing, int | None] | None = None
) -> ExactDistribution:
    """Exact joint distribution of the report vector.

    Args:
        values: true values, length n <= 12.
        params: feasible perturbation parameters.
        pairing: a fixed (pairs, leftover) pairing, or None to average
            uniformly over every pairing.

    Returns:
        ExactDistribution over all k^n report vectors.
    """
    values = np.asarray(values, dtype=np.int64)
    n = len(values)
    if n > MAX_REPORT_N:
        raise EnumerationSizeError(f"report enumeration capped at n={MAX_REPORT_N}, got {n}")
    if n < 2:
        raise ParameterError("need at least 2 contributors")
    if values.min() < 0 or values.max() >= params.k:
        raise ParameterError(f"values must lie in [0, {params.k})")

    if pairing is None:
        pairings = all_pairings(n)
        averaged = True
    else:
        pairings = [pairing]
        averaged = False
    weight = 1.0 / len(pairings)
    acc = np.zeros((params.k,) * n)
    for pairs, leftover in pairings:
        acc += weight * _reports_for_pairing(values, pairs, leftover, params)

    outcomes = np.array(
        list(itertools.product(range(params.k), repeat=n)), dtype=np.int8
    )
    return ExactDistribution(
        outcomes=outcomes,
        probs=acc.reshape(-1),
        k=params.k,
        provenance={
            "n": n,
            "values": values.tolist(),
            "p": params.p,
            "q": params.q,
            "rho": params.rho,
            "k": params.k,
            "pairing_averaged": averaged,
        },
    )


def exact_estimator_moments(
    dist: ExactDistribution, p: float, q: float, value: int = 1
) -> tuple[float, float]:
    """Exact mean and variance of the count estimator under a distribution.

    Args:
        dist: exact report-vector distribution.
        p, q: estimator parameters.
        value: domain value whose count is estimated.

    Returns:
        (E[estimate], Var[estimate]), accumulated with compensated summation.
    """
    counts = (dist.outcomes == value).sum(axis=1)
    estimates = np.array([estimate(int(c), dist.n, p, q) for c in counts])
    mean = math.fsum((dist.probs * estimates).tolist())
    var = math.fsum((dist.probs * (estimates - mean) ** 2).tolist())
    return mean, var


def enumerate_sampler_joint(cfg: SamplerConfig) -> JointTable:
    """Exact pair truthfulness distribution induced by the sampler scheme.

    Enumerates all (C1, C2, R1) combinations with R2 = -R1 and accumulates the
    probability of each (T1, T2) decision pattern.
    """
    cvals = (1.5, 0.5, -0.5, -1.5)
    acc = {(1, 1): 0.0, (1, 0): 0.0, (0, 1): 0.0, (0, 0): 0.0}
    for (c1, w1), (c2, w2), r1 in itertools.product(
        zip(cvals, cfg.c_probs), zip(cvals, cfg.c_probs), (1, -1)
    ):
        t1 = sampler_decide(c1, r1)
        t2 = sampler_decide(c2, -r1)
        acc[(t1, t2)] += 0.5 * w1 * w2
    return JointTable(p11=acc[(1, 1)], p10=acc[(1, 0)], p01=acc[(0, 1)], p00=acc[(0, 0)])


def enumerate_kjrr_pair(params: PerturbParams, v1: int, v2: int) -> np.ndarray:
    """Exact k x k outcome distribution of one jointly perturbed k-ary pair."""
    return _pair_outcome_matrix(v1, v2, params)


def exact_privacy_ratio(
    n: int, params: PerturbParams, colluders, target: int
) -> float:
    """Worst-case likelihood ratio for a target's report given colluder truthfulness.

    For each pairing the conditional Pr[report | colluder truthfulness] is exact
    (full truthfulness-vector enumeration); conditionals are then averaged
    uniformly over pairings — colluder truthfulness is treated as exogenous,
    not as evidence about the hidden pairing. The ratio is maximized over the
    target's input pair, the output, and every colluder truthfulness
    assignment.

    Args:
        n: cohort size, n <= 6.
        params: feasible binary parameters.
        colluders: indices whose truthfulness the collector knows.
        target: index under attack, not a colluder.

    Returns:
        max ratio Pr[report | truthfulness] / Pr[report | truthfulness, value flipped].
    """
    if n > MAX_PRIVACY_N:
        raise EnumerationSizeError(f"privacy enumeration capped at n={MAX_PRIVACY_N}, got {n}")
    if params.k != 2:
        raise ParameterError("privacy enumeration is defined for binary domains")
    colluders = tuple(sorted(int(c) for c in colluders))
    if target in colluders:
        raise ParameterError("target must not be a colluder")
    if any(not 0 <= c < n for c in colluders) or not 0 <= target < n:
        raise ParameterError("indices out of range")

    table = joint_table(params)
    pair_prob = {(1, 1): table.p11, (1, 0): table.p10, (0, 1): table.p01, (0, 0): table.p00}
    marginal = {1: table.marginal_p, 0: 1.0 - table.marginal_p}

    pairings = list(all_pairings(n))
    truth_vectors = list(itertools.product((0, 1), repeat=n))

    # per pairing and truthfulness vector: joint probability
    worst = 0.0
    for tc in itertools.product((0, 1), repeat=len(colluders)):
        assignment = dict(zip(colluders, tc))
        # uniform average over pairings of the per-pairing conditional
        avg = {0: 0.0, 1: 0.0}
        for pairs, leftover in pairings:
            num = {0: 0.0, 1: 0.0}
            for tv in truth_vectors:
                if any(tv[c] != assignment[c] for c in colluders):
                    continue
                pr = 1.0
                for a, b in pairs:
                    pr *= pair_prob[(tv[a], tv[b])]
                if leftover is not None:
                    pr *= marginal[tv[leftover]]
                num[tv[target]] += pr
            den = num[0] + num[1]
            if den <= 0.0:
                raise ParameterError(
                    "colluder truthfulness assignment has zero probability under "
                    "some pairing; ratio undefined at this boundary"
                )
            for t in (0, 1):
                avg[t] += (num[t] / den) / len(pairings)
        # maximize over target's (x, x') and output y: with binary values the
        # event {report = y | x} is {T = (y == x)}, so the ratio reduces to the
        # two orderings of avg[1]/avg[0]
        if avg[0] <= 0.0 or avg[1] <= 0.0:
            return math.inf
        worst = max(worst, avg[1] / avg[0], avg[0] / avg[1])
    return worst
