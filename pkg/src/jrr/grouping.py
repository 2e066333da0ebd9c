"""Random pairing of contributors and per-pair perturbation of a cohort.

Pairing is a uniformly random perfect matching, realized as a uniform
permutation with adjacent positions paired (the in-process stand-in for a
secure shuffle of contributor IDs). For odd cohorts the last permuted
contributor is left unpaired and falls back to plain randomized response,
which preserves the truthful-report marginal.
"""

from dataclasses import dataclass

import numpy as np

from jrr.errors import ParameterError, SamplerInfeasibleError
from jrr.mechanisms import (
    PerturbParams,
    joint_table,
    kary_joint_entries,
    sampler_config,
)

Pairing = tuple[tuple[int, int], ...]

MODES = ("direct-joint", "sampler")


@dataclass(frozen=True)
class Cohort:
    """A population of true values together with its pairing.

    Every index in [0, n) appears in exactly one pair, or as the single
    leftover when n is odd. Pairs are stored (low, high) sorted by first
    element so serialization is deterministic.
    """

    values: np.ndarray
    pairing: Pairing
    leftover: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.int64))
        n = len(self.values)
        seen = [i for pair in self.pairing for i in pair]
        if self.leftover is not None:
            seen.append(self.leftover)
        if sorted(seen) != list(range(n)):
            raise ParameterError("pairing must cover every index exactly once")
        if (self.leftover is not None) != (n % 2 == 1):
            raise ParameterError("leftover must be present iff n is odd")

    @property
    def n(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class RAssignment:
    """Per-contributor +-1 signs, opposite within each pair.

    The leftover contributor (if any) carries sign 0, meaning "no sign".
    """

    r: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "r", np.asarray(self.r, dtype=np.int8))


def random_pairing(n: int, rng: np.random.Generator) -> tuple[Pairing, int | None]:
    """Draw a uniformly random pairing of n contributors.

    Args:
        n: cohort size, n >= 2.
        rng: random state.

    Returns:
        (pairs, leftover): pairs normalized to (low, high) and sorted by
        first element; leftover is None for even n, else the unpaired index.
    """
    if n < 2:
        raise ParameterError(f"need at least 2 contributors, got {n}")
    perm = rng.permutation(n)
    m = n - (n % 2)
    pairs = sorted(
        tuple(sorted((int(perm[i]), int(perm[i + 1])))) for i in range(0, m, 2)
    )
    leftover = int(perm[-1]) if n % 2 else None
    return tuple(pairs), leftover


def make_cohort(values, rng: np.random.Generator) -> Cohort:
    """Pair up a value vector into a Cohort with a fresh random pairing."""
    values = np.asarray(values)
    pairs, leftover = random_pairing(len(values), rng)
    return Cohort(values=values, pairing=pairs, leftover=leftover)


def assign_r(
    pairing: Pairing, n: int, rng: np.random.Generator, leftover: int | None = None
) -> RAssignment:
    """Assign each pair opposite +-1 signs, the first member's uniform.

    Args:
        pairing: disjoint index pairs.
        n: cohort size (length of the sign vector).
        rng: random state.
        leftover: unpaired index for odd n; it receives no sign (0).

    Returns:
        RAssignment with r[a] = -r[b] in {+1, -1} for every pair (a, b).
    """
    r = np.zeros(n, dtype=np.int8)
    signs = rng.integers(0, 2, size=len(pairing)) * 2 - 1
    for (a, b), s in zip(pairing, signs):
        r[a] = s
        r[b] = -s
    if leftover is not None and r[leftover] != 0:
        raise ParameterError("leftover index appears in a pair")
    return RAssignment(r=r)


def perturb_cohort(
    cohort: Cohort,
    params: PerturbParams,
    mode: str,
    rng: np.random.Generator,
) -> np.ndarray:
    """Perturb every contributor of a cohort pair by pair.

    direct-joint mode draws each pair's truthfulness from the joint table
    (k-ary pairs from the k-ary joint distribution); sampler mode draws the
    two private C values plus opposite signs and decides truthfulness by the
    sign of C + R, which induces the identical joint distribution for
    rho <= 0. The leftover contributor of an odd cohort reports under plain
    randomized response with the same truthful-report marginal.

    The returned report vector carries no pairing information.

    Args:
        cohort: values plus pairing.
        params: feasible perturbation parameters.
        mode: "direct-joint" or "sampler".
        rng: random state.

    Returns:
        Reports in contributor order.
    """
    if mode not in MODES:
        raise ParameterError(f"mode must be one of {MODES}, got {mode!r}")
    first = np.fromiter((a for a, _ in cohort.pairing), dtype=np.int64, count=len(cohort.pairing))
    second = np.fromiter((b for _, b in cohort.pairing), dtype=np.int64, count=len(cohort.pairing))
    return perturb_paired_values(
        cohort.values, first, second, cohort.leftover, params, mode, rng
    )


def perturb_paired_values(
    values: np.ndarray,
    first: np.ndarray,
    second: np.ndarray,
    leftover: int | None,
    params: PerturbParams,
    mode: str,
    rng: np.random.Generator,
) -> np.ndarray:
    """Vectorized pairwise perturbation given explicit pair index arrays.

    This is the hot path shared by perturb_cohort and the experiment harness
    (which pairs adjacent positions of a fresh permutation directly).
    """
    values = np.asarray(values, dtype=np.int64)
    reports = np.empty_like(values)
    npairs = len(first)

    if params.k == 2:
        if mode == "sampler":
            cfg = sampler_config(params)  # raises for rho > 0
            cum = np.cumsum(np.asarray(cfg.c_probs))
            cvals = np.array([1.5, 0.5, -0.5, -1.5])
            c1 = cvals[np.searchsorted(cum, rng.random(npairs), side="right").clip(max=3)]
            c2 = cvals[np.searchsorted(cum, rng.random(npairs), side="right").clip(max=3)]
            r1 = rng.integers(0, 2, size=npairs) * 2 - 1
            t1 = c1 + r1 > 0
            t2 = c2 - r1 > 0
        else:
            table = joint_table(params)
            cum = np.cumsum(table.as_array())
            case = np.searchsorted(cum, rng.random(npairs), side="right").clip(max=3)
            t1 = case < 2
            t2 = (case & 1) == 0
        reports[first] = np.where(t1, values[first], 1 - values[first])
        reports[second] = np.where(t2, values[second], 1 - values[second])
        if leftover is not None:
            v = values[leftover]
            reports[leftover] = v if rng.random() < params.p else 1 - v
        return reports

    if mode == "sampler":
        raise SamplerInfeasibleError("sampler mode is defined for binary domains only")
    k = params.k
    both, one, neither = kary_joint_entries(params.p, params.q, params.rho, k)
    masses = np.array([both, (k - 1) * one, (k - 1) * one, (k - 1) ** 2 * neither])
    cum = np.cumsum(masses)
    case = np.searchsorted(cum, rng.random(npairs), side="right").clip(max=3)
    t1 = case < 2
    t2 = (case & 1) == 0
    # untruthful reports are uniform over the other k-1 values
    off1 = rng.integers(1, k, size=npairs)
    off2 = rng.integers(1, k, size=npairs)
    reports[first] = np.where(t1, values[first], (values[first] + off1) % k)
    reports[second] = np.where(t2, values[second], (values[second] + off2) % k)
    if leftover is not None:
        v = values[leftover]
        if rng.random() < params.p:
            reports[leftover] = v
        else:
            reports[leftover] = (v + rng.integers(1, k)) % k
    return reports
