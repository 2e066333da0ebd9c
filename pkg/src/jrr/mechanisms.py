"""Perturbation mechanisms for locally private binary and k-ary frequency estimation.

Implements classical randomized response, the jointly (negatively) correlated
pairwise variant, its sampler-based instantiation, the k-ary generalization,
and the unary-encoding (per-bit) integration.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from jrr.errors import InfeasibleCorrelationError, ParameterError, SamplerInfeasibleError

# Absolute tolerance for probability validation. Violations beyond this are
# errors; magnitudes within it are treated as exact (negatives clamped to 0).
PROB_TOL = 1e-12

# C values of the sampler instantiation, in the order their probabilities are
# stored in SamplerConfig. Half-integers so that c + r with r = +-1 is never 0.
SAMPLER_C_VALUES = (1.5, 0.5, -0.5, -1.5)


def _clamp_prob(x: float, what: str) -> float:
    if x < -PROB_TOL or x > 1.0 + PROB_TOL:
        raise InfeasibleCorrelationError(f"{what} = {x} is not a probability")
    return min(max(x, 0.0), 1.0)


@dataclass(frozen=True)
class PerturbParams:
    """Parameters (p, q, rho, k) of a correlated pairwise perturbation.

    p is the probability of a truthful report, q the probability of each
    specific untruthful value (q = 1 - p for k = 2, (1 - p)/(k - 1) otherwise),
    and rho the joint-table correlation parameter. For k = 2, rho equals the
    correlation coefficient of the two truthfulness indicators; for k > 2 that
    coefficient is rho/(k - 1).
    """

    p: float
    rho: float
    k: int = 2
    q: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 2:
            raise ParameterError(f"domain size k must be an integer >= 2, got {self.k}")
        if self.q is None:
            object.__setattr__(self, "q", (1.0 - self.p) / (self.k - 1))
        if abs(self.p + (self.k - 1) * self.q - 1.0) > PROB_TOL:
            raise ParameterError(
                f"p + (k-1)q must equal 1, got p={self.p}, q={self.q}, k={self.k}"
            )
        if self.k == 2:
            if not 0.5 < self.p <= 1.0:
                raise ParameterError(f"p must lie in (0.5, 1], got {self.p}")
            lo = 1.0 - 1.0 / self.p
            if not lo - PROB_TOL <= self.rho <= 1.0 + PROB_TOL:
                raise InfeasibleCorrelationError(
                    f"rho must lie in [1 - 1/p, 1] = [{lo}, 1], got {self.rho}"
                )
        else:
            if self.p <= self.q:
                raise ParameterError(f"p must exceed q, got p={self.p}, q={self.q}")
            # Feasibility = non-negativity of every k-ary joint entry.
            for name, value in zip(
                ("both-truthful", "one-truthful", "neither-truthful"),
                kary_joint_entries(self.p, self.q, self.rho, self.k),
            ):
                if value < -PROB_TOL:
                    raise InfeasibleCorrelationError(
                        f"{name} joint entry is negative ({value}) for "
                        f"p={self.p}, rho={self.rho}, k={self.k}"
                    )


@dataclass(frozen=True)
class JointTable:
    """Joint distribution of a pair's truthfulness indicators (T1, T2).

    Entry pXY is Pr[T1 = X, T2 = Y]. Both marginals equal p11 + p10 and the
    off-diagonal entries are equal by construction.
    """

    p11: float
    p10: float
    p01: float
    p00: float

    def __post_init__(self):
        entries = (self.p11, self.p10, self.p01, self.p00)
        for e in entries:
            if e < 0.0:
                raise InfeasibleCorrelationError(f"negative table entry {e}")
        if abs(sum(entries) - 1.0) > PROB_TOL:
            raise ParameterError(f"table entries sum to {sum(entries)}, expected 1")
        if abs(self.p10 - self.p01) > PROB_TOL:
            raise ParameterError("off-diagonal entries must be equal")

    @property
    def marginal_p(self) -> float:
        """Probability that either member reports truthfully."""
        return self.p11 + self.p10

    def as_array(self) -> np.ndarray:
        """Entries in draw order (1,1), (1,0), (0,1), (0,0)."""
        return np.array([self.p11, self.p10, self.p01, self.p00])


@dataclass(frozen=True)
class SamplerConfig:
    """Distribution of the private half-integer draw C of the sampler scheme.

    c_probs are the probabilities of C taking the values 1.5, 0.5, -0.5, -1.5;
    s is the shared off-center mass sqrt(-rho * p * q).
    """

    c_probs: tuple[float, float, float, float]
    s: float

    def __post_init__(self):
        if abs(sum(self.c_probs) - 1.0) > PROB_TOL:
            raise ParameterError(f"C probabilities sum to {sum(self.c_probs)}")


def joint_table(params: PerturbParams) -> JointTable:
    """Build the 2x2 truthfulness table for a binary parameter set.

    Args:
        params: feasible parameters with k = 2.

    Returns:
        JointTable with entries (p^2 + rho*p*q, (1-rho)*p*q, (1-rho)*p*q,
        q^2 + rho*p*q).
    """
    if params.k != 2:
        raise ParameterError("joint_table is defined for binary domains only")
    p, q, rho = params.p, params.q, params.rho
    p11 = _clamp_prob(p * p + rho * p * q, "Pr[T1=1,T2=1]")
    p10 = _clamp_prob((1.0 - rho) * p * q, "Pr[T1=1,T2=0]")
    p00 = _clamp_prob(q * q + rho * p * q, "Pr[T1=0,T2=0]")
    return JointTable(p11=p11, p10=p10, p01=p10, p00=p00)


def rr_perturb(value: int, p: float, rng: np.random.Generator) -> int:
    """Classical randomized response on one bit.

    Args:
        value: true bit in {0, 1}.
        p: truthful-report probability, 0.5 < p <= 1.
        rng: random state.

    Returns:
        value with probability p, 1 - value otherwise.
    """
    if not 0.5 < p <= 1.0:
        raise ParameterError(f"p must lie in (0.5, 1], got {p}")
    if value not in (0, 1):
        raise ParameterError(f"value must be a bit, got {value}")
    return value if rng.random() < p else 1 - value


def jrr_perturb_pair(
    x1: int, x2: int, table: JointTable, rng: np.random.Generator
) -> tuple[int, int]:
    """Jointly perturb one pair of bits by a draw from the truthfulness table.

    Args:
        x1, x2: the pair's true bits.
        table: joint truthfulness distribution.
        rng: random state.

    Returns:
        The pair of reported bits.
    """
    t1, t2 = _draw_truth_pair((table.p11, table.p10, table.p01, table.p00), rng)
    y1 = x1 if t1 else 1 - x1
    y2 = x2 if t2 else 1 - x2
    return y1, y2


def _draw_truth_pair(probs, rng: np.random.Generator) -> tuple[int, int]:
    u = rng.random()
    acc = 0.0
    for case in range(3):
        acc += probs[case]
        if u < acc:
            break
    else:
        case = 3  # rounding tail
    return 1 - (case >> 1), 1 - (case & 1)


def sampler_config(params: PerturbParams) -> SamplerConfig:
    """Derive the C distribution of the sampler instantiation.

    Only defined for rho <= 0 (s = sqrt(-rho*p*q) must be real) and requires
    p - s >= 0 and q - s >= 0. Callers should fall back to direct joint
    sampling when this raises.

    Args:
        params: feasible binary parameters with rho <= 0.

    Returns:
        SamplerConfig with probabilities (p - s, s, s, q - s) for
        C in (1.5, 0.5, -0.5, -1.5).
    """
    if params.k != 2:
        raise ParameterError("the sampler instantiation is defined for binary domains only")
    if params.rho > PROB_TOL:
        raise SamplerInfeasibleError(
            f"sampler requires rho <= 0, got {params.rho}; use direct joint sampling"
        )
    p, q = params.p, params.q
    s = math.sqrt(max(-params.rho, 0.0) * p * q)
    top = _clamp_prob(p - s, "Pr[C=1.5]")
    bottom = _clamp_prob(q - s, "Pr[C=-1.5]")
    return SamplerConfig(c_probs=(top, s, s, bottom), s=s)


def sampler_decide(c: float, r: int) -> int:
    """Truthfulness decision of the sampler scheme: truthful iff c + r > 0.

    c is one of the half-integer C values and r is the +-1 sign received from
    grouping, so c + r is never zero.
    """
    if r not in (1, -1):
        raise ParameterError(f"r must be +1 or -1, got {r}")
    if c not in SAMPLER_C_VALUES:
        raise ParameterError(f"c must be one of {SAMPLER_C_VALUES}, got {c}")
    return 1 if c + r > 0 else 0


def kary_joint_entries(p: float, q: float, rho: float, k: int) -> tuple[float, float, float]:
    """Per-outcome probabilities of the k-ary pairwise joint distribution.

    Returns (both, one, neither): the probability of the pair reporting
    exactly (v1, v2); a specific (v1, w) or (w, v2) with one value flipped;
    and a specific (w1, w2) with both flipped.
    """
    both = p * p + rho * p * q
    one = p * q - rho * p * q / (k - 1)
    neither = q * q + rho * p * q / (k - 1) ** 2
    return both, one, neither


def kjrr_perturb_pair(
    v1: int, v2: int, params: PerturbParams, rng: np.random.Generator
) -> tuple[int, int]:
    """Jointly perturb a pair of k-ary values.

    The truthfulness pattern is drawn from the four-case joint distribution;
    an untruthful report is uniform over the other k - 1 values.

    Args:
        v1, v2: true values in [0, k).
        params: feasible parameters (any k >= 2).
        rng: random state.

    Returns:
        The pair of reported values.
    """
    k = params.k
    for v in (v1, v2):
        if not 0 <= v < k:
            raise ParameterError(f"value {v} outside domain [0, {k})")
    both, one, neither = kary_joint_entries(params.p, params.q, params.rho, k)
    masses = (both, (k - 1) * one, (k - 1) * one, (k - 1) ** 2 * neither)
    t1, t2 = _draw_truth_pair(masses, rng)
    y1 = v1 if t1 else _other_value(v1, k, rng)
    y2 = v2 if t2 else _other_value(v2, k, rng)
    return y1, y2


def _other_value(v: int, k: int, rng: np.random.Generator) -> int:
    # uniform over the k-1 values != v
    return int((v + rng.integers(1, k)) % k)


def correlated_truth_table(t1: float, t2: float, rho: float) -> JointTable:
    """2x2 truthfulness table with per-member marginals t1, t2 and correlation rho.

    Generalizes the symmetric table to unequal marginals; used for per-bit
    unary-encoding perturbation where 1-bits and 0-bits keep their value with
    different probabilities.
    """
    s1 = math.sqrt(t1 * (1.0 - t1))
    s2 = math.sqrt(t2 * (1.0 - t2))
    p11 = t1 * t2 + rho * s1 * s2
    p10 = t1 - p11
    p01 = t2 - p11
    p00 = 1.0 - t1 - t2 + p11
    entries = {"Pr[T1=1,T2=1]": p11, "Pr[T1=1,T2=0]": p10,
               "Pr[T1=0,T2=1]": p01, "Pr[T1=0,T2=0]": p00}
    clamped = {name: _clamp_prob(v, name) for name, v in entries.items()}
    if abs(p10 - p01) <= PROB_TOL:
        # equal marginals: keep the table exactly symmetric
        off = (clamped["Pr[T1=1,T2=0]"] + clamped["Pr[T1=0,T2=1]"]) / 2.0
        clamped["Pr[T1=1,T2=0]"] = clamped["Pr[T1=0,T2=1]"] = off
        return JointTable(clamped["Pr[T1=1,T2=1]"], off, off, clamped["Pr[T1=0,T2=0]"])
    return _AsymmetricTruthTable(
        clamped["Pr[T1=1,T2=1]"], clamped["Pr[T1=1,T2=0]"],
        clamped["Pr[T1=0,T2=1]"], clamped["Pr[T1=0,T2=0]"],
    )


@dataclass(frozen=True)
class _AsymmetricTruthTable(JointTable):
    """Truth table with unequal marginals (skips the symmetry check)."""

    def __post_init__(self):
        entries = (self.p11, self.p10, self.p01, self.p00)
        for e in entries:
            if e < 0.0:
                raise InfeasibleCorrelationError(f"negative table entry {e}")
        if abs(sum(entries) - 1.0) > PROB_TOL:
            raise ParameterError(f"table entries sum to {sum(entries)}, expected 1")


def oue_bit_table(bit1: int, bit2: int, params: PerturbParams) -> JointTable:
    """Truthfulness table for one bit position of a unary-encoded pair.

    A 1-bit keeps its value with probability p, a 0-bit with probability
    1 - q; the shared rho correlates the two decisions.
    """
    keep = {1: params.p, 0: 1.0 - params.q}
    try:
        return correlated_truth_table(keep[bit1], keep[bit2], params.rho)
    except InfeasibleCorrelationError as exc:
        raise InfeasibleCorrelationError(
            f"bit class ({bit1},{bit2}) infeasible for p={params.p}, "
            f"q={params.q}, rho={params.rho}: {exc}"
        ) from exc


def oue_jrr_perturb_pair(
    x1: int, x2: int, params: PerturbParams, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Unary-encode two k-ary values and jointly perturb them bit by bit.

    Each of the k bit positions applies an independent correlated truthfulness
    draw with the bit-specific keep probability (p for 1-bits, 1 - q for
    0-bits) and the shared correlation.

    Args:
        x1, x2: true values in [0, k).
        params: feasible parameters, k >= 2.
        rng: random state.

    Returns:
        Two length-k perturbed bit vectors.
    """
    k = params.k
    for v in (x1, x2):
        if not 0 <= v < k:
            raise ParameterError(f"value {v} outside domain [0, {k})")
    b1 = np.zeros(k, dtype=np.int8)
    b2 = np.zeros(k, dtype=np.int8)
    b1[x1] = 1
    b2[x2] = 1
    y1 = np.empty(k, dtype=np.int8)
    y2 = np.empty(k, dtype=np.int8)
    for j in range(k):
        tab = oue_bit_table(int(b1[j]), int(b2[j]), params)
        t1, t2 = _draw_truth_pair((tab.p11, tab.p10, tab.p01, tab.p00), rng)
        y1[j] = b1[j] if t1 else 1 - b1[j]
        y2[j] = b2[j] if t2 else 1 - b2[j]
    return y1, y2
