"""Experiment orchestration: sweeps, Monte-Carlo trials, CSV output.

Each sweep point runs `trials` independent perturb-estimate cycles with a
fresh pairing per trial. Reproducibility contract: every trial draws from its
own random stream seeded by (master seed, sweep index, mechanism index,
trial index), so identical configs produce byte-identical CSV output.
"""

import csv
import json
import math
from dataclasses import dataclass, asdict, field, replace

import numpy as np

import jrr
from jrr.datasets import load_dataset, synthesize
from jrr.errors import JrrError, ParameterError
from jrr.estimation import jrr_variance, rr_variance
from jrr.grouping import perturb_paired_values
from jrr.mechanisms import PerturbParams
from jrr.privacy import FEASIBILITY_SLACK, PrivacyBudget, SearchConfig, search_params

CSV_HEADER = (
    "mechanism,n,n1,epsilon,m_max,p,rho,trials,seed,"
    "mse,are,var_closed,are_p10,are_p50,are_p90,ri"
)

MECHANISMS = ("rr", "jrr")

# entropy tag separating value-synthesis streams from trial streams
_VALUES_STREAM = 0x76616C75


@dataclass(frozen=True)
class ExperimentConfig:
    """One harness run: a mechanism (or both), a cohort, and an optional sweep."""

    mechanism: str = "both"  # "rr", "jrr" or "both"
    n: int = 10_000
    n1: int | None = None
    ratio: float | None = 0.1
    dataset: str | None = None
    dataset_format: str = "bit-lines"
    dataset_column: str | None = None
    epsilon: float = 0.1
    m_max: int = 5
    trials: int = 1000
    seed: int = 0
    sweep_axis: str | None = None  # "epsilon" | "n" | "ratio" | "m"
    sweep_values: tuple = ()
    delta_p: float = 1e-4
    delta_rho: float = 1e-4
    mode: str = "direct-joint"

    def __post_init__(self):
        if self.mechanism not in MECHANISMS + ("both",):
            raise ParameterError(f"unknown mechanism {self.mechanism!r}")
        if self.trials < 1:
            raise ParameterError("trials must be >= 1")
        if self.seed < 0:
            raise ParameterError("seed must be a non-negative integer")
        if self.sweep_axis is not None:
            if self.sweep_axis not in ("epsilon", "n", "ratio", "m"):
                raise ParameterError(f"unknown sweep axis {self.sweep_axis!r}")
            if len(self.sweep_values) == 0:
                raise ParameterError("sweep axis given but no sweep values")
            if self.dataset is not None and self.sweep_axis in ("n", "ratio"):
                raise ParameterError(
                    "cannot sweep the cohort shape when a dataset is given"
                )


@dataclass(frozen=True)
class MetricsRow:
    """One emitted result record; None metric fields mark a failed point."""

    mechanism: str
    n: int
    n1: int
    epsilon: float
    m_max: int
    p: float | None
    rho: float | None
    trials: int
    seed: int
    mse: float | None = None
    are: float | None = None
    var_closed: float | None = None
    are_p10: float | None = None
    are_p50: float | None = None
    are_p90: float | None = None
    ri: float | None = None
    error: str | None = None  # not serialized to CSV; echoed in the sidecar

    def csv_values(self) -> list[str]:
        def fmt(x):
            if x is None:
                return ""
            if isinstance(x, float):
                return repr(x)
            return str(x)

        return [
            fmt(v)
            for v in (
                self.mechanism, self.n, self.n1, self.epsilon, self.m_max,
                self.p, self.rho, self.trials, self.seed, self.mse, self.are,
                self.var_closed, self.are_p10, self.are_p50, self.are_p90, self.ri,
            )
        ]


def rr_optimal_p(epsilon: float) -> float:
    """Utility-maximizing truthful-report probability for the budget."""
    return math.exp(epsilon) / (1.0 + math.exp(epsilon))


def sweep_points(cfg: ExperimentConfig) -> list[ExperimentConfig]:
    """Expand a config into its per-point configs, in sweep order."""
    if cfg.sweep_axis is None:
        return [cfg]
    points = []
    for v in cfg.sweep_values:
        if cfg.sweep_axis == "epsilon":
            points.append(replace(cfg, epsilon=float(v), sweep_axis=None, sweep_values=()))
        elif cfg.sweep_axis == "n":
            points.append(replace(cfg, n=int(v), n1=None, sweep_axis=None, sweep_values=()))
        elif cfg.sweep_axis == "ratio":
            points.append(
                replace(cfg, ratio=float(v), n1=None, sweep_axis=None, sweep_values=())
            )
        else:  # m
            points.append(replace(cfg, m_max=int(v), sweep_axis=None, sweep_values=()))
    return points


def _point_values(point: ExperimentConfig, master_seed: int, sweep_idx: int) -> np.ndarray:
    if point.dataset is not None:
        return load_dataset(point.dataset, point.dataset_format, point.dataset_column)
    if point.n1 is not None:
        n1 = point.n1
    elif point.ratio is not None:
        n1 = int(round(point.ratio * point.n))
    else:
        raise ParameterError("either n1, ratio or a dataset is required")
    derived = np.random.SeedSequence((master_seed, _VALUES_STREAM, sweep_idx))
    return synthesize(point.n, n1, int(derived.generate_state(1)[0]))


def _trial_rng(master_seed: int, sweep_idx: int, mech_idx: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence((master_seed, sweep_idx, mech_idx, trial))
    )


def _run_trials(
    values: np.ndarray,
    params: PerturbParams,
    mechanism: str,
    mode: str,
    trials: int,
    master_seed: int,
    sweep_idx: int,
) -> np.ndarray:
    """Observed counts of 1-reports, one entry per trial."""
    n = len(values)
    mech_idx = MECHANISMS.index(mechanism)
    counts = np.empty(trials, dtype=np.int64)
    for t in range(trials):
        rng = _trial_rng(master_seed, sweep_idx, mech_idx, t)
        if mechanism == "rr":
            flips = rng.random(n) >= params.p
            reports = np.where(flips, 1 - values, values)
        else:
            perm = rng.permutation(n)
            m = n - (n % 2)
            first = perm[0:m:2]
            second = perm[1:m:2]
            leftover = int(perm[-1]) if n % 2 else None
            reports = perturb_paired_values(
                values, first, second, leftover, params, mode, rng
            )
        counts[t] = int(np.sum(reports == 1))
    return counts


def _metrics_from_counts(
    counts: np.ndarray, n: int, n1: int, p: float, q: float
) -> dict:
    n0 = n - n1
    n1_hat = (counts - n * q) / (p - q)
    n0_hat = n - n1_hat
    err = n1_hat - n1  # = -(n0_hat - n0)
    mses = err**2
    rel_terms = []
    if n1 > 0:
        rel_terms.append(np.abs(err) / n1)
    if n0 > 0:
        rel_terms.append(np.abs(n0_hat - n0) / n0)
    ares = np.mean(rel_terms, axis=0)
    p10, p50, p90 = np.percentile(ares, [10, 50, 90])
    return {
        "mse": float(np.mean(mses)),
        "are": float(np.mean(ares)),
        "are_p10": float(p10),
        "are_p50": float(p50),
        "are_p90": float(p90),
        "mean_estimate": float(np.mean(n1_hat)),
    }


def run_experiment(cfg: ExperimentConfig) -> list[MetricsRow]:
    """Run every sweep point for the configured mechanism(s).

    A failing sweep point emits a marker row (empty metrics, error recorded)
    and does not abort the sweep. Rows appear in sweep order, and for
    mechanism="both" the rr row precedes the jrr row of each point; the jrr
    row then carries the relative MSE increase over the rr row.
    """
    rows: list[MetricsRow] = []
    mechanisms = MECHANISMS if cfg.mechanism == "both" else (cfg.mechanism,)
    for sweep_idx, point in enumerate(sweep_points(cfg)):
        try:
            values = _point_values(point, cfg.seed, sweep_idx)
        except JrrError as exc:
            for mech in mechanisms:
                rows.append(
                    MetricsRow(
                        mechanism=mech, n=point.n, n1=-1, epsilon=point.epsilon,
                        m_max=point.m_max, p=None, rho=None, trials=point.trials,
                        seed=cfg.seed, error=str(exc),
                    )
                )
            continue
        n = len(values)
        n1 = int(np.sum(values == 1))
        point_rows: dict[str, MetricsRow] = {}
        for mech in mechanisms:
            try:
                if mech == "rr":
                    p, rho = rr_optimal_p(point.epsilon), 0.0
                else:
                    found = search_params(
                        PrivacyBudget(point.epsilon, point.m_max, n),
                        SearchConfig(point.delta_p, point.delta_rho),
                    )
                    if found is None:
                        raise ParameterError(
                            "parameter search returned no feasible pair; "
                            "coarsen the budget or the grid"
                        )
                    p, rho = found
                params = PerturbParams(p=p, rho=rho)
                counts = _run_trials(
                    values, params, mech, point.mode, point.trials, cfg.seed, sweep_idx
                )
                stats = _metrics_from_counts(counts, n, n1, params.p, params.q)
                var_closed = (
                    rr_variance(n, p) if mech == "rr" else jrr_variance(n, n1, p, rho)
                )
                row = MetricsRow(
                    mechanism=mech, n=n, n1=n1, epsilon=point.epsilon,
                    m_max=point.m_max, p=p, rho=rho, trials=point.trials,
                    seed=cfg.seed, mse=stats["mse"], are=stats["are"],
                    var_closed=var_closed, are_p10=stats["are_p10"],
                    are_p50=stats["are_p50"], are_p90=stats["are_p90"],
                )
            except JrrError as exc:
                row = MetricsRow(
                    mechanism=mech, n=n, n1=n1, epsilon=point.epsilon,
                    m_max=point.m_max, p=None, rho=None, trials=point.trials,
                    seed=cfg.seed, error=str(exc),
                )
            point_rows[mech] = row
        if "rr" in point_rows and "jrr" in point_rows:
            rr_row, jrr_row = point_rows["rr"], point_rows["jrr"]
            if rr_row.mse is not None and jrr_row.mse is not None and rr_row.mse > 0:
                point_rows["jrr"] = replace(
                    jrr_row, ri=(jrr_row.mse - rr_row.mse) / rr_row.mse
                )
        rows.extend(point_rows[m] for m in mechanisms)
    return rows


def write_csv(rows: list[MetricsRow], path, cfg: ExperimentConfig | None = None) -> None:
    """Write rows to CSV (exact schema) plus a sidecar JSON next to it."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER.split(","))
        for row in rows:
            writer.writerow(row.csv_values())
    sidecar = {
        "tool": "jrr",
        "version": jrr.__version__,
        "config": asdict(cfg) if cfg is not None else None,
        "metadata": {
            "seeding": "per-trial streams from SeedSequence((seed, sweep_index, "
                       "mechanism_index, trial_index))",
            "are_excludes_zero_counts": True,
            "estimates_unclipped": True,
            "feasibility_slack": FEASIBILITY_SLACK,
        },
        "errors": {
            str(i): row.error for i, row in enumerate(rows) if row.error is not None
        },
    }
    sidecar_path = str(path) + ".json"
    with open(sidecar_path, "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
