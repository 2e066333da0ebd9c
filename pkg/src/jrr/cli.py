"""Command-line interface.

Subcommands: search-params, perturb, estimate, simulate, oracle,
datasets summarize. JSON goes to stdout unless --out is given; simulate
writes the results CSV plus a sidecar JSON.
"""

import argparse
import json
import sys

import numpy as np

from jrr.datasets import load_dataset, summarize, synthesize
from jrr.errors import JrrError
from jrr.estimation import estimate_counts, jrr_variance, rr_variance
from jrr.experiment import (
    ExperimentConfig,
    rr_optimal_p,
    run_experiment,
    write_csv,
)
from jrr.grouping import make_cohort, perturb_cohort
from jrr.mechanisms import PerturbParams
from jrr.oracle import all_pairings, enumerate_reports, exact_estimator_moments
from jrr.privacy import PrivacyBudget, SearchConfig, effective_epsilon, search_params


def _emit(payload, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _add_dataset_args(sp) -> None:
    sp.add_argument("--dataset", help="path to a prepared dataset file")
    sp.add_argument("--format", default="bit-lines", choices=("bit-lines", "csv-column"))
    sp.add_argument("--column", help="column name for csv-column format")


def _cohort_values(args) -> np.ndarray:
    if args.dataset:
        return load_dataset(args.dataset, args.format, args.column)
    n1 = args.n1 if args.n1 is not None else int(round(args.ratio * args.n))
    return synthesize(args.n, n1, args.seed)


def cmd_search_params(args) -> int:
    budget = PrivacyBudget(args.epsilon, args.m_max, args.n)
    found = search_params(budget, SearchConfig(args.delta_p, args.delta_rho))
    if found is None:
        _emit({"found": False}, args.out)
        return 1
    p, rho = found
    payload = {
        "found": True,
        "p": p,
        "rho": rho,
        "effective_epsilon": {
            str(m): effective_epsilon(p, rho, args.n, m)
            for m in range(args.m_max + 1)
        },
    }
    if args.n1 is not None:
        payload["var_closed"] = jrr_variance(args.n, args.n1, p, rho)
    _emit(payload, args.out)
    return 0


def cmd_perturb(args) -> int:
    values = _cohort_values(args)
    rng = np.random.default_rng(args.seed)
    if args.mechanism == "rr":
        p = rr_optimal_p(args.epsilon)
        flips = rng.random(len(values)) >= p
        reports = np.where(flips, 1 - values, values)
    else:
        budget = PrivacyBudget(args.epsilon, args.m_max, len(values))
        found = search_params(budget, SearchConfig(args.delta_p, args.delta_rho))
        if found is None:
            print("error: parameter search returned no feasible pair", file=sys.stderr)
            return 1
        params = PerturbParams(p=found[0], rho=found[1])
        cohort = make_cohort(values, rng)
        reports = perturb_cohort(cohort, params, args.mode, rng)
    text = "".join(f"{int(y)}\n" for y in reports)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_estimate(args) -> int:
    reports = load_dataset(args.reports, args.format, args.column)
    p = args.p if args.p is not None else rr_optimal_p(args.epsilon)
    result = estimate_counts(reports, p, 1.0 - p, rho=args.rho)
    payload = {
        "n": result.n,
        "p": p,
        "counts": {str(v): c for v, c in enumerate(result.counts)},
        "estimates": {str(v): e for v, e in enumerate(result.estimates)},
    }
    if result.var_closed is not None:
        payload["var_closed"] = result.var_closed
    _emit(payload, args.out)
    return 0


def cmd_simulate(args) -> int:
    sweep_axis, sweep_values = None, ()
    if args.sweep_epsilon:
        sweep_axis, sweep_values = "epsilon", tuple(float(x) for x in args.sweep_epsilon.split(","))
    elif args.sweep_n:
        sweep_axis, sweep_values = "n", tuple(int(x) for x in args.sweep_n.split(","))
    elif args.sweep_ratio:
        start, stop, step = (float(x) for x in args.sweep_ratio.split(":"))
        count = int(round((stop - start) / step)) + 1
        sweep_axis = "ratio"
        sweep_values = tuple(start + i * step for i in range(count))
    elif args.sweep_m:
        sweep_axis, sweep_values = "m", tuple(int(x) for x in args.sweep_m.split(","))
    cfg = ExperimentConfig(
        mechanism=args.mechanism,
        n=args.n,
        n1=args.n1,
        ratio=args.ratio,
        dataset=args.dataset,
        dataset_format=args.format,
        dataset_column=args.column,
        epsilon=args.epsilon,
        m_max=args.m_max,
        trials=args.trials,
        seed=args.seed,
        sweep_axis=sweep_axis,
        sweep_values=sweep_values,
        delta_p=args.delta_p,
        delta_rho=args.delta_rho,
        mode=args.mode,
    )
    rows = run_experiment(cfg)
    write_csv(rows, args.out, cfg)
    failed = sum(1 for r in rows if r.error is not None)
    if failed:
        print(f"warning: {failed} sweep point(s) failed; see sidecar", file=sys.stderr)
    return 0


def cmd_oracle(args) -> int:
    if args.values:
        values = np.array([int(v) for v in args.values.split(",")], dtype=np.int64)
    else:
        values = np.array([1] * args.n1 + [0] * (args.n - args.n1), dtype=np.int64)
    params = PerturbParams(p=args.p, rho=args.rho, k=args.k)
    pairing = None
    if args.pairing == "adjacent":
        n = len(values)
        pairs = tuple((i, i + 1) for i in range(0, n - (n % 2), 2))
        pairing = (pairs, n - 1 if n % 2 else None)
    dist = enumerate_reports(values, params, pairing)
    mean, var = exact_estimator_moments(dist, params.p, params.q)
    n = len(values)
    n1 = int(np.sum(values == 1))
    payload = {
        "provenance": dist.provenance,
        "support": [[list(o), pr] for o, pr in dist.support()],
        "estimator_moments": {"mean": mean, "variance": var},
        "closed_form": {
            "expected_mean": n1,
            "variance": jrr_variance(n, n1, params.p, params.rho) if params.k == 2 else None,
        },
        "num_pairings": len(all_pairings(n)) if pairing is None else 1,
    }
    _emit(payload, args.out)
    return 0


def cmd_datasets_summarize(args) -> int:
    values = load_dataset(args.dataset, args.format, args.column)
    s = summarize(values, name=args.dataset)
    _emit({"name": s.name, "n": s.n, "n1": s.n1, "ratio": s.ratio}, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jrr",
        description="Locally private frequency estimation with correlated pairwise perturbation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("search-params", help="search (p, rho) under a privacy budget")
    sp.add_argument("--epsilon", type=float, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m-max", type=int, default=5)
    sp.add_argument("--n1", type=int, help="report the closed-form variance at this count")
    sp.add_argument("--delta-p", type=float, default=1e-4)
    sp.add_argument("--delta-rho", type=float, default=1e-4)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_search_params)

    sp = sub.add_parser("perturb", help="perturb a cohort and print the reports")
    sp.add_argument("--mechanism", choices=("rr", "jrr"), default="jrr")
    sp.add_argument("--n", type=int, default=10_000)
    sp.add_argument("--n1", type=int)
    sp.add_argument("--ratio", type=float, default=0.1)
    _add_dataset_args(sp)
    sp.add_argument("--epsilon", type=float, default=0.1)
    sp.add_argument("--m-max", type=int, default=5)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--mode", choices=("direct-joint", "sampler"), default="direct-joint")
    sp.add_argument("--delta-p", type=float, default=1e-4)
    sp.add_argument("--delta-rho", type=float, default=1e-4)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_perturb)

    sp = sub.add_parser("estimate", help="estimate counts from a reports file")
    sp.add_argument("--reports", required=True, help="file of perturbed reports")
    sp.add_argument("--format", default="bit-lines", choices=("bit-lines", "csv-column"))
    sp.add_argument("--column")
    sp.add_argument("--p", type=float, help="truthful-report probability used during perturbation")
    sp.add_argument("--epsilon", type=float, default=0.1,
                    help="derive p as e^eps/(1+e^eps) when --p is absent")
    sp.add_argument("--rho", type=float,
                    help="pair correlation; reports the closed-form variance when given")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_estimate)

    sp = sub.add_parser("simulate", help="run a Monte-Carlo experiment sweep to CSV")
    sp.add_argument("--mechanism", choices=("rr", "jrr", "both"), default="both")
    sp.add_argument("--n", type=int, default=10_000)
    sp.add_argument("--n1", type=int)
    sp.add_argument("--ratio", type=float, default=0.1)
    _add_dataset_args(sp)
    sp.add_argument("--epsilon", type=float, default=0.1)
    sp.add_argument("--m-max", type=int, default=5)
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--sweep-epsilon", help="comma-separated epsilon values")
    sp.add_argument("--sweep-n", help="comma-separated cohort sizes")
    sp.add_argument("--sweep-ratio", help="start:stop:step ratio grid")
    sp.add_argument("--sweep-m", help="comma-separated colluder counts")
    sp.add_argument("--delta-p", type=float, default=1e-4)
    sp.add_argument("--delta-rho", type=float, default=1e-4)
    sp.add_argument("--mode", choices=("direct-joint", "sampler"), default="direct-joint")
    sp.add_argument("--out", required=True, help="output CSV path")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("oracle", help="dump an exact small-cohort report distribution")
    sp.add_argument("--values", help="comma-separated true values")
    sp.add_argument("--n", type=int, default=4)
    sp.add_argument("--n1", type=int, default=2)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--rho", type=float, required=True)
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--pairing", choices=("all", "adjacent"), default="all")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("datasets", help="dataset utilities")
    dsub = sp.add_subparsers(dest="datasets_command", required=True)
    ssp = dsub.add_parser("summarize", help="summarize a dataset file")
    ssp.add_argument("--dataset", required=True)
    ssp.add_argument("--format", default="bit-lines", choices=("bit-lines", "csv-column"))
    ssp.add_argument("--column")
    ssp.add_argument("--out")
    ssp.set_defaults(func=cmd_datasets_summarize)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except JrrError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
