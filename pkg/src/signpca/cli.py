"""Command-line front end.

Subcommands
-----------
simulate   run a replicated simulation scenario, write records + summary
fit        fit one estimator to a CSV of observations, write a JSON report
tune       select the sparsity level on a CSV by sample splitting
bench      time the scatter kernels over a grid of sample sizes

Each subcommand accepts ``--spec FILE.json`` with the full experiment
specification; individual flags override fields of the loaded spec.

Exit codes: 0 success, 2 specification/parse error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from ._version import __version__
from .errors import (
    CsvParseError,
    DegenerateIterateError,
    EmptySupportError,
    InvalidInputError,
    InvalidSpecError,
    NotConvergedError,
)
from .experiments import (
    PRESETS,
    ExperimentReport,
    ExperimentSpec,
    bench_runtime,
    fit_csv,
    run_experiment,
)
from .io import save_json, save_tune_result, write_metric_records
from .sparse_pca import SparsePCConfig
from .tuning import TuneConfig, select_k

EXIT_OK = 0
EXIT_SPEC = 2
EXIT_NUMERIC = 3

_SPEC_ERRORS = (InvalidSpecError, InvalidInputError, CsvParseError,
                json.JSONDecodeError, FileNotFoundError, KeyError, ValueError)
_NUMERIC_ERRORS = (NotConvergedError, DegenerateIterateError, EmptySupportError,
                   np.linalg.LinAlgError, FloatingPointError)


def _int_list(text: str):
    return tuple(int(v) for v in text.split(",") if v.strip())


def _k_list(text: str):
    return tuple(v if v == "oracle" else int(v) for v in text.split(",") if v.strip())


def _str_list(text: str):
    return tuple(v.strip() for v in text.split(",") if v.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="signpca",
        description="Robust sparse PCA via spatial-sign covariance: "
        "simulation, fitting, tuning and benchmark harness.",
    )
    parser.add_argument("--version", action="version", version=f"signpca {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a replicated simulation scenario")
    sim.add_argument("--spec", type=Path, help="JSON experiment specification")
    sim.add_argument("--preset", choices=sorted(PRESETS), help="start from a stock design")
    sim.add_argument("--scenario", choices=("leading_eigvec", "top_m", "tune_histogram",
                                            "runtime_bench"))
    sim.add_argument("--family", choices=("gaussian", "t", "mixture"))
    sim.add_argument("--df", type=float)
    sim.add_argument("--kappa", type=float)
    sim.add_argument("--inflation", type=float)
    sim.add_argument("--n", type=_int_list, dest="n_values", metavar="N[,N...]")
    sim.add_argument("--d", type=_int_list, dest="d_values", metavar="D[,D...]")
    sim.add_argument("--s", type=_int_list, dest="s_values", metavar="S[,S...]")
    sim.add_argument("--k", type=_k_list, dest="k_values", metavar="K[,K...]|oracle")
    sim.add_argument("--method", type=_str_list, dest="methods",
                     metavar="tp,eca,sspca,sspca_fp")
    sim.add_argument("--reps", type=int, dest="replications")
    sim.add_argument("--seed", type=int, dest="base_seed")
    sim.add_argument("--candidates", type=_int_list, dest="tune_candidates")
    sim.add_argument("--splits", type=int, dest="tune_splits")
    sim.add_argument("--workers", type=int)
    sim.add_argument("--out", type=Path, required=True, help="output directory")

    fit = sub.add_parser("fit", help="fit an estimator to a CSV of observations")
    fit.add_argument("--input", type=Path, required=True)
    fit.add_argument("--method", default="sspca",
                     choices=("tp", "eca", "sspca", "sspca_fp"))
    fit.add_argument("--k", type=int)
    fit.add_argument("--tune", type=_int_list, dest="tune_candidates",
                     metavar="K,K,...", help="select k over this candidate grid")
    fit.add_argument("--splits", type=int, default=10)
    fit.add_argument("--center", default="auto",
                     choices=("auto", "spatial", "mean", "none"))
    fit.add_argument("--standardize", action="store_true")
    fit.add_argument("--header", action="store_true",
                     help="input CSV has a single header row")
    fit.add_argument("--components", type=int, default=2)
    fit.add_argument("--threshold", type=float, default=0.05,
                     help="leverage flag threshold on the hat diagonals")
    fit.add_argument("--seed", type=int, default=0)
    fit.add_argument("--out", type=Path, required=True, help="JSON report path")

    tune = sub.add_parser("tune", help="select the sparsity level on a CSV")
    tune.add_argument("--input", type=Path, required=True)
    tune.add_argument("--candidates", type=_int_list, required=True)
    tune.add_argument("--splits", type=int, default=10)
    tune.add_argument("--fraction", type=float, default=0.5)
    tune.add_argument("--scatter", default="sscm", choices=("sscm", "kendall", "pearson"))
    tune.add_argument("--seed", type=int, default=0)
    tune.add_argument("--header", action="store_true")
    tune.add_argument("--out", type=Path, required=True, help="JSON result path")
    tune.add_argument("--csv", type=Path, help="optional score-table CSV path")

    bench = sub.add_parser("bench", help="time the scatter kernels")
    bench.add_argument("--n-grid", type=_int_list, required=True)
    bench.add_argument("--d", type=int, required=True)
    bench.add_argument("--methods", type=_str_list, default=("sscm", "kendall"))
    bench.add_argument("--repeats", type=int, default=5)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--out", type=Path, required=True, help="timings CSV path")

    return parser


def _spec_from_args(args) -> ExperimentSpec:
    doc = {}
    if args.spec is not None:
        with open(args.spec, encoding="utf-8") as fh:
            doc = json.load(fh)
    if args.preset is not None:
        doc = {**PRESETS[args.preset]().to_dict(), **doc}
    overrides = (
        "scenario", "family", "df", "kappa", "inflation", "n_values", "d_values",
        "s_values", "k_values", "methods", "replications", "base_seed",
        "tune_candidates", "tune_splits", "workers",
    )
    for name in overrides:
        value = getattr(args, name, None)
        if value is not None:
            doc[name] = list(value) if isinstance(value, tuple) else value
    if not doc:
        raise InvalidSpecError("give --spec and/or --preset and/or flags")
    return ExperimentSpec.from_dict(doc)


def _write_report(report: ExperimentReport, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    write_metric_records(out_dir / "records.csv", report.records)
    save_json(report.summary(), out_dir / "summary.json")
    # Wall-clock is machine-dependent; kept out of the deterministic files.
    save_json(report.wall_clock, out_dir / "timings.json")
    if report.detail is not None:
        save_json(report.detail, out_dir / "detail.json")


def cmd_simulate(args) -> int:
    spec = _spec_from_args(args)
    report = run_experiment(spec)
    _write_report(report, args.out)
    print(f"wrote {len(report.records)} records to {args.out}")
    return EXIT_OK


def cmd_fit(args) -> int:
    report = fit_csv(
        args.input,
        method=args.method,
        k=args.k,
        tune_candidates=args.tune_candidates,
        tune_splits=args.splits,
        center=args.center,
        standardize=args.standardize,
        header=args.header,
        components=args.components,
        leverage_threshold=args.threshold,
        seed=args.seed,
    )
    save_json(report, args.out)
    flagged = report["leverage"]["flagged"] if report["leverage"] else []
    print(
        f"method={report['method']} k={report['k']} "
        f"components={len(report['components'])} leverage_flags={len(flagged)}"
    )
    return EXIT_OK


def cmd_tune(args) -> int:
    from .io import read_data_csv

    x = read_data_csv(args.input, header=args.header)
    cfg = TuneConfig(
        candidates=args.candidates,
        splits=args.splits,
        split_fraction=args.fraction,
        seed=args.seed,
        scatter=args.scatter,
    )
    result = select_k(x, cfg, SparsePCConfig(k=1))
    save_tune_result(result, json_path=args.out, csv_path=args.csv)
    print(f"chosen_k={result.chosen_k}")
    return EXIT_OK


def cmd_bench(args) -> int:
    records = bench_runtime(
        args.n_grid, args.d, methods=args.methods, repeats=args.repeats, seed=args.seed
    )
    write_metric_records(args.out, records)
    medians = [r for r in records if r.name == "runtime_median_seconds"]
    for rec in medians:
        print(f"{rec.context['method']:8s} n={rec.context['n']:6d} "
              f"median={rec.value:.6f}s")
    return EXIT_OK


_COMMANDS = {"simulate": cmd_simulate, "fit": cmd_fit, "tune": cmd_tune, "bench": cmd_bench}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except _SPEC_ERRORS as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_SPEC
    except _NUMERIC_ERRORS as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
