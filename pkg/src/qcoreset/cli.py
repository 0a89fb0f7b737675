"""Command-line entry point.

Exit codes: 0 success, 1 usage or parse error, 2 infeasible configuration,
3 numeric failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .coreset import WeightedCoreset, apply_quantizer, build_rcc, merge, weight_bits
from .data import load_dataset
from .distributed import allocation_report
from .errors import QCoresetError
from .evaluation import TaskSpec, eval_task
from .experiments import default_tasks, rows_to_csv, run_distributed, run_sweep, summarize, timing_summary
from .optimizer import METHODS, optimize

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_input(p):
    p.add_argument("--input", required=True, help="CSV file (comma separated, '.' decimal)")
    p.add_argument("--header", choices=["auto", "yes", "no"], default="auto", help="whether the first row is a header")
    p.add_argument("--b0", type=int, default=64, help="bits per stored attribute")
    p.add_argument("--me", type=int, default=11, help="exponent bits")


def _add_budget(p, required=True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--budget", type=int, help="absolute budget in bits")
    g.add_argument("--budget-frac", type=float, help="budget as a fraction of n*d*b0")


def _add_common(p):
    p.add_argument("--rho", type=float, default=1.0, help="Lipschitz constant of the task cost")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--spectrum", choices=["auto", "gram", "outer"], default="auto", help="matrix diagonalized by evd")
    p.add_argument("--output-dir", type=Path, default=None)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--no-timing", action="store_true", help="report elapsed_ms as 0 so outputs are byte-reproducible")


def _add_tasks(p):
    p.add_argument("--tasks", default="meb,kmeans,pca", help="comma-separated subset of meb,kmeans,pca")
    p.add_argument("--kmeans-k", type=int, default=2)
    p.add_argument("--pca-components", type=int, default=None, help="default: 3, or 11 when d >= 17")


def build_parser():
    parser = _Parser(prog="qcoreset", description="Joint coreset/quantizer configuration under a bit budget.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("optimize", help="choose (k, b) for a dataset and budget")
    _add_input(p)
    _add_budget(p)
    p.add_argument("--method", choices=METHODS, default="md")
    _add_common(p)

    p = sub.add_parser("coreset", help="build and quantize a coreset, write it as JSON")
    _add_input(p)
    _add_budget(p)
    p.add_argument("--method", choices=METHODS, default="md")
    p.add_argument("--output", type=Path, default=None, help="coreset file (default: <output-dir>/coreset.json or stdout)")
    _add_common(p)

    p = sub.add_parser("evaluate", help="score a coreset file against its dataset")
    _add_input(p)
    p.add_argument("--coreset", type=Path, required=True)
    _add_tasks(p)
    _add_common(p)

    p = sub.add_parser("sweep", help="Monte Carlo runs over seeds and methods")
    _add_input(p)
    _add_budget(p)
    p.add_argument("--methods", default="md,evd,em,mp,mc")
    p.add_argument("--runs", type=int, default=40)
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    _add_tasks(p)
    _add_common(p)

    p = sub.add_parser("distributed", help="split data across nodes and allocate the global budget")
    _add_input(p)
    _add_budget(p)
    p.add_argument("--nodes", type=int, default=10)
    p.add_argument("--method", default="oba-md", help="oba-{md,evd,em,mp,mc} or equal")
    p.add_argument("--runs", type=int, default=1)
    _add_tasks(p)
    _add_common(p)
    return parser


def _dataset(args):
    header = {"auto": None, "yes": True, "no": False}[args.header]
    return load_dataset(args.input, has_header=header, b0=args.b0, me=args.me)


def _budget(args, dataset):
    if args.budget is not None:
        return args.budget
    if not 0 < args.budget_frac <= 1:
        raise UsageError("--budget-frac must lie in (0, 1]")
    return int(args.budget_frac * dataset.nbits)


def _tasks(args, dataset):
    names = [t.strip() for t in args.tasks.split(",") if t.strip()]
    defaults = dict(default_tasks(dataset, args.kmeans_k, args.pca_components))
    unknown = [t for t in names if t not in defaults]
    if unknown:
        raise UsageError(f"unknown task(s): {', '.join(unknown)}")
    return [(t, defaults[t]) for t in names]


def _emit(args, name, payload: str):
    sys.stdout.write(payload)
    if not payload.endswith("\n"):
        sys.stdout.write("\n")
    if args.output_dir is not None:
        args.output_dir.mkdir(parents=True, exist_ok=True)
        (args.output_dir / name).write_text(payload if payload.endswith("\n") else payload + "\n")


def _config_record(args, cfg):
    rec = cfg.to_record()
    if args.no_timing:
        rec["elapsed_ms"] = 0.0
    return rec


def _record_csv(record):
    keys = list(record)
    return ",".join(keys) + "\n" + ",".join(str(record[k]) for k in keys) + "\n"


def cmd_optimize(args):
    ds = _dataset(args)
    cfg = optimize(ds, _budget(args, ds), args.method, args.rho, args.seed, spectrum_form=args.spectrum)
    rec = _config_record(args, cfg)
    if args.format == "csv":
        _emit(args, "config.csv", _record_csv(rec))
    else:
        _emit(args, "config.json", json.dumps(rec, indent=2))
    return EXIT_OK


def cmd_coreset(args):
    ds = _dataset(args)
    cfg = optimize(ds, _budget(args, ds), args.method, args.rho, args.seed, spectrum_form=args.spectrum)
    coreset = apply_quantizer(build_rcc(ds, cfg.k, args.seed), cfg.b)
    text = coreset.to_json()
    target = args.output
    if target is None and args.output_dir is not None:
        args.output_dir.mkdir(parents=True, exist_ok=True)
        target = args.output_dir / "coreset.json"
    if target is not None:
        Path(target).write_text(text)
        summary = dict(_config_record(args, cfg), coreset=str(target), weight_bits=weight_bits(coreset))
        print(json.dumps(summary, indent=2))
    else:
        print(text)
    return EXIT_OK


def cmd_evaluate(args):
    ds = _dataset(args)
    coreset = WeightedCoreset.load(args.coreset)
    if coreset.d != ds.d:
        raise UsageError(f"coreset dimension {coreset.d} does not match dataset dimension {ds.d}")
    reports = []
    for name, params in _tasks(args, ds):
        rep = eval_task(ds, coreset, TaskSpec(name, seed=args.seed, **params))
        reports.append({"task": rep.task, "normalized_cost": rep.normalized_cost, "cost_on_full": rep.cost_on_full, "reference_cost": rep.reference_cost, "model": rep.model})
    if args.format == "csv":
        lines = ["task,normalized_cost,cost_on_full,reference_cost"]
        lines += [f"{r['task']},{r['normalized_cost']!r},{r['cost_on_full']!r},{r['reference_cost']!r}" for r in reports]
        _emit(args, "evaluation.csv", "\n".join(lines) + "\n")
    else:
        _emit(args, "evaluation.json", json.dumps(reports, indent=2))
    return EXIT_OK


def cmd_sweep(args):
    ds = _dataset(args)
    if args.runs < 1:
        raise UsageError("--runs must be >= 1")
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    bad = [m for m in methods if m not in METHODS]
    if bad:
        raise UsageError(f"unknown method(s): {', '.join(bad)}")
    budget = _budget(args, ds)
    rows = run_sweep(ds, budget, methods, runs=args.runs, rho=args.rho, tasks=_tasks(args, ds), spectrum_form=args.spectrum, first_seed=args.seed, jobs=args.jobs)
    _emit(args, "sweep.csv", rows_to_csv(rows, timing=not args.no_timing))
    timing = timing_summary(rows)
    lines = ["method,mean_elapsed_ms"] + [f"{m},{(0.0 if args.no_timing else t)!r}" for m, t in timing.items()]
    summary = "\n".join(lines) + "\n"
    if args.output_dir is not None:
        (args.output_dir / "timing.csv").write_text(summary)
    medians = summarize(rows)
    for (method, task), med in sorted(medians.items()):
        print(f"# median normalized cost {method}/{task}: {med:.4f}", file=sys.stderr)
    for line in lines[1:]:
        print(f"# timing {line}", file=sys.stderr)
    return EXIT_OK


def cmd_distributed(args):
    ds = _dataset(args)
    if args.nodes < 1:
        raise UsageError("--nodes must be >= 1")
    budget = _budget(args, ds)
    outcomes = run_distributed(ds, budget, args.nodes, args.method, runs=args.runs, rho=args.rho, tasks=_tasks(args, ds), first_seed=args.seed, spectrum_form=args.spectrum)
    rows = [row for o in outcomes for row in o["rows"]]
    if args.output_dir is not None:
        args.output_dir.mkdir(parents=True, exist_ok=True)
        (args.output_dir / "evaluation.csv").write_text(rows_to_csv(rows, timing=not args.no_timing))
        for o in outcomes:
            if o["result"] is not None:
                (args.output_dir / f"trace_seed{o['seed']}.jsonl").write_text(o["result"].trace.to_jsonl())
            for i, (_, cs) in enumerate(o["nodes"]):
                cs.save(args.output_dir / f"coreset_seed{o['seed']}_node{i}.json")
            merge([cs for _, cs in o["nodes"]]).save(args.output_dir / f"coreset_seed{o['seed']}_union.json")
    reports = []
    for o in outcomes:
        if o["result"] is not None:
            rep = allocation_report(o["result"])
        else:
            rep = {"epsilon": max(c.epsilon for c, _ in o["nodes"]), "budget": budget, "allocations": [{"node": i, "B_i": cs.bit_size, "k": c.k, "b": c.b, "epsilon_i": c.epsilon} for i, (c, cs) in enumerate(o["nodes"])]}
        rep["seed"] = o["seed"]
        rep["total_bits"] = o["total_bits"]
        rep["normalized_cost"] = {r["task"]: r["normalized_cost"] for r in o["rows"]}
        reports.append(rep)
    _emit(args, "allocation.json", json.dumps(reports if len(reports) > 1 else reports[0], indent=2))
    return EXIT_OK


COMMANDS = {
    "optimize": cmd_optimize,
    "coreset": cmd_coreset,
    "evaluate": cmd_evaluate,
    "sweep": cmd_sweep,
    "distributed": cmd_distributed,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"qcoreset: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QCoresetError as exc:
        print(f"qcoreset: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except FileNotFoundError as exc:
        print(f"qcoreset: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
