"""Monte Carlo sweeps and the distributed simulation, producing plot-ready CSV rows."""
from __future__ import annotations

import csv
import io
import statistics
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from functools import partial

from .coreset import apply_quantizer, build_rcc, merge
from .data import Dataset
from .distributed import equal_cardinality, partition_random, run_mecbd
from .errors import QCoresetError
from .evaluation import TaskSpec, eval_task, reference_cost
from .optimizer import optimize

SWEEP_COLUMNS = ["method", "task", "seed", "budget", "k", "b", "normalized_cost", "elapsed_ms", "status"]


def default_tasks(dataset: Dataset, kmeans_k: int = 2, pca_r: int = None):
    # 3 components for small d (Iris, Facebook), 11 for Pendigits-sized d
    if pca_r is None:
        pca_r = 11 if dataset.d >= 17 else min(3, dataset.d)
    return [("meb", {}), ("kmeans", {"k": kmeans_k}), ("pca", {"r": pca_r})]


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    return "" if value is None else str(value)


class SweepWriter:
    """Single serialized writer for sweep rows."""

    def __init__(self, fh, timing=True):
        self.writer = csv.writer(fh, lineterminator="\n")
        self.writer.writerow(SWEEP_COLUMNS)
        self.timing = timing

    def write(self, row):
        if not self.timing:
            row = dict(row, elapsed_ms=0.0)
        self.writer.writerow([_fmt(row.get(c)) for c in SWEEP_COLUMNS])


def _sweep_seed(dataset, budget, methods, rho, tasks, spectrum_form, seed):
    rows = []
    references = {}
    for method in methods:
        try:
            cfg = optimize(dataset, budget, method, rho, seed, spectrum_form=spectrum_form)
            coreset = apply_quantizer(build_rcc(dataset, cfg.k, seed), cfg.b)
            results = []
            for name, params in tasks:
                spec = TaskSpec(name, seed=seed, **params)
                key = (name, tuple(sorted(params.items())))
                if key not in references:
                    references[key] = reference_cost(dataset, spec)
                rep = eval_task(dataset, coreset, spec, reference=references[key])
                results.append((name, rep.normalized_cost))
            for name, ratio in results:
                rows.append(dict(method=method, task=name, seed=seed, budget=budget, k=cfg.k, b=cfg.b, normalized_cost=ratio, elapsed_ms=cfg.elapsed_ms, status="ok"))
        except (QCoresetError, ValueError, ArithmeticError) as exc:
            for name, _ in tasks:
                rows.append(dict(method=method, task=name, seed=seed, budget=budget, status=f"failed: {exc}"))
    return rows


def run_sweep(dataset: Dataset, budget: int, methods, runs: int = 40, rho: float = 1.0, tasks=None, out=None, timing: bool = True, spectrum_form: str = "auto", first_seed: int = 1, jobs: int = 1):
    """Configure, build, quantize and evaluate for every (seed, method); one row per task.

    Seeds run in ``jobs`` worker processes; rows are written in seed order by
    one writer, so the output does not depend on scheduling. A failing run is
    recorded with its error in ``status`` and the sweep moves on.
    """
    tasks = default_tasks(dataset) if tasks is None else tasks
    writer = SweepWriter(out, timing) if out is not None else None
    seeds = range(first_seed, first_seed + runs)
    work = partial(_sweep_seed, dataset, budget, list(methods), rho, tasks, spectrum_form)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_seed = list(pool.map(work, seeds))
    else:
        per_seed = map(work, seeds)
    rows = []
    for seed_rows in per_seed:
        rows.extend(seed_rows)
        if writer is not None:
            for row in seed_rows:
                writer.write(row)
    return rows


def timing_summary(rows):
    """Mean configuration time per method over successful runs (one value per seed)."""
    per_method = defaultdict(dict)
    for row in rows:
        if row.get("status") == "ok":
            per_method[row["method"]][row["seed"]] = row["elapsed_ms"]
    return {m: statistics.fmean(v.values()) for m, v in per_method.items()}


def summarize(rows):
    """Median normalized cost per (method, task)."""
    groups = defaultdict(list)
    for row in rows:
        if row.get("status") == "ok":
            groups[(row["method"], row["task"])].append(row["normalized_cost"])
    return {key: statistics.median(vals) for key, vals in groups.items()}


def run_distributed(dataset: Dataset, budget: int, nodes: int, method: str = "md", runs: int = 1, rho: float = 1.0, tasks=None, first_seed: int = 1, spectrum_form: str = "auto"):
    """Random partition + budget allocation per seed; the union coreset is scored on the full data.

    ``method`` may carry an ``oba-`` prefix; ``equal`` runs the equal-cardinality
    full-precision baseline instead of the allocation.
    """
    tasks = default_tasks(dataset) if tasks is None else tasks
    base = method[4:] if method.startswith("oba-") else method
    outcomes = []
    for seed in range(first_seed, first_seed + runs):
        parts = partition_random(dataset, nodes, seed)
        start = time.perf_counter()
        if base == "equal":
            node_results = equal_cardinality(parts, budget, seed)
            result = None
        else:
            result = run_mecbd(parts, budget, base, rho, seed, spectrum_form=spectrum_form)
            node_results = result.nodes
        elapsed = (time.perf_counter() - start) * 1000.0
        union = merge([cs for _, cs in node_results])
        total_bits = sum(cs.bit_size for _, cs in node_results)
        evals = []
        for name, params in tasks:
            spec = TaskSpec(name, seed=seed, **params)
            rep = eval_task(dataset, union, spec)
            evals.append(dict(method=method, task=name, seed=seed, budget=budget, k=union.k, b=union.b, normalized_cost=rep.normalized_cost, elapsed_ms=elapsed, status="ok"))
        outcomes.append(dict(seed=seed, result=result, nodes=node_results, total_bits=total_bits, rows=evals))
    return outcomes


def rows_to_csv(rows, timing=True) -> str:
    buf = io.StringIO()
    writer = SweepWriter(buf, timing)
    for row in rows:
        writer.write(row)
    return buf.getvalue()
