"""Downstream tasks (MEB, k-means, PCA) trained on a summary and scored on the full data."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import kernels
from .clustering import kmeans
from .coreset import WeightedCoreset
from .data import Dataset

TASKS = ("meb", "kmeans", "pca")
MEB_TOL = 0.01
KMEANS_RESTARTS = 20


@dataclass(frozen=True)
class TaskSpec:
    task: str
    k: int = 2
    r: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.task not in TASKS:
            raise ValueError(f"unknown task {self.task!r}")
        if self.k < 1 or self.r < 1:
            raise ValueError("k and r must be >= 1")


@dataclass(frozen=True)
class EvalReport:
    task: str
    model: str
    cost_on_full: float
    reference_cost: float
    normalized_cost: float
    elapsed_ms: float


def solve_meb(points, tol: float = MEB_TOL):
    """Approximate minimum enclosing ball by Badoiu-Clarkson iterations from the mean.

    Returns ``(center, radius)``; the radius is within ``1 + tol`` of optimal.
    """
    P = np.ascontiguousarray(points, dtype=np.float64)
    iters = int(math.ceil(1.0 / tol**2))
    center = kernels.meb_iterate(P, P.mean(axis=0), iters) if len(P) > 1 else P[0].copy()
    diff = P - center
    radius = float(np.sqrt(np.einsum("ij,ij->i", diff, diff)).max())
    return np.asarray(center), radius


def weighted_pca(points, weights, r: int):
    """Weighted mean, top-r principal directions (columns) and the full descending spectrum."""
    P = np.asarray(points, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    mean = (w[:, None] * P).sum(axis=0) / w.sum()
    Z = P - mean
    scatter = (Z * w[:, None]).T @ Z
    vals, vecs = np.linalg.eigh(scatter)
    idx = np.argsort(vals)[::-1]
    return mean, vecs[:, idx[:r]], vals[idx]


def _summary_arrays(summary):
    if isinstance(summary, WeightedCoreset):
        return summary.points, summary.weights
    if isinstance(summary, Dataset):
        return summary.points, np.ones(summary.n)
    points, weights = summary
    return np.asarray(points, dtype=np.float64), np.asarray(weights, dtype=np.float64)


def _best_kmeans(points, weights, k, seed):
    k = min(k, len(points))
    best = None
    for r in range(KMEANS_RESTARTS):
        res = kmeans(points, k, seed=seed + r, weights=weights)
        if best is None or res.cost < best.cost:
            best = res
    return best.centers


def fit(task: TaskSpec, points, weights):
    if task.task == "meb":
        return solve_meb(points)[0]
    if task.task == "kmeans":
        return _best_kmeans(points, weights, task.k, task.seed)
    mean, comps, _ = weighted_pca(points, weights, min(task.r, points.shape[1]))
    return mean, comps


def task_cost(task: TaskSpec, model, Y) -> float:
    """Native cost of ``model`` on the full data ``Y``."""
    if task.task == "meb":
        diff = Y - model
        return float(np.sqrt(np.einsum("ij,ij->i", diff, diff)).max())
    if task.task == "kmeans":
        _, d2 = kernels.assign_nearest(np.ascontiguousarray(Y), np.ascontiguousarray(model))
        return float(d2.sum())
    mean, comps = model
    Z = Y - mean
    resid = Z - (Z @ comps) @ comps.T
    return float(np.einsum("ij,ij->", resid, resid))


def _describe(task, model):
    if task.task == "meb":
        return f"meb center={np.round(model, 6).tolist()}"
    if task.task == "kmeans":
        return f"kmeans k={len(model)}"
    return f"pca r={model[1].shape[1]}"


def eval_task(dataset: Dataset, summary, task: TaskSpec, reference: float = None) -> EvalReport:
    """Normalized cost of the model learned on ``summary``, both models scored on ``dataset``.

    ``reference`` short-circuits the full-data fit when the caller already has
    it (see :func:`reference_cost`).
    """
    points, weights = _summary_arrays(summary)
    if points.shape[1] != dataset.d:
        raise ValueError(f"summary dimension {points.shape[1]} != dataset dimension {dataset.d}")
    start = time.perf_counter()
    model = fit(task, points, weights)
    cost = task_cost(task, model, dataset.points)
    elapsed = (time.perf_counter() - start) * 1000.0
    if reference is None:
        reference = reference_cost(dataset, task)
    if reference > 0:
        ratio = cost / reference
    else:
        ratio = 1.0 if cost == 0 else math.inf
    return EvalReport(
        task=task.task,
        model=_describe(task, model),
        cost_on_full=cost,
        reference_cost=reference,
        normalized_cost=ratio,
        elapsed_ms=elapsed,
    )


def reference_cost(dataset: Dataset, task: TaskSpec) -> float:
    Y = dataset.points
    return task_cost(task, fit(task, Y, np.ones(len(Y))), Y)
