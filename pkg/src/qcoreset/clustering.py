"""k-means (k-means++ seeding + Lloyd) and the one-pass greedy k-center sweep."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .data import Dataset

MAX_ITER = 100
REL_TOL = 1e-6


@dataclass(frozen=True)
class KMeansResult:
    centers: np.ndarray
    assignment: np.ndarray
    cost: float
    weights: np.ndarray
    history: tuple = ()

    @property
    def k(self) -> int:
        return self.centers.shape[0]

    def max_distance(self, points) -> float:
        """Largest distance from a point to the center it is assigned to."""
        diff = np.asarray(points, dtype=np.float64) - self.centers[self.assignment]
        return float(np.sqrt(np.einsum("ij,ij->i", diff, diff)).max())


@dataclass(frozen=True)
class KCenterSweep:
    order: np.ndarray
    g: np.ndarray

    @property
    def K(self) -> int:
        return len(self.g)

    def cost(self, k: int) -> float:
        if k < 1 or k > len(self.g):
            raise ValueError(f"k={k} outside sweep range [1, {len(self.g)}]")
        return float(self.g[k - 1])


def _as_points(data):
    if isinstance(data, Dataset):
        return data.points
    return np.ascontiguousarray(data, dtype=np.float64)


def _kmeanspp(X, w, k, rng):
    n = X.shape[0]
    centers = np.empty((k, X.shape[1]))
    first = rng.choice(n, p=w / w.sum())
    centers[0] = X[first]
    diff = X - X[first]
    d2 = np.einsum("ij,ij->i", diff, diff)
    for j in range(1, k):
        mass = w * d2
        total = mass.sum()
        if total > 0:
            idx = int(np.searchsorted(np.cumsum(mass), rng.random() * total, side="right"))
            idx = min(idx, n - 1)
        else:
            idx = int(rng.integers(n))
        centers[j] = X[idx]
        diff = X - X[idx]
        np.minimum(d2, np.einsum("ij,ij->i", diff, diff), out=d2)
    return centers


def _repair_empty(X, w, centers, labels, d2, k):
    # every empty cluster takes over the point farthest from its own center
    sizes = np.bincount(labels, minlength=k)
    for j in np.flatnonzero(sizes == 0):
        movable = sizes[labels] > 1
        if not movable.any():
            break
        cand = np.where(movable, d2, -1.0)
        i = int(np.argmax(cand))
        sizes[labels[i]] -= 1
        labels[i] = j
        sizes[j] = 1
        centers[j] = X[i]
        d2[i] = 0.0
    return centers, labels, d2


def _weighted_means(X, w, labels, k, centers):
    totals = np.bincount(labels, weights=w, minlength=k)
    out = centers.copy()
    for col in range(X.shape[1]):
        sums = np.bincount(labels, weights=w * X[:, col], minlength=k)
        nz = totals > 0
        out[nz, col] = sums[nz] / totals[nz]
    return out


def kmeans(data, k: int, seed: int = 0, weights=None, max_iter: int = MAX_ITER, tol: float = REL_TOL) -> KMeansResult:
    """Weighted k-means++ seeding followed by Lloyd iterations.

    Stops once the relative cost improvement drops below ``tol`` or after
    ``max_iter`` updates. Deterministic for a fixed ``seed``.
    """
    X = _as_points(data)
    n = X.shape[0]
    if k < 1 or k > n:
        raise ValueError(f"k={k} must lie in [1, n={n}]")
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=np.float64)
    rng = np.random.default_rng(seed)

    centers = _kmeanspp(X, w, k, rng)
    labels, d2 = kernels.assign_nearest(X, centers)
    centers, labels, d2 = _repair_empty(X, w, centers, labels, d2, k)
    cost = float(np.dot(w, d2))
    history = [cost]
    for _ in range(max_iter):
        centers = _weighted_means(X, w, labels, k, centers)
        labels, d2 = kernels.assign_nearest(X, centers)
        centers, labels, d2 = _repair_empty(X, w, centers, labels, d2, k)
        new_cost = float(np.dot(w, d2))
        history.append(new_cost)
        improvement = cost - new_cost
        cost = new_cost
        if improvement <= tol * max(cost + improvement, 0.0):
            break
    sizes = np.bincount(labels, weights=w, minlength=k)
    return KMeansResult(
        centers=centers, assignment=labels, cost=cost, weights=sizes, history=tuple(history)
    )


def f_gap(dataset, k: int, seed: int = 0, cache=None) -> float:
    """Heuristic ``opt(k) - opt(2k)``, clamped at zero; ``opt(2k) = 0`` when 2k > n."""
    X = _as_points(dataset)
    n = X.shape[0]

    def cost(kk):
        if cache is not None and kk in cache:
            return cache[kk]
        value = kmeans(X, kk, seed).cost
        if cache is not None:
            cache[kk] = value
        return value

    upper = cost(k)
    lower = cost(2 * k) if 2 * k <= n else 0.0
    return max(0.0, upper - lower)


def kcenter_sweep(dataset, K: int) -> KCenterSweep:
    """Greedy farthest-point traversal recording the k-center cost for k = 1..K.

    Starts from the lowest-index point (every distance is infinite, first wins).
    """
    X = _as_points(dataset)
    n = X.shape[0]
    if K < 1 or K > n:
        raise ValueError(f"K={K} must lie in [1, n={n}]")
    order, g = kernels.kcenter_sweep(np.ascontiguousarray(X), int(K))
    return KCenterSweep(order=np.asarray(order), g=np.asarray(g))
