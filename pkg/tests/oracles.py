"""Exhaustive reference solvers used to check the library on tiny instances.

Nothing here imports the package; every routine is plain enumeration so a
shared bug cannot hide on both sides.
"""
import itertools
import math
from fractions import Fraction

import numpy as np


def nearest_significand(x: float, s: int) -> float:
    """Closest value with s digits after the leading one, ties toward larger magnitude.

    Enumerates every candidate mantissa in [2**s, 2**(s+1)] at the exponent of x.
    """
    if x == 0:
        return 0.0
    mag = Fraction(abs(x))
    e = 0
    while mag >= 2 ** (e + 1):
        e += 1
    while mag < 2**e:
        e -= 1
    step = Fraction(2) ** (e - s)
    best, best_err = None, None
    for m in range(2**s, 2 ** (s + 1) + 1):
        v = m * step
        err = abs(v - mag)
        if best is None or err < best_err or (err == best_err and v > best):
            best, best_err = v, err
    return math.copysign(float(best), x)


def kcenter_opt(X, k):
    """min over k-subsets C of max_j min_{c in C} ||x_j - c||."""
    D = np.sqrt(((X[:, None, :] - X[None, :, :]) ** 2).sum(-1))
    best = math.inf
    for C in itertools.combinations(range(len(X)), k):
        best = min(best, D[:, list(C)].min(axis=1).max())
    return best


def kmeans_opt(X, k):
    """Exact k-means cost by enumerating every labeling of the points."""
    n = len(X)
    labelings = np.array(list(itertools.product(range(k), repeat=n)))
    onehot = (labelings[:, :, None] == np.arange(k)[None, None, :]).astype(float)
    counts = onehot.sum(axis=1)
    sums = np.einsum("mnk,nd->mkd", onehot, X)
    with np.errstate(invalid="ignore", divide="ignore"):
        between = np.where(counts > 0, (sums**2).sum(-1) / np.maximum(counts, 1), 0.0)
    return float((X**2).sum() - between.sum(axis=1).max())


def three_partition_costs(X):
    """k-means cost of every split of X into three non-empty groups (labels canonical)."""
    n = len(X)
    best = math.inf
    for labels in itertools.product(range(3), repeat=n - 1):
        labels = (0,) + labels
        if len(set(labels)) < 3:
            continue
        lab = np.array(labels)
        cost = sum(((X[lab == c] - X[lab == c].mean(0)) ** 2).sum() for c in range(3))
        best = min(best, cost)
    return best


def _circumcenter(P):
    p0 = P[0]
    A = P[1:] - p0
    if len(A) == 0:
        return p0.copy()
    rhs = 0.5 * (A**2).sum(1)
    lam, *_ = np.linalg.lstsq(A @ A.T, rhs, rcond=None)
    return p0 + A.T @ lam


def meb_opt(X):
    """Smallest enclosing ball radius by trying every support set of size <= d+1."""
    n, d = X.shape
    best = math.inf
    for m in range(1, min(n, d + 1) + 1):
        for S in itertools.combinations(range(n), m):
            c = _circumcenter(X[list(S)])
            r = np.sqrt(((X - c) ** 2).sum(1)).max()
            r_support = np.sqrt(((X[list(S)] - c) ** 2).sum(1)).max()
            if r <= r_support * (1 + 1e-9) + 1e-12:
                best = min(best, r)
    return best


def minimax_allocation(envelopes, B):
    """min over breakpoint choices with total <= B of the max error, or None if infeasible.

    ``envelopes`` is a list of [(budget, eps), ...] lists.
    """
    best = None
    for choice in itertools.product(*envelopes):
        if sum(b for b, _ in choice) <= B:
            eps = max(e for _, e in choice)
            if best is None or eps < best:
                best = eps
    return best


def envelope_by_enumeration(eps_of, n, d, me, b0, cap):
    """Staircase of strict improvements over every (k, b) with k*d*b <= cap, scanned by bits.

    ``eps_of(B)`` returns the optimizer error at budget B.
    """
    budgets = sorted({k * d * b for k in range(1, n + 1) for b in range(1 + me, b0 + 1) if k * d * b <= cap})
    first = (1 + me) * d
    budgets = sorted(set(budgets) | {first})
    out = []
    for B in budgets:
        e = eps_of(B)
        if not out or e < out[-1][1]:
            out.append((B, e))
    return out
