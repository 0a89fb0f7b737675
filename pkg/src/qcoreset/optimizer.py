"""Error-bound arithmetic and the (k, b) configuration strategies under a bit budget.

Strategies:

``em``
    scan every bit width, estimating opt(k) - opt(2k) with repeated k-means;
``evd``
    same scan with the spectral proxy for opt(k) - opt(2k);
``md``
    same scan with greedy k-center costs as the coreset error;
``mp``
    maximum precision, b = b0;
``mc``
    maximum cardinality, b as small as the budget allows.
"""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass

import numpy as np

from .clustering import KCenterSweep, f_gap, kcenter_sweep
from .data import Dataset
from .errors import BudgetError, ConfigurationError
from .quantizer import delta_bound, delta_from_norm
from .spectral import EigenSpectrum, covariance_spectrum, f_evd

SCAN_METHODS = ("em", "evd", "md")
METHODS = SCAN_METHODS + ("mp", "mc")


@dataclass(frozen=True)
class Config:
    k: int
    b: int
    epsilon: float
    method: str
    budget: int = None
    d: int = None
    seed: int = None
    elapsed_ms: float = 0.0

    @property
    def bits_used(self) -> int:
        return self.k * self.d * self.b

    def to_record(self) -> dict:
        rec = asdict(self)
        rec.pop("d")
        rec["bits_used"] = self.bits_used
        return {key: rec[key] for key in ("method", "k", "b", "epsilon", "budget", "bits_used", "elapsed_ms", "seed")}


def combine_errors(eps_cs: float, rho_delta: float) -> float:
    """Error of a quantized coreset: eps_cs + rho*Delta + eps_cs * rho*Delta."""
    return eps_cs + rho_delta + eps_cs * rho_delta


def _bound(h, delta, rho):
    # shared by the scalar objectives and the vectorized scan so both agree bit for bit
    return rho * h + rho * delta + rho * rho * delta * h


def objective_evd(k, b, spectrum: EigenSpectrum, dataset: Dataset, rho: float = 1.0) -> float:
    return _bound(math.sqrt(f_evd(spectrum, k)), delta_bound(b, dataset), rho)


def objective_md(k, b, sweep: KCenterSweep, dataset: Dataset, rho: float = 1.0) -> float:
    if k < 1 or k > sweep.K:
        raise ValueError(f"k={k} outside the sweep range [1, {sweep.K}]")
    return _bound(sweep.cost(k), delta_bound(b, dataset), rho)


def objective_em(k, b, dataset: Dataset, rho: float = 1.0, seed: int = 0, cache=None) -> float:
    return _bound(math.sqrt(f_gap(dataset, k, seed, cache=cache)), delta_bound(b, dataset), rho)


def min_budget(dataset: Dataset) -> int:
    """Smallest feasible budget: a single point at the narrowest width."""
    return (1 + dataset.me) * dataset.d


class BoundTable:
    """Coreset-error term h(k) for one strategy plus the per-width Delta(b).

    ``h(k)`` is g(k) for ``md``, sqrt of the spectral gap for ``evd`` and sqrt
    of the k-means gap for ``em`` (computed lazily, cached by k).
    """

    def __init__(self, dataset: Dataset, method: str, rho: float = 1.0, seed: int = 0, K: int = None, spectrum_form: str = "auto"):
        if method not in SCAN_METHODS:
            raise ConfigurationError(f"no bound table for method {method!r}")
        self.dataset = dataset
        self.method = method
        self.rho = float(rho)
        self.seed = seed
        self.K = dataset.n if K is None else max(1, min(int(K), dataset.n))
        self.bits = np.arange(1 + dataset.me, dataset.b0 + 1)
        self.delta = np.array([delta_from_norm(int(b), dataset.max_norm, dataset.me, dataset.b0) for b in self.bits])
        self._h = np.full(self.K + 1, np.nan)
        self._kmeans_costs = {}
        self.sweep = None
        self.spectrum = None
        if method == "md":
            self.sweep = kcenter_sweep(dataset, self.K)
            self._h[1:] = self.sweep.g
        elif method == "evd":
            self.spectrum = covariance_spectrum(dataset, form=spectrum_form)
            prefix = self.spectrum.prefix
            top = len(prefix) - 1
            ks = np.arange(1, self.K + 1)
            gap = prefix[np.minimum(2 * ks - 1, top)] - prefix[np.minimum(ks - 1, top)]
            self._h[1:] = np.sqrt(np.maximum(gap, 0.0))

    def h(self, k: int) -> float:
        if np.isnan(self._h[k]):
            self._h[k] = math.sqrt(f_gap(self.dataset, k, self.seed, cache=self._kmeans_costs))
        return float(self._h[k])

    def cardinalities(self, budgets) -> np.ndarray:
        budgets = np.asarray(budgets, dtype=np.int64).reshape(-1, 1)
        ks = budgets // (self.dataset.d * self.bits[None, :])
        return np.minimum(ks, self.K)

    def scan(self, budgets):
        """Best (epsilon, k, b) for every budget; ties go to the smaller b."""
        ks = self.cardinalities(budgets)
        if self.method == "em":
            for k in np.unique(ks[ks > 0]):
                self.h(int(k))
        feasible = ks > 0
        H = self._h[np.where(feasible, ks, 1)]
        eps = np.where(feasible, _bound(H, self.delta[None, :], self.rho), np.inf)
        j = np.argmin(eps, axis=1)
        rows = np.arange(len(j))
        return eps[rows, j], ks[rows, j], self.bits[j]

    def epsilon(self, k: int, b: int) -> float:
        return _bound(self.h(k), self.delta[b - self.bits[0]], self.rho)


def _check_budget(dataset, B):
    if B < min_budget(dataset):
        raise BudgetError(f"budget {B} bits cannot hold one {dataset.d}-dim point", minimum=min_budget(dataset))


def md_epsilon(dataset: Dataset, k: int, b: int, rho: float = 1.0, sweep: KCenterSweep = None) -> float:
    """The md-style bound of an arbitrary (k, b), used to report mp/mc configurations."""
    if sweep is None or sweep.K < k:
        sweep = kcenter_sweep(dataset, k)
    return objective_md(k, b, sweep, dataset, rho)


def optimize(dataset: Dataset, B: int, method: str = "md", rho: float = 1.0, seed: int = 0, spectrum_form: str = "auto", table: BoundTable = None) -> Config:
    """Pick (k, b) for ``dataset`` under ``B`` bits with the given strategy.

    A prebuilt ``table`` for the same dataset and method skips the setup work
    (spectrum, sweep or k-means cache).
    """
    if method not in METHODS:
        raise ConfigurationError(f"unknown method {method!r}; expected one of {METHODS}")
    B = int(B)
    _check_budget(dataset, B)
    d, n = dataset.d, dataset.n
    start = time.perf_counter()
    if method in SCAN_METHODS:
        if table is None:
            K = min(B // (d * (1 + dataset.me)), n) if method == "md" else n
            table = BoundTable(dataset, method, rho, seed, K=K, spectrum_form=spectrum_form)
        eps, ks, bs = table.scan([B])
        k, b, epsilon = int(ks[0]), int(bs[0]), float(eps[0])
    elif method == "mp":
        k = min(B // (d * dataset.b0), n)
        if k == 0:
            raise BudgetError(f"budget {B} bits cannot hold one full-precision point", minimum=d * dataset.b0)
        b = dataset.b0
        epsilon = md_epsilon(dataset, k, b, rho)
    else:
        k = min(n, B // (d * (1 + dataset.me)))
        b = min(dataset.b0, max(1 + dataset.me, B // (d * n)))
        epsilon = md_epsilon(dataset, k, b, rho)
    elapsed = (time.perf_counter() - start) * 1000.0
    return Config(k=k, b=b, epsilon=epsilon, method=method, budget=B, d=d, seed=seed, elapsed_ms=elapsed)
