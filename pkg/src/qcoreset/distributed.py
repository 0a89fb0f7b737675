"""Budget allocation across nodes: per-node error envelopes and the server's binary search."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .coreset import WeightedCoreset, apply_quantizer, build_rcc
from .data import Dataset
from .errors import BudgetError, ConfigurationError
from .optimizer import SCAN_METHODS, BoundTable, Config, md_epsilon, min_budget, optimize


@dataclass(frozen=True)
class Envelope:
    """Staircase of (budget, best error) pairs, strictly improving in both coordinates."""

    node_id: int
    breakpoints: tuple  # ((B, eps), ...)

    def __post_init__(self):
        bp = tuple((int(B), float(e)) for B, e in self.breakpoints)
        if not bp:
            raise ValueError("an envelope needs at least one breakpoint")
        for (b1, e1), (b2, e2) in zip(bp, bp[1:]):
            if not (b2 > b1 and e2 < e1):
                raise ValueError(f"breakpoints not strictly monotone at {(b1, e1)} -> {(b2, e2)}")
        object.__setattr__(self, "breakpoints", bp)

    @property
    def budgets(self):
        return [B for B, _ in self.breakpoints]

    @property
    def errors(self):
        return [e for _, e in self.breakpoints]

    def budget_for(self, eps: float) -> float:
        """Smallest breakpoint budget whose error is <= eps, or inf."""
        for B, e in self.breakpoints:
            if e <= eps:
                return B
        return float("inf")

    def error_at(self, budget: float) -> float:
        """Envelope value at ``budget`` (inf below the first breakpoint)."""
        best = float("inf")
        for B, e in self.breakpoints:
            if B > budget:
                break
            best = e
        return best


@dataclass(frozen=True)
class Allocation:
    budgets: tuple
    errors: tuple
    epsilon: float
    budget: int

    @property
    def total(self) -> int:
        return int(sum(self.budgets))


@dataclass
class TraceLog:
    """Messages exchanged between nodes and the server, one record per message."""

    records: list = field(default_factory=list)

    def log(self, node, direction, payload, bits):
        self.records.append({"node": node, "direction": direction, "payload": payload, "bits": int(bits)})

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.records)


def _node_epsilons(dataset, method, budgets, rho, seed, table):
    if method in SCAN_METHODS:
        eps, _, _ = table.scan(budgets)
        return eps
    out = []
    for B in budgets:
        try:
            out.append(optimize(dataset, int(B), method, rho, seed).epsilon)
        except BudgetError:
            # mp needs a whole full-precision point before it can report anything
            out.append(np.inf)
    return np.array(out)


def candidate_budgets(dataset: Dataset, cap: int) -> np.ndarray:
    """Every budget at which some floor(B / (d*b)) changes: the products k*d*b."""
    d, n = dataset.d, dataset.n
    bits = np.arange(1 + dataset.me, dataset.b0 + 1)
    ks = np.arange(1, n + 1)
    cands = np.unique((ks[:, None] * d * bits[None, :]).ravel())
    return cands[cands <= cap]


def compute_envelope(dataset: Dataset, method: str = "md", rho: float = 1.0, budget_cap: int = None, stride: int = None, seed: int = 0, node_id: int = 0, spectrum_form: str = "auto") -> Envelope:
    """Error envelope of one node, from the minimum budget up to ``budget_cap``.

    Without ``stride`` only the budgets where the error can change are
    evaluated, which gives the same staircase as an integer scan.
    """
    B0 = min_budget(dataset)
    cap = dataset.n * dataset.b0 * dataset.d if budget_cap is None else int(budget_cap)
    cap = max(cap, B0)
    table = None
    if method in SCAN_METHODS:
        table = BoundTable(dataset, method, rho, seed, spectrum_form=spectrum_form)
    if stride is None:
        budgets = candidate_budgets(dataset, cap)
        budgets = np.union1d([B0], budgets)
    else:
        if stride < 1:
            raise ConfigurationError("stride must be >= 1")
        budgets = np.arange(B0, cap + 1, int(stride))
    eps = _node_epsilons(dataset, method, budgets, rho, seed, table)
    finite = np.flatnonzero(np.isfinite(eps))
    if len(finite) == 0:
        raise BudgetError(f"no feasible {method} configuration up to {cap} bits", minimum=dataset.d * dataset.b0)
    start = finite[0]
    points = [(int(budgets[start]), float(eps[start]))]
    for B, e in zip(budgets[start + 1:], eps[start + 1:]):
        if e < points[-1][1]:
            points.append((int(B), float(e)))
    return Envelope(node_id=node_id, breakpoints=tuple(points))


def allocate(envelopes, B: int) -> Allocation:
    """Minimax split of ``B`` bits: the smallest reported error every node can meet."""
    envelopes = list(envelopes)
    floor_total = sum(env.budgets[0] for env in envelopes)
    if floor_total > B:
        raise BudgetError(f"global budget {B} below the sum of minimum node budgets", minimum=floor_total)
    E = sorted({e for env in envelopes for e in env.errors}, reverse=True)

    def need(eps):
        return sum(env.budget_for(eps) for env in envelopes)

    if need(E[-1]) <= B:
        best = len(E) - 1
    else:
        # invariant: E[hi] fits the budget, E[lo] does not
        hi, lo = 0, len(E) - 1
        while lo != hi + 1:
            mid = (hi + lo) // 2
            if need(E[mid]) > B:
                lo = mid
            else:
                hi = mid
        best = hi
    target = E[best]
    budgets = tuple(int(env.budget_for(target)) for env in envelopes)
    errors = tuple(env.error_at(bi) for env, bi in zip(envelopes, budgets))
    return Allocation(budgets=budgets, errors=errors, epsilon=max(errors), budget=int(B))


def partition_random(dataset: Dataset, N: int, seed: int = 0):
    """Split the rows uniformly at random into N disjoint non-empty parts."""
    if N < 1 or N > dataset.n:
        raise ConfigurationError(f"cannot split {dataset.n} points across {N} nodes")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(dataset.n)
    return [dataset.subset(np.sort(part)) for part in np.array_split(perm, N)]


@dataclass
class MECBDResult:
    allocation: Allocation
    envelopes: list
    nodes: list  # [(Config, WeightedCoreset)] per node
    trace: TraceLog

    @property
    def epsilon(self) -> float:
        return max(cfg.epsilon for cfg, _ in self.nodes)

    @property
    def total_bits(self) -> int:
        return sum(cs.bit_size for _, cs in self.nodes)


def run_mecbd(partitions, B: int, method: str = "md", rho: float = 1.0, seed: int = 0, spectrum_form: str = "auto") -> MECBDResult:
    """Envelope every node, allocate ``B`` on the server, then build each local coreset."""
    partitions = list(partitions)
    if not partitions:
        raise ValueError("no partitions given")
    trace = TraceLog()
    envelopes = []
    for i, part in enumerate(partitions):
        cap = min(part.n * part.b0 * part.d, int(B))
        env = compute_envelope(part, method, rho, budget_cap=cap, seed=seed, node_id=i, spectrum_form=spectrum_form)
        envelopes.append(env)
        trace.log(i, "up", {"breakpoints": len(env.breakpoints)}, 2 * part.b0 * len(env.breakpoints))
    allocation = allocate(envelopes, B)
    nodes = []
    for i, (part, Bi) in enumerate(zip(partitions, allocation.budgets)):
        trace.log(i, "down", {"budget": Bi}, part.b0)
        cfg = optimize(part, Bi, method, rho, seed, spectrum_form=spectrum_form)
        coreset = apply_quantizer(build_rcc(part, cfg.k, seed), cfg.b)
        nodes.append((cfg, coreset))
    return MECBDResult(allocation=allocation, envelopes=envelopes, nodes=nodes, trace=trace)


def equal_cardinality(partitions, B: int, seed: int = 0):
    """Baseline: the same full-precision cardinality on every node."""
    partitions = list(partitions)
    d, b0 = partitions[0].d, partitions[0].b0
    k = B // (len(partitions) * d * b0)
    if k < 1:
        raise BudgetError(
            f"budget {B} gives no full-precision point per node", minimum=len(partitions) * d * b0
        )
    nodes = []
    for part in partitions:
        kk = min(k, part.n)
        cfg = Config(k=kk, b=b0, epsilon=md_epsilon(part, kk, b0), method="equal", budget=B // len(partitions), d=d, seed=seed)
        nodes.append((cfg, build_rcc(part, kk, seed)))
    return nodes


def allocation_report(result: MECBDResult) -> dict:
    return {
        "epsilon": result.allocation.epsilon,
        "budget": result.allocation.budget,
        "allocations": [
            {"node": i, "B_i": int(Bi), "k": cfg.k, "b": cfg.b, "epsilon_i": cfg.epsilon}
            for i, (Bi, (cfg, _)) in enumerate(zip(result.allocation.budgets, result.nodes))
        ],
    }
