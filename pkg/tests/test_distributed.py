import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import envelope_by_enumeration, minimax_allocation
from qcoreset.coreset import build_rcc, merge
from qcoreset.data import Dataset
from qcoreset.distributed import (
    Envelope,
    allocate,
    allocation_report,
    candidate_budgets,
    compute_envelope,
    equal_cardinality,
    partition_random,
    run_mecbd,
)
from qcoreset.errors import BudgetError, ConfigurationError
from qcoreset.optimizer import combine_errors, optimize


def _env(i, pts):
    return Envelope(i, tuple(pts))


def test_allocate_two_node_example():
    a = allocate([_env(0, [(4, 0.5), (8, 0.2)]), _env(1, [(4, 0.4), (8, 0.1)])], 12)
    assert a.epsilon == 0.4 and a.budgets == (8, 4) and a.total == 12


def test_allocate_unconstrained():
    envs = [_env(0, [(4, 0.5), (8, 0.2)]), _env(1, [(4, 0.4), (8, 0.1), (20, 0.05)])]
    a = allocate(envs, 10**6)
    assert a.epsilon == max(0.2, 0.05)


def test_allocate_single_node():
    env = _env(0, [(4, 0.5), (8, 0.2), (16, 0.1)])
    a = allocate([env], 15)
    assert a.budgets == (8,) and a.epsilon == 0.2


def test_allocate_infeasible():
    with pytest.raises(BudgetError) as err:
        allocate([_env(0, [(4, 0.5)]), _env(1, [(6, 0.4)])], 9)
    assert err.value.minimum == 10


def test_envelope_validation():
    with pytest.raises(ValueError):
        _env(0, [(4, 0.5), (4, 0.4)])
    with pytest.raises(ValueError):
        _env(0, [(4, 0.5), (8, 0.5)])
    with pytest.raises(ValueError):
        _env(0, [])
    env = _env(0, [(4, 0.5), (8, 0.2)])
    assert env.budget_for(0.1) == float("inf") and env.error_at(3) == float("inf")


@st.composite
def envelope_sets(draw):
    nodes = draw(st.integers(1, 3))
    envs = []
    for i in range(nodes):
        m = draw(st.integers(1, 6))
        budgets = sorted(draw(st.sets(st.integers(1, 40), min_size=m, max_size=m)))
        # a small grid of errors forces duplicates across nodes
        errors = sorted(draw(st.sets(st.integers(1, 12), min_size=m, max_size=m)), reverse=True)
        envs.append([(b, e / 8) for b, e in zip(budgets, errors)])
    B = draw(st.integers(0, sum(e[-1][0] for e in envs) + 5))
    return envs, B


@given(envelope_sets())
@settings(max_examples=300, deadline=None)
def test_allocate_matches_brute_force(case):
    envs, B = case
    expected = minimax_allocation(envs, B)
    objs = [_env(i, e) for i, e in enumerate(envs)]
    if expected is None:
        with pytest.raises(BudgetError):
            allocate(objs, B)
        return
    a = allocate(objs, B)
    assert a.epsilon == expected
    assert a.total <= B


def test_candidate_budgets_small():
    ds = Dataset([[0.5], [0.25]], b0=14, me=11)
    np.testing.assert_array_equal(candidate_budgets(ds, 100), [12, 13, 14, 24, 26, 28])


def test_envelope_three_point_toy():
    ds = Dataset([[-0.5], [0.125], [0.75]], b0=20, me=11)
    env = compute_envelope(ds, "md")
    expected = envelope_by_enumeration(lambda B: optimize(ds, B, "md").epsilon, 3, 1, 11, 20, 3 * 20)
    assert list(env.breakpoints) == expected
    assert env.budgets[0] == 12


@pytest.mark.parametrize("method", ["md", "evd"])
def test_stride_one_equals_candidates(method):
    ds = Dataset(np.random.default_rng(3).uniform(-1, 1, (4, 2)), b0=24, me=11)
    fast = compute_envelope(ds, method)
    slow = compute_envelope(ds, method, stride=1)
    by_d = compute_envelope(ds, method, stride=ds.d)
    assert fast.breakpoints == slow.breakpoints == by_d.breakpoints
    with pytest.raises(ConfigurationError):
        compute_envelope(ds, method, stride=0)


def test_single_point_envelopes():
    # the normalized single point is the origin, so nothing ever improves
    zero = Dataset(np.zeros((1, 3)))
    assert compute_envelope(zero, "md").breakpoints == ((36, 0.0),)
    one = Dataset([[0.5, -0.25]])
    env = compute_envelope(one, "md")
    assert env.budgets[0] == 24 and env.budgets[-1] == 2 * 64
    assert len(env.breakpoints) == 64 - 11


def test_mp_envelope_starts_at_first_full_point(iris):
    env = compute_envelope(iris.subset(range(10)), "mp")
    assert env.budgets[0] == 5 * 64


def test_monotone_budget_response(iris):
    parts = partition_random(iris, 4, seed=2)
    envs = [compute_envelope(p, "md", node_id=i) for i, p in enumerate(parts)]
    eps = [allocate(envs, B).epsilon for B in range(240, 6000, 97)]
    assert all(b <= a for a, b in zip(eps, eps[1:]))


def test_partition_random(iris):
    assert partition_random(iris, 1)[0] == iris
    singles = partition_random(iris, iris.n, seed=3)
    assert all(p.n == 1 for p in singles)
    parts = partition_random(iris, 7, seed=5)
    union = np.vstack([p.points for p in parts])
    np.testing.assert_array_equal(np.sort(union, axis=0), np.sort(iris.points, axis=0))
    assert [p.n for p in parts] == [p.n for p in partition_random(iris, 7, seed=5)]
    assert all(p.max_norm == pytest.approx(np.sqrt((p.points**2).sum(1)).max(), rel=1e-15) for p in parts)
    with pytest.raises(ConfigurationError):
        partition_random(iris, iris.n + 1)


def test_single_node_matches_centralized(iris):
    B = 1234
    res = run_mecbd([iris], B, "md")
    env = res.envelopes[0]
    truncated = max(b for b in env.budgets if b <= B)
    cfg = optimize(iris, truncated, "md")
    got = res.nodes[0][0]
    assert (got.k, got.b, got.epsilon) == (cfg.k, cfg.b, cfg.epsilon)


def test_identical_partitions_identical_configs(iris):
    part = iris.subset(range(30))
    res = run_mecbd([part, part, part], 3 * 700, "md")
    assert len({(c.k, c.b) for c, _ in res.nodes}) == 1


@pytest.mark.parametrize("method", ["md", "evd", "mp"])
def test_run_mecbd_accounting(iris, method):
    parts = partition_random(iris, 10, seed=1)
    res = run_mecbd(parts, 4875, method, seed=1)
    assert res.total_bits <= 4875
    assert res.allocation.total <= 4875
    for (cfg, cs), Bi in zip(res.nodes, res.allocation.budgets):
        assert cs.bit_size <= Bi and cs.weights.sum() == cs.source_n
    assert res.epsilon == max(c.epsilon for c, _ in res.nodes)
    up = [r for r in res.trace.records if r["direction"] == "up"]
    down = [r for r in res.trace.records if r["direction"] == "down"]
    assert len(up) == len(down) == 10
    lines = res.trace.to_jsonl().splitlines()
    assert all(set(json.loads(line)) == {"node", "direction", "payload", "bits"} for line in lines)
    rep = allocation_report(res)
    assert set(rep) == {"epsilon", "budget", "allocations"}
    assert set(rep["allocations"][0]) == {"node", "B_i", "k", "b", "epsilon_i"}


def test_infeasible_global_budget(iris):
    parts = partition_random(iris, 10, seed=1)
    with pytest.raises(BudgetError) as err:
        run_mecbd(parts, 500, "md")
    assert err.value.minimum == 600


def test_equal_cardinality_baseline(iris):
    parts = partition_random(iris, 10, seed=1)
    nodes = equal_cardinality(parts, 4875)
    assert all(cfg.k == 1 and cs.b == 64 for cfg, cs in nodes)
    assert sum(cs.bit_size for _, cs in nodes) <= 4875
    with pytest.raises(BudgetError):
        equal_cardinality(parts, 3000)


def test_union_error_within_worst_node(iris):
    rng = np.random.default_rng(0)
    parts = partition_random(iris, 5, seed=4)
    res = run_mecbd(parts, 3000, "md", seed=4)
    X = rng.uniform(-1, 1, (300, iris.d))

    def costs(P, w):
        dist = np.sqrt(((P[:, None, :] - X[None]) ** 2).sum(-1))
        return (w[:, None] * (1 + dist)).sum(0)

    bounds = []
    for part, (cfg, cs) in zip(parts, res.nodes):
        raw = build_rcc(part, cfg.k, 4)
        delta = np.sqrt(((cs.points - raw.points) ** 2).sum(1)).max()
        bounds.append(combine_errors(raw.radius, delta))
    union = merge([cs for _, cs in res.nodes])
    full = costs(iris.points, np.ones(iris.n))
    rel = np.abs(costs(union.points, union.weights) - full) / full
    assert rel.max() <= max(bounds) * (1 + 1e-12)
