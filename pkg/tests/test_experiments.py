import io

import pytest

from qcoreset.experiments import (
    SWEEP_COLUMNS,
    default_tasks,
    rows_to_csv,
    run_distributed,
    run_sweep,
    summarize,
    timing_summary,
)

METHODS = ["md", "evd", "em", "mp", "mc"]


def test_row_count_full_sweep(iris):
    rows = run_sweep(iris, 960, METHODS, runs=40)
    assert len(rows) == 40 * 5 * 3
    assert all(r["status"] == "ok" for r in rows)
    assert [r["seed"] for r in rows[:15]] == [1] * 15


def test_csv_is_reproducible(iris):
    a, b = io.StringIO(), io.StringIO()
    run_sweep(iris, 960, METHODS, runs=2, out=a, timing=False)
    run_sweep(iris, 960, METHODS, runs=2, out=b, timing=False)
    assert a.getvalue() == b.getvalue()
    assert a.getvalue().splitlines()[0] == ",".join(SWEEP_COLUMNS)


def test_parallel_matches_serial(iris):
    serial = rows_to_csv(run_sweep(iris, 960, ["md", "evd"], runs=4), timing=False)
    parallel = rows_to_csv(run_sweep(iris, 960, ["md", "evd"], runs=4, jobs=2), timing=False)
    assert serial == parallel


def test_failed_runs_are_recorded(iris):
    rows = run_sweep(iris, 200, ["md", "mp"], runs=2)
    failed = [r for r in rows if r["status"] != "ok"]
    assert len(failed) == 2 * 3 and all(r["method"] == "mp" for r in failed)
    assert all("minimum feasible budget" in r["status"] for r in failed)
    text = rows_to_csv(rows)
    assert text.count("failed") == 6


def test_summaries(iris):
    rows = run_sweep(iris, 960, ["md", "mp"], runs=3)
    med = summarize(rows)
    assert set(med) == {(m, t) for m in ("md", "mp") for t in ("meb", "kmeans", "pca")}
    timing = timing_summary(rows)
    assert set(timing) == {"md", "mp"} and all(v >= 0 for v in timing.values())


def test_default_tasks(iris, pendigits):
    assert dict(default_tasks(iris))["pca"] == {"r": 3}
    assert dict(default_tasks(pendigits))["pca"] == {"r": 11}
    assert dict(default_tasks(iris, kmeans_k=4))["kmeans"] == {"k": 4}


@pytest.mark.parametrize("method", ["oba-md", "equal"])
def test_distributed_runs(iris, method):
    out = run_distributed(iris, 4875, 10, method, runs=2)
    assert len(out) == 2
    for o in out:
        assert o["total_bits"] <= 4875
        assert len(o["rows"]) == 3 and len(o["nodes"]) == 10
        assert (o["result"] is None) == (method == "equal")
