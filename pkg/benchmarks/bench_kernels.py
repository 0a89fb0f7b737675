"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 3]
"""
import argparse
import time

import numpy as np

from qcoreset.kernels import backends


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def cases(rng):
    X = np.ascontiguousarray(rng.uniform(-1, 1, (7494, 17)))
    C = np.ascontiguousarray(rng.uniform(-1, 1, (64, 17)))
    A = rng.normal(size=(120, 120))
    A = A + A.T
    return [
        ("kcenter_sweep 7494x17, K=1000", lambda m: m.kcenter_sweep(X, 1000)),
        ("assign_nearest 7494x17 vs 64", lambda m: m.assign_nearest(X, C)),
        ("meb_iterate 7494x17, 2000 steps", lambda m: m.meb_iterate(X, X.mean(0), 2000)),
        ("jacobi_eigenvalues 120x120", lambda m: m.jacobi_eigenvalues(A)),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    mods = backends()
    names = sorted(mods)
    print(f"{'kernel':36s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, fn in cases(np.random.default_rng(0)):
        t = {n: _best(lambda: fn(mods[n]), args.repeat) for n in names}
        row = f"{label:36s}" + "".join(f"{t[n]:11.4f}s" for n in names)
        if "cython" in t:
            row += f"{t['python'] / t['cython']:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
