"""Pure-Python (numpy) versions of the compiled kernels in ``_kernels.pyx``."""
import numpy as np

# rows per block when materializing point-to-center distances
_BLOCK = 2048


def kcenter_sweep(Y, K):
    Y = np.ascontiguousarray(Y, dtype=np.float64)
    n = Y.shape[0]
    dist = np.full(n, np.inf)
    order = np.empty(K, dtype=np.intp)
    g = np.empty(K, dtype=np.float64)
    for t in range(K):
        c = int(np.argmax(dist))  # first index wins ties, including the all-inf start
        order[t] = c
        diff = Y - Y[c]
        np.minimum(dist, np.sqrt(np.einsum("ij,ij->i", diff, diff)), out=dist)
        g[t] = dist.max()
    return order, g


def assign_nearest(X, C):
    X = np.ascontiguousarray(X, dtype=np.float64)
    C = np.ascontiguousarray(C, dtype=np.float64)
    n = X.shape[0]
    labels = np.empty(n, dtype=np.intp)
    d2 = np.empty(n, dtype=np.float64)
    for start in range(0, n, _BLOCK):
        block = X[start : start + _BLOCK]
        diff = block[:, None, :] - C[None, :, :]
        dd = np.einsum("ijk,ijk->ij", diff, diff)
        lab = np.argmin(dd, axis=1)
        labels[start : start + _BLOCK] = lab
        d2[start : start + _BLOCK] = dd[np.arange(len(block)), lab]
    return labels, d2


def meb_iterate(P, center, iters):
    P = np.ascontiguousarray(P, dtype=np.float64)
    c = np.array(center, dtype=np.float64, copy=True)
    for t in range(1, iters + 1):
        diff = P - c
        far = int(np.argmax(np.einsum("ij,ij->i", diff, diff)))
        c += (P[far] - c) / (t + 1)
    return c


def jacobi_eigenvalues(A, tol=1e-12, max_sweeps=100):
    a = np.array(A, dtype=np.float64, copy=True)
    m = a.shape[0]
    scale = float((a * a).sum())
    for _ in range(max_sweeps):
        off = float((np.triu(a, 1) ** 2).sum())
        if off <= tol * tol * scale or off == 0.0:
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if theta >= 0:
                    t = 1.0 / (theta + np.sqrt(1.0 + theta * theta))
                else:
                    t = -1.0 / (-theta + np.sqrt(1.0 + theta * theta))
                cs = 1.0 / np.sqrt(1.0 + t * t)
                sn = t * cs
                tau = sn / (1.0 + cs)
                rp = a[:, p].copy()
                rq = a[:, q].copy()
                new_p = rp - sn * (rq + tau * rp)
                new_q = rq + sn * (rp - tau * rq)
                app, aqq = a[p, p], a[q, q]
                a[:, p] = new_p
                a[p, :] = new_p
                a[:, q] = new_q
                a[q, :] = new_q
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = a[q, p] = 0.0
    return np.diag(a).copy()
