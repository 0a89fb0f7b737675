# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops. Semantics mirror ``_fallback`` exactly, including tie-breaks."""
import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, fabs, sqrt

cnp.import_array()


def kcenter_sweep(const double[:, ::1] Y, Py_ssize_t K):
    cdef Py_ssize_t n = Y.shape[0], d = Y.shape[1]
    cdef Py_ssize_t i, j, t, c = 0
    cdef double acc, diff, best, worst
    order_arr = np.empty(K, dtype=np.intp)
    g_arr = np.empty(K, dtype=np.float64)
    dist_arr = np.full(n, INFINITY, dtype=np.float64)
    cdef Py_ssize_t[::1] order = order_arr
    cdef double[::1] g = g_arr
    cdef double[::1] dist = dist_arr
    with nogil:
        for t in range(K):
            best = -1.0
            for i in range(n):
                if dist[i] > best:
                    best = dist[i]
                    c = i
            order[t] = c
            worst = 0.0
            for i in range(n):
                acc = 0.0
                for j in range(d):
                    diff = Y[i, j] - Y[c, j]
                    acc += diff * diff
                acc = sqrt(acc)
                if acc < dist[i]:
                    dist[i] = acc
                if dist[i] > worst:
                    worst = dist[i]
            g[t] = worst
    return order_arr, g_arr


def assign_nearest(const double[:, ::1] X, const double[:, ::1] C):
    cdef Py_ssize_t n = X.shape[0], k = C.shape[0], d = X.shape[1]
    cdef Py_ssize_t i, j, q, arg
    cdef double acc, diff, best
    labels_arr = np.empty(n, dtype=np.intp)
    d2_arr = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t[::1] labels = labels_arr
    cdef double[::1] d2 = d2_arr
    with nogil:
        for i in range(n):
            best = INFINITY
            arg = 0
            for q in range(k):
                acc = 0.0
                for j in range(d):
                    diff = X[i, j] - C[q, j]
                    acc += diff * diff
                    if acc >= best:
                        break
                if acc < best:
                    best = acc
                    arg = q
            labels[i] = arg
            d2[i] = best
    return labels_arr, d2_arr


def meb_iterate(const double[:, ::1] P, center, Py_ssize_t iters):
    cdef Py_ssize_t n = P.shape[0], d = P.shape[1]
    cdef Py_ssize_t i, j, t, far
    cdef double acc, diff, best, step
    c_arr = np.array(center, dtype=np.float64, copy=True)
    cdef double[::1] c = c_arr
    with nogil:
        for t in range(1, iters + 1):
            best = -1.0
            far = 0
            for i in range(n):
                acc = 0.0
                for j in range(d):
                    diff = P[i, j] - c[j]
                    acc += diff * diff
                if acc > best:
                    best = acc
                    far = i
            step = 1.0 / (t + 1)
            for j in range(d):
                c[j] = c[j] + (P[far, j] - c[j]) * step
    return c_arr


def jacobi_eigenvalues(A, double tol=1e-12, Py_ssize_t max_sweeps=100):
    a_arr = np.array(A, dtype=np.float64, order="C", copy=True)
    cdef double[:, ::1] a = a_arr
    cdef Py_ssize_t m = a.shape[0]
    cdef Py_ssize_t p, q, r, sweep
    cdef double off, scale, theta, t, cs, sn, tau, apq, app, aqq, arp, arq
    with nogil:
        scale = 0.0
        for p in range(m):
            for q in range(m):
                scale += a[p, q] * a[p, q]
        for sweep in range(max_sweeps):
            off = 0.0
            for p in range(m):
                for q in range(p + 1, m):
                    off += a[p, q] * a[p, q]
            if off <= tol * tol * scale or off == 0.0:
                break
            for p in range(m - 1):
                for q in range(p + 1, m):
                    apq = a[p, q]
                    if apq == 0.0:
                        continue
                    app = a[p, p]
                    aqq = a[q, q]
                    theta = (aqq - app) / (2.0 * apq)
                    if theta >= 0:
                        t = 1.0 / (theta + sqrt(1.0 + theta * theta))
                    else:
                        t = -1.0 / (-theta + sqrt(1.0 + theta * theta))
                    cs = 1.0 / sqrt(1.0 + t * t)
                    sn = t * cs
                    tau = sn / (1.0 + cs)
                    a[p, p] = app - t * apq
                    a[q, q] = aqq + t * apq
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    for r in range(m):
                        if r != p and r != q:
                            arp = a[r, p]
                            arq = a[r, q]
                            a[r, p] = arp - sn * (arq + tau * arp)
                            a[p, r] = a[r, p]
                            a[r, q] = arq + sn * (arp - tau * arq)
                            a[q, r] = a[r, q]
    return np.diag(a_arr).copy()
