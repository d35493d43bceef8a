# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled lane of the hot kernels; mirrors momentumlab._pykernels."""

from libc.math cimport fabs, sqrt

import numpy as np

LANE = "compiled"


def relu_forward(double[:, ::1] W, double[::1] a, double[:, ::1] X):
    cdef Py_ssize_t m = W.shape[0], d = W.shape[1], n = X.shape[0]
    out = np.zeros(n, dtype=np.float64)
    cdef double[::1] f = out
    cdef Py_ssize_t r, i, k
    cdef double z, ar
    cdef double inv = 1.0 / sqrt(<double> m)
    for r in range(m):
        ar = a[r]
        for i in range(n):
            z = 0.0
            for k in range(d):
                z += W[r, k] * X[i, k]
            if z > 0.0:
                f[i] += ar * z
    for i in range(n):
        f[i] *= inv
    return out


def relu_grad(double[:, ::1] W, double[::1] a, double[:, ::1] X, double[::1] delta):
    cdef Py_ssize_t m = W.shape[0], d = W.shape[1], n = X.shape[0]
    out = np.zeros((m, d), dtype=np.float64)
    cdef double[:, ::1] G = out
    cdef Py_ssize_t r, i, k
    cdef double z, coef
    cdef double inv = 1.0 / sqrt(<double> m)
    for r in range(m):
        for i in range(n):
            z = 0.0
            for k in range(d):
                z += W[r, k] * X[i, k]
            if z >= 0.0:
                coef = delta[i]
                for k in range(d):
                    G[r, k] += coef * X[i, k]
        coef = a[r] * inv
        for k in range(d):
            G[r, k] *= coef
    return out


def gram_counts(double[:, ::1] W, double[:, ::1] X):
    cdef Py_ssize_t m = W.shape[0], d = W.shape[1], n = X.shape[0]
    out = np.zeros((n, n), dtype=np.float64)
    cdef double[:, ::1] S = out
    act_arr = np.zeros(n, dtype=np.intc)
    cdef int[::1] act = act_arr
    cdef Py_ssize_t r, i, j, k
    cdef double z
    for r in range(m):
        for i in range(n):
            z = 0.0
            for k in range(d):
                z += W[r, k] * X[i, k]
            act[i] = 1 if z >= 0.0 else 0
        for i in range(n):
            if act[i]:
                for j in range(i + 1):
                    if act[j]:
                        S[i, j] += 1.0
    for i in range(n):
        for j in range(i):
            S[j, i] = S[i, j]
    return out


def jacobi_extremes(double[:, ::1] A_in, double rel_tol=1e-12, int max_sweeps=60):
    cdef Py_ssize_t n = A_in.shape[0]
    work = np.array(A_in, dtype=np.float64, copy=True)
    cdef double[:, ::1] A = work
    cdef Py_ssize_t p, q, k, sweep
    cdef double fro2 = 0.0, off2, tol, app, aqq, apq, theta, t, c, s, akp, akq
    if n == 1:
        return float(A[0, 0]), float(A[0, 0])
    for p in range(n):
        for q in range(n):
            fro2 += A[p, q] * A[p, q]
    tol = rel_tol * sqrt(fro2)
    for sweep in range(max_sweeps):
        off2 = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off2 += 2.0 * A[p, q] * A[p, q]
        if sqrt(off2) <= tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                app = A[p, p]
                aqq = A[q, q]
                theta = (aqq - app) / (2.0 * apq)
                if fabs(theta) > 1e150:
                    t = 1.0 / (2.0 * theta)
                else:
                    t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = A[k, p]
                    akq = A[k, q]
                    A[k, p] = c * akp - s * akq
                    A[k, q] = s * akp + c * akq
                for k in range(n):
                    A[p, k] = A[k, p]
                    A[q, k] = A[k, q]
                A[p, p] = app - t * apq
                A[q, q] = aqq + t * apq
                A[p, q] = 0.0
                A[q, p] = 0.0
    else:
        raise RuntimeError("Jacobi eigensolver failed to converge within %d sweeps" % max_sweeps)
    diag = np.diagonal(work)
    return float(diag.min()), float(diag.max())
