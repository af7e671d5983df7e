# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: dense complex elimination and resolvent pairings."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()


cdef inline double cabs2(double complex z) nogil:
    return z.real * z.real + z.imag * z.imag


cdef int _solve_inplace(double complex[:, ::1] m, double complex[::1] x,
                        double pivot_tol) nogil:
    # Gaussian elimination with partial pivoting; m and x are overwritten.
    cdef Py_ssize_t n = m.shape[0]
    cdef Py_ssize_t i, j, k, p
    cdef double best, cur
    cdef double complex piv, f, tmp
    for k in range(n):
        p = k
        best = cabs2(m[k, k])
        for i in range(k + 1, n):
            cur = cabs2(m[i, k])
            if cur > best:
                best = cur
                p = i
        if sqrt(best) <= pivot_tol:
            return -1
        if p != k:
            for j in range(n):
                tmp = m[k, j]
                m[k, j] = m[p, j]
                m[p, j] = tmp
            tmp = x[k]
            x[k] = x[p]
            x[p] = tmp
        piv = m[k, k]
        for i in range(k + 1, n):
            f = m[i, k] / piv
            if f != 0:
                for j in range(k + 1, n):
                    m[i, j] = m[i, j] - f * m[k, j]
                x[i] = x[i] - f * x[k]
    for k in range(n - 1, -1, -1):
        tmp = x[k]
        for j in range(k + 1, n):
            tmp = tmp - m[k, j] * x[j]
        x[k] = tmp / m[k, k]
    return 0


cdef double _max_abs(double complex[:, ::1] m) nogil:
    cdef Py_ssize_t i, j
    cdef double best = 0.0, cur
    for i in range(m.shape[0]):
        for j in range(m.shape[1]):
            cur = cabs2(m[i, j])
            if cur > best:
                best = cur
    return sqrt(best)


def lu_solve(M, rhs, double pivot_rtol):
    """Solve ``M x = rhs``; returns None when a pivot falls below threshold."""
    cdef double complex[:, ::1] m = np.array(M, dtype=np.complex128, order="C", copy=True)
    cdef double complex[::1] x = np.array(rhs, dtype=np.complex128, copy=True)
    cdef double tol = pivot_rtol * _max_abs(m)
    cdef int status
    with nogil:
        status = _solve_inplace(m, x, tol)
    if status != 0:
        return None
    return np.asarray(x)


def pairings(A, Y, alpha, z1, z2, double pivot_rtol):
    """<(A - z_Y)^{-1} alpha, alpha> at each pair (z1[j], z2[j]).

    Returns (values, ok) where ok[j] is False for a singular pivot.
    """
    cdef const double complex[:, ::1] a = np.ascontiguousarray(A, dtype=np.complex128)
    cdef const double complex[:, ::1] y = np.ascontiguousarray(Y, dtype=np.complex128)
    # I - Y formed once so that Y = I or Y = 0 entries stay exact
    cdef const double complex[:, ::1] yc = np.ascontiguousarray(np.eye(A.shape[0]) - np.asarray(Y), dtype=np.complex128)
    cdef const double complex[::1] al = np.ascontiguousarray(alpha, dtype=np.complex128)
    cdef const double complex[::1] w1 = np.ascontiguousarray(z1, dtype=np.complex128)
    cdef const double complex[::1] w2 = np.ascontiguousarray(z2, dtype=np.complex128)
    cdef Py_ssize_t n = a.shape[0], npts = w1.shape[0]
    cdef Py_ssize_t i, j, p
    out_arr = np.empty(npts, dtype=np.complex128)
    ok_arr = np.ones(npts, dtype=np.bool_)
    cdef double complex[::1] out = out_arr
    cdef cnp.npy_bool[::1] ok = ok_arr
    cdef double complex[:, ::1] m = np.empty((n, n), dtype=np.complex128)
    cdef double complex[::1] x = np.empty(n, dtype=np.complex128)
    cdef double complex acc, c1, c2
    cdef double tol
    with nogil:
        for p in range(npts):
            c1 = w1[p]
            c2 = w2[p]
            for i in range(n):
                for j in range(n):
                    m[i, j] = a[i, j] - y[i, j] * c1 - yc[i, j] * c2
                x[i] = al[i]
            tol = pivot_rtol * _max_abs(m)
            if _solve_inplace(m, x, tol) != 0:
                ok[p] = 0
                out[p] = 0
                continue
            acc = 0
            for i in range(n):
                acc = acc + x[i] * al[i].conjugate()
            out[p] = acc
    return out_arr, ok_arr


def diagonal_pairings(a_diag, y_diag, weights, z1, z2):
    """sum_j w_j / (a_j - y_j z1 - (1 - y_j) z2) at each pair (z1, z2)."""
    cdef const double[::1] a = np.ascontiguousarray(a_diag, dtype=np.float64)
    cdef const double[::1] y = np.ascontiguousarray(y_diag, dtype=np.float64)
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef const double complex[::1] w1 = np.ascontiguousarray(z1, dtype=np.complex128)
    cdef const double complex[::1] w2 = np.ascontiguousarray(z2, dtype=np.complex128)
    cdef Py_ssize_t n = a.shape[0], npts = w1.shape[0]
    cdef Py_ssize_t j, p
    out_arr = np.empty(npts, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    cdef double complex acc, d
    with nogil:
        for p in range(npts):
            acc = 0
            for j in range(n):
                d = a[j] - y[j] * w1[p] - (1.0 - y[j]) * w2[p]
                acc = acc + w[j] / d
            out[p] = acc
    return out_arr
