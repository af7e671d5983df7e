"""Pure-Python versions of the compiled kernels.

Same algorithms and summation order as ``_kernels.pyx``; used when the
extension is not built or ``PICKMOMENTS_PURE_PYTHON`` is set.
"""

import numpy as np


def _solve_inplace(m, x, pivot_tol):
    n = m.shape[0]
    for k in range(n):
        col = np.abs(m[k:, k])
        p = k + int(np.argmax(col))
        if col[p - k] <= pivot_tol:
            return False
        if p != k:
            m[[k, p]] = m[[p, k]]
            x[[k, p]] = x[[p, k]]
        f = m[k + 1:, k] / m[k, k]
        m[k + 1:, k + 1:] -= np.outer(f, m[k, k + 1:])
        x[k + 1:] -= f * x[k]
    for k in range(n - 1, -1, -1):
        acc = x[k]
        for j in range(k + 1, n):
            acc = acc - m[k, j] * x[j]
        x[k] = acc / m[k, k]
    return True


def lu_solve(M, rhs, pivot_rtol):
    m = np.array(M, dtype=np.complex128, copy=True)
    x = np.array(rhs, dtype=np.complex128, copy=True)
    tol = pivot_rtol * np.max(np.abs(m), initial=0.0)
    if not _solve_inplace(m, x, tol):
        return None
    return x


def pairings(A, Y, alpha, z1, z2, pivot_rtol):
    A = np.asarray(A, dtype=np.complex128)
    Y = np.asarray(Y, dtype=np.complex128)
    alpha = np.asarray(alpha, dtype=np.complex128)
    z1 = np.atleast_1d(np.asarray(z1, dtype=np.complex128))
    z2 = np.atleast_1d(np.asarray(z2, dtype=np.complex128))
    n = A.shape[0]
    # I - Y formed once so that Y = I or Y = 0 entries stay exact
    yc = np.eye(n) - Y
    out = np.zeros(len(z1), dtype=np.complex128)
    ok = np.ones(len(z1), dtype=bool)
    conj_alpha = alpha.conj()
    for p, (c1, c2) in enumerate(zip(z1, z2)):
        m = A - Y * c1 - yc * c2
        x = alpha.copy()
        if not _solve_inplace(m, x, pivot_rtol * np.max(np.abs(m))):
            ok[p] = False
            continue
        acc = 0j
        for i in range(n):
            acc += x[i] * conj_alpha[i]
        out[p] = acc
    return out, ok


def diagonal_pairings(a_diag, y_diag, weights, z1, z2):
    a = np.asarray(a_diag, dtype=np.float64)
    y = np.asarray(y_diag, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    z1 = np.atleast_1d(np.asarray(z1, dtype=np.complex128))
    z2 = np.atleast_1d(np.asarray(z2, dtype=np.complex128))
    out = np.empty(len(z1), dtype=np.complex128)
    for p in range(len(z1)):
        d = a - y * z1[p] - (1.0 - y) * z2[p]
        # cumsum keeps ascending summation order, matching the compiled loop
        out[p] = np.cumsum(w / d)[-1] if len(a) else 0j
    return out
