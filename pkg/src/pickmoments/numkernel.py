"""Dense complex linear algebra used by every other module.

The elimination and pairing loops live in the compiled ``_kernels``
extension when it is available; otherwise the pure-Python versions in
``_purepy`` are used. ``BACKEND`` records which one was selected.
Set ``PICKMOMENTS_PURE_PYTHON=1`` to force the fallback.
"""

import os

import numpy as np

from .errors import NotHermitian, SingularMatrix

TOL_SOLVE = 1e-12
TOL_EIG = 1e-10
# pivots below this fraction of max|M| are treated as zero
PIVOT_RTOL = 64 * np.finfo(float).eps

if os.environ.get("PICKMOMENTS_PURE_PYTHON"):
    from . import _purepy as _backend

    BACKEND = "python"
else:
    try:
        from . import _kernels as _backend

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on build
        from . import _purepy as _backend

        BACKEND = "python"


def tol_herm(M):
    """Hermiticity tolerance ``1e-12 * (1 + max|M|)``."""
    M = np.asarray(M)
    return 1e-12 * (1.0 + (np.max(np.abs(M)) if M.size else 0.0))


def as_cmatrix(M):
    M = np.asarray(M, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise ValueError(f"expected a nonempty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


def as_cvector(v, dim=None):
    v = np.asarray(v, dtype=np.complex128)
    if v.ndim != 1:
        raise ValueError(f"expected a vector, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise ValueError(f"vector has length {v.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite entries")
    return v


def solve_shifted(M, rhs):
    """Solve ``M x = rhs`` by Gaussian elimination with partial pivoting.

    Parameters
    ----------
    M : (n, n) complex array
    rhs : (n,) complex array

    Returns
    -------
    x : (n,) complex ndarray

    Raises
    ------
    SingularMatrix
        If a pivot magnitude drops below ``PIVOT_RTOL * max|M|``.
    """
    M = as_cmatrix(M)
    rhs = as_cvector(rhs, M.shape[0])
    x = _backend.lu_solve(M, rhs, PIVOT_RTOL)
    if x is None:
        raise SingularMatrix(f"pivot below {PIVOT_RTOL:.1e} * max|M| in {M.shape[0]}x{M.shape[0]} solve")
    return x


def solve_residual(M, x, rhs):
    """Normwise relative residual ``|Mx - rhs| / (|M| |x|)``."""
    M = np.asarray(M)
    denom = np.linalg.norm(M, 2) * np.linalg.norm(x)
    if denom == 0:
        return float(np.linalg.norm(rhs))
    return float(np.linalg.norm(M @ x - rhs) / denom)


def hermitian_defect(M):
    """Return ``max|M - M*|``."""
    M = np.asarray(M, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if M.size == 0:
        return 0.0
    return float(np.max(np.abs(M - M.conj().T)))


def eig_hermitian(M):
    """Eigen-decomposition of a Hermitian matrix.

    Returns ascending real eigenvalues and a unitary matrix ``V`` with
    ``M = V diag(w) V*``. The symmetric part of ``M`` is decomposed after
    the defect check, so tiny asymmetries never leak complex eigenvalues.
    """
    M = as_cmatrix(M)
    defect = hermitian_defect(M)
    if defect > tol_herm(M):
        raise NotHermitian(f"Hermiticity defect {defect:.3e} exceeds {tol_herm(M):.3e}")
    w, V = np.linalg.eigh(0.5 * (M + M.conj().T))
    return w, V


def hermitian_function(M, fn):
    """Apply ``fn`` to the spectrum of Hermitian ``M``: ``V fn(w) V*``."""
    w, V = eig_hermitian(M)
    return (V * fn(w)) @ V.conj().T


def resolvent_pairings(A, Y, alpha, z1, z2):
    """Vectorized ``<(A - z_Y)^{-1} alpha, alpha>`` over point arrays.

    ``z_Y = Y z1 + (I - Y) z2``. Raises SingularMatrix if any point hits a
    singular pivot.
    """
    z1 = np.atleast_1d(np.asarray(z1, dtype=np.complex128))
    z2 = np.atleast_1d(np.asarray(z2, dtype=np.complex128))
    vals, ok = _backend.pairings(A, Y, alpha, z1, z2, PIVOT_RTOL)
    if not np.all(ok):
        bad = int(np.flatnonzero(~np.asarray(ok))[0])
        raise SingularMatrix(f"singular resolvent at z = ({z1[bad]}, {z2[bad]})")
    return np.asarray(vals)


def diagonal_resolvent_pairings(a, y, weights, z1, z2):
    """``sum_j w_j / (a_j - y_j z1 - (1 - y_j) z2)`` over point arrays."""
    z1 = np.atleast_1d(np.asarray(z1, dtype=np.complex128))
    z2 = np.atleast_1d(np.asarray(z2, dtype=np.complex128))
    return np.asarray(_backend.diagonal_pairings(a, y, weights, z1, z2))
