"""Vector moments ``R_k(b)``, the vectors ``beta_k`` and scalar moments ``r_k(b)``.

For a direction ``b`` with positive entries, ``b_Y = Y b1 + (I - Y) b2`` is
positive definite with smallest eigenvalue at least ``min(b1, b2)``.
Moments are defined by

    R_k(b) = (b_Y^{-1} A)^{k-1} b_Y^{-1} alpha
    r_k(b) = <R_ceil(k/2), A R_floor(k/2)>,    A R_0 := alpha
    beta_k = X_b^k b_Y^{-1/2} alpha,          X_b = b_Y^{-1/2} A b_Y^{-1/2}

so that ``r_{2k-1} = |beta_{k-1}|^2`` and ``r_{2k} = <beta_{k-1}, X_b beta_{k-1}>``.

Functions taking a complex pair ``z`` instead of ``b`` evaluate the
analytic continuation of ``R_k`` and ``r_k`` (``z_Y`` replaces ``b_Y``).
"""

import csv
import io
from dataclasses import dataclass

import numpy as np

from . import numkernel as nk
from .errors import NotReal
from .representation import Direction

TOL_REAL = 1e-10
TOL_TEL = 1e-9
# relative eigenvalue floor for b_Y^{-1/2}
EIG_FLOOR = 1e-12


def _pair(b):
    return complex(b[0]), complex(b[1])


def _is_real_direction(b):
    b1, b2 = _pair(b)
    return b1.imag == 0 and b2.imag == 0 and b1.real > 0 and b2.real > 0


def weighted_inverse_apply(rep, b, v):
    """Apply ``b_Y^{-1}`` to ``v``. ``b`` may be complex (continuation)."""
    b1, b2 = _pair(b)
    if _is_real_direction(b):
        b1, b2 = b1.real, b2.real
    v = np.asarray(v, dtype=np.complex128)
    W = rep.weighted(b1, b2)
    if rep.is_diagonal:
        return v / W
    return nk.solve_shifted(W, v)


def vector_moments(rep, b, K):
    """``[R_1(b), ..., R_K(b)]``."""
    if K < 1:
        raise ValueError("moment order must be >= 1")
    out = [weighted_inverse_apply(rep, b, rep.alpha)]
    for _ in range(K - 1):
        out.append(weighted_inverse_apply(rep, b, rep.apply_A(out[-1])))
    return out


def vector_moment(rep, b, k):
    """``R_k(b) = (b_Y^{-1} A)^{k-1} b_Y^{-1} alpha``."""
    return vector_moments(rep, b, k)[-1]


def _pairing_sides(rep, b, k, Rs):
    hi = Rs[(k + 1) // 2 - 1]
    lo = k // 2
    A_lo = rep.alpha if lo == 0 else rep.apply_A(Rs[lo - 1])
    return hi, A_lo


def scalar_moments(rep, b, K, check_real=True):
    """``[r_1(b), ..., r_K(b)]`` from the vector moments.

    Real directions return floats; an imaginary part beyond
    ``TOL_REAL * (1 + |Re|)`` raises :class:`NotReal`. Complex ``b`` returns
    the analytic continuation ``<R_hi(z), A R_lo(conj z)>`` as complex numbers.
    """
    real = _is_real_direction(b)
    Rs = vector_moments(rep, b, (K + 1) // 2)
    if not real:
        b1, b2 = _pair(b)
        Rs_conj = vector_moments(rep, (b1.conjugate(), b2.conjugate()), (K + 1) // 2)
    out = []
    for k in range(1, K + 1):
        hi, _ = _pairing_sides(rep, b, k, Rs)
        if real:
            _, A_lo = _pairing_sides(rep, b, k, Rs)
            val = np.vdot(A_lo, hi)
            if check_real and abs(val.imag) > TOL_REAL * (1 + abs(val.real)):
                raise NotReal(f"r_{k}{tuple(b)} has imaginary part {val.imag:.3e}")
            out.append(float(val.real))
        else:
            _, A_lo = _pairing_sides(rep, b, k, Rs_conj)
            out.append(complex(np.vdot(A_lo, hi)))
    return out


def scalar_moment(rep, b, k):
    """Scalar moment ``r_k(b) = <R_ceil(k/2)(b), A R_floor(k/2)(b)>``.

    Parameters
    ----------
    rep : TypeIRep
    b : Direction or pair of positive reals
    k : int, >= 1
        For ``k = 1`` the convention ``A R_0 := alpha`` gives
        ``r_1 = <b_Y^{-1} alpha, alpha>``.

    Returns
    -------
    float

    Raises
    ------
    NotReal
        If the pairing has a non-negligible imaginary part.
    """
    if k < 1:
        raise ValueError("moment order must be >= 1")
    return scalar_moments(rep, b, k)[-1]


def inv_sqrt_weighted(rep, b):
    """``b_Y^{-1/2}``: a diagonal vector or a dense Hermitian matrix."""
    b1, b2 = Direction.of(b)
    floor = min(b1, b2) * (1 - EIG_FLOOR)
    W = rep.weighted(b1, b2)
    if rep.is_diagonal:
        return 1.0 / np.sqrt(np.maximum(W, floor))
    return nk.hermitian_function(W, lambda w: 1.0 / np.sqrt(np.maximum(w, floor)))


@dataclass(frozen=True)
class BetaSystem:
    """``X_b`` and ``b_Y^{-1/2}`` for one direction."""

    b: Direction
    X: np.ndarray
    inv_sqrt: np.ndarray
    diagonal: bool

    def apply_X(self, v):
        return self.X * v if self.diagonal else self.X @ v

    def shifted_solve(self, shift, v):
        """``(X - shift)^{-1} v``."""
        if self.diagonal:
            return v / (self.X - shift)
        return nk.solve_shifted(self.X - shift * np.eye(self.X.shape[0]), v)

    def spectrum(self):
        if self.diagonal:
            return np.asarray(self.X, float)
        return nk.eig_hermitian(self.X)[0]


def beta_system(rep, b):
    b = Direction.of(b)
    S = inv_sqrt_weighted(rep, b)
    if rep.is_diagonal:
        return BetaSystem(b, S * rep.A * S, S, True)
    X = S @ rep.A @ S
    return BetaSystem(b, 0.5 * (X + X.conj().T), S, False)


@dataclass(frozen=True)
class BetaVector:
    k: int
    value: np.ndarray
    b: Direction


def betas(rep, b, K, system=None):
    """``[beta_0, ..., beta_K]`` for direction ``b``."""
    sys_ = system or beta_system(rep, b)
    v = sys_.inv_sqrt * rep.alpha if sys_.diagonal else sys_.inv_sqrt @ rep.alpha
    out = [v]
    for _ in range(K):
        out.append(sys_.apply_X(out[-1]))
    return out


def beta(rep, b, k):
    """``beta_k = X_b^k b_Y^{-1/2} alpha`` as a :class:`BetaVector`."""
    if k < 0:
        raise ValueError("beta index must be >= 0")
    b = Direction.of(b)
    return BetaVector(k, betas(rep, b, k)[-1], b)


def scalar_moments_beta(rep, b, K):
    """``r_1..r_K`` via ``|beta_{k-1}|^2`` and ``<beta_{k-1}, X_b beta_{k-1}>``."""
    bs = betas(rep, b, (K + 1) // 2)
    out = []
    for k in range(1, K + 1):
        j = (k + 1) // 2 - 1
        if k % 2:
            out.append(float(np.vdot(bs[j], bs[j]).real))
        else:
            out.append(float(np.vdot(bs[j], bs[j + 1]).real))
    return out


def ray_moment(r_b, k, s):
    """``r_k(isb) = (is)^{-k} r_k(b)``."""
    return (1j * s) ** (-k) * r_b


def telescope_sides(rep, b, s, N):
    """Both sides of the telescoping identity on the ray ``isb``.

    LHS = h(isb) + sum_{k=1}^{2N-1} r_k(isb)
    RHS = (is)^{-2(N-1)} <[(X_b - is)^{-1} + (is)^{-1}] beta_{N-1}, beta_{N-1}>
    """
    from .representation import evaluate

    if s <= 0 or N < 1:
        raise ValueError("need s > 0 and N >= 1")
    b = Direction.of(b)
    h = evaluate(rep, (1j * s * b.b1, 1j * s * b.b2))
    rs = scalar_moments(rep, b, 2 * N - 1)
    lhs = h + sum(ray_moment(r, k, s) for k, r in enumerate(rs, start=1))
    sys_ = beta_system(rep, b)
    bN = betas(rep, b, N - 1, sys_)[-1]
    x = sys_.shifted_solve(1j * s, bN)
    rhs = (1j * s) ** (-2 * (N - 1)) * (np.vdot(bN, x) + np.vdot(bN, bN) / (1j * s))
    return complex(lhs), complex(rhs), h


def telescope_residual(rep, b, s, N):
    """``|LHS - RHS|`` of the telescoping identity."""
    lhs, rhs, _ = telescope_sides(rep, b, s, N)
    return abs(lhs - rhs)


def telescope_relative(rep, b, s, N):
    """Residual scaled by ``|h(isb)| + |RHS| + sum |r_k(isb)|``.

    The denominator is the size of the terms actually summed, so the
    check stays meaningful when the two sides nearly cancel.
    """
    lhs, rhs, h = telescope_sides(rep, b, s, N)
    rs = scalar_moments(rep, b, 2 * N - 1)
    scale = abs(h) + abs(rhs) + sum(abs(ray_moment(r, k, s)) for k, r in enumerate(rs, start=1))
    return abs(lhs - rhs) / max(scale, 1e-300)


def o_term(rep, b, s, N, system=None):
    """``(is)^{2N-1} [h(isb) + sum_{k<=2N-1} r_k(isb)]`` in cancellation-free form.

    Equals ``<X (X - is)^{-1} beta_{N-1}, beta_{N-1}>``, which decays like
    ``i r_{2N}(b) / s``.
    """
    sys_ = system or beta_system(rep, b)
    bN = betas(rep, b, N - 1, sys_)[-1]
    x = sys_.shifted_solve(1j * s, sys_.apply_X(bN))
    return complex(np.vdot(bN, x))


def imag_remainder_exact(rep, b, s, N, system=None):
    """``s^{2N-1} Im[h(isb) - sum_{|n|<=2N-3} rho_n/(isb)^n]`` from the spectrum.

    Uses ``(-1)^{N+1} s^2 <X^2 (X^2 + s^2)^{-1} beta_{N-2}, beta_{N-2}>``
    (``N >= 2``) and ``s^2 <(X^2 + s^2)^{-1} beta_0, beta_0>`` at ``N = 1``.
    """
    sys_ = system or beta_system(rep, b)
    w, V = (sys_.spectrum(), None) if sys_.diagonal else nk.eig_hermitian(sys_.X)
    if N == 1:
        v = betas(rep, b, 0, sys_)[0]
        c = np.abs(v if V is None else V.conj().T @ v) ** 2
        return float(np.sum(c * s * s / (w * w + s * s)))
    v = betas(rep, b, N - 2, sys_)[-1]
    c = np.abs(v if V is None else V.conj().T @ v) ** 2
    return float((-1) ** (N + 1) * np.sum(c * s * s * w * w / (w * w + s * s)))


def moment_table_csv(rep, directions, K):
    """CSV table ``k,b1,b2,re_r,im_r,beta_check`` with 17 significant digits.

    ``beta_check`` is the relative gap to the beta-vector computation.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "b1", "b2", "re_r", "im_r", "beta_check"])
    for b in directions:
        b = Direction.of(b)
        rs = scalar_moments(rep, b, K)
        rb = scalar_moments_beta(rep, b, K)
        for k, (r, q) in enumerate(zip(rs, rb), start=1):
            gap = abs(r - q) / max(abs(r), abs(q), 1e-300)
            w.writerow([k, f"{b.b1:.17g}", f"{b.b2:.17g}", f"{r:.17g}", "0", f"{gap:.17g}"])
    return buf.getvalue()
