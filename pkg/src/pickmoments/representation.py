"""Type I Nevanlinna representations and evaluation of the Pick function.

A representation is a triple ``(A, Y, alpha)`` with ``A`` Hermitian, ``Y`` a
positive contraction and ``alpha`` a vector. It defines

    h(z) = <(A - z_Y)^{-1} alpha, alpha>,    z_Y = Y z1 + (I - Y) z2,

on the bi-upper half-plane. Measure-backed representations (``A`` and
``Y`` diagonal) are stored as 1-D diagonals so that long heavy-tailed
measures never materialize a dense matrix.
"""

import json
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from . import numkernel as nk
from .errors import InvalidRepresentation

TOL_PICK = 1e-10


class Direction(NamedTuple):
    """A ray direction ``b`` in the open positive quadrant."""

    b1: float
    b2: float

    @classmethod
    def of(cls, b):
        b1, b2 = (float(b[0]), float(b[1]))
        if not (b1 > 0 and b2 > 0 and np.isfinite(b1) and np.isfinite(b2)):
            raise ValueError(f"direction must have positive finite entries, got {b}")
        return cls(b1, b2)


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finitely many atoms ``(t_j, w_j)`` with positive weights.

    ``truncated`` marks the atoms as the head of an infinite sequence, so
    that moment existence is judged by series convergence.
    """

    t: np.ndarray
    w: np.ndarray
    truncated: bool = False

    def __post_init__(self):
        t = np.asarray(self.t, dtype=np.float64).copy()
        w = np.asarray(self.w, dtype=np.float64).copy()
        if t.ndim != 1 or t.shape != w.shape or t.size == 0:
            raise InvalidRepresentation("measure: atoms must be a nonempty list of (t, w) pairs")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(w))):
            raise InvalidRepresentation("measure: atoms must be finite")
        if np.any(w <= 0):
            raise InvalidRepresentation("measure: weights must be positive")
        if np.unique(t).size != t.size:
            raise InvalidRepresentation("measure: atom locations must be pairwise distinct")
        t.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "w", w)

    @classmethod
    def from_atoms(cls, atoms, truncated=False):
        atoms = list(atoms)
        return cls(np.array([a[0] for a in atoms], float), np.array([a[1] for a in atoms], float),
                   truncated)

    @property
    def atoms(self):
        return list(zip(self.t.tolist(), self.w.tolist()))

    def cauchy_transform(self, z):
        """Direct sum ``sum_j w_j / (t_j - z)``."""
        z = np.asarray(z, dtype=np.complex128)
        return np.sum(self.w / (self.t - z[..., None]), axis=-1)


def _readonly(a):
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class TypeIRep:
    """Finite-dimensional type I representation ``(A, Y, alpha)``.

    ``A`` and ``Y`` are either both dense ``(n, n)`` complex matrices or
    both real diagonals of shape ``(n,)``. Construction validates the
    invariants and raises :class:`InvalidRepresentation` naming the one
    that failed.
    """

    A: np.ndarray
    Y: np.ndarray
    alpha: np.ndarray
    measure: Optional[DiscreteMeasure] = field(default=None, compare=False)

    def __post_init__(self):
        A = np.asarray(self.A)
        Y = np.asarray(self.Y)
        alpha = np.asarray(self.alpha, dtype=np.complex128)
        if A.ndim == 1 and Y.ndim == 1:
            if np.iscomplexobj(A) and np.any(A.imag != 0):
                raise InvalidRepresentation("A Hermitian: diagonal entries must be real")
            if np.iscomplexobj(Y) and np.any(Y.imag != 0):
                raise InvalidRepresentation("Y positive contraction: diagonal entries must be real")
            A = np.real(A).astype(np.float64)
            Y = np.real(Y).astype(np.float64)
        elif A.ndim == 2 and Y.ndim == 2:
            A = A.astype(np.complex128)
            Y = Y.astype(np.complex128)
        else:
            raise InvalidRepresentation("dim: A and Y must both be dense matrices or both diagonals")
        n = A.shape[0]
        if n == 0:
            raise InvalidRepresentation("dim: must be positive")
        for name, M in (("A", A), ("Y", Y)):
            if M.shape not in ((n,), (n, n)):
                raise InvalidRepresentation(f"dim: {name} has shape {M.shape}, expected dim {n}")
            if not np.all(np.isfinite(M)):
                raise InvalidRepresentation(f"{name} finite: non-finite entries")
        if alpha.shape != (n,):
            raise InvalidRepresentation(f"dim: alpha has shape {alpha.shape}, expected ({n},)")
        if not np.all(np.isfinite(alpha)):
            raise InvalidRepresentation("alpha finite: non-finite entries")
        if A.ndim == 2:
            defect = nk.hermitian_defect(A)
            if defect > nk.tol_herm(A):
                raise InvalidRepresentation(f"A Hermitian: defect {defect:.3e} > {nk.tol_herm(A):.3e}")
            defect = nk.hermitian_defect(Y)
            if defect > nk.tol_herm(Y):
                raise InvalidRepresentation(f"Y Hermitian: defect {defect:.3e} > {nk.tol_herm(Y):.3e}")
            y_eigs = nk.eig_hermitian(Y)[0]
        else:
            y_eigs = Y
        if y_eigs.min() < -nk.TOL_EIG or y_eigs.max() > 1 + nk.TOL_EIG:
            raise InvalidRepresentation(
                f"Y positive contraction: eigenvalues span [{y_eigs.min():.6g}, {y_eigs.max():.6g}], "
                "outside [0, 1]")
        object.__setattr__(self, "A", _readonly(A))
        object.__setattr__(self, "Y", _readonly(Y))
        object.__setattr__(self, "alpha", _readonly(alpha))

    @property
    def dim(self):
        return self.A.shape[0]

    @property
    def is_diagonal(self):
        return self.A.ndim == 1

    def dense(self):
        """Same representation with dense ``A`` and ``Y``."""
        if not self.is_diagonal:
            return self
        return TypeIRep(np.diag(self.A).astype(complex), np.diag(self.Y).astype(complex),
                        self.alpha, self.measure)

    @property
    def A_dense(self):
        return np.diag(self.A).astype(complex) if self.is_diagonal else self.A

    @property
    def Y_dense(self):
        return np.diag(self.Y).astype(complex) if self.is_diagonal else self.Y

    def y_spectrum(self):
        """Eigenvalues of ``Y`` in ascending order."""
        if self.is_diagonal:
            return np.sort(self.Y)
        return nk.eig_hermitian(self.Y)[0]

    def spectral_scale(self):
        """``max |eig(A)|``, floored at 1e-300."""
        if self.is_diagonal:
            return max(float(np.max(np.abs(self.A))), 1e-300)
        return max(float(np.max(np.abs(nk.eig_hermitian(self.A)[0]))), 1e-300)

    def apply_A(self, v):
        return self.A * v if self.is_diagonal else self.A @ v

    def weighted(self, b1, b2):
        """``Y b1 + (I - Y) b2``: a diagonal vector or a dense matrix."""
        if self.is_diagonal:
            return self.Y * b1 + (1.0 - self.Y) * b2
        return self.Y * b1 + (np.eye(self.dim) - self.Y) * b2


def z_weighted(rep, z):
    """Return ``z_Y = Y z1 + (I - Y) z2`` as a dense matrix."""
    z1, z2 = complex(z[0]), complex(z[1])
    return rep.Y_dense * z1 + (np.eye(rep.dim) - rep.Y_dense) * z2


def check_half_plane(z1, z2):
    z1 = np.asarray(z1)
    z2 = np.asarray(z2)
    if np.any(np.imag(z1) <= 0) or np.any(np.imag(z2) <= 0):
        raise ValueError("points must lie in the bi-upper half-plane (Im z1 > 0 and Im z2 > 0)")


def nontangential_aperture(z):
    """Smallest ``c`` with ``|z| <= c min(Im z1, Im z2)``."""
    z1, z2 = complex(z[0]), complex(z[1])
    return float(np.hypot(abs(z1), abs(z2)) / min(z1.imag, z2.imag))


def evaluate_many(rep, z1, z2, check=True):
    """Evaluate ``h`` at arrays of points ``(z1[j], z2[j])``."""
    z1 = np.atleast_1d(np.asarray(z1, dtype=np.complex128))
    z2 = np.atleast_1d(np.asarray(z2, dtype=np.complex128))
    z1, z2 = np.broadcast_arrays(z1, z2)
    if check:
        check_half_plane(z1, z2)
    if rep.is_diagonal:
        weights = np.abs(rep.alpha) ** 2
        return nk.diagonal_resolvent_pairings(rep.A, rep.Y, weights, z1.ravel(), z2.ravel()).reshape(z1.shape)
    return nk.resolvent_pairings(rep.A, rep.Y, rep.alpha, z1.ravel(), z2.ravel()).reshape(z1.shape)


def evaluate(rep, z, check=True):
    """``h(z) = <(A - z_Y)^{-1} alpha, alpha>`` at a single point of the bi-upper half-plane."""
    return complex(evaluate_many(rep, [z[0]], [z[1]], check=check)[0])


def as_function(rep):
    """Wrap a representation as a black-box ``f(z1, z2)`` accepting arrays."""

    def f(z1, z2):
        return evaluate_many(rep, z1, z2, check=False)

    f.rep = rep
    return f


def from_discrete_measure(m, dense=False):
    """One-variable representation ``A = diag(t)``, ``Y = I``, ``alpha_j = sqrt(w_j)``.

    Then ``h(z, w) = sum_j w_j / (t_j - z)`` for every ``w``.
    """
    t = np.asarray(m.t, float)
    rep = TypeIRep(t, np.ones_like(t), np.sqrt(m.w).astype(complex), measure=m)
    return rep.dense() if dense else rep


def pick_certificate(rep, samples):
    """Minimum of ``Im h`` over the sample points (0 when ``alpha = 0``)."""
    samples = list(samples)
    if not samples:
        raise ValueError("no samples")
    z1 = np.array([s[0] for s in samples], dtype=complex)
    z2 = np.array([s[1] for s in samples], dtype=complex)
    vals = evaluate_many(rep, z1, z2)
    return float(np.min(vals.imag))


# --- JSON representation files -------------------------------------------

def _pairs(a):
    a = np.asarray(a, dtype=complex)
    if a.ndim == 1:
        return [[float(x.real), float(x.imag)] for x in a]
    return [_pairs(row) for row in a]


def _unpairs(obj, what):
    arr = np.asarray(obj, dtype=float)
    if arr.shape[-1:] != (2,):
        raise InvalidRepresentation(f"{what}: entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def rep_to_dict(rep):
    if rep.measure is not None:
        m = {"atoms": [[t, w] for t, w in rep.measure.atoms]}
        if rep.measure.truncated:
            m["truncated"] = True
        return {"measure": m}
    return {"dim": rep.dim, "A": _pairs(rep.A_dense), "Y": _pairs(rep.Y_dense),
            "alpha": _pairs(rep.alpha)}


def rep_from_dict(obj):
    if not isinstance(obj, dict):
        raise InvalidRepresentation("file: top level must be a JSON object")
    if "measure" in obj:
        atoms = obj["measure"].get("atoms") if isinstance(obj["measure"], dict) else None
        if not atoms:
            raise InvalidRepresentation("measure: missing or empty 'atoms'")
        try:
            m = DiscreteMeasure.from_atoms(atoms, bool(obj["measure"].get("truncated", False)))
        except (TypeError, IndexError) as exc:
            raise InvalidRepresentation(f"measure: malformed atoms ({exc})") from None
        return from_discrete_measure(m)
    missing = [k for k in ("dim", "A", "Y", "alpha") if k not in obj]
    if missing:
        raise InvalidRepresentation(f"file: missing keys {missing}")
    dim = obj["dim"]
    if not isinstance(dim, int) or dim < 1:
        raise InvalidRepresentation("dim: must be a positive integer")
    try:
        A = _unpairs(obj["A"], "A")
        Y = _unpairs(obj["Y"], "Y")
        alpha = _unpairs(obj["alpha"], "alpha")
    except ValueError as exc:
        raise InvalidRepresentation(f"file: malformed array ({exc})") from None
    if A.shape != (dim, dim) or Y.shape != (dim, dim) or alpha.shape != (dim,):
        raise InvalidRepresentation(f"dim: array shapes {A.shape}, {Y.shape}, {alpha.shape} do not match dim={dim}")
    return TypeIRep(A, Y, alpha)


def save_rep(rep, path):
    with open(path, "w") as fh:
        json.dump(rep_to_dict(rep), fh, indent=1)
        fh.write("\n")


def load_rep(path):
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidRepresentation(f"file: not valid JSON ({exc})") from None
    return rep_from_dict(obj)
