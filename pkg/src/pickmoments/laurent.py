"""Homogeneous Laurent layers in ``1/z1, 1/z2`` and polynomiality tests.

A degree-``k`` layer is ``sum_j c_j z1^{-(k-j)} z2^{-j}``; the coefficient
``c_j`` belongs to the multi-index ``n = (k - j, j)``. Coefficients may be
scalars or vectors (shape ``(k + 1, dim)``).

Polynomiality of a direction function ``g(b)`` is decided from three
ingredients:

* a least-squares fit on Chebyshev-spaced real directions ``(u, 1 - u)``;
* the same fit on complex directions ``u = 1/2 + e^{i theta}``, where the
  analytic continuation separates rational functions from polynomials far
  better than the real segment does;
* local probes on small circles around every candidate pole ratio
  ``b2/b1 = -y/(1 - y)`` (``y`` an eigenvalue of ``Y`` in ``(0, 1)``): the
  share of negative Fourier modes measures the principal part there.
"""

import json
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .errors import DegenerateDesign

TOL_POLY = 1e-8
TOL_NOT_POLY = 1e-3
RESIDUAL_FLOOR = 1e-300
RANK_RTOL = 1e-13
PROBE_DELTA = 0.1
PROBE_POINTS = 32

POLYNOMIAL = "polynomial"
NOT_POLYNOMIAL = "not_polynomial"
INDETERMINATE = "indeterminate"


@dataclass(frozen=True, eq=False)
class HomogeneousLaurent:
    """Degree-``k`` layer; ``coeffs[j]`` multiplies ``z1^{-(k-j)} z2^{-j}``."""

    degree: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.complex128)
        if self.degree < 0 or c.shape[:1] != (self.degree + 1,):
            raise ValueError(f"degree {self.degree} layer needs {self.degree + 1} coefficients, got {c.shape}")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_dict(cls, k, mapping):
        """Build from ``{(n1, n2): c}``; every key must satisfy ``n1 + n2 = k``."""
        c = np.zeros(k + 1, dtype=complex)
        for (n1, n2), v in mapping.items():
            if n1 < 0 or n2 < 0 or n1 + n2 != k:
                raise ValueError(f"multi-index {(n1, n2)} does not have |n| = {k}")
            c[n2] += v
        return cls(k, c)

    @classmethod
    def zero(cls, k, shape=()):
        return cls(k, np.zeros((k + 1,) + tuple(shape), dtype=complex))

    def multi_indices(self):
        return [(self.degree - j, j) for j in range(self.degree + 1)]

    def as_dict(self, drop_zeros=False):
        out = {}
        for n, c in zip(self.multi_indices(), self.coeffs):
            if drop_zeros and np.all(c == 0):
                continue
            out[n] = c if c.ndim else complex(c)
        return out

    def __call__(self, z):
        return eval_laurent(self, z)

    def __neg__(self):
        return HomogeneousLaurent(self.degree, -self.coeffs)

    def max_imag(self):
        return float(np.max(np.abs(self.coeffs.imag))) if self.coeffs.size else 0.0

    def max_abs(self):
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0

    def to_json_obj(self, residual=None):
        rows = []
        for (n1, n2), c in zip(self.multi_indices(), self.coeffs):
            if c.ndim:
                rows.append({"n": [n1, n2], "re": c.real.tolist(), "im": c.imag.tolist()})
            else:
                rows.append({"n": [n1, n2], "re": float(c.real), "im": float(c.imag)})
        obj = {"degree": self.degree, "coeffs": rows}
        if residual is not None:
            obj["residual"] = float(residual)
        return obj

    @classmethod
    def from_json_obj(cls, obj):
        k = int(obj["degree"])
        vals = {}
        for row in obj["coeffs"]:
            n1, n2 = row["n"]
            vals[(n1, n2)] = np.asarray(row["re"]) + 1j * np.asarray(row["im"])
        first = next(iter(vals.values()))
        c = np.zeros((k + 1,) + np.shape(first), dtype=complex)
        for (n1, n2), v in vals.items():
            if n1 + n2 != k:
                raise ValueError(f"multi-index {(n1, n2)} does not have |n| = {k}")
            c[n2] = v
        return cls(k, c)


def eval_laurent(L, z):
    """``sum_n coeffs[n] z1^{-n1} z2^{-n2}``; requires ``z1, z2 != 0``."""
    z1, z2 = complex(z[0]), complex(z[1])
    if z1 == 0 or z2 == 0:
        raise ValueError("Laurent layers are evaluated at points with z1 != 0 and z2 != 0")
    k = L.degree
    mono = np.array([z1 ** -(k - j) * z2 ** -j for j in range(k + 1)])
    return np.tensordot(mono, L.coeffs, axes=(0, 0))[()]


@dataclass(frozen=True, eq=False)
class FitResult:
    coeffs: HomogeneousLaurent
    relative_residual: float
    sample_count: int
    condition: float = float("nan")


def _normalized_rows(directions, k):
    d = np.asarray(directions, dtype=complex).reshape(-1, 2)
    sigma = d[:, 0] + d[:, 1]
    if np.any(sigma == 0):
        raise ValueError("directions with b1 + b2 = 0 cannot be normalized")
    u = d[:, 0] / sigma
    if np.any(u == 0) or np.any(u == 1):
        raise ValueError("directions must have both components nonzero")
    j = np.arange(k + 1)
    D = u[:, None] ** -(k - j)[None, :] * (1 - u[:, None]) ** -j[None, :]
    return D, sigma ** k


def _solve_ls(D, V, k):
    Q, R = np.linalg.qr(D)
    diag = np.abs(np.diag(R))
    if diag.size < k + 1 or diag.min() <= RANK_RTOL * max(diag.max(), RESIDUAL_FLOOR):
        raise DegenerateDesign(f"design rank below {k + 1}")
    C = np.linalg.solve(R, Q.conj().T @ V)
    return C, float(diag.max() / diag.min())


def fit_homogeneous(samples, k, floor=RESIDUAL_FLOOR):
    """Least-squares fit of a degree-``k`` homogeneous layer.

    Parameters
    ----------
    samples : sequence of (direction, value)
        Directions may be complex; each is rescaled to ``b1 + b2 = 1``
        (with the value scaled by ``(b1 + b2)^k``). Values may be vectors.
    k : int
    floor : float
        Absolute noise level of a single raw sample value. It is carried
        through the same row scaling as the data and bounds the residual
        denominator from below, so data that vanish up to noise count as
        the zero layer.

    Returns
    -------
    FitResult
        ``relative_residual`` is ``|misfit| / |values|`` after each row
        is divided by the norm of its design row.

    Raises
    ------
    DegenerateDesign
        If the design has rank below ``k + 1``.
    """
    samples = list(samples)
    if len(samples) < k + 1:
        raise DegenerateDesign(f"need at least {k + 1} samples for degree {k}, got {len(samples)}")
    D, scale = _normalized_rows([s[0] for s in samples], k)
    V = np.array([np.asarray(s[1], dtype=complex) for s in samples])
    V = V * scale.reshape((-1,) + (1,) * (V.ndim - 1))
    w = 1.0 / np.linalg.norm(D, axis=1)
    D = D * w[:, None]
    V = V * w.reshape((-1,) + (1,) * (V.ndim - 1))
    real = np.all(np.isreal(D)) and np.all(np.isreal(V))
    if real:
        D, V = D.real, V.real
    flat = V.reshape(len(samples), -1)
    C, cond = _solve_ls(D, flat, k)
    misfit = np.linalg.norm(D @ C - flat)
    noise = floor * float(np.linalg.norm(w * np.abs(scale)))
    res = float(misfit / max(np.linalg.norm(flat), noise, RESIDUAL_FLOOR))
    coeffs = C.reshape((k + 1,) + V.shape[1:])
    return FitResult(HomogeneousLaurent(k, coeffs), res, len(samples), cond)


def fit_vector_homogeneous(samples, k):
    """Componentwise :func:`fit_homogeneous` with a shared design."""
    return fit_homogeneous(samples, k)


def is_polynomial(f, tol_poly=TOL_POLY):
    """``f`` is a :class:`FitResult` or a bare residual."""
    res = f.relative_residual if isinstance(f, FitResult) else float(f)
    return res <= tol_poly


def polynomial_verdict(residual, tol_poly=TOL_POLY, tol_fail=TOL_NOT_POLY):
    if residual <= tol_poly:
        return POLYNOMIAL
    if residual >= tol_fail:
        return NOT_POLYNOMIAL
    return INDETERMINATE


# --- direction designs -----------------------------------------------------

def chebyshev_directions(m, lo=0.05, hi=0.95):
    """``m`` real directions ``(u, 1 - u)`` with Chebyshev-spaced ``u``."""
    j = np.arange(m)
    x = np.cos((2 * j + 1) * np.pi / (2 * m))
    u = np.sort(0.5 * (lo + hi) + 0.5 * (hi - lo) * x)
    return [(float(v), float(1 - v)) for v in u]


def circle_directions(m):
    """``m`` complex directions ``(u, 1 - u)`` with ``u = 1/2 + e^{i theta_j}``."""
    theta = (2 * np.arange(m) + 1) * np.pi / m
    u = 0.5 + np.exp(1j * theta)
    return [(complex(v), complex(1 - v)) for v in u]


def default_sample_count(k):
    return 4 * (k + 1)


def pole_ratios(y_eigs, tol=1e-9):
    """Ratios ``b2/b1`` where ``y b1 + (1 - y) b2`` vanishes, one per distinct ``y`` in (0, 1)."""
    out = []
    for y in np.unique(np.round(np.asarray(y_eigs, float), 12)):
        if tol < y < 1 - tol:
            x = -y / (1 - y)
            if not any(abs(x - o) <= 1e-9 * abs(o) for o in out):
                out.append(float(x))
    return out


def probe_directions(x_p, delta=PROBE_DELTA, m=PROBE_POINTS):
    theta = 2 * np.pi * (np.arange(m) + 0.5) / m
    x = x_p * (1 + delta * np.exp(1j * theta))
    return [(1.0 + 0j, complex(v)) for v in x]


def probe_residual(values):
    """Negative-mode share of samples on a probe circle.

    Zero (to rounding) when the sampled function is analytic inside the
    circle; of order one when a pole sits at its centre.
    """
    v = np.asarray(values, dtype=complex)
    v = v.reshape(v.shape[0], -1)
    m = v.shape[0]
    F = np.fft.fft(v, axis=0) / m
    # fft index m - j holds mode e^{-i j theta}
    neg = F[m // 2 + 1:]
    total = np.linalg.norm(F)
    return float(np.linalg.norm(neg) / max(total, RESIDUAL_FLOOR))


@dataclass(frozen=True, eq=False)
class PolynomialTest:
    """Outcome of :func:`test_polynomial`."""

    k: int
    fit: FitResult
    fit_residual: float
    probe_residual: float
    residual: float
    verdict: str
    probes: tuple = field(default=())


def test_polynomial(g, k, poles=(), m=None, tol_poly=TOL_POLY, tol_fail=TOL_NOT_POLY,
                    use_circle=True):
    """Decide whether the direction function ``g`` is a degree-``k`` layer.

    ``g`` maps a direction pair (possibly complex) to a scalar or vector.
    The fit uses ``m`` real and ``m`` complex directions (default
    ``4(k + 1)`` each); ``poles`` are candidate ratios ``b2/b1`` to probe.
    The reported residual is the larger of the fit and probe residuals.
    """
    m = m or default_sample_count(k)
    dirs = chebyshev_directions(m)
    if use_circle:
        dirs = dirs + circle_directions(m)
    fit = fit_homogeneous([(b, g(b)) for b in dirs], k)
    probes = []
    for x_p in poles:
        vals = [g(b) for b in probe_directions(x_p)]
        probes.append((x_p, probe_residual(vals)))
    pres = max((p[1] for p in probes), default=0.0)
    res = max(fit.relative_residual, pres)
    return PolynomialTest(k, fit, fit.relative_residual, pres, res,
                          polynomial_verdict(res, tol_poly, tol_fail), tuple(probes))


test_polynomial.__test__ = False


def complex_extension_check(f, rep, k, points):
    """Max relative gap between a fitted ``R_k`` layer and ``z_Y^{-1}(A z_Y^{-1})^{k-1} alpha``.

    Test points must avoid ``z1/z2`` on the closed negative real axis.
    """
    from .moments import vector_moment

    worst = 0.0
    for z in points:
        z1, z2 = complex(z[0]), complex(z[1])
        if z2 == 0:
            raise ValueError("test points need z2 != 0")
        ratio = z1 / z2
        if ratio.imag == 0 and ratio.real <= 0:
            raise ValueError(f"test point {z} has z1/z2 on the negative real axis")
        direct = vector_moment(rep, (z1, z2), k)
        approx = eval_laurent(f.coeffs, (z1, z2))
        scale = max(np.linalg.norm(direct), RESIDUAL_FLOOR)
        worst = max(worst, float(np.linalg.norm(approx - direct) / scale))
    return worst


def layer_table_json(layers, residuals=None):
    """JSON text for a list of layers (one coefficient table per degree)."""
    residuals = residuals or [None] * len(layers)
    return json.dumps([L.to_json_obj(r) for L, r in zip(layers, residuals)], indent=1)


def binomial_layer(k, a=1.0, c=1.0):
    """Layer of ``(a/z1 + c/z2)^k``; handy oracle for round-trip checks."""
    return HomogeneousLaurent(k, np.array([comb(k, j) * a ** (k - j) * c ** j for j in range(k + 1)], complex))
