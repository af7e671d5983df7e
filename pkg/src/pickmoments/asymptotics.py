"""Ray sampling, Richardson limits, growth exponents and residue ladders.

All rays have the form ``z = i s b`` with ``b`` a direction. Real
directions with positive entries give nontangential rays with aperture
``|b| / min(b1, b2)``; complex directions with ``Re b1, Re b2 > 0`` stay in
the bi-upper half-plane and are used only for pole probes.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .laurent import (INDETERMINATE, NOT_POLYNOMIAL, POLYNOMIAL, TOL_NOT_POLY, TOL_POLY,
                      chebyshev_directions, fit_homogeneous,
                      probe_residual)

TOL_LIMIT = 1e-6
SLOPE_TOL = 0.1
SLOPE_UNBOUNDED = 0.4

BOUNDED = "bounded"
UNBOUNDED = "unbounded"

CONVERGED = "converged"
NOT_CONVERGED = "not_converged"
NOT_POLYNOMIAL_LAYER = "not_polynomial_layer"
INDETERMINATE_LAYER = "indeterminate_layer"

# ladder grids: first point at LADDER_C0 * scale / min Re b, ratio LADDER_RATIO,
# top level capped so that the cancellation gain stays below LADDER_GAIN
LADDER_C0 = 2.0
LADDER_RATIO = 1.25
LADDER_GAIN = 1e9
LADDER_MAX_LEVELS = 24
# ladder directions keep max(b)/min(b) <= 9: skewed rays trade convergence for cancellation
LADDER_DIR_LO = 0.1
# a polynomial layer may misfit by up to CARRY_FACTOR times the worst earlier misfit
CARRY_FACTOR = 1e4
ACCEPT_CAP = 1e-5
# layer values below this fraction of unit * scale^(m-1) are indistinguishable from zero
ZERO_LAYER_RTOL = 1e-9
PROBE_DELTA = 0.5
PROBE_POINTS = 64


@dataclass(frozen=True)
class RayGrid:
    """Geometric grid ``s_j = s0 r^j``, ``j = 0..levels`` along direction ``b``."""

    b: tuple
    s0: float = 10.0
    ratio: float = 2.0
    levels: int = 20

    def __post_init__(self):
        b1, b2 = complex(self.b[0]), complex(self.b[1])
        if not (b1.real > 0 and b2.real > 0):
            raise ValueError(f"ray direction must have positive real parts, got {self.b}")
        if not (self.s0 > 0 and self.ratio > 1 and self.levels >= 4):
            raise ValueError("grid needs s0 > 0, ratio > 1 and levels >= 4")
        if b1.imag == 0 and b2.imag == 0:
            object.__setattr__(self, "b", (b1.real, b2.real))
        else:
            object.__setattr__(self, "b", (b1, b2))

    @property
    def s_values(self):
        return self.s0 * self.ratio ** np.arange(self.levels + 1)

    @property
    def aperture(self):
        """Aperture ``c`` with ``|isb| <= c min Im(isb)`` for every ``s``."""
        b1, b2 = complex(self.b[0]), complex(self.b[1])
        return float(np.hypot(abs(b1), abs(b2)) / min(b1.real, b2.real))

    def points(self):
        s = self.s_values
        return 1j * s * self.b[0], 1j * s * self.b[1]


def sample_ray(f, grid):
    """``f(i s_j b)`` for ascending ``j``; ``f`` takes arrays ``(z1, z2)``."""
    z1, z2 = grid.points()
    return np.asarray(f(z1, z2), dtype=complex)


@dataclass(frozen=True)
class LimitEstimate:
    value: complex
    error_bound: float
    converged: bool
    column: int = 0
    row: int = 0


def estimate_limit(grid, values, tol_limit=TOL_LIMIT, power=1, step=None):
    """Richardson extrapolation to ``s -> inf`` assuming an expansion in powers of ``1/s``.

    Parameters
    ----------
    grid : RayGrid or array of s values
        Must be geometric.
    values : sequence aligned with the grid
    power, step : int
        The expansion is assumed to contain ``s^-power``, ``s^-(power + step)``,
        ... (``step`` defaults to ``power``). Use ``power=2`` when only even
        powers occur and ``power=1, step=2`` when only odd powers occur.

    Returns
    -------
    LimitEstimate
        The tableau entry with the smallest error, where the error of
        ``T[j][m]`` is the larger of its gaps to ``T[j][m-1]`` and
        ``T[j-1][m-1]``. Never raises on divergence; ``converged`` is then
        false.
    """
    s = grid.s_values if isinstance(grid, RayGrid) else np.asarray(grid, float)
    v = np.asarray(values)
    if v.shape != s.shape:
        raise ValueError("values must align with the grid")
    if not np.all(np.isfinite(v)):
        return LimitEstimate(complex(v[-1]) if np.isfinite(v[-1]) else complex("nan"), np.inf, False)
    step = power if step is None else step
    ratio = s[1] / s[0]
    n = len(v)
    prev = [complex(v[0])]
    best_err, best_val, best_pos = np.inf, complex(v[-1]), (0, n - 1)
    for j in range(1, n):
        row = [complex(v[j])]
        for m in range(1, j + 1):
            fac = ratio ** (power + step * (m - 1)) - 1.0
            row.append(row[m - 1] + (row[m - 1] - prev[m - 1]) / fac)
            err = max(abs(row[m] - row[m - 1]), abs(row[m] - prev[m - 1]))
            if err < best_err:
                best_err, best_val, best_pos = err, row[m], (m, j)
        prev = row
    converged = bool(best_err <= tol_limit * (1 + abs(best_val)))
    return LimitEstimate(best_val, float(best_err), converged, best_pos[0], best_pos[1])


@dataclass(frozen=True)
class GrowthResult:
    slope: float
    verdict: str


def growth_exponent(grid, values, slope_tol=SLOPE_TOL, unbounded_tol=SLOPE_UNBOUNDED):
    """Least-squares slope of ``log|v|`` against ``log s`` over the top half of the grid."""
    s = grid.s_values if isinstance(grid, RayGrid) else np.asarray(grid, float)
    v = np.abs(np.asarray(values))
    top = slice(len(s) // 2, None)
    ls, lv = np.log(s[top]), v[top]
    if np.any(lv == 0) or not np.all(np.isfinite(lv)):
        if np.all(lv == 0):
            return GrowthResult(float("-inf"), BOUNDED)
        return GrowthResult(float("nan"), INDETERMINATE)
    slope = float(np.polyfit(ls, np.log(lv), 1)[0])
    if slope <= slope_tol:
        verdict = BOUNDED
    elif slope >= unbounded_tol:
        verdict = UNBOUNDED
    else:
        verdict = INDETERMINATE
    return GrowthResult(slope, verdict)


def _expansion_layers(expansion, top):
    layers = expansion.layers if isinstance(expansion, ResidueLadder) else list(expansion or [])
    if len(layers) < top:
        raise ValueError(f"expansion needs layers 1..{top}, has {len(layers)}")
    return layers[:top]


def _layers_on_ray(layers, z1, z2):
    total = np.zeros(np.shape(z1), dtype=complex)
    for L in layers:
        k = L.degree
        for j, c in enumerate(L.coeffs):
            if c != 0:
                total += c * z1 ** -(k - j) * z2 ** -j
    return total


def imag_remainder_functional(f, expansion, b, N, grid):
    """``J_b(s_j) = s_j^{2N-1} Im[f(i s_j b) - sum_{|n|<=2N-3} rho_n/(i s_j b)^n]``.

    ``expansion`` is a :class:`ResidueLadder` or a list of layers; only
    layers ``1..2N-3`` are used.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    layers = _expansion_layers(expansion, 2 * N - 3) if N > 1 else []
    if tuple(grid.b) != tuple(b):
        grid = RayGrid(b, grid.s0, grid.ratio, grid.levels)
    z1, z2 = grid.points()
    s = grid.s_values
    vals = np.asarray(f(z1, z2), dtype=complex) - _layers_on_ray(layers, z1, z2)
    return s ** (2 * N - 1) * vals.imag


def sign_convention(N):
    """Sign ``(-1)^{N+1}`` carried by the limit of the imaginary remainder functional."""
    return (-1) ** (N + 1)


@dataclass(frozen=True)
class DirectionalMoment:
    estimate: LimitEstimate
    magnitude: float
    sign: int
    phase: complex


def directional_scalar_moment(f, expansion, b, N, grid, tol_limit=TOL_LIMIT):
    """Limit of the imaginary remainder functional along ``isb``.

    The functional is even in ``1/s`` when the layers are real, so the
    extrapolation runs in ``s^-2``. The magnitude of the limit is
    ``|beta_{N-1}(b)|^2 = r_{2N-1}(b)`` for representations; ``sign`` is the
    observed sign and ``phase`` records the ``i^{2N-1}`` factor separating
    ``s^{2N-1}`` from ``(is)^{2N-1}``.
    """
    J = imag_remainder_functional(f, expansion, b, N, grid)
    est = estimate_limit(grid, J, tol_limit=tol_limit, power=2)
    val = est.value.real
    return DirectionalMoment(est, abs(val), int(np.sign(val)) if val else 0, 1j ** (2 * N - 1))


def scaled_grid(b, scale, c0=10.0, ratio=2.0, levels=20):
    """Grid starting at ``c0 * scale / min Re b``."""
    b1, b2 = complex(b[0]), complex(b[1])
    return RayGrid(b, c0 * scale / min(b1.real, b2.real), ratio, levels)


def _rotate(b):
    """``(lam, lam b)`` with the arguments of ``lam b`` symmetric about zero."""
    b1, b2 = complex(b[0]), complex(b[1])
    phi = 0.5 * (np.angle(b1) + np.angle(b2))
    lam = np.exp(-1j * phi)
    return lam, (lam * b1, lam * b2)


def ladder_grid(b, order, scale, c0=None, ratio=None, gain=None, max_levels=None):
    """Scale-aware grid for order ``order``: the top level keeps ``(s/s0)^(order-1)`` below ``gain``."""
    c0 = LADDER_C0 if c0 is None else c0
    ratio = LADDER_RATIO if ratio is None else ratio
    gain = LADDER_GAIN if gain is None else gain
    max_levels = LADDER_MAX_LEVELS if max_levels is None else max_levels
    if order <= 1:
        levels = max_levels
    else:
        levels = int(np.floor(np.log(gain ** (1.0 / (order - 1)) / c0) / np.log(ratio)))
        levels = max(4, min(levels, max_levels))
    return scaled_grid(b, scale, c0, ratio, levels)


@dataclass
class LayerDiagnostics:
    order: int
    fit_residual: float
    limit_noise: float
    probe_residual: float
    accept_tol: float
    verdict: str
    max_imag: float
    directions: list = field(default_factory=list)


@dataclass
class ResidueLadder:
    """Layers ``1..depth`` of the expansion at infinity plus per-order diagnostics."""

    layers: list
    depth: int
    reason: str
    diagnostics: list
    max_order: int

    def layer(self, m):
        return self.layers[m - 1]

    def to_json_obj(self):
        return {
            "depth": self.depth,
            "max_order": self.max_order,
            "reason": self.reason,
            "layers": [L.to_json_obj() for L in self.layers],
            "orders": [
                {"order": d.order, "verdict": d.verdict, "fit_residual": d.fit_residual,
                 "limit_noise": d.limit_noise, "probe_residual": d.probe_residual,
                 "accept_tol": d.accept_tol, "max_imag": d.max_imag,
                 "directions": d.directions}
                for d in self.diagnostics
            ],
        }

    def to_json(self):
        return json.dumps(self.to_json_obj(), indent=1, default=float)


def _layer_limit(f, layers, b, m, scale, real_layer):
    lam, rb = _rotate(b)
    grid = ladder_grid(rb, m, scale)
    z1, z2 = grid.points()
    s = grid.s_values
    fv = np.asarray(f(z1, z2), dtype=complex)
    v = (1j * s) ** m * (fv - _layers_on_ray(layers, z1, z2))
    rounding = float(np.max(np.finfo(float).eps * s ** m * np.abs(fv)))
    if real_layer:
        re = estimate_limit(grid, v.real, power=2)
        im = estimate_limit(grid, v.imag, power=1, step=2)
        value = complex(re.value.real, im.value.real)
        err = re.error_bound
        ok = re.converged
        imag_err = im.error_bound
    else:
        est = estimate_limit(grid, v, power=1)
        value, err, ok, imag_err = est.value, est.error_bound, est.converged, est.error_bound
    # L_m(lam b) = lam^{-m} L_m(b)
    return value * lam ** m, err, ok, imag_err, rounding


def residue_ladder(f, max_order, directions=None, scale=1.0, poles=(), tol_poly=TOL_POLY,
                   tol_fail=TOL_NOT_POLY, noise_factor=10.0, carry_factor=CARRY_FACTOR):
    """Extract homogeneous layers of the expansion of ``f`` at infinity, order by order.

    Parameters
    ----------
    f : callable
        ``f(z1, z2)`` on arrays of points of the bi-upper half-plane.
    max_order : int
    directions : sequence of real directions, optional
        Defaults to ``4(max_order + 1)`` Chebyshev-spaced directions with
        ``b1`` in ``[LADDER_DIR_LO, 1 - LADDER_DIR_LO]``.
    scale : float
        Size of the spectrum of ``A`` (sets where the rays start).
    poles : sequence of float
        Candidate ratios ``b2/b1`` where a layer may be singular; each is
        probed on a circle of complex directions.

    Returns
    -------
    ResidueLadder
        Stops at the first order whose limits fail to converge
        (``not_converged``), whose layer is not polynomial
        (``not_polynomial_layer``) or cannot be decided
        (``indeterminate_layer``).
    """
    if directions is None:
        directions = chebyshev_directions(4 * (max_order + 1), LADDER_DIR_LO, 1 - LADDER_DIR_LO)
    dirs = list(directions)
    if len(dirs) < max_order + 1:
        raise ValueError(f"need at least {max_order + 1} directions")
    layers, diags = [], []
    reason = CONVERGED
    for m in range(1, max_order + 1):
        samples, noise, abs_noise, imag_part, dir_diag, ok_all = [], 0.0, 0.0, 0.0, [], True
        for b in dirs:
            val, err, ok, ierr, rnd = _layer_limit(f, layers, b, m, scale, True)
            ok_all &= ok
            noise = max(noise, err / (1 + abs(val)))
            abs_noise = max(abs_noise, err, rnd)
            imag_part = max(imag_part, abs(val.imag) - 10 * ierr)
            samples.append((b, val.real))
            dir_diag.append({"b": [float(b[0]), float(b[1])], "value": val.real,
                             "error": err, "converged": bool(ok)})
        if m == 1:
            unit = max(abs(v) for _, v in samples)
        floor = max(ZERO_LAYER_RTOL * unit * scale ** (m - 1), 10 * abs_noise)
        fit = fit_homogeneous(samples, m, floor=floor)
        # misfits of earlier layers are amplified by the rays, not seen in `noise`
        carried = carry_factor * max((d.fit_residual for d in diags), default=0.0)
        accept = min(max(tol_poly, noise_factor * noise, carried), ACCEPT_CAP)
        pres = 0.0
        # earlier misfits grow along the ray, so they set an absolute floor for the probe
        probe_floor = max(carried, ZERO_LAYER_RTOL) * unit * scale ** (m - 1)
        for x_p in poles:
            share, significant = _probe(f, layers, x_p, m, scale, probe_floor)
            if significant:
                pres = max(pres, share)
        res = fit.relative_residual
        if max(abs(v) for _, v in samples) <= floor:
            # zero layer up to noise
            res = 0.0
        if (res >= tol_fail and res >= noise_factor * noise) or pres >= tol_fail:
            verdict = NOT_POLYNOMIAL
        elif res <= accept:
            verdict = POLYNOMIAL
        else:
            verdict = INDETERMINATE
        diags.append(LayerDiagnostics(m, res, noise, pres, accept, verdict, max(imag_part, 0.0), dir_diag))
        if verdict == NOT_POLYNOMIAL:
            reason = NOT_POLYNOMIAL_LAYER
            break
        if not ok_all:
            reason = NOT_CONVERGED
            break
        if verdict == INDETERMINATE:
            reason = INDETERMINATE_LAYER
            break
        layers.append(fit.coeffs)
    return ResidueLadder(layers, len(layers), reason, diags, max_order)


def _probe(f, layers, x_p, m, scale, floor=0.0, delta=PROBE_DELTA, points=PROBE_POINTS):
    """Negative-mode share of layer-``m`` limits on a circle around ``x_p``.

    Returns ``(share, significant)``; the share only counts when the
    negative modes exceed both the extrapolation noise and ``floor``.
    """
    theta = 2 * np.pi * (np.arange(points) + 0.5) / points
    vals, noise = [], 0.0
    for x in x_p * (1 + delta * np.exp(1j * theta)):
        val, err, _, _, _ = _layer_limit(f, layers, (1.0, complex(x)), m, scale, False)
        vals.append(val)
        noise = max(noise, err)
    F = np.fft.fft(np.asarray(vals)) / points
    neg = float(np.linalg.norm(F[points // 2 + 1:]))
    return probe_residual(vals), neg > max(10 * noise, floor)


def ladder_from_moments(rep, max_order, directions=None):
    """Layers ``rho = -fit(r_m)`` from the scalar moments of a representation.

    Stops at the first order whose moment is not polynomial; ``reason``
    follows :func:`residue_ladder`.
    """
    from .laurent import pole_ratios, test_polynomial
    from .moments import scalar_moments

    poles = pole_ratios(rep.y_spectrum())
    layers, diags = [], []
    reason = CONVERGED
    for m in range(1, max_order + 1):
        t = test_polynomial(lambda b: scalar_moments(rep, b, m, check_real=False)[-1], m, poles)
        diags.append(LayerDiagnostics(m, t.fit_residual, 0.0, t.probe_residual, TOL_POLY,
                                      t.verdict, t.fit.coeffs.max_imag()))
        if t.verdict != POLYNOMIAL:
            reason = NOT_POLYNOMIAL_LAYER if t.verdict == NOT_POLYNOMIAL else INDETERMINATE_LAYER
            break
        layers.append(-t.fit.coeffs)
    return ResidueLadder(layers, len(layers), reason, diags, max_order)
