"""Löwner-class membership by three independent routes.

* operator route: polynomiality and existence of the vector moments ``R_k``;
* function route: depth of the residue ladder extracted from ``h`` on rays;
* boundedness route: growth of the imaginary remainder functional.

Each route yields ``in`` / ``out`` / ``indeterminate`` per ``N`` for the
classes ``L^N`` and ``L^{N-}``. The index bookkeeping between routes is
fixed by :data:`OFFSETS`.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from . import asymptotics as asy
from .laurent import (INDETERMINATE, NOT_POLYNOMIAL, POLYNOMIAL, TOL_POLY, pole_ratios,
                      test_polynomial)
from .moments import scalar_moments, vector_moment
from .representation import as_function

IN = "in"
OUT = "out"

EXISTS = "exists"
DIVERGES = "diverges"

PANEL = tuple((u, round(1 - u, 10)) for u in (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9))

# Frozen index alignment, observed on the cyclic-walk family:
#   L^N    (operator)    R_1..R_{N+v-1} polynomial, v = vector_index
#   L^{N-} (operator)    R_1..R_{N+v-2} polynomial and R_{N+v-1} exists
#   L^N    (function)    ladder depth >= ladder_slope * N + ladder_shift
#   L^{N-} (boundedness) layers 1..(ladder_slope * N + expansion_shift) exist, J bounded
#   first non-polynomial r index = scalar_slope * (first non-polynomial R index) + scalar_shift
OFFSETS = {
    "vector_index": 1,
    "ladder_slope": 2,
    "ladder_shift": -1,
    "expansion_shift": -3,
    "scalar_slope": 2,
    "scalar_shift": -1,
}

# tail share of the upper half of the atoms: below converges, above diverges
SERIES_CONVERGES = 1e-3
SERIES_DIVERGES = 1e-2


def series_existence(measure, exponent):
    """Existence of ``sum_j w_j |t_j|^exponent`` for a truncated atom sequence."""
    t = np.abs(measure.t)
    order = np.argsort(t, kind="stable")
    terms = measure.w[order] * t[order] ** exponent
    total = float(np.sum(terms))
    if total == 0:
        return EXISTS, 0.0
    tail = float(np.sum(terms[len(terms) // 2:])) / total
    if tail <= SERIES_CONVERGES:
        return EXISTS, tail
    if tail >= SERIES_DIVERGES:
        return DIVERGES, tail
    return INDETERMINATE, tail


def _existence(rep, exponent):
    m = rep.measure
    if m is None or not m.truncated:
        return EXISTS, 0.0
    return series_existence(m, exponent)


@dataclass
class OrderVerdict:
    k: int
    exists: str
    tail: float
    poly: str
    residual: float


@dataclass
class MomentReport:
    """Per-order existence and polynomiality of ``R_k`` and ``r_k``.

    Orders after the first failing one are not evaluated; ``first_*``
    indices are ``None`` when no failure occurred within range.
    """

    K_max: int
    vector: list
    scalar: list
    first_nonpoly_R: object = None
    first_nonpoly_r: object = None
    first_missing_R: object = None
    first_missing_r: object = None

    def vector_status(self, top):
        """Combined verdict for ``R_1..R_top`` being existing polynomials."""
        return _combine(self.vector, top)

    def scalar_status(self, top):
        return _combine(self.scalar, top)

    def vector_exists(self, k):
        for v in self.vector:
            if v.k == k:
                return v.exists
        return INDETERMINATE


def _combine(rows, top):
    if top <= 0:
        return IN
    verdict = IN
    for v in rows:
        if v.k > top:
            break
        if v.exists == DIVERGES or v.poly == NOT_POLYNOMIAL:
            return OUT
        if v.exists != EXISTS or v.poly != POLYNOMIAL:
            verdict = INDETERMINATE
    if len([v for v in rows if v.k <= top]) < top:
        verdict = INDETERMINATE if verdict == IN else verdict
    return verdict


def _order_rows(rep, K, exponent_of, g_of, poles, tol_poly):
    rows, first_np, first_missing = [], None, None
    stopped = False
    for k in range(1, K + 1):
        exists, tail = _existence(rep, exponent_of(k))
        if stopped:
            rows.append(OrderVerdict(k, exists, tail, "not_evaluated", float("nan")))
            if exists == DIVERGES and first_missing is None:
                first_missing = k
            continue
        t = test_polynomial(g_of(k), k, poles, tol_poly=tol_poly)
        rows.append(OrderVerdict(k, exists, tail, t.verdict, t.residual))
        if exists == DIVERGES and first_missing is None:
            first_missing = k
        if t.verdict != POLYNOMIAL:
            stopped = True
            if t.verdict == NOT_POLYNOMIAL:
                first_np = k
    return rows, first_np, first_missing


def moment_orders(rep, K_max, tol_poly=TOL_POLY):
    """Fit ``r_k`` for ``k <= K_max`` and ``R_k`` for ``k <= ceil(K_max / 2) + 1``."""
    if K_max < 1:
        raise ValueError("K_max must be >= 1")
    poles = pole_ratios(rep.y_spectrum())
    KR = (K_max + 1) // 2 + 1
    vec, fR, mR = _order_rows(
        rep, KR, lambda k: 2 * k - 2,
        lambda k: (lambda b: vector_moment(rep, b, k)), poles, tol_poly)
    sca, fr, mr = _order_rows(
        rep, K_max, lambda k: k - 1,
        lambda k: (lambda b: scalar_moments(rep, b, k, check_real=False)[-1]), poles, tol_poly)
    return MomentReport(K_max, vec, sca, fR, fr, mR, mr)


@dataclass
class ClassificationReport:
    N_max: int
    rows: list
    moments: MomentReport
    ladder: object
    ladder_note: str
    expansion: object
    discrepancies: list = field(default_factory=list)
    offsets: dict = field(default_factory=lambda: dict(OFFSETS))

    def verdict(self, N, key):
        return self.rows[N - 1][key]

    def to_json_obj(self):
        mr = self.moments
        return {
            "N_max": self.N_max,
            "offsets": self.offsets,
            "indices": {
                "first_nonpoly_R": mr.first_nonpoly_R,
                "first_nonpoly_r": mr.first_nonpoly_r,
                "first_missing_R": mr.first_missing_R,
                "first_missing_r": mr.first_missing_r,
                "ladder_depth": None if self.ladder is None else self.ladder.depth,
                "ladder_reason": None if self.ladder is None else self.ladder.reason,
                "expansion_depth": self.expansion.depth,
            },
            "ladder_note": self.ladder_note,
            "rows": self.rows,
            "moments": {
                "vector": [vars(v) for v in mr.vector],
                "scalar": [vars(v) for v in mr.scalar],
            },
            "ladder": None if self.ladder is None else self.ladder.to_json_obj(),
            "discrepancies": self.discrepancies,
        }

    def to_json(self):
        return json.dumps(self.to_json_obj(), indent=1, default=_json_default)


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(f"not serializable: {type(o)}")


# o-term limits relative to the size of the top layer on the same ray
O_TERM_RTOL = 1e-4

# relative rounding allowed in the remainder functional (only its slope matters)
BOUNDEDNESS_ROUNDING = 1e-2


def _boundedness_grid(rep, b, N):
    """Ray grid for the remainder functional, or ``None`` if no reliable window exists."""
    m = rep.measure
    if m is not None and m.truncated:
        # only s << t_max shows the divergence of the untruncated series
        s_max = float(np.max(np.abs(m.t))) / 10
        s_min = 10.0
        levels = 12
        return asy.RayGrid(b, s_min, (s_max / s_min) ** (1 / levels), levels)
    scale = max(rep.spectral_scale(), 1e-3)
    s0 = 4.0 * scale / min(b)
    if N == 1:
        levels = 20
    else:
        # rounding grows like eps * (s max(b) / scale)^(2N-2)
        s_top = scale / max(b) * (BOUNDEDNESS_ROUNDING / np.finfo(float).eps) ** (1 / (2 * N - 2))
        levels = min(20, int(np.floor(np.log2(s_top / s0))))
    if levels < 4:
        return None
    return asy.RayGrid(b, s0, 2.0, levels)


def boundedness_verdict(rep, N, expansion, panel=PANEL):
    """``in`` when the remainder functional stays bounded on every panel direction."""
    f = as_function(rep)
    slopes, verdicts = [], []
    for b in panel:
        grid = _boundedness_grid(rep, b, N)
        if grid is None:
            slopes.append(float("nan"))
            verdicts.append(INDETERMINATE)
            continue
        J = asy.imag_remainder_functional(f, expansion, b, N, grid)
        s = grid.s_values
        z1, z2 = grid.points()
        # rounding in the subtraction is about eps * s^(2N-2) * |s h(isb)|
        noise = 100 * np.finfo(float).eps * s ** (2 * N - 2) * np.abs(s * f(z1, z2))
        half = len(J) // 2
        if np.all(np.abs(J[half:]) <= noise[half:]):
            g = asy.GrowthResult(float("-inf"), asy.BOUNDED)
        else:
            g = asy.growth_exponent(grid, J)
        slopes.append(g.slope)
        verdicts.append(g.verdict)
    if all(v == asy.BOUNDED for v in verdicts):
        out = IN
    elif any(v == asy.UNBOUNDED for v in verdicts):
        out = OUT
    else:
        out = INDETERMINATE
    return out, slopes


def expansion_from_moments(rep, depth, mr=None):
    """Layers ``-fit(r_m)`` for ``m <= depth``, stopping at missing or non-polynomial moments."""
    ladder = asy.ladder_from_moments(rep, depth) if depth > 0 else asy.ResidueLadder([], 0, asy.CONVERGED, [], 0)
    if rep.measure is not None and rep.measure.truncated:
        for k in range(1, ladder.depth + 1):
            exists, _ = _existence(rep, k - 1)
            if exists != EXISTS:
                reason = "missing_moment" if exists == DIVERGES else asy.INDETERMINATE_LAYER
                return asy.ResidueLadder(ladder.layers[:k - 1], k - 1, reason, ladder.diagnostics, depth)
    return ladder


def _expansion_status(expansion, top):
    if expansion.depth >= top:
        return IN
    if expansion.reason in (asy.NOT_POLYNOMIAL_LAYER, "missing_moment"):
        return OUT
    return INDETERMINATE


def o_term_limit(f, ladder, N, b, scale):
    """Limit of ``(is)^{2N-1}[f(isb) - sum_{|n|<=2N-1} rho_n/(isb)^n]``; should be zero."""
    order = 2 * N - 1
    grid = asy.ladder_grid(b, order, scale)
    z1, z2 = grid.points()
    s = grid.s_values
    layers = ladder.layers[:order]
    v = (1j * s) ** order * (np.asarray(f(z1, z2), complex) - asy._layers_on_ray(layers, z1, z2))
    return asy.estimate_limit(grid, v, power=1)


def _function_status(ladder, N, f, scale):
    need = OFFSETS["ladder_slope"] * N + OFFSETS["ladder_shift"]
    if ladder.depth >= need:
        L = ladder.layer(need)
        if L.max_imag() > 1e-8 * (1 + L.max_abs()):
            return INDETERMINATE, {"o_term": None, "real_layers": False}
        # coefficient errors of the top layer enter the limit at this size
        size = max(L.max_abs(), ladder.layer(1).max_abs() * scale ** (need - 1))
        worst = 0.0
        for b in (PANEL[0], PANEL[4], PANEL[8]):
            est = o_term_limit(f, ladder, N, b, scale)
            mono = min(b[0], b[1]) ** -need
            worst = max(worst, (abs(est.value) - 10 * est.error_bound) / (size * mono))
        small = worst <= O_TERM_RTOL
        return (IN if small else INDETERMINATE), {"o_term": worst, "real_layers": True}
    if ladder.reason == asy.NOT_POLYNOMIAL_LAYER and ladder.depth + 1 <= need:
        return OUT, {}
    return INDETERMINATE, {}


def loewner_profile(rep, N_max, panel=PANEL, function_route=True, tol_poly=TOL_POLY):
    """Classify ``rep`` for ``L^N`` and ``L^{N-}``, ``N = 1..N_max``.

    Parameters
    ----------
    rep : TypeIRep
    N_max : int
    panel : sequence of directions for the boundedness route
    function_route : bool
        Skip the residue ladder (all function verdicts indeterminate) when false.
    tol_poly : float
        Polynomial acceptance threshold for moment fits and ladder layers.

    Returns
    -------
    ClassificationReport
        ``discrepancies`` is already filled by :func:`cross_validate`.
    """
    if N_max < 1:
        raise ValueError("N_max must be >= 1")
    mr = moment_orders(rep, 2 * N_max - 1, tol_poly)
    expansion = expansion_from_moments(rep, max(2 * N_max - 3, 0), mr)
    f = as_function(rep)
    scale = max(rep.spectral_scale(), 1e-3)
    ladder, note = None, ""
    if rep.measure is not None and rep.measure.truncated:
        note = "truncated measure: ray limits would probe the truncation, not the series"
    elif function_route:
        ladder = asy.residue_ladder(f, 2 * N_max - 1, scale=scale, poles=pole_ratios(rep.y_spectrum()),
                                    tol_poly=tol_poly)
    else:
        note = "function route skipped"
    v = OFFSETS["vector_index"]
    rows = []
    for N in range(1, N_max + 1):
        row = {"N": N}
        row["operator_LN"] = mr.vector_status(N + v - 1)
        top = N + v - 2
        op_minus = mr.vector_status(top)
        ex = mr.vector_exists(N + v - 1)
        if op_minus == IN and ex != EXISTS:
            op_minus = OUT if ex == DIVERGES else INDETERMINATE
        row["operator_LNminus"] = op_minus
        if ladder is None:
            row["function_LN"], extra = INDETERMINATE, {}
        else:
            row["function_LN"], extra = _function_status(ladder, N, f, scale)
        row.update({f"function_{k}": val for k, val in extra.items()})
        etop = OFFSETS["ladder_slope"] * N + OFFSETS["expansion_shift"]
        est = _expansion_status(expansion, etop)
        if est == IN:
            bverdict, slopes = boundedness_verdict(rep, N, expansion, panel)
        else:
            bverdict, slopes = est, []
        row["boundedness_LNminus"] = bverdict
        row["boundedness_slopes"] = slopes
        rows.append(row)
    report = ClassificationReport(N_max, rows, mr, ladder, note, expansion)
    report.discrepancies = cross_validate(report)
    return report


def cross_validate(report):
    """Contradictions between routes, monotonicity breaks and index-relation violations."""
    out = []
    rows = report.rows
    pairs = (("operator_LN", "function_LN"), ("operator_LNminus", "boundedness_LNminus"))
    for row in rows:
        N = row["N"]
        for a, b in pairs:
            va, vb = row[a], row[b]
            if {va, vb} == {IN, OUT}:
                out.append({"N": N, "kind": "route_contradiction", "routes": [a, b],
                            "verdicts": [va, vb], "indices": _indices(report)})
        # L^N is contained in L^{N-}
        for a in ("operator_LN", "function_LN"):
            for b in ("operator_LNminus", "boundedness_LNminus"):
                if row[a] == IN and row[b] == OUT:
                    out.append({"N": N, "kind": "class_nesting", "routes": [a, b],
                                "verdicts": [row[a], row[b]], "indices": _indices(report)})
    keys = ("operator_LN", "function_LN", "operator_LNminus", "boundedness_LNminus")
    for key in keys:
        seen_out = None
        for row in rows:
            if row[key] == OUT and seen_out is None:
                seen_out = row["N"]
            if row[key] == IN and seen_out is not None:
                out.append({"N": row["N"], "kind": "monotonicity", "routes": [key],
                            "verdicts": [OUT, IN], "indices": _indices(report)})
    mr = report.moments
    if mr.first_nonpoly_R is not None and mr.first_nonpoly_r is not None:
        expect = OFFSETS["scalar_slope"] * mr.first_nonpoly_R + OFFSETS["scalar_shift"]
        if mr.first_nonpoly_r < expect:
            out.append({"N": None, "kind": "index_relation", "routes": ["R", "r"],
                        "verdicts": [mr.first_nonpoly_R, mr.first_nonpoly_r], "indices": _indices(report)})
    lad = report.ladder
    if lad is not None and mr.first_nonpoly_r is not None and lad.depth >= mr.first_nonpoly_r:
        out.append({"N": None, "kind": "ladder_vs_moments", "routes": ["function", "operator"],
                    "verdicts": [lad.depth, mr.first_nonpoly_r], "indices": _indices(report)})
    return out


def _indices(report):
    mr = report.moments
    return {"first_nonpoly_R": mr.first_nonpoly_R, "first_nonpoly_r": mr.first_nonpoly_r,
            "ladder_depth": None if report.ladder is None else report.ladder.depth}


def calibrate_offsets(ns=(3, 4, 5), ts=(0.25, 0.5, 0.75)):
    """Observed index alignment on the cyclic-walk family.

    Returns the set of ``(first non-polynomial R, first non-polynomial r, n)``
    triples; the frozen :data:`OFFSETS` encode ``R: n``, ``r: 2n - 1``.
    """
    from .gallery import CounterexampleSpec, amy_counterexample

    seen = set()
    for n in ns:
        for t in ts:
            mr = moment_orders(amy_counterexample(CounterexampleSpec(n, t)), 2 * n - 1)
            seen.add((mr.first_nonpoly_R, mr.first_nonpoly_r, n))
    return seen
