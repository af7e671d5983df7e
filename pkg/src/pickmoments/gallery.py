"""Constructors for the cyclic-walk counterexample, heavy-tailed measures and random representations."""

from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import OrderTooHigh
from .representation import DiscreteMeasure, TypeIRep, from_discrete_measure


@dataclass(frozen=True)
class CounterexampleSpec:
    """Walk length parameter ``n >= 2`` and weight ``t`` in ``(0, 1]``."""

    n: int
    t: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n}")
        if not (0 < self.t <= 1):
            raise ValueError(f"t must lie in (0, 1], got {self.t}")

    @property
    def dim(self):
        return 2 * (self.n - 1)


def amy_counterexample(spec):
    """Cycle adjacency on ``Z_{2(n-1)}`` with ``Y e_{n-1} = t e_{n-1}`` and ``alpha = e_0``.

    ``A e_i = e_{i+1} + e_{i-1}`` (indices mod ``2(n-1)``); on ``Z_2`` the two
    neighbours coincide and ``A = [[0, 2], [2, 0]]``.
    """
    d = spec.dim
    A = np.zeros((d, d))
    for i in range(d):
        A[(i + 1) % d, i] += 1.0
        A[(i - 1) % d, i] += 1.0
    y = np.ones(d)
    y[spec.n - 1] = spec.t
    alpha = np.zeros(d)
    alpha[0] = 1.0
    return TypeIRep(A.astype(complex), np.diag(y).astype(complex), alpha.astype(complex))


def counterexample_R_closed_form(spec, k, b):
    """``b1^{-k} sum_l C(k-1, l) e_{(2l - k + 1) mod 2(n-1)}`` for ``1 <= k < n``.

    Coefficients of colliding indices are summed.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if k >= spec.n:
        raise OrderTooHigh(f"closed form holds for k < n = {spec.n}, got k = {k}")
    d = spec.dim
    v = np.zeros(d, dtype=complex)
    for l in range(k):
        v[(2 * l - (k - 1)) % d] += comb(k - 1, l)
    return v / float(b[0]) ** k


def counterexample_r5_n3(t, b):
    """``r_5(b) = 4/b1^5 + 4/(b1^4 (t b1 + (1 - t) b2))`` for ``n = 3``."""
    b1, b2 = b
    return 4 / b1 ** 5 + 4 / (b1 ** 4 * (t * b1 + (1 - t) * b2))


def heavy_tail_measure(p, cutoff):
    """Atoms ``(j, j^-p)`` for ``j = 1..cutoff``, marked as a truncation."""
    if not p > 1:
        raise ValueError("p must exceed 1")
    if cutoff < 10:
        raise ValueError("cutoff must be >= 10")
    j = np.arange(1, int(cutoff) + 1, dtype=float)
    return DiscreteMeasure(j, j ** -float(p), truncated=True)


def small_measure(p, cutoff):
    """Same atoms as :func:`heavy_tail_measure` without the lower bound on ``cutoff``."""
    j = np.arange(1, int(cutoff) + 1, dtype=float)
    return DiscreteMeasure(j, j ** -float(p))


def heavy_tail_rep(p=4.0, cutoff=100_000):
    return from_discrete_measure(heavy_tail_measure(p, cutoff))


def random_rep(dim, seed, projection=False):
    """Seeded random representation.

    ``A = (G + G*)/2`` with ``G`` complex Gaussian of entry variance
    ``1/dim`` (spectrum of order one for every ``dim``), ``Y`` diagonal with
    uniform entries in ``[0, 1]`` (entries in ``{0, 1}`` when
    ``projection``) and ``alpha`` Gaussian with unit norm.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    g = np.random.default_rng(seed)
    G = (g.standard_normal((dim, dim)) + 1j * g.standard_normal((dim, dim))) / np.sqrt(2 * dim)
    A = 0.5 * (G + G.conj().T)
    if projection:
        y = g.integers(0, 2, dim).astype(float)
    else:
        y = g.uniform(0.0, 1.0, dim)
    alpha = g.standard_normal(dim) + 1j * g.standard_normal(dim)
    alpha /= np.linalg.norm(alpha)
    return TypeIRep(A, np.diag(y).astype(complex), alpha)


def diagonal_rep(lams, ys, alpha=None):
    """Commuting representation ``A = diag(lams)``, ``Y = diag(ys)``, dense storage."""
    lams = np.asarray(lams, float)
    ys = np.asarray(ys, float)
    alpha = np.ones(len(lams)) if alpha is None else np.asarray(alpha)
    return TypeIRep(np.diag(lams).astype(complex), np.diag(ys).astype(complex), np.asarray(alpha, complex))


def scalar_rep(lam, y=1.0):
    """``A = [[lam]]``, ``Y = [[y]]``, ``alpha = (1)``."""
    return diagonal_rep([lam], [y])


def gallery(n_random=50, seed=0, max_dim=6, include_heavy=True):
    """Named representations covering the families used by the property suites."""
    out = []
    rng = np.random.default_rng(seed)
    for i in range(n_random):
        d = int(rng.integers(1, max_dim + 1))
        out.append((f"random-{i}-d{d}", random_rep(d, seed * 1000 + i)))
    for i in range(max(4, n_random // 10)):
        d = int(rng.integers(1, max_dim + 1))
        out.append((f"projection-{i}-d{d}", random_rep(d, seed * 1000 + 500 + i, projection=True)))
    for n in (2, 3, 4, 5):
        for t in (0.25, 0.5, 0.75, 1.0):
            out.append((f"counterexample-n{n}-t{t}", amy_counterexample(CounterexampleSpec(n, t))))
    for lam in (-1.5, 0.0, 1.0):
        out.append((f"scalar-{lam}", scalar_rep(lam)))
    out.append(("diagonal-4", diagonal_rep([-1.0, 0.5, 1.0, 2.0], [1.0, 0.0, 1.0, 0.0], [1.0, 0.5, 0.25, 2.0])))
    out.append(("measure-small", from_discrete_measure(small_measure(2.0, 8))))
    if include_heavy:
        out.append(("heavy-tail-p4", heavy_tail_rep(4.0, 100_000)))
    return out
