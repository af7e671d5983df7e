import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pickmoments.classifier import PANEL
from pickmoments.gallery import (CounterexampleSpec, amy_counterexample, counterexample_r5_n3, diagonal_rep,
                                 random_rep, scalar_rep)
from pickmoments.moments import (beta, imag_remainder_exact, moment_table_csv, o_term, scalar_moment,
                                 scalar_moments, scalar_moments_beta, telescope_relative, telescope_residual,
                                 vector_moment, vector_moments, weighted_inverse_apply)
from pickmoments.representation import TypeIRep, evaluate

E = np.eye(4)
directions = st.tuples(st.floats(0.05, 20), st.floats(0.05, 20))


def test_weighted_inverse_identity():
    rep = random_rep(3, 0)
    rep_i = TypeIRep(rep.A, np.eye(3), rep.alpha)
    np.testing.assert_allclose(weighted_inverse_apply(rep_i, (2, 5), rep.alpha), rep.alpha / 2)


def test_weighted_inverse_counterexample():
    t, b = 0.3, (1.7, 0.4)
    rep = amy_counterexample(CounterexampleSpec(3, t))
    np.testing.assert_allclose(weighted_inverse_apply(rep, b, E[2]), E[2] / (t * b[0] + (1 - t) * b[1]))


def test_weighted_inverse_projection():
    rep = diagonal_rep([0.0, 0.0], [1.0, 0.0])
    np.testing.assert_allclose(weighted_inverse_apply(rep, (3, 4), [1, 1]), [1 / 3, 1 / 4])


def test_vector_moment_k1():
    rep = random_rep(4, 1)
    b = (0.7, 1.3)
    bY = rep.Y_dense * b[0] + (np.eye(4) - rep.Y_dense) * b[1]
    np.testing.assert_allclose(vector_moment(rep, b, 1), np.linalg.solve(bY, rep.alpha), atol=1e-14)


def test_vector_moment_counterexample_k2():
    rep = amy_counterexample(CounterexampleSpec(3, 0.5))
    np.testing.assert_allclose(vector_moment(rep, (1, 1), 2), E[1] + E[3])


@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_vector_moment_scalar(k):
    lam, b1 = 1.5, 0.8
    np.testing.assert_allclose(vector_moment(scalar_rep(lam), (b1, 3.0), k), [lam ** (k - 1) / b1 ** k])


def test_beta_identity_and_counterexample():
    rep = random_rep(3, 2)
    rep_i = TypeIRep(rep.A, np.eye(3), rep.alpha)
    np.testing.assert_allclose(beta(rep_i, (4, 9), 0).value, rep.alpha / 2)
    for t in (0.25, 0.5, 1.0):
        np.testing.assert_allclose(beta(amy_counterexample(CounterexampleSpec(3, t)), (1, 1), 1).value,
                                   E[1] + E[3], atol=1e-15)


@pytest.mark.parametrize("k", [0, 1, 4])
def test_beta_scalar(k):
    lam, b1 = -0.6, 2.5
    np.testing.assert_allclose(beta(scalar_rep(lam), (b1, 1.0), k).value, [lam ** k / b1 ** (k + 0.5)])


def test_scalar_moment_examples():
    assert scalar_moment(scalar_rep(0.0), (2.5, 1), 1) == pytest.approx(1 / 2.5)
    rep = amy_counterexample(CounterexampleSpec(3, 0.5))
    assert scalar_moment(rep, (1, 1), 3) == pytest.approx(2, abs=1e-14)
    assert scalar_moment(rep, (1, 1), 5) == pytest.approx(8, abs=1e-13)
    np.testing.assert_allclose(scalar_moments(rep, (1, 1), 6), [1, 0, 2, 0, 8, 0], atol=1e-13)


@given(st.sampled_from([0.25, 0.5, 0.75]), directions)
def test_r5_symbolic_oracle(t, b):
    rep = amy_counterexample(CounterexampleSpec(3, t))
    assert scalar_moment(rep, b, 5) == pytest.approx(counterexample_r5_n3(t, b), rel=1e-11)


@given(st.integers(1, 6), st.integers(0, 10 ** 6), directions, st.integers(1, 7))
def test_beta_route_matches_vector_route(dim, seed, b, K):
    rep = random_rep(dim, seed)
    a, c = scalar_moments(rep, b, K), scalar_moments_beta(rep, b, K)
    scale = max(1.0, max(abs(x) for x in a))
    np.testing.assert_allclose(a, c, atol=1e-9 * scale)


@given(st.integers(1, 6), st.integers(0, 10 ** 6), directions)
def test_odd_moments_are_positive(dim, seed, b):
    rs = scalar_moments(random_rep(dim, seed), b, 5)
    assert rs[0] > 0 and rs[2] >= -1e-12 and rs[4] >= -1e-12


@given(st.integers(1, 5), st.integers(0, 10 ** 6), directions, st.floats(0.1, 10), st.integers(1, 6))
def test_homogeneity(dim, seed, b, lam, k):
    rep = random_rep(dim, seed)
    a = scalar_moment(rep, (lam * b[0], lam * b[1]), k)
    c = lam ** -k * scalar_moment(rep, b, k)
    assert a == pytest.approx(c, rel=1e-8, abs=1e-10 * lam ** -k * (1 + abs(scalar_moment(rep, b, 1))))


def test_complex_continuation_reduces_to_real():
    rep = random_rep(4, 5)
    b = (0.8, 1.3)
    real = scalar_moments(rep, b, 5)
    cplx = scalar_moments(rep, (0.8 + 0j, 1.3 + 1e-300j), 5)
    np.testing.assert_allclose(np.real(cplx), real, rtol=1e-12)


def test_complex_continuation_is_analytic():
    rep = random_rep(3, 6)
    b = (1.0 + 0.3j, 0.7 - 0.2j)
    lam = np.exp(0.4j)
    for k in range(1, 5):
        a = scalar_moments(rep, (lam * b[0], lam * b[1]), k, check_real=False)[-1]
        c = lam ** -k * scalar_moments(rep, b, k, check_real=False)[-1]
        assert abs(a - c) <= 1e-12 * (1 + abs(c))


def test_complex_direction_returns_complex():
    vals = scalar_moments(random_rep(3, 0), (1 + 0.5j, 1.0), 3, check_real=False)
    assert all(isinstance(v, complex) for v in vals)


def test_telescope_scalar_closed_form():
    lam = 0.7
    rep = scalar_rep(lam)
    for s in (1.0, 10.0, 1e4):
        assert telescope_residual(rep, (1.0, 2.0), s, 1) < 1e-14
        h = evaluate(rep, (1j * s, 2j * s))
        assert h == pytest.approx(1 / (lam - 1j * s), rel=1e-15)


def test_telescope_counterexample():
    rep = amy_counterexample(CounterexampleSpec(4, 0.3))
    for N in (1, 2, 3):
        assert telescope_residual(rep, (2, 1), 50.0, N) <= 1e-10


def test_telescope_random_dim6():
    assert telescope_residual(random_rep(6, 11), (1, 3), 100.0, 2) <= 1e-10


@given(st.integers(1, 8), st.integers(0, 10 ** 6), st.sampled_from(PANEL), st.sampled_from([10.0, 1e3, 1e5]),
       st.integers(1, 4))
def test_telescope_property(dim, seed, b, s, N):
    assert telescope_relative(random_rep(dim, seed), b, s, N) <= 1e-9


@given(st.integers(1, 6), st.integers(0, 10 ** 6), st.integers(1, 3))
def test_o_term_decays_like_r2N(dim, seed, N):
    rep = random_rep(dim, seed)
    b = (0.6, 1.1)
    r2N = scalar_moment(rep, b, 2 * N)
    for s in (1e6, 1e8):
        v = o_term(rep, b, s, N)
        assert abs(v - 1j * r2N / s) <= 1e-3 * abs(r2N) / s + 1e-9 / s ** 2 * (1 + abs(r2N))


def test_imag_remainder_exact_measure_oracle():
    # one atom at 1: J(s) = s^2 / (1 + s^2)
    rep = scalar_rep(1.0)
    for s in (1.0, 10.0, 1e3):
        assert imag_remainder_exact(rep, (1, 1), s, 1) == pytest.approx(s * s / (1 + s * s))


def test_imag_remainder_exact_limit_is_r3():
    rep = amy_counterexample(CounterexampleSpec(3, 0.5))
    assert imag_remainder_exact(rep, (1, 1), 1e6, 2) == pytest.approx(-2, rel=1e-10)


def test_moment_table_csv():
    rep = amy_counterexample(CounterexampleSpec(3, 0.5))
    lines = moment_table_csv(rep, [(1, 1)], 5).splitlines()
    assert lines[0] == "k,b1,b2,re_r,im_r,beta_check"
    assert lines[5].split(",")[:4] == ["5", "1", "1", "8"]


def test_vector_moments_length():
    assert len(vector_moments(random_rep(2, 0), (1, 1), 4)) == 4
    with pytest.raises(ValueError):
        vector_moments(random_rep(2, 0), (1, 1), 0)
