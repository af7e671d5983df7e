import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pickmoments.errors import OrderTooHigh
from pickmoments.gallery import (CounterexampleSpec, amy_counterexample, counterexample_R_closed_form,
                                 counterexample_r5_n3, gallery, heavy_tail_measure, heavy_tail_rep,
                                 random_rep)
from pickmoments.moments import scalar_moment, vector_moment
from pickmoments.numkernel import eig_hermitian


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_counterexample_structure(n):
    rep = amy_counterexample(CounterexampleSpec(n, 0.4))
    d = 2 * (n - 1)
    assert rep.dim == d
    np.testing.assert_allclose(np.sort(rep.y_spectrum()), [0.4] + [1.0] * (d - 1))
    w = eig_hermitian(rep.A)[0]
    np.testing.assert_allclose(w, np.sort(2 * np.cos(2 * np.pi * np.arange(d) / d)), atol=1e-14)
    np.testing.assert_array_equal(rep.alpha, np.eye(d)[0])


def test_spec_validation():
    with pytest.raises(ValueError):
        CounterexampleSpec(1, 0.5)
    with pytest.raises(ValueError):
        CounterexampleSpec(3, 0.0)


@given(st.integers(3, 6), st.sampled_from([0.25, 0.5, 0.75, 1.0]), st.floats(0.1, 5), st.floats(0.1, 5))
def test_closed_form_below_n(n, t, b1, b2):
    spec = CounterexampleSpec(n, t)
    rep = amy_counterexample(spec)
    for k in range(1, n):
        np.testing.assert_allclose(vector_moment(rep, (b1, b2), k), counterexample_R_closed_form(spec, k, (b1, b2)),
                                   atol=1e-12 * b1 ** -k * 2 ** k)


def test_closed_form_refuses_order_n():
    with pytest.raises(OrderTooHigh):
        counterexample_R_closed_form(CounterexampleSpec(3, 0.5), 3, (1, 1))


def test_top_vector_moment_has_rational_factor():
    # R_n carries 1/(t b1 + (1 - t) b2) on e_{n-1}
    n, t, b = 3, 0.5, (1.0, 3.0)
    R = vector_moment(amy_counterexample(CounterexampleSpec(n, t)), b, n)
    # e_{n-1} is reached from both ends of the walk, hence the factor 2
    assert R[n - 1] == pytest.approx(2 / (b[0] ** (n - 1) * (t * b[0] + (1 - t) * b[1])))


def test_r5_closed_form_value():
    assert counterexample_r5_n3(0.5, (1, 1)) == 8
    assert scalar_moment(amy_counterexample(CounterexampleSpec(3, 0.5)), (1, 1), 5) == pytest.approx(8)


def test_heavy_tail_measure():
    m = heavy_tail_measure(4.0, 1000)
    assert m.truncated and len(m.t) == 1000
    assert m.w[1] == pytest.approx(2.0 ** -4)
    with pytest.raises(ValueError):
        heavy_tail_measure(1.0, 100)
    assert heavy_tail_rep(4.0, 100).is_diagonal


def test_random_rep_is_reproducible():
    a, b = random_rep(5, 42), random_rep(5, 42)
    np.testing.assert_array_equal(a.A, b.A)
    assert np.linalg.norm(a.alpha) == pytest.approx(1.0)
    proj = random_rep(6, 1, projection=True)
    assert set(np.round(proj.y_spectrum(), 12)) <= {0.0, 1.0}


def test_gallery_names_are_unique():
    names = [n for n, _ in gallery(n_random=10)]
    assert len(names) == len(set(names))
    assert any(n.startswith("heavy") for n in names)
    assert any("t1.0" in n for n in names)
