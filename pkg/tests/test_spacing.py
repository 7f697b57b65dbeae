import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st
from hypothesis.extra.numpy import arrays

from spacinglab import (AtomicMeasure, ConfigurationError, InputError, OrderedTuple, ReferenceMeasure,
                        approx_tuple, histogram, ks_distance, mgrid_build, mgrid_ks, nn_measure,
                        nn_measure_circle, nn_measure_naive)

POISSON = ReferenceMeasure.poisson()
reals = st.floats(-1e3, 1e3, allow_nan=False)
tuples = arrays(float, st.integers(2, 40), elements=reals).filter(lambda v: np.ptp(v) > 1e-6)
spread = arrays(float, st.integers(1, 40), elements=st.floats(0.01, 10)).map(
    lambda g: np.concatenate([[0.0], np.cumsum(g)]))
angles = arrays(float, st.integers(2, 40), elements=st.floats(0, 2 * math.pi, exclude_max=True))


def test_default_measure_small_tuple():
    mu = nn_measure([0.0, 1.0, 3.0])
    assert mu.atoms == [(1.0, 1 / 3), (2.0, 1 / 3)]
    assert mu.total_mass == pytest.approx(2 / 3)


def test_mu2_normalization():
    mu = nn_measure([0.0, 1.0, 3.0], "mu2")
    assert np.allclose(mu.locations, [2 / 3, 4 / 3])
    assert mu.mean() == pytest.approx(1.0)


def test_coincident_points_merge_exactly():
    mu = nn_measure(np.zeros(10))
    assert mu.atoms == [(0.0, 0.9)]


def test_bad_inputs():
    with pytest.raises(InputError):
        OrderedTuple(np.array([1.0, 0.0]))
    with pytest.raises(InputError):
        OrderedTuple(np.array([1.0]))
    with pytest.raises(ConfigurationError):
        nn_measure([0, 1, 2], "other")
    with pytest.raises(InputError):
        nn_measure_circle([0.0, 7.0])
    with pytest.raises(InputError):
        nn_measure_naive([0.0, 1.0], N=3)


@given(tuples)
def test_default_mean_is_one_and_mass_deficit(v):
    mu = nn_measure(v)
    N = v.size
    assert mu.mean() == pytest.approx(1.0, rel=1e-9)
    assert mu.total_mass == pytest.approx((N - 1) / N, rel=1e-12)


@given(spread, st.floats(1e-2, 1e2), reals)
def test_affine_invariance(v, a, b):
    w = a * v + b
    assert nn_measure(w).isclose(nn_measure(v), rtol=1e-6, atol=1e-6)


@given(angles, st.floats(0, 2 * math.pi))
def test_circle_measure_rotation_invariant(x, c):
    y = np.mod(x + c, 2 * math.pi)
    assume(np.all(y < 2 * math.pi))
    mu, nu = nn_measure_circle(x), nn_measure_circle(y)
    assert mu.total_mass == pytest.approx(1.0)
    assert mu.mean() == pytest.approx(1.0)
    assert mu.isclose(nu, rtol=1e-6, atol=1e-7)


@given(angles)
def test_naive_measure_drops_only_the_wrap_gap(x):
    naive, full = nn_measure_naive(x), nn_measure_circle(x)
    assert naive.total_mass == pytest.approx((x.size - 1) / x.size)
    assert ks_distance(naive, full) <= 1.0 / x.size + 1e-12


@given(tuples, tuples)
def test_ks_is_a_bounded_symmetric_distance(u, v):
    a, b = nn_measure(u), nn_measure(v)
    d = ks_distance(a, b)
    assert 0.0 <= d <= 1.0
    assert d == ks_distance(b, a)
    assert ks_distance(a, a) == 0.0


@given(tuples, tuples, tuples)
def test_ks_triangle_inequality(u, v, w):
    a, b, c = nn_measure(u), nn_measure(v), nn_measure(w)
    assert ks_distance(a, c) <= ks_distance(a, b) + ks_distance(b, c) + 1e-12


@given(arrays(float, st.integers(2, 40), elements=st.floats(0, 2 * math.pi, exclude_max=True), unique=True))
def test_ks_to_poisson_matches_scipy(x):
    from scipy.stats import kstest
    mu = nn_measure_circle(x)
    gaps = np.repeat(mu.locations, np.round(mu.masses * x.size).astype(int))
    assert ks_distance(mu, POISSON) == pytest.approx(kstest(gaps, "expon").statistic, abs=1e-12)


@given(tuples, st.integers(2, 60))
def test_mgrid_distance_at_most_twice_ks(v, M):
    mu = nn_measure(v)
    assert mgrid_ks(mu, POISSON, mgrid_build(M, POISSON)) <= 2 * ks_distance(mu, POISSON) + 1e-12


def test_tabulated_exponential_close_to_poisson():
    xs = np.linspace(0, 40, 20001)
    tab = ReferenceMeasure.tabulated(xs, np.exp(-xs))
    assert ks_distance(tab, POISSON) < 1e-6
    assert ks_distance(POISSON, POISSON) == 0.0


@pytest.mark.parametrize("N", [3, 10, 57, 1000])
def test_approx_tuple_without_forced_points(N):
    d = ks_distance(nn_measure(approx_tuple(POISSON, N)), POISSON)
    assert d <= 2.0 / N


@given(st.integers(10, 400), st.lists(st.floats(0, 1), min_size=1, max_size=4))
def test_approx_tuple_forced_points_bound(N, forced):
    X = approx_tuple(POISSON, N, forced)
    assert X.N == N
    assert ks_distance(nn_measure(X), POISSON) <= (2 + len(forced)) / N + 1e-12


def test_approx_tuple_rejects_bad_reference():
    xs = np.linspace(0, 10, 101)
    far = ReferenceMeasure.tabulated(xs, (xs > 5).astype(float))
    with pytest.raises(InputError):
        approx_tuple(far, 10)
    with pytest.raises(InputError):
        approx_tuple(POISSON, 2)


@given(tuples, st.floats(0.05, 2.0))
def test_histogram_has_unit_area(v, w):
    bins = histogram(v, w)
    assert sum((r - l) * d for l, r, d in bins) == pytest.approx(1.0)
    assert bins[0][0] == 0.0


def test_atomic_measure_validation():
    with pytest.raises(InputError):
        AtomicMeasure(np.array([1.0, 0.5]), np.array([0.5, 0.5]))
    with pytest.raises(InputError):
        AtomicMeasure(np.array([-1.0]), np.array([1.0]))
