import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from spacinglab import kernels
from spacinglab._accel import HAVE_NUMBA
from spacinglab.clump import SpacingFunction, _pair_weights

needs_numba = pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")
unit = st.floats(0.0, 1.0, exclude_max=True, allow_nan=False)


@needs_numba
@given(arrays(float, st.tuples(st.integers(1, 6), st.integers(2, 40)), elements=unit))
def test_ks_circle_backends_agree(ph):
    assert np.allclose(kernels.NUMBA.ks_circle(ph), kernels.NUMPY.ks_circle(ph), atol=1e-14)
    assert np.allclose(kernels.NUMBA.circle_gaps(ph), kernels.NUMPY.circle_gaps(ph), atol=1e-12)


@needs_numba
@given(arrays(float, st.tuples(st.integers(1, 5), st.integers(1, 30)),
              elements=st.floats(0, 10, allow_nan=False)),
       st.integers(1, 40))
def test_ks_exponential_backends_agree(g, denom):
    assert np.allclose(kernels.NUMBA.ks_exponential(g, denom), kernels.NUMPY.ks_exponential(g, denom), atol=1e-14)


@needs_numba
@given(st.integers(0, 3), st.floats(0.1, 3.0), st.integers(0, 2**32 - 1))
def test_pair_sums_backends_agree(a, s, seed):
    rng = np.random.default_rng(seed)
    xs = np.sort(rng.random((4, 20)) * 20, axis=1)
    l, r, v = SpacingFunction.indicator(s).arrays()
    w = _pair_weights(a, 20)
    assert np.allclose(kernels.NUMBA.pair_sums(xs, w, l, r, v), kernels.NUMPY.pair_sums(xs, w, l, r, v))


@needs_numba
def test_box_average_backends_agree():
    x = np.array([2 ** 0.5 - 1, 3 ** 0.5 - 1, 5 ** 0.5 - 2])
    lo, hi = np.zeros(3), np.full(3, 0.5)
    a = kernels.NUMBA.box_average(x, lo, hi, -50.0, 0.01, 10_000)
    b = kernels.NUMPY.box_average(x, lo, hi, -50.0, 0.01, 10_000)
    assert a == b


def test_ks_circle_matches_scipy():
    from scipy.stats import kstest
    rng = np.random.default_rng(4)
    ph = rng.random((5, 50))
    for row, d in zip(ph, kernels.ks_circle(ph)):
        g = kernels.circle_gaps(row[None, :])[0]
        assert d == pytest.approx(kstest(g, "expon").statistic, abs=1e-14)


def test_env_flag_selects_numpy():
    env = dict(os.environ, SPACINGLAB_NUMBA="0")
    out = subprocess.run([sys.executable, "-c", "import spacinglab; print(spacinglab.backend())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
