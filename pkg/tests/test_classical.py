import cmath

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spacinglab import InputError, UnsupportedOperatorError
from spacinglab.classical import (cl_approx, cl_exact, dirac_residual, expectation, factorization_gap,
                                  generator_matrix, highest_weight_state, lowering_state, norm_power_law,
                                  torus_act)
from spacinglab.operators import OperatorPoly

P = OperatorPoly.gen
cplx = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)


def comm(a, b):
    return a @ b - b @ a


@pytest.mark.parametrize("n,m", [(2, 3), (3, 2), (3, 4)])
def test_commutation_relations(n, m):
    E, F, H = (generator_matrix(g, n, m) for g in ("E12", "F12", "t1"))
    assert np.allclose(comm(E, F), H)
    assert np.allclose(comm(H, E), 2 * E)
    assert np.allclose(comm(H, F), -2 * F)
    assert np.allclose(generator_matrix("E13" if n > 2 else "E12", n, m).conj().T,
                       generator_matrix("F13" if n > 2 else "F12", n, m))


def test_highest_weight_expectations():
    st_ = highest_weight_state(3, 5)
    assert expectation(("t1",), st_) == 5
    assert expectation(("t2",), st_) == 0
    assert expectation(("E12",), st_) == 0


@given(cplx)
def test_su2_symbols(w):
    r = abs(w) ** 2
    assert cl_exact(P("t1"), [w]) == pytest.approx((1 - r) / (1 + r), abs=1e-12)
    assert cl_exact(P("E12"), [w]) == pytest.approx(w / (1 + r), abs=1e-12)
    assert cl_approx(P("t1"), [w], 7) == pytest.approx(cl_exact(P("t1"), [w]), abs=1e-12)


@pytest.mark.parametrize("level", [8, 32, 128])
def test_factorization_gap_is_variance(level):
    # <t1^2> - <t1>^2 on the level-m coherent state is m * 4|w|^2 / (1 + |w|^2)^2
    assert factorization_gap("t1", "t1", [1.0], level, n=2) == pytest.approx(1.0 / level, rel=1e-10)


@given(st.tuples(cplx, cplx), st.integers(1, 6))
def test_norm_power_law(w, m):
    big, small, ratio = norm_power_law(3, list(w), m)
    assert small == pytest.approx(1 + abs(w[0]) ** 2 + abs(w[1]) ** 2)
    assert ratio == pytest.approx(1.0, abs=1e-10)


def test_norm_power_law_large_level_overflow_guard():
    big, small, ratio = norm_power_law(2, [4.0], 512)
    assert big == float("inf") and ratio == pytest.approx(1.0, abs=1e-9)


@given(cplx, st.lists(st.floats(-3, 3), min_size=3, max_size=3))
def test_torus_action_keeps_diagonal_expectations(w, theta):
    s = lowering_state(3, 3, [w, 0.5])
    t = torus_act(s, theta)
    assert expectation(("t1",), t) == pytest.approx(expectation(("t1",), s), abs=1e-9)
    phase = cmath.exp(1j * (theta[0] - theta[1]))
    assert expectation(("E12",), t) == pytest.approx(phase.conjugate() * expectation(("E12",), s), abs=1e-9)


@pytest.mark.parametrize("w", [0.3, 1.0 + 0.5j, -2.0j])
def test_dirac_correspondence_on_su2(w):
    X = P("E12") + P("F12")
    Y = -1j * (P("E12") - P("F12"))
    H = P("t1")
    for a, b in ((X, Y), (Y, H), (H, X)):
        assert dirac_residual(a, b, w) < 1e-6


def test_errors():
    with pytest.raises(UnsupportedOperatorError):
        cl_exact(P("W"), [1.0])
    with pytest.raises(InputError):
        lowering_state(3, 2, [1.0])
    with pytest.raises(InputError):
        cl_approx(P("t1"), [1.0], 0)
