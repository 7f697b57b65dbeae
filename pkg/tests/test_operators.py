import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spacinglab import InputError, UnsupportedOperatorError
from spacinglab.classical import SymRep, generator_matrix
from spacinglab.operators import (HighestWeightRep, OperatorPoly, RescalingMap, collapse_mass, dagger,
                                  diagonal_spectrum, generic_operator, independence_check, is_hermitian,
                                  norm_bound, rational_rank, rescale, rescaling_for, spectral_reshape)
from spacinglab.rep import su, sym_power_basis, weyl_dimension
from spacinglab.spacing import ReferenceMeasure, approx_tuple

P = OperatorPoly.gen
diag_letters = st.sampled_from(["t1", "t2", "W"])
letters = st.sampled_from(["t1", "t2", "W", "E12", "F12", "E13", "F23"])
coef = st.fractions(min_value=-5, max_value=5, max_denominator=7)


def polys(alphabet):
    word = st.lists(alphabet, min_size=1, max_size=3).map(tuple)
    return st.lists(st.tuples(word, coef), max_size=4).map(OperatorPoly)


def casimir_matrix(n, m):
    mats = {g: generator_matrix(g, n, m) for g in ["E%d%d" % (i, j) for i in range(1, n) for j in range(i + 1, n + 1)]}
    W = sum(mats[e] @ generator_matrix("F" + e[1:], n, m) + generator_matrix("F" + e[1:], n, m) @ mats[e] for e in mats)
    a = SymRep(n, m).indices
    return W + np.diag((a ** 2).sum(axis=1) - m * m / n)


def poly_matrix(p, n, m):
    D = SymRep(n, m).dim
    out = np.zeros((D, D), dtype=complex)
    for word, c in p.terms.items():
        M = np.eye(D, dtype=complex)
        for g in word:
            M = M @ (casimir_matrix(n, m) if g == "W" else generator_matrix(g, n, m))
        out += complex(c) * M
    return out


@pytest.mark.parametrize("n,m", [(2, 4), (3, 3), (4, 2)])
def test_diagonal_spectrum_matches_dense_matrices(n, m):
    p = P("t1") * P("t1") + Fraction(1, 3) * P("W") + (P("t%d" % (n - 1)) * P("W") if n > 2 else P("W") * P("W"))
    got = np.sort(diagonal_spectrum(p, sym_power_basis(n, m)).floats())
    want = np.sort(np.linalg.eigvals(poly_matrix(p, n, m)).real)
    assert np.allclose(got, want)


def test_casimir_matrix_is_scalar():
    for n, m in [(2, 5), (3, 4)]:
        C = casimir_matrix(n, m)
        assert np.allclose(C, C[0, 0] * np.eye(C.shape[0]))


@given(polys(letters))
def test_dagger_is_an_involution(p):
    assert dagger(dagger(p)) == p
    assert is_hermitian(p + dagger(p))


@given(polys(letters), polys(letters), polys(letters))
def test_product_distributes(p, q, r):
    assert (p + q) * r == p * r + q * r


@given(polys(diag_letters), polys(diag_letters))
def test_diagonal_words_commute(p, q):
    assert p * q == q * p


def test_dagger_swaps_root_vectors():
    assert dagger(P("E13")) == P("F13")
    assert dagger(P("E12") * P("F23")) == P("E23") * P("F12")
    assert is_hermitian(P("t1") + P("t1") * P("t2"))
    assert not is_hermitian(1j * P("E12"))


@given(polys(letters), st.integers(1, 9), st.integers(1, 9))
def test_rescaling_composes(p, s, u):
    assert rescale(rescale(p, "by-integer", s), "by-integer", u) == rescale(p, "by-integer", s * u)


def test_rescaling_is_degree_graded():
    p = P("t1") * P("t2") + 2 * P("W")
    q = rescale(p, RescalingMap("by-integer", 3))
    assert q.terms[("t1", "t2")] == Fraction(1, 9)
    assert q.terms[("W",)] == Fraction(2, 9)
    assert rescaling_for("inverse-dimension", su(3), (1, 1), 2).s == weyl_dimension(su(3), (2, 2))
    assert rescaling_for("inverse-parameter", m=7).s == 7
    with pytest.raises(InputError):
        RescalingMap("nope", 2)


@pytest.mark.parametrize("mode", [None, "inverse-dimension", "inverse-parameter"])
@pytest.mark.parametrize("m", [1, 3, 6])
def test_norm_bound_dominates_exact_sup(mode, m):
    for p in (P("t1"), P("t1") * P("t2") - P("t2"), P("W") + P("t1")):
        nb = norm_bound(p, su(3), (1, 1), m, mode)
        assert nb.exact_sup <= nb.bound + 1e-12


def test_norm_bound_for_root_vectors_has_no_exact_sup():
    nb = norm_bound(P("E12") + P("F12"), su(3), (1, 0), 4)
    assert nb.exact_sup is None and nb.bound > 0


def test_non_diagonal_spectrum_rejected():
    with pytest.raises(UnsupportedOperatorError):
        diagonal_spectrum(P("E12"), sym_power_basis(2, 2))


def test_generic_operator_independence():
    g = generic_operator(3, 3)
    assert 0 < g.c.max() < 1 / 3
    for m in (1,):
        vals = diagonal_spectrum(g.poly, sym_power_basis(3, m)).values
        assert independence_check(vals)
    # a plain torus generator has rational eigenvalues
    assert not independence_check(diagonal_spectrum(P("t1"), sym_power_basis(2, 2)).values)


def test_generic_operator_rays_are_disjoint():
    g = generic_operator(2, 6)
    spans = []
    for m in range(7):
        v = diagonal_spectrum(g.poly, sym_power_basis(2, m)).floats()
        spans.append((v.min(), v.max()))
    assert all(a[1] < b[0] for a, b in zip(spans, spans[1:]))


def test_rational_rank():
    F = Fraction
    assert rational_rank([[F(1), F(2)], [F(2), F(4)]]) == 1
    assert rational_rank([[F(1), F(0)], [F(1, 3), F(1)]]) == 2


def test_spectral_reshape():
    ref = ReferenceMeasure.poisson()
    dims = [3, 10, 48]
    spectra = [np.arange(d) + 1000.0 * k for k, d in enumerate(dims)]
    targets = [approx_tuple(ref, d).values for d in dims]
    r = spectral_reshape(spectra, targets, ref=ref, check_nested=False)
    assert r.bounds == (2 / 3, 5 / 10, 12 / 48)
    assert all(d <= b for d, b in zip(r.distances, r.bounds))
    with pytest.raises(InputError):
        spectral_reshape([np.arange(3.0), np.arange(4.0) + 10], [np.arange(3.0), np.arange(4.0)], check_nested=False)


def test_collapse_mass_extremes():
    assert collapse_mass(np.zeros(10), 1.0) == pytest.approx(0.9)
    assert collapse_mass(np.arange(10) / 10, 1.0) < 0.01 + 1e-12
