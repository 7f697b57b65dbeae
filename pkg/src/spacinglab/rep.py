"""Type-A root data, Weyl dimensions, weights and torus spectra of su(n) modules.

Everything here is exact. Weights are stored as integer vectors mu in Z^n
(the epsilon basis, before projecting to trace zero); the torus generator
alpha_j then acts on the weight space mu by mu_j - mu_{j+1}.

Inner products use the trace form on the trace-zero hyperplane of R^n. The
Killing form of su(n) is 2n times the trace form, so the dual form (and the
Casimir scalar below) is 1/(2n) times the trace-form value under the Killing
normalization.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .errors import InputError, InvariantViolation

Weight = Tuple[int, ...]


@dataclass(frozen=True)
class TypeARootSystem:
    rank: int

    def __post_init__(self):
        if self.rank < 1:
            raise InputError("rank must be >= 1")

    @property
    def n(self) -> int:
        return self.rank + 1

    @property
    def weyl_order(self) -> int:
        return math.factorial(self.n)

    @property
    def positive_roots(self) -> List[Tuple[int, ...]]:
        n = self.n
        out = []
        for i in range(n):
            for j in range(i + 1, n):
                v = [0] * n
                v[i], v[j] = 1, -1
                out.append(tuple(v))
        return out

    @property
    def simple_roots(self) -> List[Tuple[int, ...]]:
        return [r for r in self.positive_roots if r.index(1) + 1 == r.index(-1)]

    @property
    def fundamental_weights(self) -> List[Tuple[Fraction, ...]]:
        n = self.n
        return [tuple(Fraction(int(i < j)) - Fraction(j, n) for i in range(n))
                for j in range(1, n)]

    @property
    def delta(self) -> Tuple[Fraction, ...]:
        return tuple(Fraction(self.n - 1 - 2 * i, 2) for i in range(self.n))

    def weight_vector(self, lam) -> Tuple[Fraction, ...]:
        """sum_j lam_j f_j as a trace-zero vector."""
        lam = _coeffs(self, lam)
        vec = [Fraction(0)] * self.n
        for c, f in zip(lam, self.fundamental_weights):
            for i in range(self.n):
                vec[i] += c * f[i]
        return tuple(vec)

    @staticmethod
    def inner(u, v) -> Fraction:
        return sum((Fraction(a) * b for a, b in zip(u, v)), Fraction(0))


def su(n: int) -> TypeARootSystem:
    return TypeARootSystem(n - 1)


def _coeffs(rs: TypeARootSystem, lam) -> Tuple[int, ...]:
    lam = tuple(int(c) for c in lam)
    if len(lam) != rs.rank:
        raise InputError("expected %d coefficients, got %d" % (rs.rank, len(lam)))
    if any(c < 0 for c in lam):
        raise InputError("highest weight must be dominant (non-negative coefficients)")
    return lam


def partition(lam: Sequence[int]) -> Tuple[int, ...]:
    """Fundamental-weight coefficients -> partition p with p_i = sum_{k >= i} lam_k, p_n = 0."""
    out = [0]
    for c in reversed(lam):
        out.append(out[-1] + int(c))
    return tuple(reversed(out))


def _pairings(rs, lam):
    lv = rs.weight_vector(lam)
    d = rs.delta
    return [(rs.inner(lv, a), rs.inner(d, a)) for a in rs.positive_roots]


def weyl_dimension(rs: TypeARootSystem, lam) -> int:
    lam = _coeffs(rs, lam)
    prod = Fraction(1)
    for la, da in _pairings(rs, lam):
        prod *= (la + da) / da
    if prod.denominator != 1:
        raise InvariantViolation("Weyl product is not an integer: %s" % prod)
    return int(prod)


def dimension_lower_bound(rs: TypeARootSystem, lam) -> Fraction:
    """prod over roots with <lam, a> > 0 of <lam, a>/<delta, a>."""
    lam = _coeffs(rs, lam)
    prod = Fraction(1)
    for la, da in _pairings(rs, lam):
        if la > 0:
            prod *= la / da
    return prod


def weight_count_bound(rs: TypeARootSystem, lam) -> int:
    lam = _coeffs(rs, lam)
    return rs.weyl_order * math.prod(c + 1 for c in lam)


def orbit_dim_and_ratio(rs: TypeARootSystem, lam, m: int):
    """(q, c(lam) * m^(r - q)) where q counts roots with <lam, a> > 0."""
    if m < 1:
        raise InputError("m must be >= 1")
    lam = _coeffs(rs, lam)
    q = sum(1 for la, _ in _pairings(rs, lam) if la > 0)
    c = Fraction(weight_count_bound(rs, lam)) / dimension_lower_bound(rs, lam)
    return q, c * Fraction(m) ** (rs.rank - q)


def casimir_scalar(rs: TypeARootSystem, lam) -> Fraction:
    """<lam, lam + 2 delta> in the trace form."""
    lv = rs.weight_vector(lam)
    return rs.inner(lv, [a + 2 * d for a, d in zip(lv, rs.delta)])


# ------------------------------------------------------------------- weights

def gt_weights(rs: TypeARootSystem, lam) -> Counter:
    """Weight multiset of the irreducible module, by Gelfand-Tsetlin patterns.

    Each pattern is one basis vector; its weight is the vector of successive
    row-sum differences. Returned as a Counter {mu: multiplicity}.
    """
    top = partition(_coeffs(rs, lam))
    return Counter(dict(_gt_below(top)))


@lru_cache(maxsize=None)
def _gt_below(row: Tuple[int, ...]) -> Tuple[Tuple[Weight, int], ...]:
    k = len(row)
    if k == 1:
        return (((row[0],), 1),)
    acc: Dict[Weight, int] = {}
    s = sum(row)
    ranges = [range(row[i + 1], row[i] + 1) for i in range(k - 1)]
    for sub in itertools.product(*ranges):
        last = s - sum(sub)
        for w, mult in _gt_below(sub):
            key = w + (last,)
            acc[key] = acc.get(key, 0) + mult
    return tuple(acc.items())


def majorized_weights(rs: TypeARootSystem, lam) -> List[Weight]:
    """Distinct weights by brute force: lattice points in the hull of W.lam.

    For type A an integer vector with the right coordinate sum lies in the
    convex hull of the permutations of p iff it is majorized by p.
    """
    p = partition(_coeffs(rs, lam))
    total, n = sum(p), len(p)
    bound = list(itertools.accumulate(sorted(p, reverse=True)))
    out = []
    for mu in itertools.product(range(p[0] + 1), repeat=n - 1):
        last = total - sum(mu)
        if last < 0 or last > p[0]:
            continue
        w = mu + (last,)
        if all(a <= b for a, b in zip(itertools.accumulate(sorted(w, reverse=True)), bound)):
            out.append(w)
    return out


@dataclass(frozen=True)
class SymPowerBasis:
    n: int
    m: int
    indices: np.ndarray

    def __len__(self):
        return self.indices.shape[0]


def sym_power_basis(n: int, m: int) -> SymPowerBasis:
    """Exponent vectors of degree-m monomials in n variables, x_1^m first."""
    if n < 2 or m < 0:
        raise InputError("need n >= 2 and m >= 0")
    rows = []

    def rec(prefix, left, slots):
        if slots == 1:
            rows.append(prefix + [left])
            return
        for a in range(left, -1, -1):
            rec(prefix + [a], left - a, slots - 1)

    rec([], m, n)
    idx = np.array(rows, dtype=np.int64)
    idx.setflags(write=False)
    return SymPowerBasis(n, m, idx)


@dataclass(frozen=True)
class TorusSpectrum:
    """Eigenvalues of sum_j c_j alpha_j over a weight multiset.

    ``values[i]`` (exact) belongs to ``weights[i]`` and occurs
    ``multiplicities[i]`` times.
    """

    weights: Tuple[Weight, ...]
    values: Tuple[Fraction, ...]
    multiplicities: Tuple[int, ...]

    @property
    def dim(self) -> int:
        return sum(self.multiplicities)

    @property
    def distinct(self) -> int:
        return len(set(self.values))

    @property
    def p(self) -> Fraction:
        return Fraction(self.distinct, self.dim)

    @property
    def zero_mass(self) -> Fraction:
        """Mass at 0 of the default spacing measure of the spectrum."""
        return 1 - self.p

    def as_array(self) -> np.ndarray:
        return np.repeat(np.array([float(v) for v in self.values]), self.multiplicities)


def _exact(c):
    return c if isinstance(c, (int, Fraction)) else Fraction(float(c))


def torus_spectrum(weights: Dict[Weight, int], coeffs) -> TorusSpectrum:
    c = [_exact(x) for x in coeffs]
    ws = sorted(weights)
    vals = tuple(sum((cj * (w[j] - w[j + 1]) for j, cj in enumerate(c)), Fraction(0)) for w in ws)
    return TorusSpectrum(tuple(ws), vals, tuple(weights[w] for w in ws))


def sym_power_spectrum(n: int, m: int, coeffs) -> TorusSpectrum:
    """One eigenvalue sum_j c_j (a_j - a_{j+1}) per monomial x^a of degree m.

    Float coefficients are converted to the exact rationals they represent.
    """
    if len(coeffs) != n - 1:
        raise InputError("need n - 1 coefficients")
    basis = sym_power_basis(n, m)
    return torus_spectrum({tuple(int(v) for v in a): 1 for a in basis.indices}, coeffs)


def weight_spectrum(rs: TypeARootSystem, lam, coeffs) -> TorusSpectrum:
    if len(coeffs) != rs.rank:
        raise InputError("need rank many coefficients")
    return torus_spectrum(gt_weights(rs, lam), coeffs)


def product_spectrum_count(spectra: Sequence[Sequence]) -> int:
    """Distinct componentwise products of eigenvalue lists in a common basis."""
    spectra = [list(s) for s in spectra]
    if not spectra:
        return 0
    if any(len(s) != len(spectra[0]) for s in spectra):
        raise InputError("spectra must have equal length")
    return len({math.prod(vals) for vals in zip(*spectra)})
