"""Formal operator polynomials, rescaling, generic operators and spectral collapse.

Generators are named by strings: ``t1 .. tr`` for the torus generators
alpha_j, ``W`` for the Casimir, ``E{i}{j}`` / ``F{i}{j}`` (i < j) for the
raising and lowering root vectors. Torus generators and the Casimir commute,
so words built only from them are stored sorted; words containing a root
vector keep their order.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Number
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import InputError, InvariantViolation, UnsupportedOperatorError
from .rep import (SymPowerBasis, TypeARootSystem, casimir_scalar, dimension_lower_bound,
                  gt_weights, orbit_dim_and_ratio, partition, su, weyl_dimension)
from .spacing import AtomicMeasure, OrderedTuple, ks_distance, nn_measure
from .torus import TorusPoint, frac, spacing_of

_GEN = re.compile(r"^(?:t(\d+)|W|([EF])(\d)(\d))$")

Word = Tuple[str, ...]


def _parse(g: str):
    m = _GEN.match(g)
    if not m:
        raise InputError("unknown generator %r" % g)
    if m.group(1):
        return (0, int(m.group(1)), 0)
    if g == "W":
        return (1, 0, 0)
    return (2 if m.group(2) == "E" else 3, int(m.group(3)), int(m.group(4)))


def _diagonal(g: str) -> bool:
    return _parse(g)[0] < 2


def _adjoint_letter(g: str) -> str:
    kind, i, j = _parse(g)
    if kind == 2:
        return "F%d%d" % (i, j)
    if kind == 3:
        return "E%d%d" % (i, j)
    return g


def letter_degree(g: str) -> int:
    return 2 if g == "W" else 1


def word_degree(word: Word) -> int:
    return sum(letter_degree(g) for g in word)


# ------------------------------------------------------- symbolic coefficients

@dataclass(frozen=True)
class SymbolicValue:
    """r_0 + r_1 c_1 + ... + r_k c_k with rational r_i, where c_j = sqrt(primes[j]) / denoms[j].

    Square roots of distinct primes are linearly independent over Q together
    with 1, so equality and Q-rank are decided on the rational coordinates.
    """

    coords: Tuple[Fraction, ...]
    primes: Tuple[int, ...]
    denoms: Tuple[int, ...]

    @classmethod
    def rational(cls, r, primes=(), denoms=()):
        return cls((Fraction(r),) + (Fraction(0),) * len(primes), tuple(primes), tuple(denoms))

    @classmethod
    def symbol(cls, j, primes, denoms):
        c = [Fraction(0)] * (len(primes) + 1)
        c[j + 1] = Fraction(1)
        return cls(tuple(c), tuple(primes), tuple(denoms))

    def _lift(self, other):
        if isinstance(other, SymbolicValue):
            if (other.primes, other.denoms) != (self.primes, self.denoms):
                raise InputError("symbolic values over different symbol sets")
            return other
        return SymbolicValue.rational(_rational(other), self.primes, self.denoms)

    def __add__(self, other):
        o = self._lift(other)
        return SymbolicValue(tuple(a + b for a, b in zip(self.coords, o.coords)), self.primes, self.denoms)

    __radd__ = __add__

    def __neg__(self):
        return SymbolicValue(tuple(-a for a in self.coords), self.primes, self.denoms)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __mul__(self, r):
        if isinstance(r, SymbolicValue):
            return NotImplemented
        r = _rational(r)
        return SymbolicValue(tuple(a * r for a in self.coords), self.primes, self.denoms)

    __rmul__ = __mul__

    def __truediv__(self, r):
        return self * (1 / Fraction(_rational(r)))

    def __eq__(self, other):
        if isinstance(other, Number) and not isinstance(other, complex):
            other = SymbolicValue.rational(other, self.primes, self.denoms)
        if not isinstance(other, SymbolicValue):
            return NotImplemented
        return self.coords == other.coords and self.primes == other.primes

    def __hash__(self):
        return hash((self.coords, self.primes))

    def conjugate(self):
        return self

    def symbol_values(self) -> np.ndarray:
        return np.array([math.sqrt(p) / q for p, q in zip(self.primes, self.denoms)])

    def __float__(self):
        return float(self.coords[0]) + float(np.dot([float(c) for c in self.coords[1:]], self.symbol_values()))

    def __abs__(self):
        return abs(float(self))

    def __repr__(self):
        parts = [str(self.coords[0])] + ["%s*sqrt(%d)/%d" % (c, p, q)
                                         for c, p, q in zip(self.coords[1:], self.primes, self.denoms) if c]
        return "Sym(" + " + ".join(parts) + ")"


SymbolicCoefficient = SymbolicValue
EigenvalueVector = SymbolicValue


def _rational(x):
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, complex):
        if x.imag != 0:
            raise InputError("complex value has no rational coordinates")
        x = x.real
    return Fraction(float(x))


def _is_zero(c) -> bool:
    return c == 0


def _conj(c):
    return c.conjugate() if hasattr(c, "conjugate") else c


# ------------------------------------------------------------- operator poly

class OperatorPoly:
    """Finite formal sum of generator words with numeric or symbolic coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Union[Dict, Iterable] = ()):
        items = terms.items() if isinstance(terms, dict) else terms
        acc: Dict[Word, object] = {}
        for word, coeff in items:
            word = tuple(word)
            for g in word:
                _parse(g)
            if all(_diagonal(g) for g in word):
                word = tuple(sorted(word, key=_parse))
            acc[word] = acc[word] + coeff if word in acc else coeff
        self.terms = {w: c for w, c in sorted(acc.items(), key=lambda kv: [_parse(g) for g in kv[0]])
                      if not _is_zero(c)}

    @classmethod
    def gen(cls, name: str, coeff=1) -> "OperatorPoly":
        return cls({(name,): coeff})

    @classmethod
    def scalar(cls, c) -> "OperatorPoly":
        return cls({(): c})

    def __add__(self, other):
        if not isinstance(other, OperatorPoly):
            other = OperatorPoly.scalar(other)
        return OperatorPoly(list(self.terms.items()) + list(other.terms.items()))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-1) * other

    def __mul__(self, other):
        if isinstance(other, OperatorPoly):
            return OperatorPoly([(w1 + w2, c1 * c2)
                                 for w1, c1 in self.terms.items() for w2, c2 in other.terms.items()])
        return OperatorPoly([(w, c * other) for w, c in self.terms.items()])

    def __rmul__(self, other):
        return OperatorPoly([(w, c * other) for w, c in self.terms.items()])

    def __eq__(self, other):
        return isinstance(other, OperatorPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(self.terms.items()))

    def __repr__(self):
        return "OperatorPoly(%r)" % (self.terms,)

    @property
    def degree(self) -> int:
        return max((word_degree(w) for w in self.terms), default=0)

    @property
    def is_diagonal(self) -> bool:
        return all(_diagonal(g) for w in self.terms for g in w)

    def generators(self):
        return sorted({g for w in self.terms for g in w}, key=_parse)


def dagger(p: OperatorPoly) -> OperatorPoly:
    """Formal adjoint: reverse each word, adjoin each letter, conjugate coefficients."""
    return OperatorPoly([(tuple(_adjoint_letter(g) for g in reversed(w)), _conj(c))
                         for w, c in p.terms.items()])


def is_hermitian(p: OperatorPoly, tol: float = 0.0) -> bool:
    d = dagger(p)
    if tol == 0.0:
        return d == p
    keys = set(d.terms) | set(p.terms)
    return all(abs(complex(d.terms.get(k, 0)) - complex(p.terms.get(k, 0))) <= tol for k in keys)


# ------------------------------------------------------------------ rescaling

RESCALING_MODES = ("by-integer", "inverse-dimension", "inverse-parameter")


@dataclass(frozen=True)
class RescalingMap:
    mode: str
    s: Union[int, Fraction]

    def __post_init__(self):
        if self.mode not in RESCALING_MODES:
            raise InputError("unknown rescaling mode %r" % self.mode)
        if not self.s > 0:
            raise InputError("rescaling scale must be positive")


def rescaling_for(mode: str, rs: TypeARootSystem = None, lam=None, m: int = None, s=None) -> RescalingMap:
    """Resolve the scale: s itself, dim V(m lam), or m."""
    if mode == "by-integer":
        return RescalingMap(mode, s)
    if mode == "inverse-dimension":
        return RescalingMap(mode, weyl_dimension(rs, [m * c for c in lam]))
    if mode == "inverse-parameter":
        return RescalingMap(mode, m)
    raise InputError("unknown rescaling mode %r" % mode)


def rescale(p: OperatorPoly, rmap: Union[RescalingMap, str], context=None) -> OperatorPoly:
    """a_I -> a_I / s^|I|. ``context`` is s when a mode name is passed."""
    if not isinstance(rmap, RescalingMap):
        rmap = RescalingMap(rmap, context)
    s = rmap.s
    out = []
    for w, c in p.terms.items():
        k = word_degree(w)
        den = Fraction(s) ** k if isinstance(s, (int, Fraction)) else float(s) ** k
        if isinstance(c, (SymbolicValue, int, Fraction)) and isinstance(den, Fraction):
            out.append((w, c / den if isinstance(c, SymbolicValue) else Fraction(c) / den))
        else:
            out.append((w, c / float(den)))
    return OperatorPoly(out)


# --------------------------------------------------------- representations

@dataclass(frozen=True)
class HighestWeightRep:
    rs: TypeARootSystem
    lam: Tuple[int, ...]


def _rep_data(rep):
    """(weights in basis order, multiplicities, Casimir scalar)."""
    if isinstance(rep, SymPowerBasis):
        rs = su(rep.n)
        lam = (rep.m,) + (0,) * (rep.n - 2)
        ws = [tuple(int(v) for v in a) for a in rep.indices]
        mult = [1] * len(ws)
    elif isinstance(rep, HighestWeightRep):
        rs, lam = rep.rs, tuple(rep.lam)
        W = gt_weights(rs, lam)
        ws = sorted(W)
        mult = [W[w] for w in ws]
    else:
        raise InputError("unsupported representation %r" % (rep,))
    if not ws:
        raise InputError("empty representation")
    return rs, ws, mult, casimir_scalar(rs, lam)


def _letter_eigen(g: str, w, cas, r: int):
    kind, j, _ = _parse(g)
    if kind == 1:
        return cas
    if not 1 <= j <= r:
        raise InputError("torus generator %s out of range for rank %d" % (g, r))
    return w[j - 1] - w[j]


@dataclass(frozen=True)
class DiagonalSpectrum:
    values: Tuple[object, ...]
    multiplicities: Tuple[int, ...]
    weights: Tuple[Tuple[int, ...], ...]

    def floats(self) -> np.ndarray:
        v = np.array([complex(float(x)) if isinstance(x, SymbolicValue) else complex(x) for x in self.values])
        if np.all(v.imag == 0):
            v = v.real
        return np.repeat(v, self.multiplicities)


def diagonal_spectrum(p: OperatorPoly, rep) -> DiagonalSpectrum:
    """Exact eigenvalue per weight space of a torus/Casimir polynomial."""
    if not p.is_diagonal:
        raise UnsupportedOperatorError("only torus generators and the Casimir act diagonally")
    rs, ws, mult, cas = _rep_data(rep)
    vals = []
    for w in ws:
        acc = Fraction(0)
        for word, c in p.terms.items():
            e = Fraction(1)
            for g in word:
                e *= _letter_eigen(g, w, cas, rs.rank)
            term = c * e if isinstance(c, SymbolicValue) else _exact_or_float(c) * e
            acc = term + acc if isinstance(term, SymbolicValue) else acc + term
        vals.append(acc)
    return DiagonalSpectrum(tuple(vals), tuple(mult), tuple(ws))


def _exact_or_float(c):
    if isinstance(c, (int, Fraction)):
        return Fraction(c)
    if isinstance(c, complex):
        return c if c.imag else Fraction(c.real)
    return Fraction(float(c))


def rational_rank(rows: Sequence[Sequence[Fraction]]) -> int:
    """Rank over Q by fraction-exact Gaussian elimination."""
    M = [[Fraction(x) for x in r] for r in rows]
    rank, cols = 0, len(M[0]) if M else 0
    for c in range(cols):
        piv = next((i for i in range(rank, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        for i in range(len(M)):
            if i != rank and M[i][c] != 0:
                f = M[i][c] / M[rank][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[rank])]
        rank += 1
    return rank


def independence_check(values: Sequence) -> bool:
    """True iff the eigenvalues (with multiplicity) are linearly independent over Q."""
    values = list(values)
    if not values:
        raise InputError("empty spectrum")
    vecs = [v.coords if isinstance(v, SymbolicValue) else (_rational(v),) for v in values]
    if len(vecs) > len(vecs[0]):
        return False
    return rational_rank(vecs) == len(vecs)


# ----------------------------------------------------------- generic operator

def _primes(k: int) -> List[int]:
    out, c = [], 2
    while len(out) < k:
        if all(c % p for p in out if p * p <= c):
            out.append(c)
        c += 1
    return out


@dataclass(frozen=True)
class GenericOperator:
    poly: OperatorPoly
    b: Fraction
    primes: Tuple[int, ...]
    denoms: Tuple[int, ...]
    m_max: int

    @property
    def c(self) -> np.ndarray:
        return np.array([math.sqrt(p) / q for p, q in zip(self.primes, self.denoms)])


def generic_operator(n: int, m_max: int) -> GenericOperator:
    """b*W + sum_j c_j t_j on su(n) with c_j = sqrt(p_j) / (n (floor(sqrt p_j) + 1)) in (0, 1/n).

    b = n/(n-1) makes b * (r_{m+1} - r_m) = 2m + 1 + n for the symmetric-power
    ray, which beats the width 2m + 1 of the torus parts, so the spectra of
    different rays lie in disjoint intervals.
    """
    if n < 2 or m_max < 1:
        raise InputError("need n >= 2 and m_max >= 1")
    rs = su(n)
    primes = tuple(_primes(n - 1))
    denoms = tuple(n * (math.isqrt(p) + 1) for p in primes)
    b = Fraction(n, n - 1)
    zero = (0,) * (n - 2)
    for m in range(m_max + 1):
        gap = casimir_scalar(rs, (m + 1,) + zero) - casimir_scalar(rs, (m,) + zero)
        if b * gap < 2 * m + 1:
            raise InvariantViolation("b too small at m=%d" % m)
    terms = [(("W",), SymbolicValue.rational(b, primes, denoms))]
    terms += [(("t%d" % (j + 1),), SymbolicValue.symbol(j, primes, denoms)) for j in range(n - 1)]
    return GenericOperator(OperatorPoly(terms), b, primes, denoms, m_max)


# ----------------------------------------------------------------- norm bound

@dataclass(frozen=True)
class NormBound:
    bound: float
    exact_sup: Optional[float]
    scale: object


def norm_bound(p: OperatorPoly, rs: TypeARootSystem, lam, m: int, mode: Optional[str] = "inverse-dimension") -> NormBound:
    """Operator-norm bound for the rescaled p on V(m*lam), and the exact sup when p is diagonal.

    A generator has norm at most m*|lam| on V(m*lam), |lam| = sum lam_j, since it
    acts factor-wise on a tensor power of fundamentals where it has norm 1.
    With s >= C m^q (C from the dimension lower bound) each word contributes
    |a_I| (|lam| / C)^|I| m^(|I| - q|I|). The Casimir acts by its scalar and
    enters with that exact value divided by s^2.
    """
    lam = tuple(lam)
    mlam = tuple(m * c for c in lam)
    size = sum(lam)
    if mode is None:
        s_exact, s_low = Fraction(1), Fraction(1)
    elif mode == "inverse-parameter":
        s_exact = s_low = Fraction(m)
    elif mode == "inverse-dimension":
        q, _ = orbit_dim_and_ratio(rs, lam, m)
        s_exact = Fraction(weyl_dimension(rs, mlam))
        s_low = dimension_lower_bound(rs, lam) * Fraction(m) ** q
    else:
        raise InputError("unknown mode %r" % mode)
    cas = casimir_scalar(rs, mlam)
    bound = 0.0
    for w, c in p.terms.items():
        a = abs(complex(float(c)) if isinstance(c, SymbolicValue) else complex(c))
        n_cas = sum(1 for g in w if g == "W")
        others = len(w) - n_cas
        bound += a * float(Fraction(m * size) ** others * cas ** n_cas / s_low ** word_degree(w))
    exact = None
    if p.is_diagonal:
        rp = rescale(p, RescalingMap("by-integer", s_exact)) if s_exact != 1 else p
        spec = diagonal_spectrum(rp, HighestWeightRep(rs, mlam))
        exact = _max_abs(spec.values)
    return NormBound(bound, exact, s_exact)


def _max_abs(values):
    best = None
    for v in values:
        a = abs(v) if not isinstance(v, SymbolicValue) else abs(float(v))
        best = a if best is None or a > best else best
    return best


# ------------------------------------------------------------- flow and collapse

def exp_flow_angles(spectrum, t: float) -> TorusPoint:
    e = np.asarray(spectrum, dtype=float).ravel()
    return TorusPoint(frac(e * t))


def collapse_mass(spectrum, t: float) -> float:
    """mu_c of exp(2 pi i t spectrum), evaluated on [0, 1/(2 pi)]."""
    return float(spacing_of(exp_flow_angles(spectrum, t)).cdf(1.0 / (2.0 * math.pi)))


# ------------------------------------------------------------------ reshaping

@dataclass(frozen=True)
class ReshapeResult:
    domain: np.ndarray
    image: np.ndarray
    reshaped: Tuple[np.ndarray, ...]
    distances: Optional[Tuple[float, ...]]
    bounds: Tuple[float, ...]


def spectral_reshape(spectra: Sequence, targets: Sequence, ref=None, check_nested: bool = True) -> ReshapeResult:
    """Send the k-th spectrum (sorted) onto the k-th target tuple (sorted).

    Only the finite graph of the interpolating function is stored. With a
    reference measure, also reports d_KS(mu(X_k), ref) next to the bound
    (N_{k-1} + 2) / N_k, with N_0 = 0.
    """
    spectra = [np.sort(np.asarray(s, dtype=float).ravel()) for s in spectra]
    targets = [np.sort(np.asarray(x, dtype=float).ravel()) for x in targets]
    if len(spectra) != len(targets) or not spectra:
        raise InputError("need one target per spectrum")
    for s, x in zip(spectra, targets):
        if s.size != x.size:
            raise InputError("spectrum and target sizes differ")
        if np.any(np.diff(s) == 0):
            raise InputError("spectra must be simple")
    allv = np.concatenate(spectra)
    if np.unique(allv).size != allv.size:
        raise InputError("spectra of different representations overlap")
    dims = [s.size for s in spectra]
    for k in range(1, len(dims)):
        if dims[k] < k * (dims[k - 1] + 2):
            raise InputError("growth condition N_{k+1} >= k (N_k + 2) fails at k=%d" % k)
    if check_nested:
        for a, b in zip(targets, targets[1:]):
            if not np.all(np.isin(a, b)):
                raise InputError("targets are not nested")
    bounds = tuple((2 + (dims[k - 1] if k else 0)) / dims[k] for k in range(len(dims)))
    dist = None
    if ref is not None:
        dist = tuple(ks_distance(nn_measure(OrderedTuple(x)), ref) for x in targets)
    return ReshapeResult(allv, np.concatenate(targets), tuple(targets), dist, bounds)
