"""Classical limit on symmetric-power rays of SU(n).

States live in Sym^m(C^n). Internally coefficients are stored in the
orthonormal basis e_a = x^a / |x^a| of the invariant inner product
<x^a, x^a> = a_1! ... a_n! / m!, together with a log scale factor so that
large rays do not overflow.

Generator actions (1-based indices, i < j):
    t_j : x^a -> (a_j - a_{j+1}) x^a
    E_ij = x_i d/dx_j,  F_ij = x_j d/dx_i = E_ij^dagger
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Sequence, Tuple

import numpy as np

from .errors import InputError, UnsupportedOperatorError
from .operators import OperatorPoly, _parse
from .rep import sym_power_basis


@dataclass(frozen=True)
class SymRep:
    n: int
    m: int

    @property
    def indices(self) -> np.ndarray:
        return _basis(self.n, self.m)[0]

    @property
    def dim(self) -> int:
        return self.indices.shape[0]

    def log_norms(self) -> np.ndarray:
        """log <x^a, x^a>."""
        a = self.indices
        lg = np.vectorize(math.lgamma)
        return lg(a + 1).sum(axis=1) - math.lgamma(self.m + 1)


@lru_cache(maxsize=None)
def _basis(n: int, m: int):
    idx = sym_power_basis(n, m).indices
    lookup = {tuple(int(v) for v in a): k for k, a in enumerate(idx)}
    return idx, lookup


@lru_cache(maxsize=None)
def _action(n: int, m: int, g: str):
    """('diag', values) or ('move', src, dst, coef) in the orthonormal basis."""
    idx, lookup = _basis(n, m)
    kind, i, j = _parse(g)
    if kind == 0:
        if not 1 <= i < n:
            raise InputError("torus generator %s out of range for n=%d" % (g, n))
        return ("diag", (idx[:, i - 1] - idx[:, i]).astype(float))
    if kind == 1:
        raise UnsupportedOperatorError("the Casimir has no single-generator symbol here")
    if not 1 <= i < j <= n:
        raise InputError("root vector %s out of range for n=%d" % (g, n))
    src, dst, coef = [], [], []
    for k, a in enumerate(idx):
        a = list(int(v) for v in a)
        take, give = (j - 1, i - 1) if kind == 2 else (i - 1, j - 1)
        if a[take] == 0:
            continue
        b = list(a)
        b[take] -= 1
        b[give] += 1
        src.append(k)
        dst.append(lookup[tuple(b)])
        coef.append(math.sqrt(a[take] * (a[give] + 1)))
    return ("move", np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64), np.array(coef))


def act(g: str, n: int, m: int, v: np.ndarray) -> np.ndarray:
    op = _action(n, m, g)
    if op[0] == "diag":
        return op[1] * v
    out = np.zeros_like(v)
    np.add.at(out, op[2], op[3] * v[op[1]])
    return out


def generator_matrix(g: str, n: int, m: int) -> np.ndarray:
    """Dense matrix of a generator in the orthonormal basis (small reps only)."""
    D = SymRep(n, m).dim
    return np.column_stack([act(g, n, m, np.eye(D, dtype=complex)[:, k]) for k in range(D)])


@dataclass(frozen=True)
class RepState:
    n: int
    m: int
    coeffs: np.ndarray          # orthonormal-basis coefficients
    log_scale: float = 0.0      # true vector = exp(log_scale) * coeffs

    def norm_sq_log(self) -> float:
        return 2 * self.log_scale + math.log(float(np.vdot(self.coeffs, self.coeffs).real))

    def monomial_coeffs(self) -> np.ndarray:
        """Coefficients on the monomials x^a (may overflow for large m)."""
        return np.exp(self.log_scale - 0.5 * SymRep(self.n, self.m).log_norms()) * self.coeffs


def highest_weight_state(n: int, m: int) -> RepState:
    v = np.zeros(SymRep(n, m).dim, dtype=complex)
    v[0] = 1.0
    return RepState(n, m, v)


def _params(w, n=None) -> np.ndarray:
    w = np.atleast_1d(np.asarray(w, dtype=complex)).ravel()
    if n is not None and w.size != n - 1:
        raise InputError("need n - 1 = %d lowering parameters" % (n - 1))
    return w


def lowering_state(n: int, m: int, w) -> RepState:
    """exp(sum_j w_j F_{1,j+1}) applied to x_1^m, summed as a terminating series."""
    if m < 1:
        raise InputError("m must be >= 1")
    w = _params(w, n)
    term = highest_weight_state(n, m).coeffs
    parts, logs = [term], [0.0]
    lt = 0.0
    for k in range(1, m + 1):
        nxt = np.zeros_like(term)
        for j, wj in enumerate(w):
            if wj != 0:
                nxt += wj * act("F1%d" % (j + 2), n, m, term)
        nxt /= k
        s = float(np.max(np.abs(nxt)))
        if s == 0.0:
            break
        # power-of-two rescale: exact, and safe for subnormal s
        e = math.frexp(s)[1]
        term = np.ldexp(nxt.real, -e) + 1j * np.ldexp(nxt.imag, -e)
        lt += e * math.log(2.0)
        parts.append(term)
        logs.append(lt)
    top = max(logs)
    v = sum(p * math.exp(l - top) for p, l in zip(parts, logs))
    return RepState(n, m, v, top)


def torus_act(state: RepState, theta: Sequence[float]) -> RepState:
    """Apply diag(exp(i theta_1), ..., exp(i theta_n)) to a state."""
    th = np.asarray(theta, dtype=float)
    ph = np.exp(1j * (SymRep(state.n, state.m).indices @ th))
    return RepState(state.n, state.m, ph * state.coeffs, state.log_scale)


def expectation(word: Sequence[str], state: RepState) -> complex:
    """<x, rho(g_1) ... rho(g_p) x> / <x, x>."""
    x = state.coeffs
    nx = np.vdot(x, x)
    if nx == 0:
        raise InputError("zero state")
    v = x
    for g in reversed(tuple(word)):
        v = act(g, state.n, state.m, v)
    return complex(np.vdot(x, v) / nx)


def expectation_poly(p: OperatorPoly, state: RepState) -> complex:
    return complex(sum(complex(c) * expectation(w, state) for w, c in p.terms.items()))


def _check_poly(p: OperatorPoly):
    for w in p.terms:
        if "W" in w:
            raise UnsupportedOperatorError("the Casimir has no single-generator symbol here")


def cl_exact(p: OperatorPoly, point, n: int = None) -> complex:
    """sum_I a_I prod_{g in I} cl(g), with cl(g) the level-1 expectation at the point."""
    _check_poly(p)
    w = _params(point)
    n = w.size + 1 if n is None else n
    st = lowering_state(n, 1, w)
    cache: Dict[str, complex] = {}
    total = 0j
    for word, c in p.terms.items():
        prod = 1 + 0j
        for g in word:
            if g not in cache:
                cache[g] = expectation((g,), st)
            prod *= cache[g]
        total += complex(c) * prod
    return total


def cl_approx(p: OperatorPoly, point, level: int, n: int = None) -> complex:
    """sum_I a_I level^(-|I|) <I> at the level-`level` state with the same chart point."""
    _check_poly(p)
    if level < 1:
        raise InputError("level must be >= 1")
    w = _params(point)
    n = w.size + 1 if n is None else n
    st = lowering_state(n, level, w)
    return complex(sum(complex(c) * level ** (-len(word)) * expectation(word, st)
                       for word, c in p.terms.items()))


def factorization_gap(xi: str, eta: str, point, level: int, n: int = None) -> float:
    P = OperatorPoly.gen
    joint = cl_approx(P(xi) * P(eta), point, level, n)
    return abs(joint - cl_approx(P(xi), point, level, n) * cl_approx(P(eta), point, level, n))


def norm_power_law(n: int, point, m: int) -> Tuple[float, float, float]:
    """(|u.v_max|^2 at level m, the same at level 1, ratio of the first to the second^m)."""
    w = _params(point, n)
    lm = lowering_state(n, m, w).norm_sq_log()
    l1 = lowering_state(n, 1, w).norm_sq_log()
    big = math.exp(lm) if lm < 709 else math.inf
    return big, math.exp(l1), math.exp(lm - m * l1)


# -------------------------------------------------------------- su(2) chart

def chart_bracket(f, g, w: complex, h: float = 1e-5) -> float:
    """Poisson bracket on the su(2) chart w = u + iv.

    The chart form is omega = -4 du ^ dv / (1 + |w|^2)^2: the area form of the
    unit sphere, oriented so that mu(v_max) matches the highest weight. Then
    {f, g} = -((1 + |w|^2)^2 / 4) (f_u g_v - f_v g_u).
    """
    def d(fun, dz):
        return (fun(w + dz * h) - fun(w - dz * h)) / (2 * h)

    fu, fv, gu, gv = d(f, 1), d(f, 1j), d(g, 1), d(g, 1j)
    return float(-((1 + abs(w) ** 2) ** 2 / 4) * (fu * gv - fv * gu))


def dirac_residual(xi: OperatorPoly, eta: OperatorPoly, w: complex, h: float = 1e-5) -> float:
    """|cl(i[xi, eta]) - 2 {cl(xi), cl(eta)}| for degree-1 hermitian xi, eta on su(2)."""
    def f(z):
        return cl_exact(xi, [z]).real

    def g(z):
        return cl_exact(eta, [z]).real

    comm = 1j * (xi * eta - eta * xi)
    lhs = expectation_poly(comm, lowering_state(2, 1, [w]))
    return abs(lhs.real - 2 * chart_bracket(f, g, w, h)) + abs(lhs.imag)
