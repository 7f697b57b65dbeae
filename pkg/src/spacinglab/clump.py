"""Sep / Clump / TClump sums, their torus averages and the finite-N estimates.

Clump sums run over strictly increasing index tuples. With sorted x only the
two end points of an index tuple enter f, so

    Clump(a, f, X) = sum_{i < j} C(j - i - 1, a) f(x_j - x_i).

``strict=False`` switches to non-decreasing index tuples, where the weight
becomes C(j - i + a, a) and the diagonal i = j contributes f(0).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.special import comb

from . import kernels
from .errors import ConfigurationError, InputError
from .torus import (BLOCK, McConfig, TorusPoint, _block, jackknife)


@dataclass(frozen=True)
class SpacingFunction:
    """f = sum_q v_q * indicator of the closed interval [l_q, r_q], with v_q >= 0."""

    intervals: Tuple[Tuple[float, float, float], ...]

    def __post_init__(self):
        iv = tuple((float(l), float(r), float(v)) for l, r, v in self.intervals)
        if any(l > r or v < 0 for l, r, v in iv):
            raise InputError("intervals need l <= r and non-negative values")
        object.__setattr__(self, "intervals", iv)

    @classmethod
    def indicator(cls, lo: float, hi: Optional[float] = None) -> "SpacingFunction":
        """chi_[0, lo] with one argument, chi_[lo, hi] with two."""
        return cls(((0.0, lo, 1.0),) if hi is None else ((lo, hi, 1.0),))

    @classmethod
    def zero(cls) -> "SpacingFunction":
        return cls(())

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for l, r, v in self.intervals:
            out += v * ((x >= l) & (x <= r))
        return out

    @property
    def alpha(self) -> float:
        return max((max(abs(l), abs(r)) for l, r, v in self.intervals if v > 0), default=0.0)

    @property
    def sup_norm(self) -> float:
        if not self.intervals:
            return 0.0
        pts = np.array(sorted({p for l, r, _ in self.intervals for p in (l, r)}))
        return float(self(pts).max())

    def arrays(self):
        if not self.intervals:
            return np.zeros(1), np.full(1, -1.0), np.zeros(1)
        l, r, v = (np.array(c) for c in zip(*self.intervals))
        return l, r, v


def _sorted(X) -> np.ndarray:
    x = X.phases if isinstance(X, TorusPoint) else X
    return np.sort(np.asarray(x, dtype=float).ravel())


def _pair_weights(a: int, N: int, strict: bool = True) -> np.ndarray:
    d = np.arange(N)
    if strict:
        w = comb(d - 1, a, exact=False)
        w[0] = 0.0
    else:
        w = comb(d + a, a, exact=False)
    return w


def sep(a: int, f: SpacingFunction, X) -> float:
    """Sum of f(x_{i+a+1} - x_i) over consecutive windows of a + 2 points."""
    x = _sorted(X)
    if a + 2 > x.size:
        return 0.0
    return float(f(x[a + 1:] - x[:x.size - a - 1]).sum())


def _clump_rows(a: int, f: SpacingFunction, xs: np.ndarray, strict: bool = True) -> np.ndarray:
    N = xs.shape[1]
    if strict and a + 2 > N:
        return np.zeros(xs.shape[0])
    l, r, v = f.arrays()
    return kernels.pair_sums(xs, _pair_weights(a, N, strict), l, r, v)


def clump(a: int, f: SpacingFunction, X, strict: bool = True) -> float:
    return float(_clump_rows(a, f, _sorted(X)[None, :], strict)[0])


def clump_exhaustive(a: int, f: SpacingFunction, X, strict: bool = True) -> float:
    """Clump by enumerating every index tuple; only for small N."""
    x = _sorted(X)
    if x.size > 14:
        raise ConfigurationError("exhaustive summation is capped at N <= 14")
    gen = itertools.combinations if strict else itertools.combinations_with_replacement
    idx = list(gen(range(x.size), a + 2))
    if not idx:
        return 0.0
    t = np.array(idx)
    return float(f(x[t[:, -1]] - x[t[:, 0]]).sum())


def tclump(k: int, a: int, f: SpacingFunction, X, strict: bool = True) -> float:
    if k < a:
        raise InputError("need k >= a")
    return math.comb(k, a) * clump(k, f, X, strict)


def int_cor_tcor(stat: str, f: SpacingFunction, A: TorusPoint, a: int = 0, k: Optional[int] = None,
                 exhaustive: bool = False) -> float:
    """Int(a), Cor(k) or TCor(k, a): (1/N) times the statistic at N * phases."""
    N = A.N
    x = N * np.sort(A.phases)
    if stat == "Int":
        return sep(a, f, x) / N
    if k is None:
        raise InputError("%s needs k" % stat)
    c = clump_exhaustive(k, f, x) if exhaustive else clump(k, f, x)
    if stat == "Cor":
        return c / N
    if stat == "TCor":
        if k < a:
            raise InputError("need k >= a")
        return math.comb(k, a) * c / N
    raise InputError("unknown statistic %r" % stat)


def alternating_identity_check(a: int, f: SpacingFunction, A: TorusPoint, exhaustive: bool = True) -> float:
    """|Int(a) - sum_{k=a}^{N-2} (-1)^(k-a) TCor(k, a)|."""
    total = math.fsum((-1) ** (k - a) * int_cor_tcor("TCor", f, A, a=a, k=k, exhaustive=exhaustive)
                      for k in range(a, A.N - 1))
    return abs(int_cor_tcor("Int", f, A, a=a) - total)


# ------------------------------------------------------------- Monte Carlo

def tcor_universal(k: int, a: int, f: SpacingFunction) -> float:
    """C(k, a) * integral of f(y) y^k / k! over y >= 0: the ordered-simplex limit."""
    if k < a:
        raise InputError("need k >= a")
    tot = 0.0
    for l, r, v in f.intervals:
        l, r = max(l, 0.0), max(r, 0.0)
        tot += v * (r ** (k + 1) - l ** (k + 1)) / math.factorial(k + 1)
    return math.comb(k, a) * tot


@dataclass(frozen=True)
class TcorReport:
    k: int
    a: int
    N: int
    mean: float
    stderr: float
    variance: float
    universal: float
    bound_rate: float       # |E - universal| <= this
    bound_mean: float       # E <= this
    bound_variance: float   # Var <= this

    @property
    def mean_ok(self) -> bool:
        return self.mean <= self.bound_mean + 3 * self.stderr

    @property
    def variance_ok(self) -> bool:
        return self.variance <= self.bound_variance


def tcor_bounds(k: int, a: int, f: SpacingFunction, N: int):
    """(rate bound, mean bound, variance bound) for TCor(k, a, f) on T_N."""
    al, nf, c = f.alpha, f.sup_norm, math.comb(k, a)
    rate = c * nf * al ** (k + 1) / (math.factorial(k) * N)
    mean = c * nf * al ** (k + 1) / math.factorial(k + 1)
    fl = math.factorial(int(math.floor(k / 2 + 1)))
    var = c ** 2 * nf ** 2 / N * max((2 * al) ** (2 * k + 2), 1.0) * 2 * (k + 2) ** 2 / fl ** 2
    return rate, mean, var


def tcor_samples(k: int, a: int, f: SpacingFunction, N: int, cfg: McConfig) -> np.ndarray:
    """TCor(k, a, f, A) for the Haar samples 0 .. cfg.samples-1 of T_N."""
    nblocks = -(-cfg.samples // BLOCK)
    out = []
    for b in range(nblocks):
        xs = N * np.sort(_block(N, cfg.seed, b), axis=1)
        out.append(math.comb(k, a) * _clump_rows(k, f, xs) / N)
    return np.concatenate(out)[:cfg.samples]


def tcor_mc(k: int, a: int, f: SpacingFunction, N: int, cfg: McConfig) -> TcorReport:
    if cfg.samples < 100:
        raise ConfigurationError("need at least 100 samples")
    if k < a:
        raise InputError("need k >= a")
    vals = tcor_samples(k, a, f, N, cfg)
    mean, se = jackknife(vals)
    rate, mb, vb = tcor_bounds(k, a, f, N)
    return TcorReport(k, a, N, float(mean), float(se), float(np.var(vals, ddof=1)),
                      tcor_universal(k, a, f), rate, mb, vb)


def int_samples(a: int, f: SpacingFunction, N: int, cfg: McConfig) -> np.ndarray:
    """Int(a, f, A) for the Haar samples of T_N."""
    nblocks = -(-cfg.samples // BLOCK)
    out = []
    for b in range(nblocks):
        xs = N * np.sort(_block(N, cfg.seed, b), axis=1)
        out.append(f(xs[:, a + 1:] - xs[:, :N - a - 1]).sum(axis=1) / N)
    return np.concatenate(out)[:cfg.samples]


def volume_delta_mc(n: int, alpha: float, N: float, cfg: McConfig):
    """(1/N) Vol{x in [0, N]^n : max_i x_i - min_i x_i <= alpha}, with SE and the bound n alpha^(n-1)."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(cfg.seed, spawn_key=(n, 0))))
    x = N * rng.random((cfg.samples, n))
    hit = (x.max(axis=1) - x.min(axis=1) <= alpha).astype(float)
    scale = N ** (n - 1)
    m, se = jackknife(hit)
    return m * scale, se * scale, n * alpha ** (n - 1)


# ------------------------------------------------------ closed-form CDF

def a_coeff(k: int, N: int) -> float:
    """a_k(N) = prod_{nu=1}^{k} (1 - nu/N)."""
    return math.prod(1.0 - nu / N for nu in range(1, k + 1))


def naive_cdf_closed_form(N: int, p):
    """sum_{k=1}^{N-1} a_k(N) (-1)^(k+1) p^k / k!."""
    if N < 2:
        raise InputError("N must be >= 2")
    p = np.asarray(p, dtype=float)
    if np.any(p < 0):
        raise InputError("p must be non-negative")
    total = np.zeros_like(p)
    term = np.ones_like(p)      # p^k / k!
    ak = 1.0
    for k in range(1, N):
        term = term * p / k
        ak *= 1.0 - k / N
        if ak == 0.0 or not np.any(np.abs(term) * ak > 1e-300):
            break
        total = total + (-1) ** (k + 1) * ak * term
    return total if total.ndim else float(total)


def naive_cdf_finite(N: int, p):
    """Haar expectation of Int(0, chi_[0,p]) on T_N: ((N-1)/N) (1 - (1 - p/N)^N).

    Consecutive spacings of N uniform points on [0, 1) are Beta(1, N).
    """
    p = np.minimum(np.asarray(p, dtype=float), N)
    out = (N - 1) / N * -np.expm1(N * np.log1p(-p / N))
    return out if out.ndim else float(out)


# -------------------------------------------------------- estimation chain

@dataclass(frozen=True)
class EstimationParams:
    alpha: float
    gamma: float
    eps: float
    c: Optional[float] = None   # Stirling constant, default 2 alpha / gamma

    def __post_init__(self):
        if not (self.alpha > 0 and self.gamma > 0 and self.eps > 0):
            raise ConfigurationError("alpha, gamma and eps must be positive")


@dataclass(frozen=True)
class FinalBound:
    N: float
    M: int
    L: int
    beta: float
    summands: Tuple[float, float, float, float]
    exponents: Tuple[float, float, float]
    stirling_log: bool
    stirling_const: bool
    logM_ok: bool
    beta_ok: bool

    @property
    def total(self) -> float:
        return math.fsum(self.summands)

    @property
    def dominant(self) -> int:
        return int(np.argmax(self.summands))


def _log_fact(k: int) -> float:
    return math.lgamma(k + 1)


def final_bound(N: float, params: EstimationParams) -> FinalBound:
    al, g, e = params.alpha, params.gamma, params.eps
    g2 = g * g
    ex = (g2 - e * g2, 0.5 - g2 - 2 * g2 * e, 0.5 - 2 * g2)
    if min(ex) <= 0:
        raise ConfigurationError("non-positive exponent %r for gamma=%g, eps=%g" % (ex, g, e))
    lnN = math.log(N)
    x = math.exp(al * math.sqrt(lnN))
    M = math.ceil(x) - 1
    if M < 2:
        raise ConfigurationError("M = %d is too small; increase N or alpha" % M)
    target = g2 * lnN
    L = 1
    while _log_fact(L) < target:
        L += 1
    beta = math.log(M) + math.log1p(-1.0 / M)
    s = (5.0 / M,
         2.0 / N ** ex[0],
         2.0 * math.sqrt(2.0) / N ** ex[1],
         3.0 * math.sqrt(2.0) / N ** ex[2])
    lf = _log_fact(L)
    c = params.c if params.c is not None else 2 * al / g
    st1 = True if lf <= 0 else (L + 2) * math.log(lf) <= (1 + e) * lf
    st2 = (L + 2) * math.log(c) <= (e / 2) * lf
    logM_ok = math.log(M) <= (al / g) * math.sqrt(lf)
    return FinalBound(N, M, L, beta, s, ex, st1, st2, logM_ok, beta < math.log(M))
