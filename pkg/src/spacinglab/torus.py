"""Haar sampling on the maximal torus, B_N membership and ergodic time averages."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from . import kernels
from .errors import ConfigurationError, InputError
from .spacing import AtomicMeasure

BLOCK = 512          # samples per random stream; part of the reproducibility contract
JACKKNIFE_GROUPS = 20
DEFAULT_ALPHA = 4.0 / 3.0


@dataclass(frozen=True)
class McConfig:
    seed: int = 0
    samples: int = 10_000
    alpha: float = DEFAULT_ALPHA
    workers: int = 1

    def __post_init__(self):
        if self.samples < 1:
            raise ConfigurationError("samples must be >= 1")
        if not self.alpha > 0:
            raise ConfigurationError("alpha must be positive")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError("seed must be a 64-bit unsigned integer")
        if self.workers < 1:
            raise ConfigurationError("workers must be >= 1")


@dataclass(frozen=True)
class TorusPoint:
    phases: np.ndarray

    def __post_init__(self):
        p = np.array(self.phases, dtype=float).ravel()
        if p.size < 2:
            raise InputError("a torus point needs N >= 2 phases")
        if np.any(p < 0) or np.any(p >= 1):
            raise InputError("phases must lie in [0, 1)")
        p.setflags(write=False)
        object.__setattr__(self, "phases", p)

    @property
    def N(self) -> int:
        return self.phases.size

    def shifted(self, c: float) -> "TorusPoint":
        return TorusPoint(frac(self.phases + c))


@dataclass(frozen=True)
class FlowDirection:
    x: np.ndarray
    certificate: Optional[object] = None

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float).ravel())


@dataclass(frozen=True)
class Box:
    lo: np.ndarray
    hi: np.ndarray

    @property
    def volume(self) -> float:
        return float(np.prod(np.clip(np.asarray(self.hi) - np.asarray(self.lo), 0, 1)))


def frac(v):
    """v mod 1 in [0, 1); guards the float case where v mod 1 rounds up to 1."""
    r = np.mod(v, 1.0)
    return np.where(r >= 1.0, 0.0, r)


# ------------------------------------------------------------------ sampling

def _block(N: int, seed: int, b: int) -> np.ndarray:
    ss = np.random.SeedSequence(seed, spawn_key=(N, b))
    return np.random.Generator(np.random.PCG64(ss)).random((BLOCK, N))


def haar_samples(N: int, cfg: McConfig, start: int = 0, count: Optional[int] = None) -> np.ndarray:
    """Rows start .. start+count-1 of the sample stream for (seed, N)."""
    if N < 2:
        raise InputError("N must be >= 2")
    count = cfg.samples if count is None else count
    stop = start + count
    rows = [_block(N, cfg.seed, b) for b in range(start // BLOCK, (stop - 1) // BLOCK + 1)]
    out = np.concatenate(rows)
    off = start - (start // BLOCK) * BLOCK
    return out[off:off + count]


def haar_sample(N: int, cfg: McConfig, index: int = 0) -> TorusPoint:
    return TorusPoint(haar_samples(N, cfg, index, 1)[0])


def spacing_of(A: TorusPoint) -> AtomicMeasure:
    """Circle spacing measure of exp(2 pi i phases)."""
    return AtomicMeasure.from_points(kernels.circle_gaps(A.phases[None, :])[0], A.N)


def ks_to_poisson(A: TorusPoint) -> float:
    return float(kernels.ks_circle(A.phases[None, :])[0])


def jackknife(values: np.ndarray, groups: int = JACKKNIFE_GROUPS):
    """Mean and delete-one-group jackknife standard error."""
    values = np.asarray(values, dtype=float)
    parts = np.array_split(values, min(groups, values.size))
    sums = np.array([p.sum() for p in parts])
    sizes = np.array([p.size for p in parts])
    total, n = sums.sum(), sizes.sum()
    loo = (total - sums) / (n - sizes)
    g = len(parts)
    se = math.sqrt((g - 1) / g * np.sum((loo - loo.mean()) ** 2)) if g > 1 else float("nan")
    return total / n, se


def per_sample_ks(N: int, cfg: McConfig) -> np.ndarray:
    """d_KS(mu_A, Poisson) for samples 0 .. cfg.samples-1, independent of cfg.workers."""
    nblocks = -(-cfg.samples // BLOCK)

    def work(b):
        return kernels.ks_circle(_block(N, cfg.seed, b))

    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as ex:
            parts = list(ex.map(work, range(nblocks)))
    else:
        parts = [work(b) for b in range(nblocks)]
    return np.concatenate(parts)[:cfg.samples]


def mc_expected_ks(N: int, cfg: McConfig):
    """Monte Carlo mean of d_KS(mu_A, Poisson) over Haar-random A, with its jackknife SE."""
    if N < 2:
        raise InputError("N must be >= 2")
    if cfg.samples < 100:
        raise ConfigurationError("need at least 100 samples")
    return jackknife(per_sample_ks(N, cfg))


# ---------------------------------------------------------------------- B_N

def bn_threshold(N: int, alpha: float = DEFAULT_ALPHA) -> float:
    return math.exp(-0.5 * alpha * math.sqrt(math.log(N)))


def bn_membership(A: TorusPoint, alpha: float = DEFAULT_ALPHA) -> bool:
    return ks_to_poisson(A) >= bn_threshold(A.N, alpha)


def bn_volume(N: int, cfg: McConfig):
    """Monte Carlo Haar volume of B_N with jackknife SE."""
    ks = per_sample_ks(N, cfg)
    return jackknife((ks >= bn_threshold(N, cfg.alpha)).astype(float))


@dataclass(frozen=True)
class BnGrid:
    N: int
    resolution: int
    alpha: float
    threshold: float
    cells: np.ndarray
    slice: Optional[np.ndarray] = None

    @property
    def volume_fraction(self) -> float:
        return float(self.cells.mean())


def _mgrid_stat(gaps: np.ndarray, N: int, M: int) -> np.ndarray:
    s = -np.log1p(-np.arange(1, M) / M)
    lo = (gaps[:, :, None] >= s[0])
    cnt = (lo & (gaps[:, :, None] <= s[None, None, :])).sum(axis=1) / N
    ref = -np.expm1(-s) + np.expm1(-s[0])
    return np.abs(cnt - ref).max(axis=1)


def bn_grid(N: int, resolution: int, alpha: float = DEFAULT_ALPHA,
            with_slice: bool = False, mgrid_M: Optional[int] = None) -> BnGrid:
    """Membership of every lattice cell centre of [0,1)^N in B_N.

    Gaps are computed on the integer lattice, so the bitmask is exactly
    invariant under cyclic diagonal shifts. ``mgrid_M`` switches from the
    exact d_KS to the M-grid distance.
    """
    if N not in (3, 4):
        raise ConfigurationError("bn_grid supports N in {3, 4} only")
    if resolution < 4:
        raise ConfigurationError("resolution must be >= 4")
    thr = bn_threshold(N, alpha)
    idx = np.indices((resolution,) * N).reshape(N, -1).T
    srt = np.sort(idx, axis=1)
    g = np.empty_like(srt)
    g[:, :-1] = np.diff(srt, axis=1)
    g[:, -1] = resolution - (srt[:, -1] - srt[:, 0])
    gaps = N * g / resolution
    if mgrid_M is None:
        d = kernels.ks_exponential(gaps, N)
    else:
        d = _mgrid_stat(gaps, N, mgrid_M)
    cells = (d >= thr).reshape((resolution,) * N)

    sl = None
    if with_slice:
        sub = (np.indices((resolution,) * (N - 1)).reshape(N - 1, -1).T + 0.5) / resolution
        last = N / 2.0 - sub.sum(axis=1)
        inside = (last >= 0) & (last < 1)
        sl = np.full(sub.shape[0], -1, dtype=np.int8)
        if inside.any():
            pts = np.column_stack([sub[inside], last[inside]])
            sl[inside] = (kernels.ks_circle(pts) >= thr).astype(np.int8)
        sl = sl.reshape((resolution,) * (N - 1))
    return BnGrid(N, resolution, alpha, thr, cells, sl)


# -------------------------------------------------------------------- flows

@dataclass(frozen=True)
class FlowAverage:
    average: float
    volume: Optional[float]
    horizon: float
    steps: int


def _time_grid(horizon: float, steps: int):
    if steps < 10:
        raise ConfigurationError("steps must be >= 10")
    if not horizon > 0:
        raise ConfigurationError("horizon must be positive")
    return -horizon, 2.0 * horizon / steps


def flow_time_average(x, indicator: Union[Box, Callable, float], horizon: float,
                      steps: int, chunk: int = 1 << 15) -> FlowAverage:
    """(1/2T) * integral over [-T, T] of indicator(t * x mod 1), midpoint rule.

    ``indicator`` is a Box, a constant, or a callable mapping an (S, N) array
    of phases to S booleans.
    """
    x = x.x if isinstance(x, FlowDirection) else np.asarray(x, dtype=float)
    t0, h = _time_grid(horizon, steps)
    if isinstance(indicator, Box):
        avg = kernels.box_average(x, indicator.lo, indicator.hi, t0, h, steps)
        return FlowAverage(avg, indicator.volume, horizon, steps)
    if np.isscalar(indicator):
        return FlowAverage(float(indicator), float(indicator), horizon, steps)
    hits = 0
    for s in range(0, steps, chunk):
        t = t0 + (np.arange(s, min(steps, s + chunk)) + 0.5) * h
        hits += int(np.count_nonzero(indicator(frac(np.outer(t, x)))))
    return FlowAverage(hits / steps, None, horizon, steps)


def rn_time_fraction(eigenvalues, alpha: float, horizon: float, steps: int,
                     chunk: int = 4096) -> float:
    """Fraction of sampled t in [-T, T] with exp(2 pi i t e) in B_N."""
    e = np.asarray(eigenvalues, dtype=float).ravel()
    thr = bn_threshold(e.size, alpha)
    t0, h = _time_grid(horizon, steps)
    hits = 0
    for s in range(0, steps, chunk):
        t = t0 + (np.arange(s, min(steps, s + chunk)) + 0.5) * h
        hits += int(np.count_nonzero(kernels.ks_circle(frac(np.outer(t, e))) >= thr))
    return hits / steps


# ------------------------------------------------------------- admissibility

@dataclass(frozen=True)
class AdmissibilityReport:
    alpha: float
    increments: np.ndarray
    partial_sums: np.ndarray
    growth_threshold_log: np.ndarray
    growth_dominates: np.ndarray
    width_ok: Optional[np.ndarray]
    k0: Optional[int]
    t0: Optional[float]


def admissibility_report(dims: Sequence[int], alpha: float, widths: Optional[Sequence[float]] = None,
                         epsilon: Optional[float] = None, t0: Optional[float] = None) -> AdmissibilityReport:
    """Growth series partial sums and the per-k width check.

    ``dims`` may hold Python integers of any size; logs are taken exactly on
    the integers. ``growth_threshold_log[k-1]`` is (2 log k / alpha)^2, the log
    of the growth rate above which the series is summable.
    """
    dims = list(dims)
    if any(b <= a for a, b in zip(dims, dims[1:])):
        raise InputError("dims must be strictly increasing")
    if not alpha > 0:
        raise ConfigurationError("alpha must be positive")
    logs = np.array([math.log(d) for d in dims])
    inc = np.exp(-0.5 * alpha * np.sqrt(logs))
    ks = np.arange(1, len(dims) + 1)
    thr = (2.0 * np.log(ks) / alpha) ** 2
    width_ok = k0 = None
    if widths is not None:
        if epsilon is None or not epsilon > 0:
            raise ConfigurationError("epsilon must be positive when widths are given")
        width_ok = np.abs(np.asarray(widths, dtype=float)) < epsilon
        bad = np.nonzero(~width_ok)[0]
        k0 = int(bad[-1] + 2) if bad.size else 1
        if k0 > len(dims):
            k0 = None
    return AdmissibilityReport(alpha, inc, np.cumsum(inc), thr, logs > thr, width_ok, k0, t0)
