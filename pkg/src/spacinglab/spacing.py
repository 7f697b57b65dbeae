"""Nearest-neighbour spacing measures and distances between them."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import ConfigurationError, InputError, InvariantViolation

TWO_PI = 2.0 * math.pi


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class OrderedTuple:
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        if v.size < 2:
            raise InputError("need at least two values, got %d" % v.size)
        if not np.all(np.isfinite(v)):
            raise InputError("values must be finite")
        if np.any(np.diff(v) < 0):
            raise InputError("values are not sorted; use OrderedTuple.from_values")
        object.__setattr__(self, "values", _frozen(v))

    @classmethod
    def from_values(cls, values) -> "OrderedTuple":
        v = np.asarray(values, dtype=float).ravel()
        return cls(np.sort(v, kind="stable"))

    def __len__(self):
        return self.values.size

    @property
    def N(self) -> int:
        return self.values.size


def _as_tuple(X) -> OrderedTuple:
    return X if isinstance(X, OrderedTuple) else OrderedTuple.from_values(X)


@dataclass(frozen=True)
class AtomicMeasure:
    """Finitely many atoms on [0, inf); locations unique and increasing."""

    locations: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        loc = np.asarray(self.locations, dtype=float).ravel()
        m = np.asarray(self.masses, dtype=float).ravel()
        if loc.shape != m.shape or loc.size == 0:
            raise InputError("locations and masses must be non-empty and of equal length")
        if np.any(loc < 0) or np.any(m <= 0):
            raise InputError("atoms need location >= 0 and mass > 0")
        if np.any(np.diff(loc) <= 0):
            raise InputError("locations must be strictly increasing; use from_points")
        object.__setattr__(self, "locations", _frozen(loc))
        object.__setattr__(self, "masses", _frozen(m))
        object.__setattr__(self, "_cum", _frozen(np.cumsum(m)))

    @classmethod
    def from_points(cls, points, denom) -> "AtomicMeasure":
        """Each point carries mass 1/denom; coincident points are merged.

        Merged masses are computed as count/denom so that, for instance, N-1
        coincident points carry exactly the float nearest (N-1)/N.
        """
        pts = np.asarray(points, dtype=float).ravel()
        loc, counts = np.unique(pts, return_counts=True)
        return cls(loc, counts / float(denom))

    @property
    def total_mass(self) -> float:
        return float(self._cum[-1])

    @property
    def atoms(self):
        return list(zip(self.locations.tolist(), self.masses.tolist()))

    def cdf(self, t):
        """Right-continuous CDF, mu([0, t])."""
        idx = np.searchsorted(self.locations, t, side="right")
        return np.where(idx > 0, self._cum[np.maximum(idx - 1, 0)], 0.0)

    def cdf_left(self, t):
        """mu([0, t))."""
        idx = np.searchsorted(self.locations, t, side="left")
        return np.where(idx > 0, self._cum[np.maximum(idx - 1, 0)], 0.0)

    def mean(self) -> float:
        return float(np.dot(self.locations, self.masses))

    def mass_at(self, x: float, tol: float = 0.0) -> float:
        sel = np.abs(self.locations - x) <= tol
        return float(self.masses[sel].sum())

    def isclose(self, other: "AtomicMeasure", rtol=1e-9, atol=1e-12) -> bool:
        """Multiset comparison of atoms up to a tolerance on locations and masses."""
        a, b = self.merged(atol), other.merged(atol)
        return (a.locations.size == b.locations.size
                and np.allclose(a.locations, b.locations, rtol=rtol, atol=atol)
                and np.allclose(a.masses, b.masses, rtol=rtol, atol=atol))

    def merged(self, tol: float) -> "AtomicMeasure":
        """Merge atoms whose locations lie within tol of their left neighbour."""
        if tol <= 0 or self.locations.size < 2:
            return self
        keep = np.concatenate(([True], np.diff(self.locations) > tol))
        groups = np.cumsum(keep) - 1
        return AtomicMeasure(self.locations[keep], np.bincount(groups, weights=self.masses))


@dataclass(frozen=True)
class ReferenceMeasure:
    kind: str
    cdf: Callable
    pdf: Callable
    ppf: Optional[Callable] = None
    mean: float = 1.0
    support: tuple = (0.0, math.inf)

    @classmethod
    def poisson(cls) -> "ReferenceMeasure":
        def cdf(t):
            t = np.asarray(t, dtype=float)
            return np.where(t > 0, -np.expm1(-np.maximum(t, 0.0)), 0.0)

        def pdf(t):
            t = np.asarray(t, dtype=float)
            return np.where(t >= 0, np.exp(-np.maximum(t, 0.0)), 0.0)

        def ppf(q):
            q = np.asarray(q, dtype=float)
            return -np.log1p(-q)

        return cls("poisson", cdf, pdf, ppf, 1.0)

    @classmethod
    def tabulated(cls, xs, density) -> "ReferenceMeasure":
        """Piecewise-linear density on the grid xs, renormalised to mass 1."""
        xs = np.asarray(xs, dtype=float)
        d = np.asarray(density, dtype=float)
        if xs.ndim != 1 or xs.size < 2 or np.any(np.diff(xs) <= 0) or xs[0] < 0:
            raise ConfigurationError("grid must be increasing and start at >= 0")
        if np.any(d < 0):
            raise ConfigurationError("density must be non-negative")
        c = cumulative_trapezoid(d, xs, initial=0.0)
        if c[-1] <= 0:
            raise ConfigurationError("density integrates to zero")
        d, c = d / c[-1], c / c[-1]
        mean = float(np.trapezoid(xs * d, xs))
        lo, hi = float(xs[0]), float(xs[-1])

        def cdf(t):
            return np.interp(t, xs, c, left=0.0, right=1.0)

        def pdf(t):
            return np.interp(t, xs, d, left=0.0, right=0.0)

        ppf = None
        if np.all(np.diff(c) > 0):
            def ppf(q):
                return np.interp(q, c, xs)

        return cls("tabulated", cdf, pdf, ppf, mean, (lo, hi))


# ------------------------------------------------------------ spacing measures

def nn_measure(X, normalization: str = "default") -> AtomicMeasure:
    """Spacing measure of a tuple on the line.

    ``default`` puts mass 1/N on each (N / range) * gap. ``mu1`` keeps that
    scaling with masses 1/(N-1); ``mu2`` uses scaling (N-1)/range and masses
    1/(N-1).
    """
    X = _as_tuple(X)
    x, N = X.values, X.N
    span = x[-1] - x[0]
    gaps = np.diff(x)
    if normalization == "default":
        scale, denom = N, N
    elif normalization == "mu1":
        scale, denom = N, N - 1
    elif normalization == "mu2":
        scale, denom = N - 1, N - 1
    else:
        raise ConfigurationError("unknown normalization %r" % normalization)
    if span == 0:
        return AtomicMeasure.from_points(np.zeros(N - 1), denom)
    return AtomicMeasure.from_points(scale * gaps / span, denom)


def _check_angles(X: OrderedTuple):
    v = X.values
    if v[0] < 0 or v[-1] >= TWO_PI:
        raise InputError("angles must lie in [0, 2*pi)")


def nn_measure_circle(X) -> AtomicMeasure:
    X = _as_tuple(X)
    _check_angles(X)
    x, N = X.values, X.N
    gaps = np.append(np.diff(x), TWO_PI - x[-1] + x[0])
    return AtomicMeasure.from_points(N / TWO_PI * gaps, N)


def nn_measure_naive(X, N: Optional[int] = None) -> AtomicMeasure:
    X = _as_tuple(X)
    _check_angles(X)
    if N is not None and N != X.N:
        raise InputError("N=%d does not match tuple length %d" % (N, X.N))
    return AtomicMeasure.from_points(X.N / TWO_PI * np.diff(X.values), X.N)


# ------------------------------------------------------------------ distances

def _ks_atomic_ref(mu: AtomicMeasure, ref: ReferenceMeasure) -> float:
    t = mu.locations
    G = ref.cdf(t)
    d = max(np.max(np.abs(mu.cdf(t) - G)), np.max(np.abs(mu.cdf_left(t) - G)))
    return float(max(d, abs(mu.total_mass - 1.0)))


def _ks_atomic_atomic(mu: AtomicMeasure, nu: AtomicMeasure) -> float:
    t = np.union1d(mu.locations, nu.locations)
    d = np.max(np.abs(mu.cdf(t) - nu.cdf(t)))
    return float(max(d, abs(mu.total_mass - nu.total_mass)))


def _ks_ref_ref(a: ReferenceMeasure, b: ReferenceMeasure, points: int = 8193) -> float:
    # No exact formula for two continuous laws; use a dense grid over both supports.
    q = (np.arange(points) + 0.5) / points
    grid = []
    for r in (a, b):
        if r.ppf is not None:
            grid.append(r.ppf(q))
        else:
            hi = r.support[1] if math.isfinite(r.support[1]) else 50.0
            grid.append(np.linspace(r.support[0], hi, points))
    t = np.unique(np.concatenate(grid))
    return float(np.max(np.abs(a.cdf(t) - b.cdf(t))))


def ks_distance(mu, nu) -> float:
    """Kolmogorov-Smirnov distance, exact whenever one side is atomic."""
    if isinstance(mu, AtomicMeasure) and isinstance(nu, AtomicMeasure):
        return _ks_atomic_atomic(mu, nu)
    if isinstance(mu, AtomicMeasure):
        return _ks_atomic_ref(mu, nu)
    if isinstance(nu, AtomicMeasure):
        return _ks_atomic_ref(nu, mu)
    return _ks_ref_ref(mu, nu)


@dataclass(frozen=True)
class MGrid:
    M: int
    nodes: np.ndarray = field(repr=False)


def mgrid_build(M: int, ref: ReferenceMeasure) -> MGrid:
    if M < 2:
        raise ConfigurationError("M must be at least 2")
    if ref.ppf is None:
        raise ConfigurationError("reference CDF is not invertible")
    nodes = ref.ppf(np.arange(1, M) / M)
    if np.any(np.diff(nodes) <= 0):
        raise ConfigurationError("reference quantiles are not strictly increasing")
    return MGrid(M, _frozen(nodes))


def _interval_mass(m, lo, his):
    """m([lo, hi]) for each hi."""
    if isinstance(m, AtomicMeasure):
        return m.cdf(his) - m.cdf_left(lo)
    return m.cdf(his) - m.cdf(lo)


def mgrid_ks(mu, ref, grid: MGrid) -> float:
    s = grid.nodes
    return float(np.max(np.abs(_interval_mass(mu, s[0], s) - _interval_mass(ref, s[0], s))))


# --------------------------------------------------------- approximating tuple

def approx_tuple(ref: ReferenceMeasure, N: int, forced: Optional[Sequence[float]] = None) -> OrderedTuple:
    """A tuple whose spacing measure is within (2 + p)/N of ``ref``.

    The base tuple uses the reference quantiles as spacings. Forced points
    are mapped affinely into [x_2, x_{N-1}] and then overwrite interior points
    without changing the rank of any point, so every overwritten point moves
    inside a window of fixed neighbours and the counting function of the
    spacings changes by at most one per forced point.
    """
    if not 0.0 <= ref.mean <= 1.0:
        raise InputError("reference mean %.6g is outside [0, 1]" % ref.mean)
    if N < 3:
        raise InputError("N must be at least 3")
    if ref.ppf is None:
        raise ConfigurationError("reference CDF is not invertible")
    y = np.empty(N - 1)
    y[:-1] = ref.ppf(np.arange(1, N - 1) / N)
    y[-1] = N - math.fsum(y[:-1])
    if y[-1] < 0:
        raise InvariantViolation("last spacing is negative (%.6g)" % y[-1])
    x = np.concatenate(([0.0], np.cumsum(y) / N))
    x[-1] = 1.0
    if forced is None or len(forced) == 0:
        return OrderedTuple(x)

    z = np.sort(np.asarray(forced, dtype=float))
    p = z.size
    if N < p + 2:
        raise InputError("need N >= p + 2 for %d forced points" % p)
    # Affine image of the base tuple with min z at x_2 and max z at x_{N-1}.
    lo, hi = x[1], x[N - 2]
    b = (z[-1] - z[0]) / (hi - lo) if z[-1] > z[0] else 1.0
    x = b * (x - lo) + z[0]

    # Greedy rank-preserving slots, then pull any overflow back from the top.
    slots = np.empty(p, dtype=int)
    prev = 0
    for j in range(p):
        k = max(prev + 1, int(np.searchsorted(x, z[j], side="right")) - 1, 1)
        slots[j] = k
        prev = k
    slots = np.minimum(slots, N - 2 - (p - 1 - np.arange(p)))
    x[slots] = z
    if np.any(np.diff(x) < 0):
        raise InvariantViolation("forced points broke the ordering")
    return OrderedTuple(x)


# ------------------------------------------------------------------ histogram

def histogram(X, bin_width: float):
    """Bins of width ``bin_width`` from 0 over the rescaled gaps; total area 1."""
    if not bin_width > 0:
        raise InputError("bin_width must be positive")
    X = _as_tuple(X)
    x, N = X.values, X.N
    span = x[-1] - x[0]
    if span == 0:
        return [(0.0, float(bin_width), 1.0 / bin_width)]
    phi = (N - 1) * np.diff(x) / span
    idx = np.floor(phi / bin_width).astype(np.int64)
    counts = np.bincount(idx)
    dens = counts / ((N - 1) * bin_width)
    return [(k * bin_width, (k + 1) * bin_width, float(dens[k])) for k in range(counts.size)]
