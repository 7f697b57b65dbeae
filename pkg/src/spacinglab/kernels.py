"""Hot loops, each in a numba flavour and a numpy flavour.

The public names at module level point at whichever flavour the backend flag
selected. Both flavours stay importable through ``NUMBA`` and ``NUMPY`` so the
tests and the benchmark can compare them directly.
"""
from types import SimpleNamespace

import numpy as np

from ._accel import USE_NUMBA, njit

_CHUNK = 1 << 16


# ---------------------------------------------------------------- numba side

# Row sorts stay in numpy (its SIMD sort beats a compiled per-row sort);
# the compiled part is the gap and scan work on already sorted rows.

@njit(cache=True, nogil=True)
def _gaps_sorted_nb(row):
    S, N = row.shape
    out = np.empty((S, N))
    for s in range(S):
        for j in range(N - 1):
            out[s, j] = N * (row[s, j + 1] - row[s, j])
        out[s, N - 1] = N * (1.0 - (row[s, N - 1] - row[s, 0]))
    return out


@njit(cache=True, nogil=True)
def _ks_scan_nb(g, denom):
    S, K = g.shape
    out = np.empty(S)
    tail = abs(K / denom - 1.0)
    for s in range(S):
        d = tail
        for i in range(K):
            G = -np.expm1(-g[s, i]) if g[s, i] > 0.0 else 0.0
            a = abs((i + 1) / denom - G)
            b = abs(i / denom - G)
            if a > d:
                d = a
            if b > d:
                d = b
        out[s] = d
    return out


def _circle_gaps_nb(phases):
    return _gaps_sorted_nb(np.sort(phases, axis=1))


def _ks_exponential_nb(gaps, denom):
    return _ks_scan_nb(np.sort(gaps, axis=1), denom)


def _ks_circle_nb(phases):
    return _ks_scan_nb(np.sort(_circle_gaps_nb(phases), axis=1), float(phases.shape[1]))


@njit(cache=True, nogil=True)
def _pair_sums_nb(xs, weights, lefts, rights, values):
    S, N = xs.shape
    reach = rights.max()
    m = lefts.shape[0]
    out = np.zeros(S)
    for s in range(S):
        acc = 0.0
        for i in range(N):
            xi = xs[s, i]
            start = i if weights[0] != 0.0 else i + 1
            for j in range(start, N):
                diff = xs[s, j] - xi
                if diff > reach:
                    break
                w = weights[j - i]
                if w == 0.0:
                    continue
                fv = 0.0
                for q in range(m):
                    if diff >= lefts[q] and diff <= rights[q]:
                        fv += values[q]
                acc += w * fv
        out[s] = acc
    return out


@njit(cache=True, nogil=True)
def _box_average_nb(x, lo, hi, t0, h, steps):
    n = x.shape[0]
    hits = 0
    for i in range(steps):
        t = t0 + (i + 0.5) * h
        inside = True
        for q in range(n):
            v = x[q] * t
            v -= np.floor(v)
            if v < lo[q] or v > hi[q]:
                inside = False
                break
        if inside:
            hits += 1
    return hits / steps


# ---------------------------------------------------------------- numpy side

def _circle_gaps_np(phases):
    phases = np.asarray(phases, dtype=float)
    N = phases.shape[1]
    row = np.sort(phases, axis=1)
    out = np.empty_like(row)
    out[:, :-1] = N * np.diff(row, axis=1)
    out[:, -1] = N * (1.0 - (row[:, -1] - row[:, 0]))
    return out


def _ks_exponential_np(gaps, denom):
    g = np.sort(np.asarray(gaps, dtype=float), axis=1)
    K = g.shape[1]
    G = np.where(g > 0.0, -np.expm1(-np.maximum(g, 0.0)), 0.0)
    i = np.arange(K, dtype=float)
    a = np.abs((i + 1) / denom - G)
    b = np.abs(i / denom - G)
    return np.maximum(np.maximum(a, b).max(axis=1), abs(K / denom - 1.0))


def _ks_circle_np(phases):
    phases = np.asarray(phases, dtype=float)
    out = np.empty(phases.shape[0])
    for s in range(0, phases.shape[0], _CHUNK):
        block = phases[s:s + _CHUNK]
        out[s:s + _CHUNK] = _ks_exponential_np(_circle_gaps_np(block), block.shape[1])
    return out


def _pair_sums_np(xs, weights, lefts, rights, values):
    xs = np.asarray(xs, dtype=float)
    S, N = xs.shape
    reach = float(np.max(rights))
    out = np.zeros(S)
    for d in range(0 if weights[0] != 0.0 else 1, N):
        diff = xs[:, d:] - xs[:, :N - d]
        if diff.size == 0 or diff.min() > reach:
            break
        if weights[d] == 0.0:
            continue
        fv = np.zeros_like(diff)
        for lo, hi, v in zip(lefts, rights, values):
            fv += v * ((diff >= lo) & (diff <= hi))
        out += weights[d] * fv.sum(axis=1)
    return out


def _box_average_np(x, lo, hi, t0, h, steps):
    hits = 0
    for start in range(0, steps, _CHUNK):
        idx = np.arange(start, min(steps, start + _CHUNK), dtype=float)
        t = t0 + (idx + 0.5) * h
        v = np.outer(t, x)
        v -= np.floor(v)
        hits += int(np.all((v >= lo) & (v <= hi), axis=1).sum())
    return hits / steps


NUMBA = SimpleNamespace(
    circle_gaps=_circle_gaps_nb,
    ks_exponential=_ks_exponential_nb,
    ks_circle=_ks_circle_nb,
    pair_sums=_pair_sums_nb,
    box_average=_box_average_nb,
)
NUMPY = SimpleNamespace(
    circle_gaps=_circle_gaps_np,
    ks_exponential=_ks_exponential_np,
    ks_circle=_ks_circle_np,
    pair_sums=_pair_sums_np,
    box_average=_box_average_np,
)
_ACTIVE = NUMBA if USE_NUMBA else NUMPY


def circle_gaps(phases):
    """Rows of unit-circle phases -> the N scaled gaps of each row (wrap gap last)."""
    return _ACTIVE.circle_gaps(np.ascontiguousarray(phases, dtype=float))


def ks_exponential(gaps, denom):
    """Exact KS distance between each row's atoms (mass 1/denom each) and Exp(1)."""
    return _ACTIVE.ks_exponential(np.ascontiguousarray(gaps, dtype=float), float(denom))


def ks_circle(phases):
    return _ACTIVE.ks_circle(np.ascontiguousarray(phases, dtype=float))


def pair_sums(xs, weights, lefts, rights, values):
    """Per row: sum over i <= j of weights[j - i] * f(x_j - x_i), rows sorted."""
    return _ACTIVE.pair_sums(
        np.ascontiguousarray(xs, dtype=float),
        np.ascontiguousarray(weights, dtype=float),
        np.ascontiguousarray(lefts, dtype=float),
        np.ascontiguousarray(rights, dtype=float),
        np.ascontiguousarray(values, dtype=float),
    )


def box_average(x, lo, hi, t0, h, steps):
    return _ACTIVE.box_average(
        np.ascontiguousarray(x, dtype=float),
        np.ascontiguousarray(lo, dtype=float),
        np.ascontiguousarray(hi, dtype=float),
        float(t0), float(h), int(steps),
    )
