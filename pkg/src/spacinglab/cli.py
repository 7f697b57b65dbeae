"""Batch experiment runner: ``spacinglab <experiment> [options]``.

Exit codes: 0 success, 2 configuration error, 3 numeric precondition, 4 I/O.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import io
import json
import math
import os
import re
import sys
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from . import __version__
from .errors import ConfigurationError, SpacingLabError

SCHEMA = 1
OUT_ENV = "SPACINGLAB_OUT"
EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


# ------------------------------------------------------------------ parsing

def _int_list(s: str) -> List[int]:
    return [int(float(v)) for v in s.split(",") if v.strip()]


def _float_list(s: str) -> List[float]:
    return [float(v) for v in s.split(",") if v.strip()]


def _complex_list(s: str) -> List[complex]:
    return [complex(v.replace(" ", "")) for v in s.split(",") if v.strip()]


def _number(s: str) -> float:
    s = s.strip()
    if "/" in s:
        return float(Fraction(s))
    return float(s)


def _int(s: str) -> int:
    v = float(s)
    if v != int(v):
        raise ValueError("not an integer: %r" % s)
    return int(v)


# experiment -> {key: (parser, default, help)}
PARAMS: Dict[str, Dict[str, Tuple[Callable, str, str]]] = {
    "spacing-hist": {
        "input": (str, "", "spectrum file, whitespace- or newline-separated reals"),
        "bin_width": (_number, "0.1", "histogram bin width"),
    },
    "torus-mc-ks": {
        "N": (_int_list, "16,64,256,1024", "torus dimensions"),
        "samples": (_int, "2000", "Haar samples per N"),
        "workers": (_int, "1", "threads (results do not depend on it)"),
    },
    "bn-grid": {
        "N": (_int, "3", "torus dimension, 3 or 4"),
        "resolution": (_int, "20", "lattice points per axis"),
        "alpha": (_number, "4/3", "B_N exponent parameter"),
        "mgrid_M": (_int, "0", "M-grid size for the distance; 0 means exact d_KS"),
    },
    "rep-weights": {
        "n": (_int, "3", "su(n)"),
        "lam": (_int_list, "1,1", "highest weight on fundamental weights"),
        "m_max": (_int, "10", "largest ray parameter"),
        "coeffs": (_float_list, "", "torus element coefficients; default sqrt of primes"),
    },
    "op-spectrum": {
        "n": (_int, "3", "su(n)"),
        "lam": (_int_list, "1,1", "highest weight"),
        "m": (_int, "5", "ray parameter"),
        "operator": (str, "t1 + t1*t2", "polynomial in t1..tr and W, e.g. '2*t1 + 0.5*W*t1'"),
        "mode": (str, "inverse-dimension", "none, inverse-dimension or inverse-parameter"),
    },
    "flow-sweep": {
        "direction": (_float_list, "0.41421356237309515,0.7320508075688772,0.2360679774997898", "flow direction"),
        "box_lo": (_float_list, "0,0,0", "box lower corner"),
        "box_hi": (_float_list, "0.5,0.5,0.5", "box upper corner"),
        "horizons": (_float_list, "1e3,1e4,1e5", "horizons T"),
        "steps_per_unit": (_number, "5", "time steps per unit of 2T"),
    },
    "clump-verify": {
        "N": (_int, "12", "tuple length (<= 14)"),
        "samples": (_int, "100", "random torus points"),
        "a": (_int_list, "0,1", "separations"),
        "s": (_float_list, "0.5,1.5", "indicator widths"),
    },
    "cl-converge": {
        "n": (_int, "2", "su(n)"),
        "point": (_complex_list, "1", "lowering parameters w"),
        "levels": (_int_list, "32,64,128,256,512", "ray levels"),
        "xi": (str, "t1", "first generator"),
        "eta": (str, "t1", "second generator"),
    },
    "final-bound": {
        "N": (_number, "1e6", "dimension"),
        "alpha": (_number, "1", "alpha"),
        "gamma": (_number, "0.4", "gamma"),
        "eps": (_number, "0.05", "epsilon"),
    },
}
COMMON = {"seed": (_int, "0", "64-bit seed")}


@dataclass
class ExperimentConfig:
    kind: str
    values: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in PARAMS:
            raise ConfigurationError("unknown experiment %r" % self.kind)
        allowed = set(PARAMS[self.kind]) | set(COMMON)
        bad = set(self.values) - allowed
        if bad:
            raise ConfigurationError("unknown keys for %s: %s" % (self.kind, ", ".join(sorted(bad))))
        merged = {k: d for k, (_, d, _) in {**COMMON, **PARAMS[self.kind]}.items()}
        merged.update({k: str(v).strip() for k, v in self.values.items()})
        self.values = dict(sorted(merged.items()))
        self.parsed()

    def parsed(self) -> Dict[str, object]:
        table = {**COMMON, **PARAMS[self.kind]}
        out = {}
        for k, raw in self.values.items():
            try:
                out[k] = table[k][0](raw) if raw != "" or table[k][0] is str else None
            except (ValueError, ZeroDivisionError) as exc:
                raise ConfigurationError("bad value for %s: %r (%s)" % (k, raw, exc)) from None
        seed = out["seed"]
        if not 0 <= seed < 2**64:
            raise ConfigurationError("seed must fit in 64 unsigned bits")
        return out

    def to_text(self) -> str:
        cp = configparser.ConfigParser(interpolation=None)
        cp.optionxform = str
        cp[self.kind] = self.values
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()

    @classmethod
    def from_text(cls, text: str, kind: Optional[str] = None) -> "ExperimentConfig":
        cp = configparser.ConfigParser(interpolation=None)
        cp.optionxform = str
        try:
            cp.read_string(text)
        except configparser.Error as exc:
            raise ConfigurationError("unreadable config: %s" % exc) from None
        sections = cp.sections()
        if kind is None:
            kinds = [s for s in sections if s in PARAMS]
            if len(kinds) != 1:
                raise ConfigurationError("config must hold exactly one experiment section")
            kind = kinds[0]
        values = dict(cp["common"]) if cp.has_section("common") else {}
        if cp.has_section(kind):
            values.update(cp[kind])
        unknown = [s for s in sections if s not in PARAMS and s != "common"]
        if unknown:
            raise ConfigurationError("unknown sections: %s" % ", ".join(unknown))
        return cls(kind, values)

    def digest(self) -> str:
        blob = json.dumps({"kind": self.kind, "values": self.values}, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass
class ResultArtifact:
    kind: str
    columns: List[str]
    rows: List[list]
    meta: Dict[str, object]
    extra: Dict[str, object] = field(default_factory=dict)


# --------------------------------------------------------------- experiments

def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return int(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(repr(float(v))) if math.isfinite(v) else str(v)
    if isinstance(v, Fraction):
        return float(v)
    if isinstance(v, complex):
        return repr(v)
    return v


def _run_spacing_hist(p):
    from .spacing import histogram
    if not p["input"]:
        raise ConfigurationError("spacing-hist needs input=<file>")
    try:
        with open(p["input"]) as fh:
            vals = [float(t) for t in fh.read().split()]
    except OSError:
        raise
    except ValueError as exc:
        raise ConfigurationError("spectrum file is not numeric: %s" % exc) from None
    rows = [list(r) for r in histogram(vals, p["bin_width"])]
    return ["bin_left", "bin_right", "density"], rows, {}


def _run_torus_mc_ks(p):
    from .torus import McConfig, mc_expected_ks
    rows = []
    for N in p["N"]:
        est, se = mc_expected_ks(N, McConfig(p["seed"], p["samples"], workers=p["workers"]))
        rows.append([N, est, se])
    return ["N", "estimate", "stderr"], rows, {}


def _run_bn_grid(p):
    from .torus import bn_grid
    g = bn_grid(p["N"], p["resolution"], p["alpha"], mgrid_M=p["mgrid_M"] or None)
    flat = g.cells.astype(int).ravel().tolist()
    extra = {"N": g.N, "resolution": g.resolution, "alpha": g.alpha,
             "threshold": g.threshold, "dims": [g.resolution] * g.N, "cells": flat}
    return ["index", "member"], [[i, v] for i, v in enumerate(flat)], extra


def _default_coeffs(r):
    from .operators import _primes
    return [math.sqrt(q) for q in _primes(r)]


def _run_rep_weights(p):
    from .rep import (gt_weights, orbit_dim_and_ratio, su, weight_count_bound,
                      weight_spectrum, weyl_dimension)
    rs = su(p["n"])
    lam = p["lam"]
    coeffs = p["coeffs"] or _default_coeffs(rs.rank)
    rows = []
    for m in range(1, p["m_max"] + 1):
        ml = [m * c for c in lam]
        spec = weight_spectrum(rs, ml, coeffs)
        q, ratio = orbit_dim_and_ratio(rs, lam, m)
        rows.append([m, weyl_dimension(rs, ml), len(gt_weights(rs, ml)), weight_count_bound(rs, ml),
                     q, ratio, spec.distinct, spec.p, spec.zero_mass])
    cols = ["m", "dim", "distinct_weights", "weight_count_bound", "q", "ratio_bound",
            "distinct_eigenvalues", "p", "zero_mass"]
    return cols, rows, {}


_TERM = re.compile(r"^\s*(?:([-+0-9.eEj()/]+)\s*\*\s*)?((?:t\d+|W|[EF]\d\d)(?:\s*\*\s*(?:t\d+|W|[EF]\d\d))*)\s*$")


def parse_operator(text: str):
    from .operators import OperatorPoly
    terms = []
    for chunk in re.split(r"\s+\+\s+", text.strip()):
        m = _TERM.match(chunk)
        if not m:
            raise ConfigurationError("cannot parse operator term %r" % chunk)
        coef = m.group(1)
        c = 1 if coef is None else (Fraction(coef) if re.fullmatch(r"-?\d+(/\d+)?", coef) else complex(coef))
        terms.append((tuple(g.strip() for g in m.group(2).split("*")), c))
    return OperatorPoly(terms)


def _run_op_spectrum(p):
    from .operators import HighestWeightRep, diagonal_spectrum, norm_bound, rescale
    from .rep import su
    rs = su(p["n"])
    poly = parse_operator(p["operator"])
    mode = None if p["mode"] == "none" else p["mode"]
    if mode not in (None, "inverse-dimension", "inverse-parameter"):
        raise ConfigurationError("unknown mode %r" % p["mode"])
    nb = norm_bound(poly, rs, p["lam"], p["m"], mode)
    rp = rescale(poly, "by-integer", nb.scale) if nb.scale != 1 else poly
    vals = np.sort(diagonal_spectrum(rp, HighestWeightRep(rs, tuple(p["m"] * c for c in p["lam"]))).floats())
    extra = {"bound": nb.bound, "exact_sup": _fmt(nb.exact_sup), "scale": int(nb.scale)}
    return ["index", "value"], [[i, v] for i, v in enumerate(vals.tolist())], extra


def _run_flow_sweep(p):
    from .torus import Box, flow_time_average
    box = Box(np.array(p["box_lo"]), np.array(p["box_hi"]))
    rows = []
    for T in p["horizons"]:
        steps = max(10, int(round(2 * T * p["steps_per_unit"])))
        fa = flow_time_average(p["direction"], box, T, steps)
        rows.append([T, steps, fa.average, fa.volume, abs(fa.average - fa.volume)])
    return ["horizon", "steps", "average", "volume", "error"], rows, {}


def _run_clump_verify(p):
    from .clump import SpacingFunction, alternating_identity_check
    from .torus import McConfig, haar_samples, TorusPoint
    pts = haar_samples(p["N"], McConfig(p["seed"], p["samples"]))
    rows = []
    for a in p["a"]:
        for s in p["s"]:
            f = SpacingFunction.indicator(s)
            worst = max(alternating_identity_check(a, f, TorusPoint(x)) for x in pts)
            rows.append([p["N"], a, s, worst])
    return ["N", "a", "s", "max_residual"], rows, {}


def _run_cl_converge(p):
    from .classical import cl_approx, cl_exact, factorization_gap
    from .operators import OperatorPoly
    P = OperatorPoly.gen
    prod = P(p["xi"]) * P(p["eta"])
    exact = cl_exact(prod, p["point"], p["n"])
    rows = []
    for lv in p["levels"]:
        approx = cl_approx(prod, p["point"], lv, p["n"])
        rows.append([lv, approx.real, approx.imag, exact.real,
                     factorization_gap(p["xi"], p["eta"], p["point"], lv, p["n"])])
    return ["level", "cl_approx_re", "cl_approx_im", "cl_exact_re", "gap"], rows, {}


def _run_final_bound(p):
    from .clump import EstimationParams, final_bound
    fb = final_bound(p["N"], EstimationParams(p["alpha"], p["gamma"], p["eps"]))
    rows = [["M", fb.M], ["L", fb.L], ["beta", fb.beta]]
    rows += [["summand_%d" % (i + 1), s] for i, s in enumerate(fb.summands)]
    rows += [["total", fb.total], ["dominant", fb.dominant + 1],
             ["stirling_log", fb.stirling_log], ["stirling_const", fb.stirling_const],
             ["logM_ok", fb.logM_ok], ["beta_ok", fb.beta_ok]]
    return ["name", "value"], rows, {}


RUNNERS = {
    "spacing-hist": _run_spacing_hist,
    "torus-mc-ks": _run_torus_mc_ks,
    "bn-grid": _run_bn_grid,
    "rep-weights": _run_rep_weights,
    "op-spectrum": _run_op_spectrum,
    "flow-sweep": _run_flow_sweep,
    "clump-verify": _run_clump_verify,
    "cl-converge": _run_cl_converge,
    "final-bound": _run_final_bound,
}


def run(config: ExperimentConfig) -> ResultArtifact:
    p = config.parsed()
    cols, rows, extra = RUNNERS[config.kind](p)
    meta = {"tool": "spacinglab", "version": __version__, "schema": SCHEMA,
            "kind": config.kind, "config_hash": config.digest(), "seed": p["seed"]}
    return ResultArtifact(config.kind, cols, [[_fmt(v) for v in r] for r in rows], meta,
                          {k: _fmt(v) if not isinstance(v, list) else v for k, v in extra.items()})


# ------------------------------------------------------------------ output

def render(art: ResultArtifact, fmt: str) -> str:
    if fmt == "json":
        doc = {"schema": SCHEMA, "meta": art.meta, **art.extra,
               "columns": art.columns, "rows": art.rows}
        return json.dumps(doc, separators=(",", ":")) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        for k, v in art.meta.items():
            buf.write("# %s=%s\n" % (k, v))
        for k, v in art.extra.items():
            if k != "cells":
                buf.write("# %s=%s\n" % (k, json.dumps(v)))
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(art.columns)
        w.writerows(art.rows)
        return buf.getvalue()
    raise ConfigurationError("unknown format %r" % fmt)


def emit(art: ResultArtifact, fmt: str, out_dir: str) -> str:
    """Write atomically to <out_dir>/<kind>.<fmt> and return the path."""
    text = render(art, fmt)
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "%s.%s" % (art.kind, fmt))
    fd, tmp = tempfile.mkstemp(dir=out_dir, prefix=".%s." % art.kind)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


# --------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="spacinglab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="kind", required=True)
    for kind, table in PARAMS.items():
        sp = sub.add_parser(kind)
        sp.add_argument("--config", help="key = value config file with a [%s] section" % kind)
        sp.add_argument("--seed", help="64-bit seed")
        sp.add_argument("--out", help="output directory (default $%s or .)" % OUT_ENV)
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        for key, (_, default, hlp) in table.items():
            sp.add_argument("--" + key.replace("_", "-"), dest="p_" + key,
                            help="%s (default %s)" % (hlp, default or "none"))
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        values: Dict[str, str] = {}
        if args.config:
            with open(args.config) as fh:
                values = ExperimentConfig.from_text(fh.read(), args.kind).values
        for k in PARAMS[args.kind]:
            v = getattr(args, "p_" + k)
            if v is not None:
                values[k] = v
        if args.seed is not None:
            values["seed"] = args.seed
        cfg = ExperimentConfig(args.kind, values)
        art = run(cfg)
        path = emit(art, args.format, args.out or os.environ.get(OUT_ENV, "."))
    except ConfigurationError as exc:
        return _fail(EXIT_CONFIG, "config", exc)
    except SpacingLabError as exc:
        return _fail(EXIT_NUMERIC, "numeric", exc)
    except OSError as exc:
        return _fail(EXIT_IO, "io", exc)
    print(path)
    return EXIT_OK


def _fail(code: int, kind: str, exc: Exception) -> int:
    sys.stderr.write(json.dumps({"error": kind, "type": type(exc).__name__, "message": str(exc)}) + "\n")
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
