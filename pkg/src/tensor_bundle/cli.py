"""Command-line front end: ``tensor-bundle {verify,curvature,geodesic,presets}``.

Exit codes: 0 when every check passes, 1 when any check fails, 2 for
configuration and input errors.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from importlib import resources
from pathlib import Path

import numpy as np

from . import base
from . import curvature as cv
from .checks import CHECKS, DEFAULT_TOLERANCES, run_check, select_checks
from .config import Scenario, load_config, parse_config
from .errors import BundleError, ChartExit, ConfigError
from .frames import FiberPoint
from .geodesics import (
    CurveState, a_term_residual, energy, equation_residuals, geodesic_rhs_lc, geodesic_rhs_metric,
    horizontal_lift, integrate, write_csv,
)
from .connections import metric_connection
from .sasaki import levi_civita
from .report import format_line, result_record, scenario_header, summary_record, write_records

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def default_scenarios() -> list[Path]:
    root = resources.files("tensor_bundle") / "scenarios"
    return sorted(Path(str(p)) for p in root.iterdir() if p.name.endswith(".conf"))


def _parse_tol(items) -> dict:
    out = {}
    for item in items or ():
        key, sep, val = item.partition("=")
        if not sep:
            raise ConfigError("--tol", f"expected KEY=VAL, got {item!r}")
        key = key.strip()
        if key not in DEFAULT_TOLERANCES and not any(c.id == key for c in CHECKS):
            raise ConfigError("--tol", f"unknown check id or category {key!r}")
        try:
            out[key] = float(val)
        except ValueError:
            raise ConfigError("--tol", f"not a number: {val!r}") from None
        if not out[key] > 0:
            raise ConfigError("--tol", "tolerance must be positive")
    return out


def _apply_tolerances(sc: Scenario, tol: dict) -> Scenario:
    """Category keys (oracle, exact, ...) expand to every check of that category."""
    expanded = {}
    for key, val in tol.items():
        if key in DEFAULT_TOLERANCES:
            expanded.update({c.id: val for c in CHECKS if c.category == key})
    expanded.update({k: v for k, v in tol.items() if k not in DEFAULT_TOLERANCES})
    return sc.with_overrides(tolerances=expanded)


def _scenarios(args) -> list[Scenario]:
    paths = args.config or default_scenarios()
    tol = _parse_tol(getattr(args, "tol", None))
    out = []
    for p in paths:
        sc = load_config(p)
        sc = _apply_tolerances(sc, tol).with_overrides(seed=getattr(args, "seed", None))
        out.append(sc)
    return out


def _vector(text: str, name: str, size: int | None = None) -> np.ndarray:
    try:
        v = np.array([float(s) for s in text.split(",") if s.strip()], dtype=float)
    except ValueError:
        raise ConfigError(name, f"expected comma-separated numbers, got {text!r}") from None
    if size is not None and len(v) != size:
        raise ConfigError(name, f"expected {size} values, got {len(v)}")
    return v


def _fiber(text: str | None, sc: Scenario) -> np.ndarray:
    N = sc.n ** (sc.p + sc.q)
    if text is None:
        return np.zeros(N)
    if text.strip() == "id":
        if (sc.p, sc.q) != (1, 1):
            raise ConfigError("--t", "'id' needs a (1,1) bundle")
        return np.eye(sc.n).ravel()
    return _vector(text, "--t", N)


def _single(args) -> Scenario:
    if args.config and len(args.config) > 1:
        raise ConfigError("--config", "give one scenario")
    if args.config:
        return load_config(args.config[0])
    return parse_config("base.preset = sphere\n", "sphere")


def _check_inside(sc: Scenario, x) -> None:
    for xi, (lo, hi) in zip(x, sc.chart.box):
        if not lo <= xi <= hi:
            raise ChartExit(x)


# verify ---------------------------------------------------------------------

def cmd_verify(args) -> int:
    scenarios = _scenarios(args)
    checks = select_checks(args.checks)
    if args.samples is not None:
        if args.samples < 1:
            raise ConfigError("--samples", "must be at least 1")
        scenarios = [replace(s, samples=args.samples) for s in scenarios]
    records, results = [], []
    for sc in scenarios:
        records.append(scenario_header(sc))
        for chk in checks:
            r = run_check(chk, sc)
            results.append(r)
            records.append(result_record(sc, r))
            if not args.quiet:
                print(format_line(sc, r), flush=True)
    records.append(summary_record(results))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            write_records(records, fh)
    s = records[-1]
    print(f"{s['passed']} passed, {s['failed']} failed, {s['skipped']} skipped")
    return EXIT_FAIL if s["failed"] else EXIT_OK


# curvature ------------------------------------------------------------------

def cmd_curvature(args) -> int:
    sc = _single(args)
    if (sc.p, sc.q) != (1, 1):
        raise ConfigError("bundle", "closed-form curvature is available for (1,1) bundles only")
    x = _vector(args.x, "--x", sc.n) if args.x else np.array([np.mean(b) for b in sc.chart.box])
    _check_inside(sc, x)
    P = FiberPoint(x, _fiber(args.t, sc), sc.p, sc.q)
    cf = cv.curvature_closed_form(sc.chart, sc.f, P)
    n, D = sc.n, P.dim
    np.set_printoptions(precision=6, suppress=True, linewidth=120)
    print(f"scenario {sc.name}  x = {x.tolist()}  t = {P.t.tolist()}")
    print("curvature blocks (max |component|, horizontal / vertical output):")
    for name, kinds in cv.BLOCKS.items():
        sl = tuple({"H": slice(0, n), "V": slice(n, D)}[k] for k in kinds)
        blk = cf.R[sl]
        print(f"  {name}: {np.abs(blk[..., :n]).max():.6e} / {np.abs(blk[..., n:]).max():.6e}")
    print("Ricci (contraction):")
    print(cf.ricci)
    print(f"max |printed Ricci - contraction| = {np.abs(cf.ricci_printed - cf.ricci).max():.3e}")
    print(f"scalar (contraction)     = {cf.scalar:.12g}")
    print(f"scalar (printed Ricci)   = {cf.scalar_printed_ricci:.12g}")
    print(f"scalar (closed formula)  = {cf.scalar_formula:.12g}")
    if sc.chart.kappa is not None:
        b = cf.extra["bundle"]
        cc = cv.constant_curvature_scalar(sc.chart.kappa, n, b.f.value, P.tensor(), b.geom.g, b.geom.g_inv, cf.fL)
        print(f"scalar (constant curvature) = {cc:.12g}")
    print(f"fL = {cf.fL:.12g}")
    return EXIT_OK


# geodesic -------------------------------------------------------------------

def cmd_geodesic(args) -> int:
    sc = _single(args)
    x = _vector(args.x, "--x", sc.n) if args.x else np.array([np.mean(b) for b in sc.chart.box])
    _check_inside(sc, x)
    t = _fiber(args.t, sc)
    xdot = _vector(args.xdot, "--xdot", sc.n) if args.xdot else np.eye(sc.n)[0]
    N = len(t)
    if args.lift:
        tr = horizontal_lift(sc.chart, x, xdot, t, args.s_max, args.step, sc.p, sc.q)
        tr.residual = equation_residuals(tr, sc.chart, sc.f)
        predicted = a_term_residual(tr, sc.chart, sc.f)
    else:
        w = _vector(args.w, "--w", N) if args.w else np.zeros(N)
        st = CurveState(x, t, xdot, w, sc.p, sc.q)
        if args.connection == "metric":
            rhs, conn = geodesic_rhs_metric(sc.chart, sc.f, sc.p, sc.q), metric_connection
        else:
            rhs, conn = geodesic_rhs_lc(sc.chart, sc.f, sc.p, sc.q), levi_civita
        tr = integrate(rhs, st, args.s_max, args.step, sc.chart, sc.f, connection=conn, label=args.connection)
        predicted = None
    if tr.energy is None:
        tr.energy = energy(tr, sc.chart, sc.f)
    if args.out:
        write_csv(tr, sc.chart, args.out)
    res = tr.residual[np.isfinite(tr.residual)]
    print(f"scenario {sc.name}  connection {'lift' if args.lift else args.connection}  "
          f"samples {len(tr.s)}  s_end {tr.s[-1]:.6g}")
    print(f"max residual          = {res.max():.3e}")
    print(f"final residual        = {res[-1]:.3e}")
    print(f"relative energy drift = {np.ptp(tr.energy) / max(abs(tr.energy[0]), 1e-300):.3e}")
    if predicted is not None:
        gap = np.nanmax(np.abs(tr.residual - predicted))
        print(f"predicted A-term max  = {predicted.max():.3e}  (|residual - predicted| = {gap:.3e})")
    return EXIT_OK


# presets --------------------------------------------------------------------

def cmd_presets(args) -> int:
    print("base presets:")
    for name in base.PRESETS:
        ch = base.preset(name)
        box = ", ".join(f"[{lo:g}, {hi:g}]" for lo, hi in ch.box)
        print(f"  {name:<11s} n={ch.n}  box {box}  kappa={ch.kappa}")
    print("shipped scenarios:")
    for p in default_scenarios():
        sc = load_config(p)
        print(f"  {p.name:<20s} {sc.chart.name} f={sc.f.expr} bundle=({sc.p},{sc.q})")
    print("checks:")
    for c in CHECKS:
        print(f"  {c.id:<34s} [{c.category}, {DEFAULT_TOLERANCES[c.category]:.0e}] {c.what}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tensor-bundle",
                                     description="Rescaled Sasaki-type metric on tensor bundles: checks and queries.")
    sub = parser.add_subparsers(dest="command", required=True)

    def scenario_flags(p, many):
        p.add_argument("--config", action="append", metavar="PATH",
                       help="scenario file" + (" (repeatable; default: shipped scenarios)" if many else ""))

    v = sub.add_parser("verify", help="run verification checks")
    scenario_flags(v, True)
    v.add_argument("--out", metavar="PATH", help="JSON-lines report")
    v.add_argument("--seed", type=int, help="override the scenario seed")
    v.add_argument("--checks", metavar="LIST", help="comma-separated check ids or prefixes")
    v.add_argument("--tol", action="append", metavar="KEY=VAL",
                   help="tolerance override for a check id or category (repeatable)")
    v.add_argument("--samples", type=int, help="override sample points per check")
    v.add_argument("--quiet", action="store_true", help="print only the summary")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("curvature", help="curvature blocks and scalar curvature at a point")
    scenario_flags(c, False)
    c.add_argument("--x", help="base point, comma-separated (default: box centre)")
    c.add_argument("--t", help="fiber components, comma-separated, or 'id' (default: 0)")
    c.set_defaults(func=cmd_curvature)

    g = sub.add_parser("geodesic", help="integrate a bundle geodesic and write a CSV trace")
    scenario_flags(g, False)
    g.add_argument("--x", help="initial base point (default: box centre)")
    g.add_argument("--t", help="initial fiber components or 'id' (default: 0)")
    g.add_argument("--xdot", help="initial base velocity (default: first axis)")
    g.add_argument("--w", help="initial covariant fiber velocity (default: 0)")
    g.add_argument("--connection", choices=("lc", "metric"), default="lc")
    g.add_argument("--lift", action="store_true",
                   help="horizontal lift of the base geodesic (fiber tensor parallel)")
    g.add_argument("--s-max", type=float, default=1.0)
    g.add_argument("--step", type=float, default=1e-2)
    g.add_argument("--out", metavar="PATH", help="CSV trace")
    g.set_defaults(func=cmd_geodesic)

    pr = sub.add_parser("presets", help="list base presets, shipped scenarios and check ids")
    pr.set_defaults(func=cmd_presets)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
    except BundleError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
