"""Acceptance criteria, one test each.  Every test prints a PASS/FAIL line."""

import math
import subprocess
import sys
import time

import numpy as np
import pytest

from tensor_bundle import base
from tensor_bundle import connections as mc
from tensor_bundle import curvature as cv
from tensor_bundle import structures as st
from tensor_bundle.frames import FiberPoint
from tensor_bundle.geodesics import (
    CurveState, a_term_residual, convergence_order, equation_residuals, fiber_acceleration,
    geodesic_rhs_lc, horizontal_lift, integrate, oracle_geodesic,
)
from tensor_bundle.oracle import oracle_at
from tensor_bundle.sasaki import bundle_at, levi_civita

from conftest import random_point, rescale


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {number} {'PASS' if ok else 'FAIL'}  {detail}")
    return emit


def lc_oracle_gap(chart, f, P):
    b = bundle_at(chart, f, P, derivs=2, with_aterms=False)
    return np.abs(levi_civita(P, b.geom, b.f).coeff - oracle_at(chart, f, P, curvature=False).conn).max()


def test_1_connection_oracle(report, rng):
    start = time.perf_counter()
    cases = [("sphere f=1", base.sphere(1.0), rescale("1")),
             ("plane f=1+x1^2/10", base.euclidean(2), rescale("1 + x1^2/10"))]
    worst = {}
    for label, chart, f in cases:
        worst[label] = max(lc_oracle_gap(chart, f, random_point(chart, rng)) for _ in range(20))
    elapsed = time.perf_counter() - start
    ok = max(worst.values()) < 1e-5 and elapsed < 10
    report(1, ok, f"max gap {max(worst.values()):.1e} over 2x20 points in {elapsed:.1f} s")
    assert ok, (worst, elapsed)


def test_2_curvature_blocks(report, rng):
    start = time.perf_counter()
    sphere = base.sphere(1.0)
    points = [random_point(sphere, rng) for _ in range(10)]
    points.append(FiberPoint([1.0, 0.3], np.zeros(4)))  # t = 0 family
    worst = {}
    for P in points:
        for name, dev in cv.compare_with_oracle(sphere, rescale("1"), P)["blocks"].items():
            worst[name] = max(worst.get(name, 0.0), dev)
    # flat base with non-constant f
    plane, fq = base.euclidean(2), rescale("1 + x1^2/10")
    for _ in range(5):
        for name, dev in cv.compare_with_oracle(plane, fq, random_point(plane, rng))["blocks"].items():
            worst[name] = max(worst[name], dev)
    elapsed = time.perf_counter() - start
    failing = {k: v for k, v in worst.items() if v >= 1e-5}
    ok = not failing and elapsed < 60
    report(2, ok, f"max block gap {max(worst.values()):.1e}, failing blocks {sorted(failing) or 'none'}, "
                  f"{elapsed:.1f} s")
    assert ok, (failing, elapsed)


def test_3_flatness(report, rng):
    plane = base.euclidean(2)
    pts = [random_point(plane, rng) for _ in range(50)]
    flat_closed = max(np.abs(cv.curvature_closed_form(plane, rescale("1"), P).R).max() for P in pts)
    flat_oracle = max(np.abs(oracle_at(plane, rescale("1"), P).riemann).max() for P in pts[:10])

    space = base.euclidean(3)
    f3 = rescale("exp(x1)", 3)
    pts3 = [random_point(space, rng) for _ in range(10)]
    oracle_riemann = lambda c, f, P: oracle_at(c, f, P).riemann
    rep3 = cv.flatness_check(space, f3, pts3, bundle_curvature=oracle_riemann)
    rep2 = cv.flatness_check(plane, rescale("exp(x1)"), pts[:10], bundle_curvature=oracle_riemann)

    combination = min(r.max_combination for r in rep3)
    ok = (flat_closed < 1e-10 and flat_oracle < 1e-10 and combination > 1e-3
          and all(r.verdict_matches and not r.predicted_flat for r in rep3)
          and all(r.verdict_matches for r in rep2))
    report(3, ok, f"R^2 f=1 max|R| {flat_closed:.1e}; R^3 exp(x1) min combination {combination:.3f}, "
                  f"verdicts match; R^2 exp(x1) predicted flat: {all(r.predicted_flat for r in rep2)}")
    assert ok


def test_4_scalar_curvature(report, rng):
    sphere = base.sphere(1.0)
    gap = 0.0
    for f in (rescale("1"), rescale("exp(x1/5)")):
        for _ in range(5):
            cmp = cv.compare_with_oracle(sphere, f, random_point(sphere, rng))
            if max(cmp["blocks"].values()) < 1e-5:
                gap = max(gap, abs(cmp["scalar_formula"] - cmp["scalar_contracted"]),
                          abs(cmp["scalar_contracted"] - cmp["scalar_oracle"]))
    values = []
    for t in (np.zeros(4), np.eye(2).ravel()):
        for x in ([math.pi / 2, 0.0], [1.0, 0.7]):
            P = FiberPoint(x, t)
            cf = cv.curvature_closed_form(sphere, rescale("1"), P)
            b = cf.extra["bundle"]
            values += [cf.scalar, cf.scalar_formula,
                       cv.constant_curvature_scalar(1.0, 2, b.f.value, t, b.geom.g, b.geom.g_inv, cf.fL)]
    dev = max(abs(v - 2.0) for v in values)
    ok = gap < 1e-5 and dev < 1e-6
    report(4, ok, f"two-path scalar gap {gap:.1e}; max |r - 2| on unit sphere {dev:.1e}")
    assert ok


def test_5_structures(report, rng):
    sphere, plane = base.sphere(1.0), base.euclidean(2)
    n, N = 2, 4
    J, psi = st.PARACOMPLEX.matrix(n, N), st.GOLDEN.matrix(n, N)
    I = np.eye(n + N)
    algebra = max(np.abs(J @ J - I).max(), np.abs(psi @ psi - psi - I).max())
    purity = 0.0
    for chart, f in ((sphere, rescale("exp(x1/5)")), (plane, rescale("1 + x1^2/10"))):
        for _ in range(5):
            P = random_point(chart, rng)
            G = bundle_at(chart, f, P, derivs=1, with_aterms=False).metric.G
            purity = max(purity, st.purity_defect(J, G, rng), st.purity_defect(psi, G, rng))

    def fields(P):
        return [st.linear_field(rng.normal(size=P.dim), 0.3 * rng.normal(size=(P.dim, P.dim)), P.coords)
                for _ in range(3)]

    closed = 0.0
    for f in (rescale("1"), rescale("exp(x1/5)")):
        for _ in range(5):
            loc = st.LocalFrames(sphere, f, random_point(sphere, rng))
            X, Y, Z = fields(loc.P)
            closed = max(closed, abs(st.phi_operator(loc, st.PARACOMPLEX, X, Y, Z)
                                     - st.phi_closed_form_j(loc, X, Y, Z)))
    cyclic = 0.0
    for chart in (plane, sphere):
        for f in (rescale("1"), rescale("exp(x1/5)")):
            P = random_point(chart, rng)
            loc = st.LocalFrames(chart, f, P)
            for _ in range(20):
                cyclic = max(cyclic, abs(st.cyclic_phi(loc, st.PARACOMPLEX, *fields(P))))
    ok = algebra < 1e-12 and purity < 1e-12 and closed < 1e-5 and cyclic < 1e-5
    report(5, ok, f"algebra {algebra:.1e}, purity {purity:.1e}, phi closed form {closed:.1e}, "
                  f"cyclic sum {cyclic:.1e}")
    assert ok


def test_6_metric_connections(report, rng):
    sphere = base.sphere(1.0)
    metricity = torsion = scalar = conj = 0.0
    for f in (rescale("1"), rescale("exp(x1/5)")):
        gfield = mc.metric_field(sphere, f)
        for _ in range(4):
            P = random_point(sphere, rng)
            b = bundle_at(sphere, f, P, derivs=3)
            conn = mc.metric_connection(P, b.geom, b.f).coeff
            metricity = max(metricity, np.abs(mc.metricity_residual(conn, gfield, b.frame)).max())
            T = mc.torsion(conn, b.frame.C)
            torsion = max(torsion, np.abs(T - mc.prescribed_torsion_11(P, b.geom)).max())
            R = mc.connection_curvature(mc.coefficient_field(mc.metric_connection, sphere, f), b.frame)
            contracted = cv.contract_scalar(cv.contract_ricci(R), b.metric.G_inv)
            scalar = max(scalar, abs(contracted - mc.metric_scalar(b.geom, b.f, b.aterms)))
            cj = mc.conjugate_connection(P, b.geom, b.f).coeff
            conj = max(conj, np.abs(mc.metricity_residual(cj, gfield, b.frame)).max())
    ok = metricity < 1e-5 and torsion < 1e-6 and scalar < 1e-6 and conj < 1e-5
    report(6, ok, f"metricity {metricity:.1e}, torsion {torsion:.1e}, scalar two-path {scalar:.1e}, "
                  f"conjugate metricity {conj:.1e}")
    assert ok


def test_7_geodesics(report):
    sphere, plane = base.sphere(1.0), base.euclidean(2)
    tilt = 0.5
    lift = horizontal_lift(sphere, [math.pi / 2, -math.pi / 2], [math.cos(tilt), math.sin(tilt)],
                           [0.3, 0.1, -0.2, 0.5], math.pi, 1e-2)
    lift_res = np.nanmax(equation_residuals(lift, sphere, rescale("1")))

    fe = rescale("exp(x1)")
    flat_lift = horizontal_lift(plane, [-0.5, 0.0], [1.0, 0.0], np.eye(2).ravel(), 1.0, 1e-2)
    flat_res = equation_residuals(flat_lift, plane, fe)
    a_gap = np.nanmax(np.abs(flat_res - a_term_residual(flat_lift, plane, fe)))

    f = rescale("exp(x1/5)")
    s0 = CurveState([1.2, 0.1], [0.4, -0.2, 0.1, 0.3], [0.4, 0.3], [0.1, -0.2, 0.05, 0.1])
    rhs = geodesic_rhs_lc(sphere, f)
    order = convergence_order(rhs, s0, 0.5, 0.1, sphere)
    tr = integrate(rhs, s0, 1.0, 1e-2, sphere, f)
    fiber = max(np.nanmax(fiber_acceleration(t, sphere)) for t in (lift, tr))
    gap = np.abs(oracle_geodesic(sphere, f, s0, tr.s) - np.hstack([tr.x, tr.t])).max()

    ok = (lift_res < 1e-6 and np.nanmin(flat_res) > 0.1 and a_gap < 1e-6 and order >= 3
          and fiber < 1e-6 and gap < 1e-4)
    report(7, ok, f"great-circle lift {lift_res:.1e}; flat exp lift residual {np.nanmax(flat_res):.3f} "
                  f"vs A-term gap {a_gap:.1e}; order {order:.2f}; fiber accel {fiber:.1e}; oracle gap {gap:.1e}")
    assert ok


def test_8_cli_verify(report, tmp_path):
    outputs, times, codes = [], [], []
    for name in ("a.jsonl", "b.jsonl"):
        path = tmp_path / name
        start = time.perf_counter()
        proc = subprocess.run([sys.executable, "-m", "tensor_bundle.cli", "verify", "--quiet",
                               "--out", str(path)], capture_output=True, text=True)
        times.append(time.perf_counter() - start)
        codes.append(proc.returncode)
        outputs.append(path.read_bytes())
    identical = outputs[0] == outputs[1]
    ok = codes == [0, 0] and max(times) < 120 and identical
    report(8, ok, f"exit codes {codes}, {max(times):.0f} s per run, byte-identical {identical}")
    assert ok
