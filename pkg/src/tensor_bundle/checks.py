"""Verification checks run by ``tensor-bundle verify``.

Every check samples points of the scenario box with its own seeded
generator (seed and check id), compares an implementation against an
independent route and returns the largest residual with the point where it
occurred.  Checks marked ``verdict`` compare a predicted yes/no answer with the
observed one instead of a residual against zero.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import connections as mc
from . import curvature as cv
from . import structures as st
from .base import geometry_at
from .config import Scenario
from .errors import ChartExit, DimensionGuard
from .frames import FiberPoint, frame_data
from .geodesics import (
    CurveState, a_term_residual, equation_residuals, fiber_acceleration, geodesic_rhs_lc,
    geodesic_rhs_metric, horizontal_lift, integrate, kinematic_residuals, oracle_geodesic,
)
from .oracle import oracle_at
from .sasaki import bundle_at, levi_civita, levi_civita_pq

__all__ = ["CheckResult", "Check", "CHECKS", "DEFAULT_TOLERANCES", "run_check", "select_checks",
           "sample_points"]

DEFAULT_TOLERANCES = {"oracle": 1e-5, "exact": 1e-10, "ode": 1e-6, "torsion": 1e-6,
                      "geodesic_gap": 1e-4, "two_path": 1e-6}
BOX_MARGIN = 0.1
FIBER_SCALE = 0.5
GEODESIC_SAMPLES = 2
LIFT_STEP = 1e-2
LIFT_LENGTH = 1.0


@dataclass
class CheckResult:
    check: str
    status: str            # "pass" | "fail" | "skip"
    max_residual: float
    tolerance: float
    worst_point: tuple = ()
    samples: int = 0
    note: str = ""


@dataclass(frozen=True)
class Check:
    id: str
    category: str
    run: Callable
    what: str
    verdict: bool = False


class Skip(Exception):
    pass


def _rng(sc: Scenario, check_id: str) -> np.random.Generator:
    return np.random.default_rng([sc.seed, zlib.crc32(check_id.encode())])


def sample_points(sc: Scenario, rng: np.random.Generator, k: int) -> list[FiberPoint]:
    box = np.array(sc.chart.box, dtype=float)
    width = box[:, 1] - box[:, 0]
    lo, hi = box[:, 0] + BOX_MARGIN * width, box[:, 1] - BOX_MARGIN * width
    N = sc.n ** (sc.p + sc.q)
    out = []
    for _ in range(k):
        x = lo + (hi - lo) * rng.random(sc.n)
        out.append(FiberPoint(x, FIBER_SCALE * rng.normal(size=N), sc.p, sc.q))
    return out


def _require_11(sc: Scenario):
    if (sc.p, sc.q) != (1, 1):
        raise Skip("closed form written for (1,1) fibers")


class _Worst:
    """Running maximum of residuals and the point where it occurred."""

    def __init__(self):
        self.value, self.point, self.count = 0.0, (), 0
        self.verdict = None

    def add(self, value: float, P: FiberPoint | None):
        self.count += 1
        value = float(value)
        if not np.isfinite(value):
            value = float("inf")
        if value >= self.value or not self.point:
            self.value = max(value, self.value)
            self.point = tuple(float(v) for v in P.coords) if P is not None else ()


def _max(a) -> float:
    a = np.asarray(a, dtype=float)
    return float(np.abs(a).max()) if a.size else 0.0


# frames ---------------------------------------------------------------------

def _bracket_fd(sc: Scenario, P: FiberPoint, h: float = 1e-5) -> float:
    z0 = P.coords
    D = len(z0)
    Ts = []
    for B in range(D):
        pair = []
        for sgn in (1, -1):
            Q = FiberPoint.from_coords(z0 + sgn * h * np.eye(D)[B], sc.n, sc.p, sc.q)
            pair.append(frame_data(Q, geometry_at(sc.chart, Q.x, 1)).T)
        Ts.append((pair[0] - pair[1]) / (2 * h))
    dT = np.array(Ts)  # [A, a, B] = ∂_A T[a, B]
    fd = frame_data(P, geometry_at(sc.chart, P.x, 2))
    br = np.einsum("aA,AbB->abB", fd.T, dT) - np.einsum("bA,AaB->abB", fd.T, dT)
    C = np.einsum("abB,Bc->cab", br, fd.T_inv)
    return _max(C - fd.C)


def check_frame_brackets(sc, rng, tol, w: _Worst):
    for P in sample_points(sc, rng, sc.samples):
        w.add(_bracket_fd(sc, P), P)


# Levi-Civita ----------------------------------------------------------------

def check_lc_oracle(sc, rng, tol, w):
    for P in sample_points(sc, rng, sc.samples):
        b = bundle_at(sc.chart, sc.f, P, derivs=2, with_aterms=False)
        try:
            orc = oracle_at(sc.chart, sc.f, P, curvature=False)
        except DimensionGuard as exc:
            raise Skip(str(exc)) from None
        w.add(_max(levi_civita(P, b.geom, b.f).coeff - orc.conn), P)


def check_lc_operator_form(sc, rng, tol, w):
    _require_11(sc)
    for P in sample_points(sc, rng, sc.samples):
        b = bundle_at(sc.chart, sc.f, P, derivs=2, with_aterms=False)
        w.add(_max(levi_civita(P, b.geom, b.f).coeff - levi_civita_pq(P, b.geom, b.f).coeff), P)


def check_lc_torsion(sc, rng, tol, w):
    for P in sample_points(sc, rng, sc.samples):
        b = bundle_at(sc.chart, sc.f, P, derivs=2, with_aterms=False)
        w.add(_max(mc.torsion(levi_civita(P, b.geom, b.f).coeff, b.frame.C)), P)


def _metricity(sc, builder, P):
    b = bundle_at(sc.chart, sc.f, P, derivs=2, with_aterms=False)
    conn = builder(P, b.geom, b.f).coeff
    return _max(mc.metricity_residual(conn, mc.metric_field(sc.chart, sc.f, sc.p, sc.q), b.frame))


def check_lc_metricity(sc, rng, tol, w):
    for P in sample_points(sc, rng, sc.samples):
        w.add(_metricity(sc, levi_civita, P), P)


# curvature ------------------------------------------------------------------

def _block_check(block: str):
    def run(sc, rng, tol, w):
        _require_11(sc)
        for P in sample_points(sc, rng, sc.samples):
            cmp = cv.compare_with_oracle(sc.chart, sc.f, P)
            w.add(max(cmp["blocks"][f"{block}.h"], cmp["blocks"][f"{block}.v"]), P)
    return run


def check_curvature_ricci(sc, rng, tol, w):
    _require_11(sc)
    for P in sample_points(sc, rng, sc.samples):
        cmp = cv.compare_with_oracle(sc.chart, sc.f, P)
        w.add(max(cmp["ricci_printed"], cmp["ricci_contracted"]), P)


def check_curvature_scalar(sc, rng, tol, w):
    _require_11(sc)
    for P in sample_points(sc, rng, sc.samples):
        cmp = cv.compare_with_oracle(sc.chart, sc.f, P)
        ref = cmp["scalar_oracle"]
        w.add(max(abs(cmp["scalar_formula"] - cmp["scalar_contracted"]),
                  abs(cmp["scalar_contracted"] - ref)), P)


def check_curvature_constant(sc, rng, tol, w):
    _require_11(sc)
    if sc.chart.kappa is None:
        raise Skip("base has no declared constant curvature")
    for P in sample_points(sc, rng, sc.samples):
        cf = cv.curvature_closed_form(sc.chart, sc.f, P)
        b = cf.extra["bundle"]
        formula = cv.constant_curvature_scalar(sc.chart.kappa, sc.n, b.f.value, P.tensor(),
                                               b.geom.g, b.geom.g_inv, cf.fL)
        w.add(abs(formula - cf.scalar), P)


def check_curvature_flatness(sc, rng, tol, w):
    _require_11(sc)
    pts = sample_points(sc, rng, sc.samples)
    reports = cv.flatness_check(sc.chart, sc.f, pts, tol,
                                bundle_curvature=lambda c, f, P: oracle_at(c, f, P).riemann)
    for P, r in zip(pts, reports):
        w.add(0.0 if r.verdict_matches else 1.0, P)
    flat = all(r.predicted_flat for r in reports)
    return "predicted flat" if flat else "predicted curved"


# structures -----------------------------------------------------------------

_STRUCTURES = (st.PARACOMPLEX, st.DIAGONAL_IDENTITY, st.GOLDEN, st.GOLDEN_CONJUGATE)


def check_structure_identities(sc, rng, tol, w):
    for P in sample_points(sc, rng, sc.samples):
        n, N = P.n, P.N
        X = rng.normal(size=n + N)
        J, DI = st.PARACOMPLEX.matrix(n, N), st.DIAGONAL_IDENTITY.matrix(n, N)
        res = [_max(J @ J @ X - X), _max(DI @ DI @ X - X)]
        for psi in (st.GOLDEN, st.GOLDEN_CONJUGATE):
            M = psi.matrix(n, N)
            res.append(_max(M @ M @ X - M @ X - X))
            F = st.product_from_golden(psi).matrix(n, N)
            res.append(_max(F @ F @ X - X))
        w.add(max(res), P)


def check_structure_purity(sc, rng, tol, w):
    for P in sample_points(sc, rng, sc.samples):
        b = bundle_at(sc.chart, sc.f, P, derivs=1, with_aterms=False)
        w.add(max(st.purity_defect(S.matrix(P.n, P.N), b.metric.G, rng) for S in _STRUCTURES), P)


def check_structure_impure_control(sc, rng, tol, w):
    """Negative control: a shear mixing the first vertical and horizontal directions."""
    defects = []
    for P in sample_points(sc, rng, sc.samples):
        b = bundle_at(sc.chart, sc.f, P, derivs=1, with_aterms=False)
        defects.append((st.purity_defect(st.shear_structure(P.n, P.N), b.metric.G, rng), P))
    d, P = min(defects, key=lambda item: item[0])
    w.add(d, P)
    w.verdict = d > tol
    return "residual is the smallest defect; must exceed tolerance"


def _fields(rng, D, z0):
    return [st.linear_field(rng.normal(size=D), 0.3 * rng.normal(size=(D, D)), z0) for _ in range(3)]


def check_phi_closed_form(sc, rng, tol, w):
    for P in sample_points(sc, rng, sc.samples):
        loc = st.LocalFrames(sc.chart, sc.f, P)
        X, Y, Z = _fields(rng, P.dim, P.coords)
        w.add(abs(st.phi_operator(loc, st.PARACOMPLEX, X, Y, Z) - st.phi_closed_form_j(loc, X, Y, Z)), P)


def check_phi_golden_relation(sc, rng, tol, w):
    F = st.product_from_golden(st.GOLDEN)
    for P in sample_points(sc, rng, sc.samples):
        loc = st.LocalFrames(sc.chart, sc.f, P)
        X, Y, Z = _fields(rng, P.dim, P.coords)
        lhs = st.phi_operator(loc, F, X, Y, Z)
        rhs = 2.0 / np.sqrt(5.0) * st.phi_operator(loc, st.GOLDEN, X, Y, Z)
        w.add(abs(lhs - rhs), P)


def check_para_kahler(sc, rng, tol, w):
    """Verdict: max |φ_J g| below tolerance exactly when the base curvature vanishes."""
    phis, curv = [], []
    for P in sample_points(sc, rng, sc.samples):
        loc = st.LocalFrames(sc.chart, sc.f, P)
        X, Y, Z = _fields(rng, P.dim, P.coords)
        phi = abs(st.phi_operator(loc, st.PARACOMPLEX, X, Y, Z))
        phis.append(phi)
        curv.append(_max(geometry_at(sc.chart, P.x, 2).riemann))
        w.add(phi, P)
    base_flat = max(curv) < DEFAULT_TOLERANCES["exact"]
    para_kahler = max(phis) < tol
    w.verdict = base_flat == para_kahler
    return "base flat, φ vanishes" if base_flat else "expected nonzero: base curved"


def check_quasi_para_kahler(sc, rng, tol, w):
    for P in sample_points(sc, rng, sc.samples):
        loc = st.LocalFrames(sc.chart, sc.f, P)
        X, Y, Z = _fields(rng, P.dim, P.coords)
        w.add(abs(st.cyclic_phi(loc, st.PARACOMPLEX, X, Y, Z)), P)


def check_product_display(sc, rng, tol, w):
    _require_11(sc)
    for P in sample_points(sc, rng, sc.samples):
        b = bundle_at(sc.chart, sc.f, P, derivs=2, with_aterms=False)
        w.add(_max(st.product_connection(P, b.geom, b.f).coeff - st.product_connection_11(P, b.geom, b.f).coeff), P)


def check_product_torsion(sc, rng, tol, w):
    """T(H,H) = -psi, T(V,H) = 3x the Levi-Civita vertical-horizontal block, T(V,V) = 0."""
    for P in sample_points(sc, rng, sc.samples):
        b = bundle_at(sc.chart, sc.f, P, derivs=2, with_aterms=False)
        n = P.n
        lc = levi_civita(P, b.geom, b.f).coeff
        T = mc.torsion(st.product_connection(P, b.geom, b.f).coeff, b.frame.C)
        hh = T[n:, :n, :n] + np.transpose(b.frame.psi, (2, 0, 1))
        vh = T[:n, n:, :n] - 3.0 * lc[:n, n:, :n]
        w.add(max(_max(hh), _max(T[:n, :n, :n]), _max(vh), _max(T[n:, n:, :n]), _max(T[:, n:, n:])), P)


# metric connections ---------------------------------------------------------

def check_metric_contorsion(sc, rng, tol, w):
    for P in sample_points(sc, rng, sc.samples):
        b = bundle_at(sc.chart, sc.f, P, derivs=2, with_aterms=False)
        d = mc.metric_connection(P, b.geom, b.f).coeff - mc.metric_connection_from_torsion(P, b.geom, b.f).coeff
        w.add(_max(d), P)


def check_metric_metricity(sc, rng, tol, w):
    for P in sample_points(sc, rng, sc.samples):
        w.add(_metricity(sc, mc.metric_connection, P), P)


def check_metric_torsion(sc, rng, tol, w):
    for P in sample_points(sc, rng, sc.samples):
        b = bundle_at(sc.chart, sc.f, P, derivs=2, with_aterms=False)
        T = mc.torsion(mc.metric_connection(P, b.geom, b.f).coeff, b.frame.C)
        prescribed = (mc.prescribed_torsion_11(P, b.geom) if (P.p, P.q) == (1, 1)
                      else mc.prescribed_torsion_pq(P, b.geom))
        w.add(_max(T - prescribed), P)


def check_metric_curvature(sc, rng, tol, w):
    _require_11(sc)
    for P in sample_points(sc, rng, sc.samples):
        b = bundle_at(sc.chart, sc.f, P, derivs=3)
        R = mc.connection_curvature(mc.coefficient_field(mc.metric_connection, sc.chart, sc.f), b.frame)
        w.add(_max(R - mc.metric_curvature_11(P, b.geom, b.aterms)), P)


def check_metric_scalar(sc, rng, tol, w):
    _require_11(sc)
    for P in sample_points(sc, rng, sc.samples):
        b = bundle_at(sc.chart, sc.f, P, derivs=3)
        R = mc.connection_curvature(mc.coefficient_field(mc.metric_connection, sc.chart, sc.f), b.frame)
        contracted = cv.contract_scalar(cv.contract_ricci(R), b.metric.G_inv)
        w.add(abs(contracted - mc.metric_scalar(b.geom, b.f, b.aterms)), P)


def check_conjugate_display(sc, rng, tol, w):
    _require_11(sc)
    for P in sample_points(sc, rng, sc.samples):
        b = bundle_at(sc.chart, sc.f, P, derivs=2, with_aterms=False)
        d = mc.conjugate_connection(P, b.geom, b.f).coeff - mc.conjugate_connection_11(P, b.geom, b.f).coeff
        w.add(_max(d), P)


def check_conjugate_metricity(sc, rng, tol, w):
    for P in sample_points(sc, rng, sc.samples):
        w.add(_metricity(sc, mc.conjugate_connection, P), P)


def check_conjugate_curvature(sc, rng, tol, w):
    for P in sample_points(sc, rng, sc.samples):
        fd = frame_data(P, geometry_at(sc.chart, P.x, 2))
        try:
            Rlc = oracle_at(sc.chart, sc.f, P).riemann
        except DimensionGuard as exc:
            raise Skip(str(exc)) from None
        R = mc.connection_curvature(mc.coefficient_field(mc.conjugate_connection, sc.chart, sc.f, sc.p, sc.q), fd)
        w.add(_max(R - mc.conjugate_curvature(Rlc, P.n)), P)


# geodesics ------------------------------------------------------------------

def _unit_velocity(sc, rng, x):
    v = rng.normal(size=sc.n)
    g = sc.chart.metric(x)
    return v / np.sqrt(v @ g @ v)


def _geodesic_initials(sc, rng):
    out = []
    for P in sample_points(sc, rng, min(sc.samples, GEODESIC_SAMPLES)):
        v = 0.5 * _unit_velocity(sc, rng, P.x)
        out.append(CurveState(P.x, P.t, v, 0.3 * rng.normal(size=P.N), sc.p, sc.q))
    return out


def _within_box(run, length):
    """Retry with shorter curves until the chart box is not left."""
    while True:
        try:
            return run(length), length
        except ChartExit:
            length /= 2
            if length < 8 * LIFT_STEP:
                raise


def check_horizontal_lift(sc, rng, tol, w):
    constant_f = sc.f.expr.nvars == 0
    for P in sample_points(sc, rng, min(sc.samples, GEODESIC_SAMPLES)):
        v = _unit_velocity(sc, rng, P.x)
        tr, _ = _within_box(lambda L: horizontal_lift(sc.chart, P.x, v, P.t, L, LIFT_STEP, sc.p, sc.q),
                            LIFT_LENGTH)
        res = equation_residuals(tr, sc.chart, sc.f)
        if constant_f:
            w.add(np.nanmax(res), P)
        else:
            w.add(np.nanmax(np.abs(res - a_term_residual(tr, sc.chart, sc.f))), P)
    return ("f constant: lift is a geodesic" if constant_f
            else "f varies: residual equals the A-term")


def _lc_trace(sc, st0, length=LIFT_LENGTH):
    run = lambda L: integrate(geodesic_rhs_lc(sc.chart, sc.f, sc.p, sc.q), st0, L, LIFT_STEP, sc.chart, sc.f)
    return _within_box(run, length)


def check_geodesic_energy(sc, rng, tol, w):
    for s0 in _geodesic_initials(sc, rng):
        tr, _ = _lc_trace(sc, s0)
        P = FiberPoint(s0.x, s0.t, sc.p, sc.q)
        w.add(np.ptp(tr.energy) / tr.energy[0], P)


def check_geodesic_residual(sc, rng, tol, w):
    for s0 in _geodesic_initials(sc, rng):
        tr, _ = _lc_trace(sc, s0)
        P = FiberPoint(s0.x, s0.t, sc.p, sc.q)
        w.add(np.nanmax(tr.residual), P)
        w.add(np.nanmax(fiber_acceleration(tr, sc.chart)), P)
        w.add(np.nanmax(kinematic_residuals(tr, sc.chart)), P)


def check_geodesic_metric(sc, rng, tol, w):
    for s0 in _geodesic_initials(sc, rng):
        run = lambda L: integrate(geodesic_rhs_metric(sc.chart, sc.f, sc.p, sc.q), s0, L, LIFT_STEP,
                                  sc.chart, sc.f, connection=mc.metric_connection, label="metric")
        tr, _ = _within_box(run, LIFT_LENGTH)
        P = FiberPoint(s0.x, s0.t, sc.p, sc.q)
        w.add(np.nanmax(tr.residual), P)
        w.add(np.nanmax(fiber_acceleration(tr, sc.chart)), P)


def check_geodesic_oracle(sc, rng, tol, w):
    for s0 in _geodesic_initials(sc, rng):
        tr, _ = _lc_trace(sc, s0)
        try:
            Z = oracle_geodesic(sc.chart, sc.f, s0, tr.s)
        except DimensionGuard as exc:
            raise Skip(str(exc)) from None
        P = FiberPoint(s0.x, s0.t, sc.p, sc.q)
        w.add(_max(Z - np.hstack([tr.x, tr.t])), P)


def _c(id, category, run, what, verdict=False):
    return Check(id, category, run, what, verdict)


CHECKS = tuple(sorted([
    _c("frame.brackets", "oracle", check_frame_brackets,
       "adapted-frame structure constants vs finite-difference commutators"),
    _c("levi_civita.oracle", "oracle", check_lc_oracle,
       "closed-form Levi-Civita coefficients vs induced-coordinate Christoffels"),
    _c("levi_civita.operator_form", "exact", check_lc_operator_form,
       "(1,1) componentwise form vs the (p,q) operator form"),
    _c("levi_civita.torsion", "exact", check_lc_torsion, "Levi-Civita torsion vanishes"),
    _c("levi_civita.metricity", "oracle", check_lc_metricity, "∇g = 0 by finite differences"),
    *[_c(f"curvature.block.{kinds}", "oracle", _block_check(name),
         f"curvature block {name} vs induced-coordinate Riemann tensor")
      for name, kinds in cv.BLOCKS.items()],
    _c("curvature.ricci", "oracle", check_curvature_ricci, "printed and contracted Ricci vs oracle"),
    _c("curvature.scalar", "oracle", check_curvature_scalar,
       "closed scalar formula vs contraction vs oracle"),
    _c("curvature.constant_curvature", "oracle", check_curvature_constant,
       "constant-curvature scalar formula vs contraction"),
    _c("curvature.flatness", "exact", check_curvature_flatness,
       "two-condition flatness verdict vs bundle curvature", verdict=True),
    _c("structure.identities", "exact", check_structure_identities,
       "J^2 = I, (DI)^2 = I, Golden identity, F^2 = I"),
    _c("structure.purity", "exact", check_structure_purity, "metric is pure for J, DI and both Golden structures"),
    _c("structure.impure_control", "exact", check_structure_impure_control,
       "negative control: a shear structure is detected as impure", verdict=True),
    _c("structure.phi_closed_form", "oracle", check_phi_closed_form,
       "φ_J g from its definition vs curvature-operator closed form"),
    _c("structure.phi_golden", "oracle", check_phi_golden_relation, "φ_F g = (2/√5) φ_ψ g"),
    _c("structure.para_kahler", "oracle", check_para_kahler,
       "φ_J g vanishes exactly when the base is flat", verdict=True),
    _c("structure.quasi_para_kahler", "oracle", check_quasi_para_kahler, "cyclic sum of φ_J g vanishes"),
    _c("structure.product_display", "exact", check_product_display,
       "almost product connection: construction vs displayed blocks"),
    _c("structure.product_torsion", "torsion", check_product_torsion,
       "almost product connection torsion vs its three displayed blocks"),
    _c("metric_connection.contorsion", "exact", check_metric_contorsion,
       "displayed metric connection vs Levi-Civita plus contorsion"),
    _c("metric_connection.metricity", "oracle", check_metric_metricity, "∇g = 0 by finite differences"),
    _c("metric_connection.torsion", "torsion", check_metric_torsion, "realized torsion vs prescribed torsion"),
    _c("metric_connection.curvature", "oracle", check_metric_curvature,
       "finite-difference curvature vs displayed blocks"),
    _c("metric_connection.scalar", "two_path", check_metric_scalar, "contracted scalar vs r/f + fL"),
    _c("conjugate.display", "exact", check_conjugate_display, "displayed blocks vs J∇J"),
    _c("conjugate.metricity", "oracle", check_conjugate_metricity, "∇g = 0 by finite differences"),
    _c("conjugate.curvature", "oracle", check_conjugate_curvature,
       "finite-difference curvature vs J R(X, Y) J"),
    _c("geodesic.horizontal_lift", "ode", check_horizontal_lift,
       "horizontal lift of a base geodesic: geodesic residual vs predicted"),
    _c("geodesic.energy", "ode", check_geodesic_energy, "relative energy drift along Levi-Civita geodesics"),
    _c("geodesic.residual", "ode", check_geodesic_residual,
       "Levi-Civita geodesic residual, fiber covariant acceleration, kinematic consistency"),
    _c("geodesic.metric_connection", "ode", check_geodesic_metric,
       "metric-connection geodesic residual and fiber covariant acceleration"),
    _c("geodesic.oracle", "geodesic_gap", check_geodesic_oracle,
       "adapted-frame geodesic vs induced-coordinate geodesic"),
], key=lambda c: c.id))


def select_checks(spec: str | None) -> list[Check]:
    """Comma-separated ids or prefixes (``curvature`` selects every curvature check)."""
    if not spec:
        return list(CHECKS)
    wanted = [s.strip() for s in spec.split(",") if s.strip()]
    out = [c for c in CHECKS if any(c.id == s or c.id.startswith(s + ".") for s in wanted)]
    unknown = [s for s in wanted if not any(c.id == s or c.id.startswith(s + ".") for c in CHECKS)]
    if unknown:
        from .errors import ConfigError

        raise ConfigError("--checks", f"unknown check id(s): {', '.join(unknown)}")
    return out


def run_check(check: Check, sc: Scenario) -> CheckResult:
    tol = sc.tolerances.get(check.id, DEFAULT_TOLERANCES[check.category])
    w = _Worst()
    try:
        note = check.run(sc, _rng(sc, check.id), tol, w) or ""
    except Skip as exc:
        return CheckResult(check.id, "skip", 0.0, tol, (), 0, str(exc))
    if check.id == "curvature.flatness":
        passed = w.value == 0.0
    elif check.verdict:
        passed = bool(w.verdict)
    else:
        passed = w.value <= tol
    return CheckResult(check.id, "pass" if passed else "fail", w.value, tol, w.point, w.count, note)
