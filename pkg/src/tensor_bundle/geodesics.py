"""Geodesics of the tensor bundle and horizontal lifts of base curves.

A bundle curve is carried as ``(x, t, xdot, w)`` where ``w = δt/ds`` is the
covariant fiber velocity, so the natural fiber velocity is
``dt/ds = w - act(Γ_xdot) t``.  In adapted components the velocity is
``ω = (xdot, w)`` and a geodesic of a connection satisfies

    dω^a/ds + conn[a, b, c] ω^b ω^c = 0.

Residuals of that equation are measured on sampled traces with sixth-order
finite differences, independently of the integrator.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from . import tensors
from .base import ManifoldChart, geometry_at
from .errors import BadParameter, ChartExit, ShapeMismatch, StepUnderflow
from .frames import FiberPoint, frame_data
from .oracle import natural_christoffel, natural_metric_jet
from .sasaki import RescaleFunction, a_tensor, levi_civita, metric_at

__all__ = [
    "CurveState", "GeodesicTrace", "rhs_from_connection", "geodesic_rhs_lc",
    "geodesic_rhs_metric", "rk4", "integrate", "equation_residuals", "kinematic_residuals",
    "fiber_acceleration", "energy", "horizontal_lift", "a_term_residual",
    "oracle_geodesic", "to_natural_state", "convergence_order", "trace_columns",
    "write_csv", "F_FLOOR",
]

# below this value of f the rescaled equations are treated as singular
F_FLOOR = 1e-8


@dataclass(frozen=True)
class CurveState:
    x: np.ndarray
    t: np.ndarray
    xdot: np.ndarray
    w: np.ndarray
    p: int = 1
    q: int = 1

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).reshape(-1)
        n = len(x)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "t", tensors.as_flat(self.t, n, self.p, self.q).astype(float))
        object.__setattr__(self, "xdot", np.asarray(self.xdot, dtype=float).reshape(n))
        object.__setattr__(self, "w", tensors.as_flat(self.w, n, self.p, self.q).astype(float))

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def N(self) -> int:
        return len(self.t)

    def vector(self) -> np.ndarray:
        return np.concatenate([self.x, self.t, self.xdot, self.w])

    @classmethod
    def from_vector(cls, y, n: int, p: int = 1, q: int = 1) -> "CurveState":
        N = tensors.fiber_dim(n, p, q)
        y = np.asarray(y, dtype=float)
        if y.shape != (2 * (n + N),):
            raise ShapeMismatch(f"state vector must have {2 * (n + N)} entries")
        return cls(y[:n], y[n:n + N], y[n + N:2 * n + N], y[2 * n + N:], p, q)


@dataclass
class GeodesicTrace:
    s: np.ndarray
    x: np.ndarray
    t: np.ndarray
    xdot: np.ndarray
    w: np.ndarray
    p: int
    q: int
    residual: np.ndarray | None = None
    energy: np.ndarray | None = None
    connection: str = ""
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.x.shape[1]

    def state(self, k: int) -> CurveState:
        return CurveState(self.x[k], self.t[k], self.xdot[k], self.w[k], self.p, self.q)


def _split(y, n, N):
    return y[:n], y[n:n + N], y[n + N:2 * n + N], y[2 * n + N:]


def _gamma_act(geom, p, q):
    lam = tensors.derivation_tensor(geom.n, p, q)
    return tensors.act_matrix(np.transpose(geom.gamma, (1, 0, 2)), lam)  # [l, K, L]


def _f_at(f: RescaleFunction, x, g_inv):
    fa = f.at(x, g_inv)
    if fa.value < F_FLOOR:
        raise StepUnderflow(f"f = {fa.value:.3g} below {F_FLOOR:g} at x = {tuple(x)}")
    return fa


def rhs_from_connection(builder, chart: ManifoldChart, f: RescaleFunction,
                        p: int = 1, q: int = 1) -> Callable:
    """Geodesic equations of any adapted-frame connection ``builder(P, geom, f)``."""
    n = chart.n
    N = tensors.fiber_dim(n, p, q)

    def rhs(s, y):
        x, t, xd, w = _split(y, n, N)
        P = FiberPoint(x, t, p, q)
        geom = geometry_at(chart, x, 2)
        conn = builder(P, geom, _f_at(f, x, geom.g_inv)).coeff
        om = np.concatenate([xd, w])
        acc = -np.einsum("abc,b,c->a", conn, om, om)
        tdot = w - np.einsum("l,lKL,L->K", xd, _gamma_act(geom, p, q), t)
        return np.concatenate([xd, tdot, acc[:n], acc[n:]])

    return rhs


def geodesic_rhs_lc(chart: ManifoldChart, f: RescaleFunction, p: int = 1, q: int = 1) -> Callable:
    """Reduced Levi-Civita equations.

    ẍ^r = -(Γ + A/2f)^r_{lj} ẋ^l ẋ^j - (1/f) g^{rk} G(w, psi[k, l]) ẋ^l and δw/ds = 0.
    """
    n = chart.n
    N = tensors.fiber_dim(n, p, q)

    def rhs(s, y):
        x, t, xd, w = _split(y, n, N)
        geom = geometry_at(chart, x, 2)
        fa = _f_at(f, x, geom.g_inv)
        P = FiberPoint(x, t, p, q)
        fd = frame_data(P, geom)
        Gv = tensors.fiber_metric(geom.g, geom.g_inv, p, q)
        horiz = geom.gamma + a_tensor(geom, fa) / (2 * fa.value)
        xdd = (-np.einsum("rlj,l,j->r", horiz, xd, xd)
               - np.einsum("rk,K,KL,klL,l->r", geom.g_inv, w, Gv, fd.psi, xd) / fa.value)
        gact = fd.gamma_act
        wd = -np.einsum("l,lKL,L->K", xd, gact, w)
        tdot = w - np.einsum("l,lKL,L->K", xd, gact, t)
        return np.concatenate([xd, tdot, xdd, wd])

    return rhs


def geodesic_rhs_metric(chart: ManifoldChart, f: RescaleFunction, p: int = 1, q: int = 1) -> Callable:
    """Decoupled metric-connection equations: ẍ = -(Γ + A/2f)ẋẋ and δw/ds = 0."""
    n = chart.n
    N = tensors.fiber_dim(n, p, q)

    def rhs(s, y):
        x, t, xd, w = _split(y, n, N)
        geom = geometry_at(chart, x, 1)
        fa = _f_at(f, x, geom.g_inv)
        horiz = geom.gamma + a_tensor(geom, fa) / (2 * fa.value)
        gact = _gamma_act(geom, p, q)
        xdd = -np.einsum("rlj,l,j->r", horiz, xd, xd)
        wd = -np.einsum("l,lKL,L->K", xd, gact, w)
        tdot = w - np.einsum("l,lKL,L->K", xd, gact, t)
        return np.concatenate([xd, tdot, xdd, wd])

    return rhs


def _in_box(chart: ManifoldChart, x) -> bool:
    return all(lo <= v <= hi for v, (lo, hi) in zip(x, chart.box))


def rk4(rhs: Callable, y0, s_max: float, step: float, chart: ManifoldChart | None = None):
    """Classical fixed-step RK4; the last step is shortened to land on ``s_max``."""
    if not step > 0:
        raise BadParameter("step must be positive")
    if not s_max > 0:
        raise BadParameter("s_max must be positive")
    n = chart.n if chart is not None else None
    steps = int(np.ceil(s_max / step - 1e-9))
    s_grid = np.minimum(np.arange(steps + 1) * step, s_max)
    ys = np.empty((steps + 1, len(y0)))
    ys[0] = y = np.asarray(y0, dtype=float)
    for k in range(steps):
        s, h = s_grid[k], s_grid[k + 1] - s_grid[k]
        k1 = rhs(s, y)
        k2 = rhs(s + h / 2, y + h / 2 * k1)
        k3 = rhs(s + h / 2, y + h / 2 * k2)
        k4 = rhs(s + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise StepUnderflow(f"non-finite state at s = {s_grid[k + 1]:.6g}")
        if chart is not None and not _in_box(chart, y[:n]):
            raise ChartExit(y[:n], float(s_grid[k + 1]))
        ys[k + 1] = y
    return s_grid, ys


def _trace_from(s, ys, n, p, q, label) -> GeodesicTrace:
    N = tensors.fiber_dim(n, p, q)
    return GeodesicTrace(s, ys[:, :n], ys[:, n:n + N], ys[:, n + N:2 * n + N], ys[:, 2 * n + N:],
                         p, q, connection=label)


def integrate(rhs: Callable, initial: CurveState, s_max: float, step: float,
              chart: ManifoldChart, f: RescaleFunction, connection=levi_civita,
              label: str = "levi_civita", record: bool = True) -> GeodesicTrace:
    """RK4 trace with per-sample equation residuals (for ``connection``) and energy."""
    if initial.n != chart.n:
        raise ShapeMismatch("initial state dimension does not match the chart")
    if not _in_box(chart, initial.x):
        raise ChartExit(initial.x, 0.0)
    s, ys = rk4(rhs, initial.vector(), s_max, step, chart)
    tr = _trace_from(s, ys, chart.n, initial.p, initial.q, label)
    if record:
        tr.residual = equation_residuals(tr, chart, f, connection)
        tr.energy = energy(tr, chart, f)
    return tr


STENCIL_POINTS = 7


@lru_cache(maxsize=None)
def _stencil(offsets: tuple) -> np.ndarray:
    """First-derivative weights on integer offsets (unit spacing)."""
    k = len(offsets)
    V = np.vander(np.asarray(offsets, dtype=float), k, increasing=True).T
    rhs = np.zeros(k)
    rhs[1] = 1.0
    return np.linalg.solve(V, rhs)


def _derivative(values: np.ndarray, s: np.ndarray) -> np.ndarray:
    """d/ds of uniformly sampled values (last sample may sit on a short step)."""
    m = len(s)
    if m < STENCIL_POINTS + 1:
        raise BadParameter(f"need at least {STENCIL_POINTS + 1} samples for finite differences")
    h = s[1] - s[0]
    uniform = np.allclose(np.diff(s), h, rtol=1e-9, atol=0)
    if not uniform:
        # a shortened final step: drop it and differentiate the uniform part
        d = np.full_like(values, np.nan)
        d[:-1] = _derivative(values[:-1], s[:-1])
        return d
    out = np.empty_like(values)
    half = STENCIL_POINTS // 2
    for k in range(m):
        start = min(max(k - half, 0), m - STENCIL_POINTS)
        offs = tuple(range(start - k, start - k + STENCIL_POINTS))
        out[k] = np.tensordot(_stencil(offs), values[start:start + STENCIL_POINTS], axes=1) / h
    return out


def equation_residuals(trace: GeodesicTrace, chart: ManifoldChart, f: RescaleFunction,
                       connection=levi_civita, differenced: bool = False) -> np.ndarray:
    """|dω/ds + conn ω ω| per sample.

    ω = (ẋ, w) is read from the recorded state; with ``differenced`` it is
    rebuilt from finite differences of x and t instead (a nested difference,
    less accurate at the endpoints).  dω/ds is always a finite difference.
    """
    s = trace.s
    n, N = trace.x.shape[1], trace.t.shape[1]
    if differenced:
        xd = _derivative(trace.x, s)
        td = _derivative(trace.t, s)
    om_all = np.full((len(s), n + N), np.nan)
    conns = []
    for k in range(len(s)):
        if differenced and not np.all(np.isfinite(xd[k])):
            conns.append(None)
            continue
        geom = geometry_at(chart, trace.x[k], 2)
        P = FiberPoint(trace.x[k], trace.t[k], trace.p, trace.q)
        if differenced:
            w = td[k] + np.einsum("l,lKL,L->K", xd[k], _gamma_act(geom, trace.p, trace.q), trace.t[k])
            om_all[k] = np.concatenate([xd[k], w])
        else:
            om_all[k] = np.concatenate([trace.xdot[k], trace.w[k]])
        conns.append(connection(P, geom, _f_at(f, trace.x[k], geom.g_inv)).coeff)
    dom = _derivative(om_all, s)
    res = np.full(len(s), np.nan)
    for k in range(len(s)):
        if conns[k] is None or not np.all(np.isfinite(dom[k])):
            continue
        r = dom[k] + np.einsum("abc,b,c->a", conns[k], om_all[k], om_all[k])
        res[k] = float(np.linalg.norm(r))
    return res


def kinematic_residuals(trace: GeodesicTrace, chart: ManifoldChart) -> np.ndarray:
    """|dx/ds - ẋ| + |dt/ds - (w - act(Γ_ẋ) t)| per sample: the recorded ω matches the path."""
    xd = _derivative(trace.x, trace.s)
    td = _derivative(trace.t, trace.s)
    out = np.full(len(trace.s), np.nan)
    for k in range(len(trace.s)):
        if not np.all(np.isfinite(xd[k])):
            continue
        geom = geometry_at(chart, trace.x[k], 1)
        tdot = trace.w[k] - np.einsum("l,lKL,L->K", trace.xdot[k], _gamma_act(geom, trace.p, trace.q), trace.t[k])
        out[k] = float(np.linalg.norm(xd[k] - trace.xdot[k]) + np.linalg.norm(td[k] - tdot))
    return out


def fiber_acceleration(trace: GeodesicTrace, chart: ManifoldChart) -> np.ndarray:
    """|δw/ds| = |dw/ds + act(Γ_ẋ) w| per sample, from the recorded w."""
    dw = _derivative(trace.w, trace.s)
    out = np.full(len(trace.s), np.nan)
    for k in range(len(trace.s)):
        if not np.all(np.isfinite(dw[k])):
            continue
        geom = geometry_at(chart, trace.x[k], 1)
        corr = np.einsum("l,lKL,L->K", trace.xdot[k], _gamma_act(geom, trace.p, trace.q), trace.w[k])
        out[k] = float(np.linalg.norm(dw[k] + corr))
    return out


def energy(trace: GeodesicTrace, chart: ManifoldChart, f: RescaleFunction) -> np.ndarray:
    """f g(ẋ, ẋ) + G(w, w) per sample."""
    out = np.empty(len(trace.s))
    for k in range(len(trace.s)):
        geom = geometry_at(chart, trace.x[k], 1)
        P = FiberPoint(trace.x[k], trace.t[k], trace.p, trace.q)
        m = metric_at(P, geom, _f_at(f, trace.x[k], geom.g_inv))
        om = np.concatenate([trace.xdot[k], trace.w[k]])
        out[k] = float(om @ m.G @ om)
    return out


def horizontal_lift(chart: ManifoldChart, x0, v0, S0, s_max: float, step: float,
                    p: int = 1, q: int = 1) -> GeodesicTrace:
    """Base geodesic from (x0, v0) with S0 parallel along it (w ≡ 0)."""
    n = chart.n
    N = tensors.fiber_dim(n, p, q)

    def rhs(s, y):
        x, t, xd, _ = _split(y, n, N)
        geom = geometry_at(chart, x, 1)
        xdd = -np.einsum("rlj,l,j->r", geom.gamma, xd, xd)
        tdot = -np.einsum("l,lKL,L->K", xd, _gamma_act(geom, p, q), t)
        return np.concatenate([xd, tdot, xdd, np.zeros(N)])

    init = CurveState(x0, S0, v0, np.zeros(N), p, q)
    if not _in_box(chart, init.x):
        raise ChartExit(init.x, 0.0)
    s, ys = rk4(rhs, init.vector(), s_max, step, chart)
    return _trace_from(s, ys, n, p, q, "horizontal_lift")


def a_term_residual(trace: GeodesicTrace, chart: ManifoldChart, f: RescaleFunction) -> np.ndarray:
    """|(1/2f) A(ẋ, ẋ)| per sample: the part of the geodesic equation a lift cannot cancel."""
    out = np.empty(len(trace.s))
    for k in range(len(trace.s)):
        geom = geometry_at(chart, trace.x[k], 1)
        fa = _f_at(f, trace.x[k], geom.g_inv)
        v = np.einsum("rlj,l,j->r", a_tensor(geom, fa), trace.xdot[k], trace.xdot[k]) / (2 * fa.value)
        out[k] = float(np.linalg.norm(v))
    return out


def to_natural_state(state: CurveState, chart: ManifoldChart) -> np.ndarray:
    """(z, ż) in induced coordinates."""
    geom = geometry_at(chart, state.x, 1)
    tdot = state.w - np.einsum("l,lKL,L->K", state.xdot, _gamma_act(geom, state.p, state.q), state.t)
    return np.concatenate([state.x, state.t, state.xdot, tdot])


def oracle_geodesic(chart: ManifoldChart, f: RescaleFunction, initial: CurveState, s_eval,
                    rtol: float = 1e-11, atol: float = 1e-12) -> np.ndarray:
    """Geodesic of the explicit induced-coordinate metric by an adaptive integrator.

    Returns induced coordinates ``z(s)`` at ``s_eval`` (rows).
    """
    n, p, q = initial.n, initial.p, initial.q
    D = n + initial.N

    def rhs(s, y):
        z, zd = y[:D], y[D:]
        P = FiberPoint.from_coords(z, n, p, q)
        G, _ = natural_metric_jet(chart, f, P, 1)
        gam = natural_christoffel(G).value  # [B, A, C]
        return np.concatenate([zd, -np.einsum("BAC,A,C->B", gam, zd, zd)])

    s_eval = np.asarray(s_eval, dtype=float)
    sol = solve_ivp(rhs, (s_eval[0], s_eval[-1]), to_natural_state(initial, chart),
                    method="DOP853", t_eval=s_eval, rtol=rtol, atol=atol)
    if not sol.success:
        raise StepUnderflow(f"oracle integration failed: {sol.message}")
    return sol.y[:D].T


def convergence_order(rhs: Callable, initial: CurveState, s_max: float, step: float,
                      chart: ManifoldChart | None = None) -> float:
    """Observed order from end states at steps h, h/2, h/4."""
    y0 = initial.vector()
    ends = [rk4(rhs, y0, s_max, step / 2 ** k, chart)[1][-1] for k in range(3)]
    e1 = np.linalg.norm(ends[0] - ends[1])
    e2 = np.linalg.norm(ends[1] - ends[2])
    if e2 == 0.0:
        return float("inf")
    return float(np.log2(e1 / e2))


def trace_columns(n: int, p: int, q: int) -> list[str]:
    """s, x1..xn, fiber components, xdot1..xdotn, natural fiber velocities, residual, energy."""
    labels = tensors.component_labels(n, p, q)
    return (["s"] + [f"x{i + 1}" for i in range(n)] + labels
            + [f"xdot{i + 1}" for i in range(n)] + ["d" + lab for lab in labels]
            + ["residual", "energy"])


def write_csv(trace: GeodesicTrace, chart: ManifoldChart, path) -> None:
    """Trace export; fiber velocities are natural (dt/ds), not covariant."""
    n = trace.n
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(trace_columns(n, trace.p, trace.q))
        for k in range(len(trace.s)):
            z = to_natural_state(trace.state(k), chart)
            res = trace.residual[k] if trace.residual is not None else float("nan")
            en = trace.energy[k] if trace.energy is not None else float("nan")
            tdot = z[2 * n + trace.t.shape[1]:]
            row = [trace.s[k], *trace.x[k], *trace.t[k], *trace.xdot[k], *tdot, res, en]
            wr.writerow([repr(float(v)) for v in row])
