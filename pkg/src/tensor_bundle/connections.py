"""Metric connections with torsion on the tensor bundle.

Connection coefficients use the ``conn[a, b, c]`` layout of
:mod:`tensor_bundle.sasaki` (component ``a`` of ∇_{E_b} E_c) and curvature
arrays the ``R[a, b, c, d]`` layout of :mod:`tensor_bundle.curvature`.

Generic tools (torsion, metricity, curvature of an arbitrary connection field)
take derivatives of coefficient fields with central differences along frame
vectors, so they apply equally to the Levi-Civita, metric and conjugate
connections and are independent of every closed form here.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from . import tensors
from .base import BaseGeometryAt, ManifoldChart, geometry_at
from .errors import ShapeMismatch
from .frames import FiberPoint, FrameData, frame_data
from .sasaki import (
    ATerms, ConnectionField, RescaleAt, RescaleFunction, a_tensor, a_terms,
    levi_civita, metric_at,
)

__all__ = [
    "metric_connection_11", "metric_connection_pq", "metric_connection",
    "metric_connection_from_torsion", "prescribed_torsion_11", "prescribed_torsion_pq",
    "printed_torsion_pq", "contorsion", "torsion", "lower_first", "structure_signs",
    "conjugate_connection", "conjugate_connection_11", "conjugate_curvature",
    "metric_curvature_11", "metric_ricci_11", "metric_scalar",
    "coefficient_field", "metric_field", "metricity_residual", "connection_curvature",
    "FD_STEP",
]

FD_STEP = 1e-5
Builder = Callable[[FiberPoint, BaseGeometryAt, RescaleAt], ConnectionField]


def _require_11(P: FiberPoint) -> None:
    if (P.p, P.q) != (1, 1):
        raise ShapeMismatch("this form is written for (1,1) fibers")


def metric_connection_11(P: FiberPoint, geom: BaseGeometryAt, f: RescaleAt) -> ConnectionField:
    """Displayed components: Γ + A/2f on horizontals and Γδ - Γδ on E_l E_{(i,j)}."""
    _require_11(P)
    n = P.n
    G, d = geom.gamma, np.eye(n)
    D = n + n * n
    conn = np.zeros((D, D, D))
    conn[:n, :n, :n] = G + a_tensor(geom, f) / (2.0 * f.value)
    hv_v = np.einsum("vli,jr->vrlij", G, d) - np.einsum("jlr,vi->vrlij", G, d)
    conn[n:, :n, n:] = hv_v.reshape(n * n, n, n * n)
    return ConnectionField(conn, n, "metric")


def metric_connection_pq(P: FiberPoint, geom: BaseGeometryAt, f: RescaleAt) -> ConnectionField:
    """(p, q) version: Γ + A/2f horizontally, act(Γ_l) on the fiber, nothing else."""
    n, N = P.n, P.N
    lam = tensors.derivation_tensor(n, P.p, P.q)
    gact = tensors.act_matrix(np.transpose(geom.gamma, (1, 0, 2)), lam)  # [l, K, J]
    conn = np.zeros((n + N,) * 3)
    conn[:n, :n, :n] = geom.gamma + a_tensor(geom, f) / (2.0 * f.value)
    conn[n:, :n, n:] = np.transpose(gact, (1, 0, 2))
    return ConnectionField(conn, n, "metric")


def metric_connection(P: FiberPoint, geom: BaseGeometryAt, f: RescaleAt) -> ConnectionField:
    if (P.p, P.q) == (1, 1):
        return metric_connection_11(P, geom, f)
    return metric_connection_pq(P, geom, f)


def prescribed_torsion_11(P: FiberPoint, geom: BaseGeometryAt) -> np.ndarray:
    """T^{(v,r)}_{lj} = t^m_r R_{ljm}^v - t^v_m R_{ljr}^m; all else zero."""
    _require_11(P)
    n = P.n
    t, R = P.tensor(), geom.riemann
    vert = np.einsum("mr,ljmv->vrlj", t, R) - np.einsum("vm,ljrm->vrlj", t, R)
    out = np.zeros((n + n * n,) * 3)
    out[n:, :n, :n] = vert.reshape(n * n, n, n)
    return out


def prescribed_torsion_pq(P: FiberPoint, geom: BaseGeometryAt) -> np.ndarray:
    """The fiber action of R(∂_l, ∂_j) on t in the T^{bar r}_{lj} slots."""
    n, N = P.n, P.N
    lam = tensors.derivation_tensor(n, P.p, P.q)
    Rop = np.einsum("ljba->ljab", geom.riemann)
    out = np.zeros((n + N,) * 3)
    out[n:, :n, :n] = np.transpose(tensors.act(Rop, P.t, lam), (2, 0, 1))
    return out


def printed_torsion_pq(P: FiberPoint, geom: BaseGeometryAt) -> np.ndarray:
    """The (p, q) torsion as printed, with its extra factor 1/2."""
    return 0.5 * prescribed_torsion_pq(P, geom)


def torsion(conn: np.ndarray, C: np.ndarray) -> np.ndarray:
    """T[a, b, c]: component a of ∇_{E_b}E_c - ∇_{E_c}E_b - [E_b, E_c]."""
    return conn - np.transpose(conn, (0, 2, 1)) - C


def lower_first(T: np.ndarray, G: np.ndarray) -> np.ndarray:
    """T_low[b, c, a] = T[e, b, c] G[e, a]."""
    return np.einsum("ebc,ea->bca", T, G)


def contorsion(T: np.ndarray, G: np.ndarray, G_inv: np.ndarray) -> np.ndarray:
    """Contorsion U[a, b, c] added to conn[a, b, c].

    Lowered: U_{αβγ} = ½(T_{αβγ} + T_{γαβ} + T_{γβα}), then raised on the last slot.
    """
    Tl = lower_first(T, G)  # Tl[α, β, γ] = T^ε_{αβ} G_{εγ}
    Ul = 0.5 * (Tl + np.transpose(Tl, (1, 2, 0)) + np.transpose(Tl, (2, 1, 0)))
    return np.einsum("bce,ea->abc", Ul, G_inv)


def metric_connection_from_torsion(P: FiberPoint, geom: BaseGeometryAt, f: RescaleAt,
                                   torsion_field: np.ndarray | None = None) -> ConnectionField:
    """Levi-Civita plus contorsion of the prescribed torsion."""
    if torsion_field is None:
        torsion_field = (prescribed_torsion_11(P, geom) if (P.p, P.q) == (1, 1)
                         else prescribed_torsion_pq(P, geom))
    m = metric_at(P, geom, f)
    lc = levi_civita(P, geom, f)
    U = contorsion(torsion_field, m.G, m.G_inv)
    return ConnectionField(lc.coeff + U, P.n, "metric_from_torsion")


def structure_signs(n: int, N: int, h: float = -1.0, v: float = 1.0) -> np.ndarray:
    return np.concatenate([np.full(n, h), np.full(N, v)])


def conjugate_connection(P: FiberPoint, geom: BaseGeometryAt, f: RescaleAt) -> ConnectionField:
    """J(∇_X (J Y)); J is constant in the adapted frame so only signs change."""
    lc = levi_civita(P, geom, f)
    s = structure_signs(P.n, P.N)
    return ConnectionField(np.einsum("a,c,abc->abc", s, s, lc.coeff), P.n, "conjugate")


def conjugate_connection_11(P: FiberPoint, geom: BaseGeometryAt, f: RescaleAt) -> ConnectionField:
    """Displayed blocks of the conjugate connection for (1,1) fibers."""
    _require_11(P)
    n = P.n
    t = P.tensor()
    g, gi, G, R = geom.g, geom.g_inv, geom.gamma, geom.riemann
    Rup = np.einsum("as,bj,ablr->sjlr", gi, gi, R)
    c2f = 1.0 / (2.0 * f.value)
    d = np.eye(n)
    D = n + n * n
    conn = np.zeros((D, D, D))
    conn[:n, :n, :n] = G + c2f * a_tensor(geom, f)
    hh_v = -(0.5 * np.einsum("ljrs,vs->vrlj", R, t) - 0.5 * np.einsum("ljsv,sr->vrlj", R, t))
    conn[n:, :n, :n] = hh_v.reshape(n * n, n, n)
    hv_h = -c2f * (np.einsum("ia,sjlr,as->rlij", g, Rup, t) - np.einsum("jb,islr,sb->rlij", gi, R, t))
    conn[:n, :n, n:] = hv_h.reshape(n, n, n * n)
    hv_v = np.einsum("vli,jr->vrlij", G, d) - np.einsum("jlr,vi->vrlij", G, d)
    conn[n:, :n, n:] = hv_v.reshape(n * n, n, n * n)
    vh_h = c2f * (np.einsum("ca,sljr,as->rclj", g, Rup, t) - np.einsum("lb,csjr,sb->rclj", gi, R, t))
    conn[:n, n:, :n] = vh_h.reshape(n, n * n, n)
    return ConnectionField(conn, n, "conjugate")


def conjugate_curvature(R: np.ndarray, n: int) -> np.ndarray:
    """R_J(X, Y)Z = J R(X, Y)(J Z) in the ``R[a, b, c, d]`` layout."""
    s = structure_signs(n, R.shape[0] - n)
    return np.einsum("c,d,abcd->abcd", s, s, R)


def metric_curvature_11(P: FiberPoint, geom: BaseGeometryAt, at: ATerms) -> np.ndarray:
    """Displayed curvature: R + combination on horizontals, Rδ - Rδ on E_{(i,j)}."""
    _require_11(P)
    n = P.n
    R, d = geom.riemann, np.eye(n)
    D = n + n * n
    out = np.zeros((D, D, D, D))
    out[:n, :n, :n, :n] = R + at.combination
    vv = np.einsum("mliv,rj->mlijvr", R, d) - np.einsum("mlrj,iv->mlijvr", R, d)
    out[:n, :n, n:, n:] = vv.reshape(n, n, n * n, n * n)
    return out


def metric_ricci_11(geom: BaseGeometryAt, at: ATerms) -> np.ndarray:
    """Horizontal Ricci block R_lj + combination_{r l j}^r (the only nonzero block)."""
    return geom.ricci + np.einsum("rljr->lj", at.combination)


def metric_scalar(geom: BaseGeometryAt, f: RescaleAt, at: ATerms) -> float:
    """r / f + fL."""
    return float(geom.scalar / f.value + at.fL)


def coefficient_field(builder: Builder, chart: ManifoldChart, f: RescaleFunction,
                      p: int = 1, q: int = 1) -> Callable[[np.ndarray], np.ndarray]:
    """Induced coordinates -> connection coefficients of ``builder``."""
    n = chart.n

    def field(z):
        P = FiberPoint.from_coords(z, n, p, q)
        geom = geometry_at(chart, P.x, 2)
        return builder(P, geom, f.at(P.x, geom.g_inv)).coeff

    return field


def metric_field(chart: ManifoldChart, f: RescaleFunction, p: int = 1, q: int = 1):
    """Induced coordinates -> adapted components of the bundle metric."""
    n = chart.n

    def field(z):
        P = FiberPoint.from_coords(z, n, p, q)
        geom = geometry_at(chart, P.x, 1)
        return metric_at(P, geom, f.at(P.x, geom.g_inv)).G

    return field


def _frame_derivatives(field, fd: FrameData, h: float) -> np.ndarray:
    """out[b, ...] = E_b(field) at fd.P by central differences."""
    z = fd.P.coords
    rows = []
    for b in range(len(z)):
        d = fd.T[b]
        rows.append((np.asarray(field(z + h * d)) - np.asarray(field(z - h * d))) / (2 * h))
    return np.stack(rows)


def metricity_residual(conn: np.ndarray, metric, fd: FrameData, h: float = FD_STEP) -> np.ndarray:
    """(∇_b G)_{cd} = E_b(G_cd) - conn[e,b,c] G_ed - conn[e,b,d] G_ce."""
    G0 = np.asarray(metric(fd.P.coords))
    dG = _frame_derivatives(metric, fd, h)
    return dG - np.einsum("ebc,ed->bcd", conn, G0) - np.einsum("ebd,ce->bcd", conn, G0)


def connection_curvature(coeffs, fd: FrameData, h: float = FD_STEP) -> np.ndarray:
    """Curvature R[a, b, c, e] of a connection field from its coefficient field.

    R(E_a, E_b)E_c = ∇_a ∇_b E_c - ∇_b ∇_a E_c - ∇_{[E_a, E_b]} E_c, with the
    brackets taken from the frame structure constants.
    """
    if fd.C is None:
        raise ShapeMismatch("frame data without structure constants")
    c0 = np.asarray(coeffs(fd.P.coords))
    dc = _frame_derivatives(coeffs, fd, h)  # [a, e, b, c] = E_a(conn[e, b, c])
    return (
        np.einsum("aebc->abce", dc) - np.einsum("beac->abce", dc)
        + np.einsum("dbc,ead->abce", c0, c0) - np.einsum("dac,ebd->abce", c0, c0)
        - np.einsum("dab,edc->abce", fd.C, c0)
    )
