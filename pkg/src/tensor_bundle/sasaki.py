"""Rescaled Sasaki-type metric on T^p_q(M) and its Levi-Civita connection.

The metric is block diagonal in the adapted frame: ``f g`` on horizontal
vectors and the fiber inner product ``Gv`` (g on upper slots, g^{-1} on lower
slots) on vertical ones.

Connection coefficients are stored as ``conn[a, b, c]``: component ``a`` of
∇_{E_b} E_c.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import tensors
from .base import BaseGeometryAt, base_jets, geometry_at, raise_riemann
from .errors import NonPositiveRescale, ShapeMismatch
from .expr import Expression, parse
from .frames import AdaptedField, FiberPoint, FrameData, frame_data
from .jets import Jet, jet_einsum, jet_space

__all__ = [
    "RescaleFunction", "RescaleAt", "BundleMetricAt", "ConnectionField",
    "metric_at", "a_tensor", "levi_civita_11", "levi_civita_pq", "levi_civita",
    "covariant_derivative_bundle", "frame_derivative", "ATerms", "a_terms",
    "BundleAt", "bundle_at",
]


@dataclass(frozen=True)
class RescaleAt:
    value: float
    grad: np.ndarray   # f_i
    hess: np.ndarray   # ∂_i ∂_j f
    up: np.ndarray     # f^h = g^{hm} f_m


@dataclass(frozen=True)
class RescaleFunction:
    """Strictly positive scalar field on the base."""

    expr: Expression

    @classmethod
    def parse(cls, source: str, n: int | None = None) -> "RescaleFunction":
        return cls(parse(str(source), n))

    def at(self, x, g_inv) -> RescaleAt:
        x = np.asarray(x, dtype=float)
        n = len(x)
        j = self.expr.jet(jet_space(n, 2).variables(x))
        if not j.value > 0:
            raise NonPositiveRescale(j.value, x)
        grad = j.grad()
        hess = grad.grad().value
        return RescaleAt(float(j.value), grad.value.copy(), hess, g_inv @ grad.value)

    def jet(self, xs: list[Jet]) -> Jet:
        j = self.expr.jet(xs)
        if not j.value > 0:
            raise NonPositiveRescale(j.value, [v.value for v in xs])
        return j


@dataclass(frozen=True)
class BundleMetricAt:
    f: float
    G: np.ndarray       # adapted components
    G_inv: np.ndarray
    Gv: np.ndarray      # fiber inner product
    n: int

    def inner(self, X, Y) -> float:
        X = X.vector if isinstance(X, AdaptedField) else np.asarray(X)
        Y = Y.vector if isinstance(Y, AdaptedField) else np.asarray(Y)
        return float(X @ self.G @ Y)


def metric_at(P: FiberPoint, geom: BaseGeometryAt, f: RescaleAt) -> BundleMetricAt:
    if not f.value > 0:
        raise NonPositiveRescale(f.value, P.x)
    n, N = P.n, P.N
    Gv = tensors.fiber_metric(geom.g, geom.g_inv, P.p, P.q)
    Gv_inv = tensors.fiber_metric(geom.g_inv, geom.g, P.p, P.q)
    G = np.zeros((n + N, n + N))
    G[:n, :n] = f.value * geom.g
    G[n:, n:] = Gv
    G_inv = np.zeros_like(G)
    G_inv[:n, :n] = geom.g_inv / f.value
    G_inv[n:, n:] = Gv_inv
    return BundleMetricAt(f.value, G, G_inv, Gv, n)


def a_tensor(geom: BaseGeometryAt, f: RescaleAt) -> np.ndarray:
    """``A[h, j, i] = f_j δ^h_i + f_i δ^h_j - f^h g_ji``."""
    eye = np.eye(geom.n)
    return (
        np.einsum("j,hi->hji", f.grad, eye)
        + np.einsum("i,hj->hji", f.grad, eye)
        - np.einsum("h,ji->hji", f.up, geom.g)
    )


@dataclass
class ConnectionField:
    """Connection coefficients over adapted indices at one fiber point."""

    coeff: np.ndarray
    n: int
    label: str = ""

    @property
    def blocks(self) -> dict:
        n = self.n
        H, V = slice(0, n), slice(n, None)
        c = self.coeff
        return {
            "HH.h": c[H, H, H], "HH.v": c[V, H, H],
            "HV.h": c[H, H, V], "HV.v": c[V, H, V],
            "VH.h": c[H, V, H], "VH.v": c[V, V, H],
            "VV.h": c[H, V, V], "VV.v": c[V, V, V],
        }


def levi_civita_11(P: FiberPoint, geom: BaseGeometryAt, f: RescaleAt) -> ConnectionField:
    """Componentwise index transcription for (1,1) fibers.

    Fiber index pairs: ``(i, j)`` stands for t^i_j with flat index ``i*n + j``.
    """
    if (P.p, P.q) != (1, 1):
        raise ShapeMismatch("levi_civita_11 needs a (1,1) fiber point")
    n = P.n
    t = P.tensor()  # t[a, s] = t^a_s
    g, gi, G, R = geom.g, geom.g_inv, geom.gamma, geom.riemann
    Rup = raise_riemann(geom)
    A = a_tensor(geom, f)
    c2f = 1.0 / (2.0 * f.value)
    d = np.eye(n)
    D = n + n * n
    conn = np.zeros((D, D, D))

    conn[:n, :n, :n] = G + c2f * A
    hh_v = 0.5 * np.einsum("ljrs,vs->vrlj", R, t) - 0.5 * np.einsum("ljsv,sr->vrlj", R, t)
    conn[n:, :n, :n] = hh_v.reshape(n * n, n, n)

    hv_h = c2f * (
        np.einsum("ia,sjlr,as->rlij", g, Rup, t) - np.einsum("jb,islr,sb->rlij", gi, R, t)
    )
    conn[:n, :n, n:] = hv_h.reshape(n, n, n * n)
    hv_v = np.einsum("vli,jr->vrlij", G, d) - np.einsum("jlr,vi->vrlij", G, d)
    conn[n:, :n, n:] = hv_v.reshape(n * n, n, n * n)

    vh_h = c2f * (
        np.einsum("ca,sljr,as->rclj", g, Rup, t) - np.einsum("lb,csjr,sb->rclj", gi, R, t)
    )
    conn[:n, n:, :n] = vh_h.reshape(n, n * n, n)
    return ConnectionField(conn, n, "levi_civita")


def levi_civita_pq(P: FiberPoint, geom: BaseGeometryAt, f: RescaleAt,
                   fd: FrameData | None = None) -> ConnectionField:
    """Operator form valid for any (p, q).

    With psi[l, j] the curvature operator applied to t:
    horizontal-horizontal gives Γ + A/2f plus psi/2 vertically; the mixed
    horizontal parts are g^{rk} Gv(e_J, psi[k, l]) / 2f; the vertical part of
    ∇_{E_l} E_J is act(Γ_l) e_J; everything else vanishes.
    """
    fd = fd or frame_data(P, geom)
    n, N = P.n, P.N
    Gv = tensors.fiber_metric(geom.g, geom.g_inv, P.p, P.q)
    c2f = 1.0 / (2.0 * f.value)
    D = n + N
    conn = np.zeros((D, D, D))
    conn[:n, :n, :n] = geom.gamma + c2f * a_tensor(geom, f)
    conn[n:, :n, :n] = 0.5 * np.transpose(fd.psi, (2, 0, 1))
    mixed = c2f * np.einsum("rk,JK,klK->rlJ", geom.g_inv, Gv, fd.psi)
    conn[:n, :n, n:] = mixed
    conn[:n, n:, :n] = np.transpose(mixed, (0, 2, 1))
    conn[n:, :n, n:] = np.transpose(fd.gamma_act, (1, 0, 2))
    return ConnectionField(conn, n, "levi_civita")


def levi_civita(P: FiberPoint, geom: BaseGeometryAt, f: RescaleAt) -> ConnectionField:
    if (P.p, P.q) == (1, 1):
        return levi_civita_11(P, geom, f)
    return levi_civita_pq(P, geom, f)


def frame_derivative(field: Callable, fd: FrameData, direction, h: float = 1e-5) -> np.ndarray:
    """Derivative of ``field(z)`` along the adapted vector ``direction`` at fd.P.

    ``field`` maps induced coordinates to any array; the derivative is a
    central difference along the natural-coordinate image of ``direction``.
    """
    d = np.asarray(direction, dtype=float) @ fd.T
    z = fd.P.coords
    return (np.asarray(field(z + h * d)) - np.asarray(field(z - h * d))) / (2 * h)


def covariant_derivative_bundle(conn: ConnectionField, X, Y: Callable, fd: FrameData,
                                h: float = 1e-5) -> AdaptedField:
    """∇_X Y^a = X^b E_b(Y^a) + conn[a, b, c] X^b Y^c.

    ``X`` is an adapted vector at the point; ``Y`` maps induced coordinates to
    adapted components.
    """
    X = X.vector if isinstance(X, AdaptedField) else np.asarray(X, dtype=float)
    y0 = np.asarray(Y(fd.P.coords), dtype=float)
    out = frame_derivative(Y, fd, X, h) + np.einsum("abc,b,c->a", conn.coeff, X, y0)
    return AdaptedField.from_vector(out, conn.n)


@dataclass(frozen=True)
class ATerms:
    """The rescaling tensor and the derivative combination built from it.

    ``nabla_b[m, r, l, j]`` is ∇_m B^r_{lj} with B = A / 2f, and
    ``combination[m, l, j, r]`` is

        ∇_m B^r_{lj} - ∇_l B^r_{mj} + (A^r_{ms} A^s_{lj} - A^r_{ls} A^s_{mj}) / 4f^2,

    indexed like a curvature tensor.  ``fL`` is its trace (1/f) g^{lj} C_{rlj}^r.
    """

    A: np.ndarray
    nabla_b: np.ndarray
    combination: np.ndarray
    fL: float


def a_terms(chart, f: RescaleFunction, x, geom: BaseGeometryAt) -> ATerms:
    x = np.asarray(x, dtype=float)
    jets = base_jets(chart, x, 2)
    fj = f.jet(jet_space(chart.n, 2).variables(x))
    df = fj.grad()  # order 1
    eye = np.eye(chart.n)
    g = jets.g.truncate(1)
    f_up = jet_einsum("hm,m->h", jets.g_inv.truncate(1), df)
    A = (
        df.linmap("j,hi->hji", eye)
        + df.linmap("i,hj->hji", eye)
        - jet_einsum("h,ji->hji", f_up, g)
    )
    B = A / (fj.truncate(1) * 2.0)
    dB = B.grad().value  # [m, r, l, j]
    Bv = B.value
    G = geom.gamma
    nab = (
        dB
        + np.einsum("rms,slj->mrlj", G, Bv)
        - np.einsum("sml,rsj->mrlj", G, Bv)
        - np.einsum("smj,rls->mrlj", G, Bv)
    )
    A0 = A.value
    fv = float(fj.value)
    quad = (np.einsum("rms,slj->mljr", A0, A0) - np.einsum("rls,smj->mljr", A0, A0)) / (4 * fv * fv)
    comb = np.einsum("mrlj->mljr", nab) - np.einsum("lrmj->mljr", nab) + quad
    fL = float(np.einsum("lj,rljr->", geom.g_inv, comb) / fv)
    return ATerms(A0, nab, comb, fL)


@dataclass
class BundleAt:
    """Everything evaluated at one fiber point."""

    P: FiberPoint
    geom: BaseGeometryAt
    f: RescaleAt
    frame: FrameData
    metric: BundleMetricAt
    aterms: ATerms | None = None


def bundle_at(chart, f: RescaleFunction, P: FiberPoint, derivs: int = 3,
              with_aterms: bool = True) -> BundleAt:
    geom = geometry_at(chart, P.x, derivs)
    fa = f.at(P.x, geom.g_inv)
    fd = frame_data(P, geom)
    at = a_terms(chart, f, P.x, geom) if with_aterms else None
    return BundleAt(P, geom, fa, fd, metric_at(P, geom, fa), at)
