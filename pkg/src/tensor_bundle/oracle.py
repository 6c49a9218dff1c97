"""Ground truth in induced coordinates (x, t) on the bundle.

The bundle metric is written in natural coordinates,

    G_nat = [[f g + Q Gv Q^T, -Q Gv], [-Gv Q^T, Gv]],   Q[j] = -act(Γ_j) t,

and differentiated exactly with jets in all ``n + N`` variables.  Christoffel
symbols and the Riemann tensor come from the plain coordinate formulas and
are then expressed in the adapted frame.  Nothing here uses the closed-form
bundle formulas.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tensors
from .base import ManifoldChart, _christoffel, _riemann, base_jets
from .errors import DimensionGuard
from .frames import FiberPoint
from .jets import Jet, inv, jet_einsum, jet_space, stack
from .sasaki import RescaleFunction

__all__ = ["OracleAt", "natural_metric_jet", "oracle_at", "natural_christoffel", "MAX_ORACLE_DIM"]

MAX_ORACLE_DIM = 12


@dataclass
class OracleAt:
    G_nat: np.ndarray
    gamma_nat: np.ndarray          # [B, A, C] = Γ^B_{AC}
    riemann_nat: np.ndarray | None  # [A, B, C, D]
    T: np.ndarray
    T_inv: np.ndarray
    conn: np.ndarray               # adapted, conn[a, b, c]
    riemann: np.ndarray | None     # adapted, R[a, b, c, d]


def _guard(P: FiberPoint) -> None:
    if P.dim > MAX_ORACLE_DIM:
        raise DimensionGuard(f"oracle limited to bundle dimension {MAX_ORACLE_DIM}, got {P.dim}")


def natural_metric_jet(chart: ManifoldChart, f: RescaleFunction, P: FiberPoint, order: int):
    """Jets of ``G_nat`` and ``Q`` around ``P`` in all bundle coordinates."""
    _guard(P)
    n, N = P.n, P.N
    space = jet_space(P.dim, order + 1)
    zs = space.variables(P.coords)
    xs, ts = zs[:n], stack(zs[n:])
    base = base_jets(chart, P.x, order + 1, variables=xs)
    lam = tensors.derivation_tensor(n, P.p, P.q)
    gops = base.gamma.transpose(1, 0, 2)  # [j, a, b] = Γ^a_{jb}
    Q = -jet_einsum("jab,abKL,L->jK", gops, lam, ts)
    Q = Q.truncate(order)
    g = base.g.truncate(order)
    g_inv = base.g_inv.truncate(order)
    Gv = _fiber_metric_jet(g, g_inv, P.p, P.q)
    fj = f.jet(xs)
    QG = jet_einsum("jK,KL->jL", Q, Gv)
    hh = g * fj + jet_einsum("jK,lK->jl", QG, Q)
    top = _hcat(hh, -QG)
    bottom = _hcat(-QG.T, Gv)
    G = _vcat(top, bottom)
    return G, Q


def _hcat(a: Jet, b: Jet) -> Jet:
    return Jet(a.space, np.concatenate([a.c, b.c], axis=1), min(a.order, b.order))


def _vcat(a: Jet, b: Jet) -> Jet:
    return Jet(a.space, np.concatenate([a.c, b.c], axis=0), min(a.order, b.order))


def _fiber_metric_jet(g: Jet, g_inv: Jet, p: int, q: int) -> Jet:
    out = None
    for m in [g] * p + [g_inv] * q:
        if out is None:
            out = m
        else:
            a, b = out.shape[0], m.shape[0]
            out = jet_einsum("ij,kl->ikjl", out, m).reshape(a * b, a * b)
    if out is None:
        out = g.space.constant(np.ones((1, 1)))
    return out


def natural_christoffel(G: Jet) -> Jet:
    return _christoffel(G, inv(G))


def oracle_at(chart: ManifoldChart, f: RescaleFunction, P: FiberPoint,
              curvature: bool = True) -> OracleAt:
    """Connection (and optionally curvature) of the bundle metric at ``P``."""
    order = 2 if curvature else 1
    G, Q = natural_metric_jet(chart, f, P, order)
    gam = natural_christoffel(G)
    n, N = P.n, P.N
    D = n + N
    T = np.eye(D)
    T[:n, n:] = Q.value
    T_inv = np.eye(D)
    T_inv[:n, n:] = -Q.value
    dQ = Q.grad().value  # [A, j, K]
    dT = np.zeros((D, D, D))  # [A, c, B] = ∂_A T[c, B]
    dT[:, :n, n:] = dQ
    g0 = gam.value
    cov = np.einsum("bA,AcB->bcB", T, dT) + np.einsum("bA,BAC,cC->bcB", T, g0, T)
    conn = np.einsum("bcB,Ba->abc", cov, T_inv)
    Rn = Rad = None
    if curvature:
        Rn = _riemann(gam).value
        Rad = np.einsum("aA,bB,cC,ABCE,Ed->abcd", T, T, T, Rn, T_inv)
    return OracleAt(G.value, g0, Rn, T, T_inv, conn, Rad)
