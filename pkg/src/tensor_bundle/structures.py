"""Almost paracomplex, almost product and Golden structures on T^1_1(M).

All structures here act blockwise in the adapted frame: a multiplier on
horizontal vectors and another on vertical ones.  The φ-operator

    (φ_S g)(X, Y, Z) = (SX)(g(Y, Z)) - X(g(SY, Z)) + g((L_Y S)X, Z) + g(Y, (L_Z S)X)

is evaluated from its definition with Lie brackets taken by central
differences in induced coordinates; :func:`phi_closed_form_j` is the
curvature-operator expression it is checked against.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .base import BaseGeometryAt, ManifoldChart, geometry_at
from .connections import structure_signs
from .frames import AdaptedField, FiberPoint, frame_data
from .sasaki import ConnectionField, RescaleAt, RescaleFunction, levi_civita, metric_at

__all__ = [
    "StructureTensor", "PARACOMPLEX", "DIAGONAL_IDENTITY", "GOLDEN", "GOLDEN_CONJUGATE",
    "GOLDEN_RATIO", "product_from_golden", "golden_from_product", "swap_structure", "shear_structure",
    "purity_defect", "LocalFrames", "linear_field", "phi_operator", "phi_closed_form_j",
    "cyclic_phi", "product_connection", "product_connection_11", "FD_STEP",
]

FD_STEP = 1e-5
SQRT5 = np.sqrt(5.0)
GOLDEN_RATIO = (1.0 + SQRT5) / 2.0


@dataclass(frozen=True)
class StructureTensor:
    """Blockwise structure: ``h`` on horizontal vectors, ``v`` on vertical ones."""

    name: str
    h: float
    v: float

    def signs(self, n: int, N: int) -> np.ndarray:
        return structure_signs(n, N, self.h, self.v)

    def matrix(self, n: int, N: int) -> np.ndarray:
        return np.diag(self.signs(n, N))

    def apply(self, X):
        """Apply to an AdaptedField."""
        return AdaptedField(self.h * np.asarray(X.h), self.v * np.asarray(X.v))

    def squared(self) -> "StructureTensor":
        return StructureTensor(f"{self.name}^2", self.h * self.h, self.v * self.v)


PARACOMPLEX = StructureTensor("J", -1.0, 1.0)
DIAGONAL_IDENTITY = StructureTensor("DI", 1.0, -1.0)
GOLDEN = StructureTensor("golden", (1.0 - SQRT5) / 2.0, (1.0 + SQRT5) / 2.0)
GOLDEN_CONJUGATE = StructureTensor("golden_conjugate", (1.0 + SQRT5) / 2.0, (1.0 - SQRT5) / 2.0)


def product_from_golden(psi: StructureTensor) -> StructureTensor:
    """F = (2ψ - I)/√5."""
    return StructureTensor(f"product({psi.name})", (2 * psi.h - 1) / SQRT5, (2 * psi.v - 1) / SQRT5)


def golden_from_product(F: StructureTensor) -> StructureTensor:
    """ψ = (I + √5 F)/2."""
    return StructureTensor(f"golden({F.name})", (1 + SQRT5 * F.h) / 2, (1 + SQRT5 * F.v) / 2)


def swap_structure(n: int, N: int) -> np.ndarray:
    """Exchanges E_i and E_{n+i} for i < min(n, N).

    Impure whenever the horizontal and vertical metric blocks differ, but pure
    when they coincide (flat base, f = 1, t = 0 in Cartesian coordinates).
    """
    S = np.eye(n + N)
    for i in range(min(n, N)):
        S[i, i] = S[n + i, n + i] = 0.0
        S[i, n + i] = S[n + i, i] = 1.0
    return S


def shear_structure(n: int, N: int) -> np.ndarray:
    """E_n -> E_n + E_0 (first vertical picks up the first horizontal); impure wherever G_00 > 0."""
    S = np.eye(n + N)
    S[0, n] = 1.0
    return S


def purity_defect(S: np.ndarray, G: np.ndarray, rng: np.random.Generator, samples: int = 20) -> float:
    """max |g(SX, Y) - g(X, SY)| over random adapted vector pairs."""
    D = G.shape[0]
    worst = 0.0
    for _ in range(samples):
        X, Y = rng.normal(size=D), rng.normal(size=D)
        worst = max(worst, abs((S @ X) @ G @ Y - X @ G @ (S @ Y)))
    return float(worst)


class LocalFrames:
    """Adapted frame and metric at a point and at its coordinate neighbours.

    Points are z0 and z0 ± h e_B; every derivative in this module is taken
    along coordinate axes, so these samples are shared by all fields.
    """

    def __init__(self, chart: ManifoldChart, f: RescaleFunction, P: FiberPoint, h: float = FD_STEP):
        self.chart, self.f, self.P, self.h = chart, f, P, h
        z0 = P.coords
        D = len(z0)
        self.D, self.n, self.N = D, P.n, P.N
        offsets = np.vstack([np.zeros(D), h * np.eye(D), -h * np.eye(D)])
        self.points = z0 + offsets
        self.T, self.T_inv, self.G = [], [], []
        for z in self.points:
            Q = FiberPoint.from_coords(z, P.n, P.p, P.q)
            geom = geometry_at(chart, Q.x, 1)
            fd = frame_data(Q, geom)
            self.T.append(fd.T)
            self.T_inv.append(fd.T_inv)
            self.G.append(metric_at(Q, geom, f.at(Q.x, geom.g_inv)).G)
        self.T, self.T_inv, self.G = map(np.array, (self.T, self.T_inv, self.G))

    def sample(self, field: Callable) -> np.ndarray:
        """Natural components of an adapted field at every sample point."""
        ad = np.array([np.asarray(field(z), dtype=float) for z in self.points])
        return np.einsum("pa,paB->pB", ad, self.T)

    def apply(self, S_ad: np.ndarray, nat: np.ndarray) -> np.ndarray:
        """Structure (adapted matrix) applied pointwise to natural samples."""
        ad = np.einsum("pB,pBa->pa", nat, self.T_inv)
        return np.einsum("pa,ba,pbC->pC", ad, S_ad, self.T)

    def inner(self, u: np.ndarray, w: np.ndarray) -> np.ndarray:
        ua = np.einsum("pB,pBa->pa", u, self.T_inv)
        wa = np.einsum("pB,pBa->pa", w, self.T_inv)
        return np.einsum("pa,pab,pb->p", ua, self.G, wa)

    def inner_at_center(self, u: np.ndarray, w: np.ndarray) -> float:
        ua, wa = u @ self.T_inv[0], w @ self.T_inv[0]
        return float(ua @ self.G[0] @ wa)

    def partials(self, samples: np.ndarray) -> np.ndarray:
        """∂_B of a sampled quantity at z0: out[B, ...]."""
        D = self.D
        return (samples[1:D + 1] - samples[D + 1:]) / (2 * self.h)

    def bracket(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        """[X, Y] at z0 in natural components."""
        return np.einsum("B,BA->A", X[0], self.partials(Y)) - np.einsum("B,BA->A", Y[0], self.partials(X))

    def along(self, v: np.ndarray, scalar_samples: np.ndarray) -> float:
        return float(v @ self.partials(scalar_samples))

    def to_adapted(self, nat_vec: np.ndarray) -> np.ndarray:
        return nat_vec @ self.T_inv[0]


def linear_field(value, slope=None, center=None) -> Callable:
    """Adapted field ``value + slope @ (z - center)``."""
    value = np.asarray(value, dtype=float)

    def field(z):
        if slope is None:
            return value
        return value + slope @ (np.asarray(z) - center)

    return field


def phi_operator(local: LocalFrames, S: StructureTensor | np.ndarray, X, Y, Z) -> float:
    """(φ_S g)(X, Y, Z) at the centre of ``local`` from the definition."""
    S_ad = S.matrix(local.n, local.N) if isinstance(S, StructureTensor) else np.asarray(S)
    Xs, Ys, Zs = local.sample(X), local.sample(Y), local.sample(Z)
    SX, SY = local.apply(S_ad, Xs), local.apply(S_ad, Ys)
    term1 = local.along(SX[0], local.inner(Ys, Zs))
    term2 = local.along(Xs[0], local.inner(SY, Zs))

    def lie_s(V, Vs):  # (L_V S)X = [V, SX] - S[V, X]
        b1 = local.bracket(Vs, SX)
        b2 = local.bracket(Vs, Xs)
        return b1 - (b2 @ local.T_inv[0]) @ S_ad.T @ local.T[0]

    term3 = local.inner_at_center(lie_s(Y, Ys), Zs[0])
    term4 = local.inner_at_center(Ys[0], lie_s(Z, Zs))
    return float(term1 - term2 + term3 + term4)


def phi_closed_form_j(local: LocalFrames, X, Y, Z) -> float:
    """2 G(B, psi(X_h, Z_h)) + 2 G(psi(X_h, Y_h), C) with B = Y_v, C = Z_v."""
    P = local.P
    geom = geometry_at(local.chart, P.x, 2)
    psi = frame_data(P, geom).psi
    x, y, z = (np.asarray(F(P.coords), dtype=float) for F in (X, Y, Z))
    n = P.n
    Gv = local.G[0][n:, n:]
    pxz = np.einsum("l,j,ljK->K", x[:n], z[:n], psi)
    pxy = np.einsum("l,j,ljK->K", x[:n], y[:n], psi)
    return float(2 * y[n:] @ Gv @ pxz + 2 * pxy @ Gv @ z[n:])


def cyclic_phi(local: LocalFrames, S, X, Y, Z) -> float:
    return (phi_operator(local, S, X, Y, Z) + phi_operator(local, S, Y, Z, X)
            + phi_operator(local, S, Z, X, Y))


def product_connection(P: FiberPoint, geom: BaseGeometryAt, f: RescaleAt,
                       structure: StructureTensor = PARACOMPLEX) -> ConnectionField:
    """∇ - S̃ with S̃(X,Y) = ½{(∇_{JY}J)X + J((∇_Y J)X) - J((∇_X J)Y)}."""
    lc = levi_civita(P, geom, f).coeff
    s = structure.signs(P.n, P.N)
    dJ = lc * (s[None, None, :] - s[:, None, None])  # (∇_{E_b} J) E_c, component a
    Sx = 0.5 * (
        np.einsum("y,ayx->axy", s, dJ)
        + np.einsum("a,ayx->axy", s, dJ)
        - np.einsum("a,axy->axy", s, dJ)
    )
    return ConnectionField(lc - Sx, P.n, "product")


def product_connection_11(P: FiberPoint, geom: BaseGeometryAt, f: RescaleAt) -> ConnectionField:
    """Displayed blocks: Γ + A/2f, fiber Γ-action, 3x the Levi-Civita vertical-horizontal block."""
    lc = levi_civita(P, geom, f).coeff
    n = P.n
    out = np.zeros_like(lc)
    out[:n, :n, :n] = lc[:n, :n, :n]
    out[n:, :n, n:] = lc[n:, :n, n:]
    out[:n, n:, :n] = 3.0 * lc[:n, n:, :n]
    return ConnectionField(out, n, "product")
