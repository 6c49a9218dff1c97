"""Pointwise realization of the tensor bundle T^p_q(M).

Bundle indices run over ``0..n-1`` (horizontal, E_j) and ``n..n+N-1``
(vertical, E_{n+K} = ∂/∂t_K with K the flat fiber index).  In natural
coordinates the horizontal frame vector is

    E_j = ∂_j + Q[j, K] ∂_{n+K},   Q[j] = -act(Γ_j) t,   Γ_j[a, b] = Γ^a_{jb},

so the frame matrix ``T`` (rows are frame vectors) is block upper triangular
``[[I, Q], [0, I]]`` with inverse ``[[I, -Q], [0, I]]``.

Structure constants are stored as ``C[c, a, b]`` with [E_a, E_b] = C[c, a, b] E_c.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tensors
from .base import BaseGeometryAt
from .errors import ShapeMismatch

__all__ = [
    "FiberPoint", "AdaptedField", "FrameData", "frame_data",
    "vertical_lift", "horizontal_lift", "gamma_ops", "curvature_operator",
    "frame_transition", "adapted_brackets", "to_natural", "to_adapted",
]


@dataclass(frozen=True)
class FiberPoint:
    """Base point ``x`` and flat fiber components ``t`` of type (p, q)."""

    x: np.ndarray
    t: np.ndarray
    p: int = 1
    q: int = 1

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).reshape(-1)
        n = len(x)
        tensors.check_type(n, self.p, self.q)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "t", tensors.as_flat(self.t, n, self.p, self.q).copy())

    @property
    def n(self) -> int:
        return len(self.x)

    @property
    def N(self) -> int:
        return len(self.t)

    @property
    def dim(self) -> int:
        return self.n + self.N

    @property
    def coords(self) -> np.ndarray:
        """Induced coordinates (x, t)."""
        return np.concatenate([self.x, self.t])

    def tensor(self) -> np.ndarray:
        return self.t.reshape((self.n,) * (self.p + self.q))

    @classmethod
    def from_coords(cls, z, n: int, p: int = 1, q: int = 1) -> "FiberPoint":
        z = np.asarray(z, dtype=float)
        return cls(z[:n], z[n:], p, q)


@dataclass(frozen=True)
class AdaptedField:
    """Components in the adapted frame: horizontal block ``h`` and vertical ``v``."""

    h: np.ndarray
    v: np.ndarray

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.h, self.v])

    @classmethod
    def from_vector(cls, z, n: int) -> "AdaptedField":
        z = np.asarray(z, dtype=float)
        return cls(z[:n].copy(), z[n:].copy())

    def __add__(self, other: "AdaptedField") -> "AdaptedField":
        return AdaptedField(self.h + other.h, self.v + other.v)

    def __rmul__(self, c: float) -> "AdaptedField":
        return AdaptedField(c * self.h, c * self.v)


def vertical_lift(A, P: FiberPoint) -> AdaptedField:
    return AdaptedField(np.zeros(P.n), tensors.as_flat(A, P.n, P.p, P.q).copy())


def horizontal_lift(X, P: FiberPoint, geom: BaseGeometryAt | None = None) -> AdaptedField:
    """Adapted components of the horizontal lift; ``geom`` is unused here since
    the lift is (X, 0) in the adapted frame, and only enters through
    :func:`to_natural`."""
    X = np.asarray(X, dtype=float)
    if X.shape != (P.n,):
        raise ShapeMismatch(f"vector must have {P.n} components")
    return AdaptedField(X.copy(), np.zeros(P.N))


def gamma_ops(phi, P: FiberPoint) -> tuple[AdaptedField, AdaptedField]:
    """Vertical fields from the upper-slot and lower-slot actions of ``phi`` on ``t``.

    For (1,1) fibers these are phi^i_m t^m_j and t^i_m phi^m_j.
    """
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (P.n, P.n):
        raise ShapeMismatch("phi must be an n x n (1,1) tensor")
    up, low = tensors.slot_actions(P.n, P.p, P.q)
    zero = np.zeros(P.n)
    return (
        AdaptedField(zero, np.einsum("ab,abKL,L->K", phi, up, P.t)),
        AdaptedField(zero.copy(), np.einsum("ab,abKL,L->K", phi, low, P.t)),
    )


def curvature_operator(P: FiberPoint, geom: BaseGeometryAt) -> np.ndarray:
    """``psi[l, j, K]``: the lower-minus-upper slot action of R(∂_l, ∂_j) on t."""
    lam = tensors.derivation_tensor(P.n, P.p, P.q)
    Rop = np.einsum("ljba->ljab", geom.riemann)  # Rop[l, j, a, b] = R_{ljb}^a
    return -tensors.act(Rop, P.t, lam)


def frame_transition(P: FiberPoint, geom: BaseGeometryAt) -> tuple[np.ndarray, np.ndarray]:
    """Frame matrix (rows: E_a in natural components) and its inverse."""
    lam = tensors.derivation_tensor(P.n, P.p, P.q)
    Q = -tensors.act(_gamma_ops(geom), P.t, lam)
    return _transition(Q)


def _gamma_ops(geom: BaseGeometryAt) -> np.ndarray:
    return np.transpose(geom.gamma, (1, 0, 2))  # [j, a, b] = Γ^a_{jb}


def _transition(Q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n, N = Q.shape
    T = np.eye(n + N)
    T[:n, n:] = Q
    T_inv = np.eye(n + N)
    T_inv[:n, n:] = -Q
    return T, T_inv


def to_natural(field: AdaptedField | np.ndarray, T: np.ndarray) -> np.ndarray:
    z = field.vector if isinstance(field, AdaptedField) else np.asarray(field)
    return z @ T


def to_adapted(z, T_inv: np.ndarray, n: int | None = None):
    out = np.asarray(z) @ T_inv
    return out if n is None else AdaptedField.from_vector(out, n)


def adapted_brackets(P: FiberPoint, geom: BaseGeometryAt) -> np.ndarray:
    """Structure constants ``C[c, a, b]`` of the adapted frame.

    [E_l, E_j] is vertical with components psi[l, j]; [E_l, E_{n+J}] is the
    vertical field act(Γ_l) e_J; vertical frame vectors commute.
    """
    return frame_data(P, geom).C


@dataclass
class FrameData:
    """Everything about the adapted frame at one fiber point."""

    P: FiberPoint
    geom: BaseGeometryAt
    lam: np.ndarray
    gamma_ops: np.ndarray   # [j, a, b] = Γ^a_{jb}
    gamma_act: np.ndarray   # [j, K, L]: matrix of act(Γ_j)
    Q: np.ndarray
    T: np.ndarray
    T_inv: np.ndarray
    psi: np.ndarray | None  # [l, j, K]
    C: np.ndarray | None


def frame_data(P: FiberPoint, geom: BaseGeometryAt) -> FrameData:
    n, N = P.n, P.N
    if geom.x.shape != P.x.shape or not np.array_equal(geom.x, P.x):
        raise ShapeMismatch("geometry was evaluated at a different base point")
    lam = tensors.derivation_tensor(n, P.p, P.q)
    gops = _gamma_ops(geom)
    gact = tensors.act_matrix(gops, lam)
    Q = -gact @ P.t
    T, T_inv = _transition(Q)
    psi = C = None
    if geom.riemann is not None:
        psi = curvature_operator(P, geom)
        D = n + N
        C = np.zeros((D, D, D))
        C[n:, :n, :n] = np.transpose(psi, (2, 0, 1))
        C[n:, :n, n:] = np.transpose(gact, (1, 0, 2))  # [K, l, J]
        C[n:, n:, :n] = -np.transpose(gact, (1, 2, 0))
    return FrameData(P, geom, lam, gops, gact, Q, T, T_inv, psi, C)
