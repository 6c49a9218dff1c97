"""Fiber tensor bookkeeping for T^p_q bundles.

A fiber tensor has shape ``(n,)*(p+q)`` with the ``p`` upper axes first and
is flattened row-major, so the bundle coordinate of component ``K`` is
``n + K``.  The derivation action of a (1,1) tensor ``phi`` on a (p,q)
tensor ``t`` is

    act(phi) t = sum over upper slots of phi applied to that slot
               - sum over lower slots of phi^T applied to that slot,

stored as a constant array ``Lam[a, b, K, L]`` so that
``act(phi) t = einsum('ab,abKL,L->K', phi, Lam, t)``.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import DimensionGuard, ShapeMismatch

MAX_FIBER_DIM = 256


def fiber_dim(n: int, p: int, q: int) -> int:
    return n ** (p + q)


def check_type(n: int, p: int, q: int) -> None:
    if p < 0 or q < 0:
        raise ShapeMismatch(f"tensor type ({p},{q}) has a negative entry")
    if fiber_dim(n, p, q) > MAX_FIBER_DIM:
        raise DimensionGuard(f"fiber dimension {n}^{p + q} exceeds {MAX_FIBER_DIM}")


def flat_index(multi, n: int) -> int:
    """Row-major position of a (upper..., lower...) multi-index."""
    k = 0
    for i in multi:
        k = k * n + int(i)
    return k


def multi_index(k: int, n: int, rank: int) -> tuple:
    return tuple(int(v) for v in np.unravel_index(k, (n,) * rank)) if rank else ()


def component_labels(n: int, p: int, q: int) -> list[str]:
    """Column labels ``t_<upper><lower>`` in flattening order, digits 0-based."""
    rank = p + q
    labels = []
    for k in range(fiber_dim(n, p, q)):
        idx = multi_index(k, n, rank)
        labels.append("t_" + "".join(str(i) for i in idx) if rank else "t")
    return labels


def as_flat(t, n: int, p: int, q: int) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    N = fiber_dim(n, p, q)
    if t.size != N or t.shape not in ((N,), (n,) * (p + q)):
        raise ShapeMismatch(f"expected a ({p},{q}) tensor with {N} components, got shape {t.shape}")
    return t.reshape(N)


@lru_cache(maxsize=None)
def slot_actions(n: int, p: int, q: int) -> tuple[np.ndarray, np.ndarray]:
    """Upper-slot and lower-slot actions of ``phi^a_b``, each ``[a, b, K, L]``.

    The upper action sums ``phi^{i}_m t^{..m..}`` over upper slots; the lower
    action sums ``t_{..m..} phi^m_{j}`` over lower slots.
    """
    check_type(n, p, q)
    rank = p + q
    N = fiber_dim(n, p, q)
    up = np.zeros((n, n, N, N))
    low = np.zeros((n, n, N, N))
    eye = np.eye(n)
    for a in range(n):
        for b in range(n):
            unit = np.zeros((n, n))
            unit[a, b] = 1.0
            for slot in range(rank):
                op = unit if slot < p else unit.T
                m = np.ones((1, 1))
                for s in range(rank):
                    m = np.kron(m, op if s == slot else eye)
                (up if slot < p else low)[a, b] += m
    up.setflags(write=False)
    low.setflags(write=False)
    return up, low


@lru_cache(maxsize=None)
def derivation_tensor(n: int, p: int, q: int) -> np.ndarray:
    """``Lam[a, b, K, L]``: the derivation action of ``phi^a_b`` on flat tensors."""
    up, low = slot_actions(n, p, q)
    lam = up - low
    lam.setflags(write=False)
    return lam


def act(phi, t, lam) -> np.ndarray:
    """Derivation action of (1,1) ``phi`` (or a stack ``phi[..., a, b]``) on flat ``t``."""
    return np.einsum("...ab,abKL,L->...K", phi, lam, t)


def act_matrix(phi, lam) -> np.ndarray:
    """Matrix of ``t -> act(phi) t``; leading axes of ``phi`` are kept."""
    return np.einsum("...ab,abKL->...KL", phi, lam)


def fiber_metric(g, g_inv, p: int, q: int) -> np.ndarray:
    """Fiber inner product on flat (p,q) tensors: g on upper slots, g^{-1} on lower."""
    m = np.ones((1, 1))
    for _ in range(p):
        m = np.kron(m, g)
    for _ in range(q):
        m = np.kron(m, g_inv)
    return m
