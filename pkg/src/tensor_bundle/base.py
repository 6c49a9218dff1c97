"""Riemannian geometry of a single-chart base manifold.

Index conventions used throughout the package:

* ``gamma[h, i, j]`` is the Christoffel symbol Γ^h_{ij};
* ``riemann[k, l, j, s]`` is R_{klj}^s with R(∂_k, ∂_l)∂_j = R_{klj}^s ∂_s and
  R(X, Y) = [∇_X, ∇_Y] - ∇_[X, Y];
* ``nabla_riemann[m, k, l, j, s]`` is ∇_m R_{klj}^s;
* ``ricci[l, j] = R_{slj}^s`` and ``scalar = g^{lj} ricci[l, j]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import tensors
from .errors import BadParameter, NotPositiveDefinite, ShapeMismatch
from .expr import BinOp, Call, Const, Expression, Neg, Num, Pow, Var, parse, to_source
from .jets import Jet, inv, jet_einsum, jet_space, stack

__all__ = [
    "ManifoldChart", "BaseGeometryAt", "BaseJets", "geometry_at", "base_jets",
    "euclidean", "sphere", "hyperbolic", "product", "custom", "preset",
    "covariant_derivative_along", "raise_riemann",
]


@dataclass(frozen=True)
class ManifoldChart:
    """Metric components ``g[i][j]`` as expressions in ``x1..xn``.

    ``box`` is the default sampling region (one ``(min, max)`` pair per
    coordinate) and ``kappa`` the sectional curvature for constant-curvature
    presets, ``None`` otherwise.
    """

    n: int
    g: tuple
    name: str = "custom"
    box: tuple = ()
    kappa: float | None = None

    def __post_init__(self):
        if len(self.g) != self.n or any(len(row) != self.n for row in self.g):
            raise ShapeMismatch(f"metric must be {self.n}x{self.n}")
        for i in range(self.n):
            for e in self.g[i]:
                if e.nvars > self.n:
                    raise BadParameter(f"expression {e.source!r} uses coordinates beyond x{self.n}")
        if not self.box:
            object.__setattr__(self, "box", tuple((-1.0, 1.0) for _ in range(self.n)))
        if len(self.box) != self.n:
            raise ShapeMismatch("box needs one interval per coordinate")

    def metric(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.array([[e.evaluate(x) for e in row] for row in self.g])

    def metric_jet(self, xs: list[Jet]) -> Jet:
        return stack([stack([e.jet(xs) for e in row]) for row in self.g])


@dataclass
class BaseGeometryAt:
    x: np.ndarray
    g: np.ndarray
    g_inv: np.ndarray
    gamma: np.ndarray
    riemann: np.ndarray | None = None
    nabla_riemann: np.ndarray | None = None
    ricci: np.ndarray | None = None
    scalar: float | None = None
    dgamma: np.ndarray | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return len(self.x)


@dataclass
class BaseJets:
    """Jets of g, g^{-1}, Γ and R around a point (orders d, d, d-1, d-2)."""

    g: Jet
    g_inv: Jet
    gamma: Jet
    riemann: Jet | None


def _christoffel(g: Jet, g_inv: Jet) -> Jet:
    dg = g.grad()[: g.shape[0]]  # dg[k, i, j] = ∂_k g_ij; base variables come first
    # ∂_i g_mj + ∂_j g_im - ∂_m g_ij, indexed [m, i, j]
    lower = dg.transpose(1, 0, 2) + dg.transpose(2, 1, 0) - dg
    return jet_einsum("hm,mij->hij", g_inv, lower) * 0.5


def _riemann(gamma: Jet) -> Jet:
    dgam = gamma.grad()[: gamma.shape[0]]  # dgam[k, s, l, j] = ∂_k Γ^s_{lj}
    lin = dgam.transpose(0, 2, 3, 1)  # [k, l, j, s]
    quad = jet_einsum("skm,mlj->kljs", gamma, gamma)
    return lin - lin.transpose(1, 0, 2, 3) + quad - quad.transpose(1, 0, 2, 3)


def base_jets(chart: ManifoldChart, x, order: int, variables=None) -> BaseJets:
    """Jets of the base geometry; ``variables`` overrides the coordinate jets."""
    x = np.asarray(x, dtype=float)
    if variables is None:
        variables = jet_space(chart.n, order).variables(x)
    g = chart.metric_jet(variables)
    _check_pd(g.value, x)
    g_inv = inv(g)
    gamma = _christoffel(g, g_inv) if g.order >= 1 else None
    riem = _riemann(gamma) if g.order >= 2 else None
    return BaseJets(g, g_inv, gamma, riem)


def _check_pd(g: np.ndarray, x) -> None:
    try:
        np.linalg.cholesky(g)
    except np.linalg.LinAlgError:
        raise NotPositiveDefinite(x) from None
    if not np.allclose(g, g.T, rtol=0, atol=1e-12 * max(1.0, np.abs(g).max())):
        raise NotPositiveDefinite(x)


def geometry_at(chart: ManifoldChart, x, derivs: int = 3) -> BaseGeometryAt:
    """Base quantities at ``x``.

    ``derivs`` is the number of metric derivatives taken: 1 gives Γ only,
    2 adds the curvature, Ricci and scalar, 3 adds ∇R.
    """
    if derivs not in (1, 2, 3):
        raise ValueError("derivs must be 1, 2 or 3")
    x = np.asarray(x, dtype=float)
    if x.shape != (chart.n,):
        raise ShapeMismatch(f"point must have {chart.n} coordinates")
    jets = base_jets(chart, x, derivs)
    geom = BaseGeometryAt(x, jets.g.value.copy(), jets.g_inv.value.copy(), jets.gamma.value.copy())
    if derivs >= 2:
        geom.dgamma = jets.gamma.grad().value  # [k, s, l, j]
        R = jets.riemann.value
        geom.riemann = R
        geom.ricci = np.einsum("sljs->lj", R)
        geom.scalar = float(np.einsum("lj,lj->", geom.g_inv, geom.ricci))
    if derivs >= 3:
        dR = jets.riemann.grad().value  # [m, k, l, j, s]
        G = geom.gamma
        geom.nabla_riemann = (
            dR
            - np.einsum("amk,aljs->mkljs", G, R)
            - np.einsum("aml,kajs->mkljs", G, R)
            - np.einsum("amj,klas->mkljs", G, R)
            + np.einsum("sma,klja->mkljs", G, R)
        )
    return geom


def raise_riemann(geom: BaseGeometryAt) -> np.ndarray:
    """``up[s, j, l, r] = g^{as} g^{bj} R_{abl}^r``."""
    return np.einsum("as,bj,ablr->sjlr", geom.g_inv, geom.g_inv, geom.riemann)


def covariant_derivative_along(gamma, xdot, S, dS, p: int, q: int) -> np.ndarray:
    """δS/dt = dS/dt + Σ_upper Γ^v_{ls} S ẋ^l - Σ_lower Γ^s_{lr} S ẋ^l (flat components)."""
    gamma = np.asarray(gamma, dtype=float)
    n = gamma.shape[0]
    xdot = np.asarray(xdot, dtype=float)
    if xdot.shape != (n,):
        raise ShapeMismatch(f"velocity must have {n} components")
    S = tensors.as_flat(S, n, p, q)
    dS = tensors.as_flat(dS, n, p, q)
    lam = tensors.derivation_tensor(n, p, q)
    return dS + tensors.act(np.einsum("alb,l->ab", gamma, xdot), S, lam)


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------

def _num(v: float) -> str:
    return repr(float(v)) if v != int(v) else str(int(v))


def custom(sources, name: str = "custom", box=(), kappa=None) -> ManifoldChart:
    """Chart from a square nested list of expression strings."""
    n = len(sources)
    g = tuple(tuple(parse(str(s), n) for s in row) for row in sources)
    return ManifoldChart(n, g, name, tuple(tuple(map(float, b)) for b in box), kappa)


def euclidean(n: int) -> ManifoldChart:
    if n < 1:
        raise BadParameter("dimension must be positive")
    src = [["1" if i == j else "0" for j in range(n)] for i in range(n)]
    return custom(src, f"euclidean({n})", tuple((-1.0, 1.0) for _ in range(n)), 0.0)


POLE_MARGIN = 0.2


def sphere(radius: float = 1.0) -> ManifoldChart:
    """Round 2-sphere in polar coordinates (x1 colatitude, x2 longitude)."""
    if not radius > 0:
        raise BadParameter("radius must be positive")
    r2 = _num(radius * radius)
    src = [[r2, "0"], ["0", f"{r2}*sin(x1)^2"]]
    box = ((POLE_MARGIN, math.pi - POLE_MARGIN), (-math.pi, math.pi))
    return custom(src, f"sphere({_num(radius)})", box, 1.0 / (radius * radius))


def hyperbolic(n: int = 2) -> ManifoldChart:
    """Upper half-space model, metric δ_ij / x_n^2 (curvature -1)."""
    if n < 2:
        raise BadParameter("hyperbolic space needs n >= 2")
    src = [[f"1/x{n}^2" if i == j else "0" for j in range(n)] for i in range(n)]
    box = tuple((-1.0, 1.0) for _ in range(n - 1)) + ((0.5, 2.0),)
    return custom(src, f"hyperbolic({n})", box, -1.0)


def _shift(node, k: int):
    if isinstance(node, Var):
        return Var(node.index + k)
    if isinstance(node, (Num, Const)):
        return node
    if isinstance(node, Neg):
        return Neg(_shift(node.arg, k))
    if isinstance(node, Call):
        return Call(node.func, _shift(node.arg, k))
    if isinstance(node, Pow):
        return Pow(_shift(node.base, k), node.exponent)
    return BinOp(node.op, _shift(node.left, k), _shift(node.right, k))


def product(a: ManifoldChart, b: ManifoldChart) -> ManifoldChart:
    """Riemannian product; the second factor's coordinates are renumbered after the first."""
    n = a.n + b.n
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            if i < a.n and j < a.n:
                row.append(a.g[i][j])
            elif i >= a.n and j >= a.n:
                src = to_source(_shift(b.g[i - a.n][j - a.n].ast, a.n))
                row.append(parse(src, n))
            else:
                row.append(parse("0", n))
        rows.append(tuple(row))
    return ManifoldChart(n, tuple(rows), f"{a.name}x{b.name}", a.box + b.box, None)


def preset(kind: str, **params) -> ManifoldChart:
    """Look up a preset by name: euclidean(n), sphere(radius), hyperbolic(n)."""
    kind = kind.strip().lower()
    try:
        if kind == "euclidean":
            return euclidean(int(params.get("n", 2)))
        if kind == "sphere":
            return sphere(float(params.get("radius", 1.0)))
        if kind == "hyperbolic":
            return hyperbolic(int(params.get("n", 2)))
    except (TypeError, ValueError) as exc:
        raise BadParameter(str(exc)) from None
    raise BadParameter(f"unknown preset {kind!r}")


PRESETS = ("euclidean", "sphere", "hyperbolic")
