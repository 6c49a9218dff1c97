"""Truncated multivariate Taylor arithmetic.

A :class:`Jet` stores, for every entry of a dense tensor, the Taylor
coefficients of a smooth function around a base point up to a total order.
Products truncate, ``grad`` shifts coefficients and lowers the valid order by
one, and analytic functions are composed through their univariate Taylor
series.  Everything is exact up to floating point rounding, which is what the
curvature formulas need: third derivatives of the metric feed the covariant
derivative of the curvature tensor.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np

__all__ = ["JetSpace", "Jet", "jet_einsum", "jet_space", "stack", "inv"]

_SPARE_LETTERS = "ZYXWVU"


class JetSpace:
    """Monomial bookkeeping for ``nvars`` variables and total order ``order``."""

    def __init__(self, nvars: int, order: int):
        if nvars < 1:
            raise ValueError("need at least one variable")
        if order < 0:
            raise ValueError("order must be non-negative")
        self.nvars = nvars
        self.order = order
        monos = []
        for deg in range(order + 1):
            for combo in itertools.combinations_with_replacement(range(nvars), deg):
                exps = [0] * nvars
                for v in combo:
                    exps[v] += 1
                monos.append(tuple(exps))
        self.monomials = monos
        self.size = len(monos)
        self.index = {m: i for i, m in enumerate(monos)}
        self.degree = np.array([sum(m) for m in monos])
        self.factorial = np.array(
            [math.prod(math.factorial(e) for e in m) for m in monos], dtype=float
        )
        self._pairs = {}
        self._deriv = []
        for v in range(nvars):
            d = np.zeros((self.size, self.size))
            for i, m in enumerate(monos):
                if m[v] == 0:
                    continue
                lower = list(m)
                lower[v] -= 1
                d[i, self.index[tuple(lower)]] = m[v]
            self._deriv.append(d)
        # derivative of coefficients: (∂_v f)_b = sum_a D[a, b] f_a
        self._deriv_stack = np.stack(self._deriv)

    def pairs(self, order: int):
        """Gather/scatter tables for products truncated at ``order``."""
        if order not in self._pairs:
            ia, ib, ic = [], [], []
            for a, ma in enumerate(self.monomials):
                da = sum(ma)
                if da > order:
                    break
                for b, mb in enumerate(self.monomials):
                    if da + sum(mb) > order:
                        continue
                    ia.append(a)
                    ib.append(b)
                    ic.append(self.index[tuple(x + y for x, y in zip(ma, mb))])
            scatter = np.zeros((len(ic), self.size))
            scatter[np.arange(len(ic)), ic] = 1.0
            self._pairs[order] = (np.array(ia), np.array(ib), scatter)
        return self._pairs[order]

    def constant(self, value, order: int | None = None) -> "Jet":
        value = np.asarray(value, dtype=float)
        c = np.zeros(value.shape + (self.size,))
        c[..., 0] = value
        return Jet(self, c, self.order if order is None else order)

    def variable(self, k: int, value: float) -> "Jet":
        c = np.zeros(self.size)
        c[0] = value
        if self.order >= 1:
            c[1 + k] = 1.0
        return Jet(self, c, self.order)

    def variables(self, point) -> list["Jet"]:
        return [self.variable(k, float(v)) for k, v in enumerate(point)]

    def __repr__(self) -> str:
        return f"JetSpace(nvars={self.nvars}, order={self.order})"


@lru_cache(maxsize=None)
def jet_space(nvars: int, order: int) -> JetSpace:
    return JetSpace(nvars, order)


class Jet:
    """Tensor-valued truncated Taylor polynomial.

    ``c`` has shape ``tensor_shape + (space.size,)``; coefficients of
    monomials above ``order`` are meaningless and kept at zero.
    """

    __array_priority__ = 100

    def __init__(self, space: JetSpace, c: np.ndarray, order: int):
        self.space = space
        self.c = c
        self.order = min(order, space.order)

    # -- basic accessors -------------------------------------------------
    @property
    def shape(self) -> tuple:
        return self.c.shape[:-1]

    @property
    def value(self) -> np.ndarray:
        return self.c[..., 0]

    def derivative(self, multi_index) -> np.ndarray:
        """Partial derivative for a multi-index given as exponent tuple."""
        multi_index = tuple(multi_index)
        if sum(multi_index) > self.order:
            raise ValueError("derivative order exceeds the valid jet order")
        i = self.space.index[multi_index]
        return self.c[..., i] * self.space.factorial[i]

    def __getitem__(self, key) -> "Jet":
        if not isinstance(key, tuple):
            key = (key,)
        if any(k is Ellipsis for k in key):
            raise IndexError("ellipsis indexing is not supported on jets")
        return Jet(self.space, self.c[key + (slice(None),)], self.order)

    def reshape(self, *shape) -> "Jet":
        if len(shape) == 1 and isinstance(shape[0], tuple):
            shape = shape[0]
        return Jet(self.space, self.c.reshape(tuple(shape) + (self.space.size,)), self.order)

    def transpose(self, *axes) -> "Jet":
        nd = len(self.shape)
        return Jet(self.space, self.c.transpose(tuple(axes) + (nd,)), self.order)

    @property
    def T(self) -> "Jet":
        return self.transpose(*reversed(range(len(self.shape))))

    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            return other
        return self.space.constant(other, order=self.space.order)

    # -- linear operations -------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        return Jet(self.space, self.c + other.c, min(self.order, other.order))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return Jet(self.space, self.c - other.c, min(self.order, other.order))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return Jet(self.space, -self.c, self.order)

    def scale(self, array) -> "Jet":
        """Multiply entrywise by a constant array (broadcast over tensor axes)."""
        a = np.asarray(array, dtype=float)
        return Jet(self.space, self.c * a[..., None], self.order)

    def linmap(self, subscripts: str, *consts) -> "Jet":
        """Apply a constant multilinear map to the tensor axes.

        ``subscripts`` is an einsum string whose first operand is this jet's
        tensor axes; the remaining operands are constant arrays.
        """
        lhs, rhs = subscripts.split("->")
        ops = lhs.split(",")
        z = _free_letter(subscripts)
        spec = ",".join([ops[0] + z] + ops[1:]) + "->" + rhs + z
        return Jet(self.space, np.einsum(spec, self.c, *consts), self.order)

    # -- products ----------------------------------------------------------
    def __mul__(self, other):
        if not isinstance(other, Jet):
            a = np.asarray(other, dtype=float)
            return Jet(self.space, self.c * a[..., None], self.order)
        return _product(self, other)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            a = np.asarray(other, dtype=float)
            return Jet(self.space, self.c / a[..., None], self.order)
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, k: int):
        if not isinstance(k, (int, np.integer)):
            raise TypeError("jets support integer powers only")
        if k < 0:
            return self.reciprocal() ** (-k)
        result = self.space.constant(np.ones(self.shape))
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return Jet(self.space, result.c, min(result.order, self.order))

    # -- differentiation ---------------------------------------------------
    def grad(self) -> "Jet":
        """Gradient; the differentiation index becomes the leading axis."""
        if self.order < 1:
            raise ValueError("cannot differentiate an order-0 jet")
        c = np.einsum("...a,vab->v...b", self.c, self.space._deriv_stack)
        drop = self.space.degree > self.order - 1
        c[..., drop] = 0.0
        return Jet(self.space, c, self.order - 1)

    def truncate(self, order: int) -> "Jet":
        c = self.c.copy()
        c[..., self.space.degree > order] = 0.0
        return Jet(self.space, c, min(order, self.order))

    # -- analytic functions --------------------------------------------------
    def compose(self, derivs) -> "Jet":
        """Compose with a scalar function given its derivatives at the value.

        ``derivs[k]`` is the k-th derivative of the outer function evaluated
        entrywise at ``self.value`` (arrays of the tensor shape).
        """
        order = self.order
        h = Jet(self.space, self.c.copy(), order)
        h.c[..., 0] = 0.0
        out = np.zeros_like(self.c)
        out[..., 0] = derivs[0]
        power = None
        for k in range(1, order + 1):
            power = h if power is None else power * h
            out = out + power.c * (np.asarray(derivs[k]) / math.factorial(k))[..., None]
        return Jet(self.space, out, order)

    def reciprocal(self) -> "Jet":
        a = self.value
        if np.any(a == 0):
            raise ZeroDivisionError("reciprocal of a jet with zero value")
        derivs = [((-1) ** k) * math.factorial(k) / a ** (k + 1) for k in range(self.order + 1)]
        return self.compose(derivs)

    def exp(self) -> "Jet":
        e = np.exp(self.value)
        return self.compose([e] * (self.order + 1))

    def sin(self) -> "Jet":
        s, c = np.sin(self.value), np.cos(self.value)
        cycle = [s, c, -s, -c]
        return self.compose([cycle[k % 4] for k in range(self.order + 1)])

    def cos(self) -> "Jet":
        s, c = np.sin(self.value), np.cos(self.value)
        cycle = [c, -s, -c, s]
        return self.compose([cycle[k % 4] for k in range(self.order + 1)])

    def log(self) -> "Jet":
        a = self.value
        derivs = [np.log(a)]
        for k in range(1, self.order + 1):
            derivs.append(((-1) ** (k - 1)) * math.factorial(k - 1) / a ** k)
        return self.compose(derivs)

    def sqrt(self) -> "Jet":
        a = self.value
        derivs = []
        coef = 1.0
        for k in range(self.order + 1):
            derivs.append(coef * a ** (0.5 - k))
            coef *= 0.5 - k
        return self.compose(derivs)

    def __repr__(self) -> str:
        return f"Jet(shape={self.shape}, order={self.order}, value={self.value!r})"


def _free_letter(subscripts: str) -> str:
    for z in _SPARE_LETTERS:
        if z not in subscripts:
            return z
    raise ValueError("no spare einsum letter available")


def _product(a: Jet, b: Jet, subscripts: str | None = None) -> Jet:
    order = min(a.order, b.order)
    ia, ib, scatter = a.space.pairs(order)
    ga = a.c[..., ia]
    gb = b.c[..., ib]
    if subscripts is None:
        x = ga * gb
    else:
        lhs, rhs = subscripts.split("->")
        sa, sb = lhs.split(",")
        z = _free_letter(subscripts)
        x = np.einsum(f"{sa}{z},{sb}{z}->{rhs}{z}", ga, gb)
    return Jet(a.space, x @ scatter, order)


def jet_einsum(subscripts: str, *operands) -> Jet:
    """Einsum over tensor axes of jets (and constant arrays).

    Operands are folded pairwise from the left, so the subscripts must name
    every index explicitly (no ellipsis).  Constant ndarray operands are
    absorbed with :meth:`Jet.linmap`.
    """
    lhs, rhs = subscripts.split("->")
    specs = lhs.split(",")
    if len(specs) != len(operands):
        raise ValueError("operand count does not match subscripts")
    acc, acc_spec = operands[0], specs[0]
    for k in range(1, len(specs)):
        later = rhs + "".join(specs[k + 1:])
        out = "".join(dict.fromkeys(ch for ch in acc_spec + specs[k] if ch in later))
        acc = _binary(acc, acc_spec, operands[k], specs[k], out)
        acc_spec = out
    if acc_spec != rhs:
        if isinstance(acc, Jet):
            acc = acc.linmap(f"{acc_spec}->{rhs}")
        else:
            acc = np.einsum(f"{acc_spec}->{rhs}", acc)
    return acc


def _binary(a, sa, b, sb, out):
    spec = f"{sa},{sb}->{out}"
    if isinstance(a, Jet) and isinstance(b, Jet):
        return _product(a, b, spec)
    if isinstance(a, Jet):
        return a.linmap(spec, np.asarray(b, dtype=float))
    if isinstance(b, Jet):
        return b.linmap(f"{sb},{sa}->{out}", np.asarray(a, dtype=float))
    return np.einsum(spec, a, b)


def stack(jets, axis: int = 0) -> Jet:
    """Stack jets (or constants) along a new tensor axis."""
    jets = list(jets)
    ref = next(j for j in jets if isinstance(j, Jet))
    items = [j if isinstance(j, Jet) else ref.space.constant(j) for j in jets]
    order = min(j.order for j in items)
    if axis < 0:
        axis += len(ref.shape) + 1
    return Jet(ref.space, np.stack([j.c for j in items], axis=axis), order)


def inv(m: Jet) -> Jet:
    """Inverse of a square-matrix jet by a truncated Neumann series."""
    a_inv = np.linalg.inv(m.value)
    h = Jet(m.space, m.c.copy(), m.order)
    h.c[..., 0] = 0.0
    x = -h.linmap("ab,ca->cb", a_inv)  # -A^{-1} h
    out = m.space.constant(a_inv)
    term = out
    for _ in range(m.order):
        term = jet_einsum("ab,bc->ac", x, term)
        out = out + term
    return Jet(m.space, out.c, m.order)
