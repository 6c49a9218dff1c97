"""Scenario files: flat ``key = value`` text with ``#`` comments.

Keys::

    name            scenario label used in reports
    base.preset     euclidean | sphere | hyperbolic
    base.n          dimension for euclidean / hyperbolic
    base.radius     sphere radius
    base.g.i.j      custom metric component (1-based), replaces base.preset
    f.expr          rescaling function in x1..xn (default "1")
    bundle.p        contravariant order (default 1)
    bundle.q        covariant order (default 1)
    box.i.min       sampling box, 1-based coordinate index
    box.i.max
    tol.<check-id>  tolerance override
    seed            integer seed (default 0)
    samples         sample points per check (default 5)
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

from . import base, tensors
from .errors import BundleError, ConfigError
from .sasaki import RescaleFunction

__all__ = ["Scenario", "parse_config", "load_config", "parse_pairs", "DEFAULT_SAMPLES"]

DEFAULT_SAMPLES = 5


@dataclass(frozen=True)
class Scenario:
    name: str
    chart: base.ManifoldChart
    f: RescaleFunction
    p: int = 1
    q: int = 1
    box: tuple = ()
    tolerances: dict = field(default_factory=dict)
    seed: int = 0
    samples: int = DEFAULT_SAMPLES

    @property
    def n(self) -> int:
        return self.chart.n

    def with_overrides(self, seed=None, tolerances=None) -> "Scenario":
        tol = dict(self.tolerances)
        tol.update(tolerances or {})
        return replace(self, seed=self.seed if seed is None else seed, tolerances=tol)


def parse_pairs(text: str, origin: str = "<config>") -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{origin}:{lineno}", "expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{origin}:{lineno}", "empty key")
        if key in out:
            raise ConfigError(key, "duplicate key")
        out[key] = value
    return out


def _int(pairs, key, default):
    if key not in pairs:
        return default
    try:
        return int(pairs[key])
    except ValueError:
        raise ConfigError(key, f"expected an integer, got {pairs[key]!r}") from None


def _float(pairs, key):
    try:
        return float(pairs[key])
    except ValueError:
        raise ConfigError(key, f"expected a number, got {pairs[key]!r}") from None


_SIMPLE_KEYS = {"name", "base.preset", "base.n", "base.radius", "f.expr",
                "bundle.p", "bundle.q", "seed", "samples"}


def _check_keys(pairs):
    for key in pairs:
        if key in _SIMPLE_KEYS or key.startswith(("tol.", "box.", "base.g.")):
            continue
        raise ConfigError(key, "unknown key")


def _chart(pairs) -> base.ManifoldChart:
    custom = {k: v for k, v in pairs.items() if k.startswith("base.g.")}
    if custom:
        if "base.preset" in pairs:
            raise ConfigError("base.g", "give either base.preset or base.g.i.j, not both")
        idx = []
        for key in custom:
            parts = key.split(".")
            if len(parts) != 4 or not parts[2].isdigit() or not parts[3].isdigit():
                raise ConfigError(key, "expected base.g.<i>.<j>")
            idx.append((int(parts[2]), int(parts[3])))
        n = max(max(i, j) for i, j in idx)
        rows = [[None] * n for _ in range(n)]
        for (i, j), key in zip(idx, custom):
            if i < 1 or j < 1:
                raise ConfigError(key, "indices are 1-based")
            rows[i - 1][j - 1] = custom[key]
        for i in range(n):
            for j in range(n):
                a, b = rows[i][j], rows[j][i]
                if a is not None and b is not None and a != b:
                    raise ConfigError(f"base.g.{i + 1}.{j + 1}", "metric must be symmetric")
                rows[i][j] = a if a is not None else (b if b is not None else "0")
        try:
            return base.custom(rows, "custom")
        except BundleError as exc:
            raise ConfigError("base.g", str(exc)) from None
    kind = pairs.get("base.preset", "euclidean")
    params = {}
    if "base.n" in pairs:
        params["n"] = _int(pairs, "base.n", 2)
    if "base.radius" in pairs:
        params["radius"] = _float(pairs, "base.radius")
    try:
        return base.preset(kind, **params)
    except BundleError as exc:
        raise ConfigError("base.preset", str(exc)) from None


def _box(pairs, chart: base.ManifoldChart) -> tuple:
    box = [list(b) for b in chart.box]
    for key in pairs:
        if not key.startswith("box."):
            continue
        parts = key.split(".")
        if len(parts) != 3 or not parts[1].isdigit() or parts[2] not in ("min", "max"):
            raise ConfigError(key, "expected box.<i>.min or box.<i>.max")
        i = int(parts[1])
        if not 1 <= i <= chart.n:
            raise ConfigError(key, f"coordinate index must be in 1..{chart.n}")
        box[i - 1][0 if parts[2] == "min" else 1] = _float(pairs, key)
    for i, (lo, hi) in enumerate(box):
        dlo, dhi = chart.box[i]
        if not lo < hi:
            raise ConfigError(f"box.{i + 1}", "min must be below max")
        if chart.name != "custom" and (lo < dlo or hi > dhi):
            raise ConfigError(f"box.{i + 1}", f"must stay inside [{dlo:g}, {dhi:g}] (singular margins)")
    return tuple(tuple(b) for b in box)


def parse_config(text: str, origin: str = "<config>") -> Scenario:
    pairs = parse_pairs(text, origin)
    _check_keys(pairs)
    chart = _chart(pairs)
    box = _box(pairs, chart)
    chart = replace(chart, box=box)
    p, q = _int(pairs, "bundle.p", 1), _int(pairs, "bundle.q", 1)
    if p < 0 or q < 0:
        raise ConfigError("bundle", "orders must be non-negative")
    try:
        tensors.check_type(chart.n, p, q)
    except BundleError as exc:
        raise ConfigError("bundle", str(exc)) from None
    try:
        f = RescaleFunction.parse(pairs.get("f.expr", "1"), chart.n)
    except BundleError as exc:
        raise ConfigError("f.expr", str(exc)) from None
    tol = {}
    for key in pairs:
        if key.startswith("tol."):
            val = _float(pairs, key)
            if not val > 0:
                raise ConfigError(key, "tolerance must be positive")
            tol[key[4:]] = val
    samples = _int(pairs, "samples", DEFAULT_SAMPLES)
    if samples < 1:
        raise ConfigError("samples", "must be at least 1")
    name = pairs.get("name", Path(origin).stem if origin != "<config>" else chart.name)
    return Scenario(name, chart, f, p, q, box, tol, _int(pairs, "seed", 0), samples)


def load_config(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError("--config", f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text, str(path))
