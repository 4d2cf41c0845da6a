"""Scenario configuration files (TOML) and the objects they describe."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from ..energy import QuadratureConfig
from ..maps import MapSpec, TargetSpace
from ..mollifiers import FAMILIES
from ..space import Space, Weight

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "load_config",
    "build_space",
    "build_map",
    "build_target",
    "NAMED_SPACES",
    "NAMED_MAPS",
]


class ConfigError(ValueError):
    """Malformed or inconsistent scenario description."""


NAMED_SPACES = {
    "interval": lambda: Space.interval(0.0, 1.0, name="interval"),
    "square": lambda: Space.box([(0.0, 1.0), (0.0, 1.0)], name="square"),
    "cube": lambda: Space.box([(0.0, 1.0)] * 3, name="cube"),
    "weighted-interval": lambda: Space.interval(0.1, 0.9, Weight("inverse"), name="weighted-interval"),
    "circle": lambda: Space.circle(2 * math.pi, name="circle"),
}

NAMED_MAPS = ("identity", "linear", "power", "angle-wrap", "constant", "coordinate")


def build_space(desc) -> Space:
    if isinstance(desc, str):
        desc = {"name": desc}
    desc = dict(desc)
    name = desc.get("name")
    if name is not None and "kind" not in desc:
        if name not in NAMED_SPACES:
            raise ConfigError(f"unknown space {name!r}; known: {', '.join(NAMED_SPACES)}")
        return NAMED_SPACES[name]()
    kind = desc.get("kind", "euclidean-box")
    if kind == "circle":
        return Space.circle(float(desc.get("circumference", 2 * math.pi)), name=name or "circle")
    bounds = desc.get("bounds")
    if bounds is None:
        dim = int(desc.get("dim", 1))
        bounds = [[0.0, 1.0]] * dim
    weights = desc.get("weights")
    if weights is None and "weight" in desc:
        weights = [desc["weight"]]
    parsed = []
    for w in weights or []:
        if isinstance(w, str):
            parsed.append(Weight(w))
        else:
            parsed.append(Weight(w.get("kind", "one"), float(w.get("param", 0.0))))
    try:
        return Space(kind, tuple(tuple(b) for b in bounds), tuple(parsed),
                     interior_margin=float(desc.get("interior_margin", 0.0)), name=name or kind,
                     ball_method=desc.get("ball_method"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def build_map(desc, dim: int = 1) -> MapSpec:
    if isinstance(desc, str):
        desc = {"kind": desc}
    kind = desc.get("kind", "identity")
    scale = float(desc.get("scale_by", 1.0))
    if kind == "identity":
        out = MapSpec.identity(int(desc.get("dim", dim)))
    elif kind == "linear":
        out = MapSpec.linear(desc["matrix"], desc.get("offset"))
    elif kind == "power":
        out = MapSpec.power(float(desc.get("exponent", 2.0)), int(desc.get("axis", 0)))
    elif kind == "angle-wrap":
        out = MapSpec.angle_wrap(float(desc.get("scale", 2 * math.pi)), int(desc.get("axis", 0)))
    elif kind == "constant":
        out = MapSpec.constant(desc.get("value", 0.0))
    elif kind == "coordinate":
        out = MapSpec.coordinate(int(desc.get("axis", 0)))
    else:
        raise ConfigError(f"unknown map kind {kind!r}; known: {', '.join(NAMED_MAPS)}")
    return out if scale == 1.0 else out.scaled(scale)


def build_target(desc) -> TargetSpace:
    if isinstance(desc, str):
        desc = {"kind": desc}
    try:
        return TargetSpace(desc.get("kind", "euclidean"), int(desc.get("dim", 1)),
                           float(desc.get("alpha", 1.0)),
                           float(desc.get("circumference", 2 * math.pi)))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


_QUAD_KEYS = {"method", "radial_order", "shell_order", "outer_order", "outer_panels", "n_outer",
              "n_shells", "per_shell", "chunk", "workers"}


@dataclass
class ScenarioConfig:
    space: dict
    map: dict
    target: dict = field(default_factory=lambda: {"kind": "euclidean"})
    p: float = 2.0
    family: str = "rho1"
    deltas: tuple = (0.08, 0.04, 0.02, 0.01)
    quadrature: dict = field(default_factory=dict)
    seed: int = 0
    tolerance: float = 0.02
    output_dir: Optional[str] = None
    model: str = "linear"

    def __post_init__(self):
        self.deltas = tuple(float(d) for d in self.deltas)
        if not self.deltas:
            raise ConfigError("the delta grid is empty")
        if any(not 0 < d < 1 for d in self.deltas):
            raise ConfigError("every delta must lie in (0, 1)")
        if any(b >= a for a, b in zip(self.deltas, self.deltas[1:])):
            raise ConfigError("the delta grid must be strictly decreasing")
        if not self.tolerance > 0:
            raise ConfigError("tolerance must be positive")
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown family {self.family!r}")
        if not self.p >= 1:
            raise ConfigError("p must be >= 1")
        if self.model not in ("linear", "power"):
            raise ConfigError(f"unknown extrapolation model {self.model!r}")
        unknown = set(self.quadrature) - _QUAD_KEYS
        if unknown:
            raise ConfigError(f"unknown quadrature keys: {', '.join(sorted(unknown))}")
        if isinstance(self.space, str):
            self.space = {"name": self.space}
        if isinstance(self.map, str):
            self.map = {"kind": self.map}
        if isinstance(self.target, str):
            self.target = {"kind": self.target}

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        known = {"space", "map", "target", "p", "family", "deltas", "quadrature", "seed", "tolerance",
                 "output_dir", "model"}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(extra))}")
        if "space" not in data or "map" not in data:
            raise ConfigError("config needs [space] and [map]")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def canonical(self) -> dict:
        """Settings that determine results; output location and worker count excluded."""
        quad = {k: v for k, v in self.quadrature.items() if k != "workers"}
        return _normalize({
            "space": self.space, "map": self.map, "target": self.target, "p": self.p,
            "family": self.family, "deltas": list(self.deltas), "quadrature": quad, "seed": self.seed,
            "tolerance": self.tolerance, "model": self.model,
        })

    def fingerprint(self) -> str:
        text = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()

    def build(self):
        sp = build_space(self.space)
        return sp, build_map(self.map, sp.dim), build_target(self.target)

    def quadrature_config(self) -> QuadratureConfig:
        return QuadratureConfig(**self.quadrature)


def _normalize(obj):
    if isinstance(obj, dict):
        return {str(k): _normalize(v) for k, v in sorted(obj.items())}
    if isinstance(obj, (list, tuple)):
        return [_normalize(v) for v in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, float)):
        return repr(float(obj))
    return str(obj)


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return ScenarioConfig.from_dict(data)
