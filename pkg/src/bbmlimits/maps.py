"""Test maps, codomain metrics, metric differentials and reference energies."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from ._quadrature import composite_nodes, gauss_legendre
from .space import Space, domain_rule

__all__ = [
    "UnsupportedTargetError",
    "TargetSpace",
    "MapSpec",
    "Seminorm",
    "pair_distance",
    "metric_differential",
    "unit_ball_moment",
    "predicted_limit",
    "cheeger_energy_smooth",
]


class UnsupportedTargetError(ValueError):
    """The requested quantity has no smooth analogue for this target or map."""


@dataclass(frozen=True)
class TargetSpace:
    """Codomain metric.

    kinds: ``euclidean`` (dimension ``dim``), ``circle`` (angles modulo
    ``circumference``, shorter-arc metric), ``snowflake`` (Euclidean distance
    raised to ``alpha``), ``discrete`` (0/1 metric).
    """

    kind: str = "euclidean"
    dim: int = 1
    alpha: float = 1.0
    circumference: float = 2 * math.pi

    def __post_init__(self):
        if self.kind not in ("euclidean", "circle", "snowflake", "discrete"):
            raise ValueError(f"unknown target kind {self.kind!r}")
        if self.kind == "snowflake" and not 0.0 < self.alpha <= 1.0:
            raise ValueError("snowflake exponent must lie in (0, 1]")
        if self.kind == "circle" and self.dim != 1:
            raise ValueError("circle targets are one-dimensional")

    @classmethod
    def euclidean(cls, dim=1):
        return cls("euclidean", dim)

    @classmethod
    def circle(cls, circumference=2 * math.pi):
        return cls("circle", 1, circumference=circumference)

    @classmethod
    def snowflake(cls, alpha, dim=1):
        return cls("snowflake", dim, alpha=alpha)

    @classmethod
    def discrete(cls, dim=1):
        return cls("discrete", dim)

    def distance(self, y1, y2):
        y1 = np.asarray(y1, dtype=float)
        y2 = np.asarray(y2, dtype=float)
        diff = y1 - y2
        if self.kind == "circle":
            gap = np.mod(np.abs(diff[..., 0]), self.circumference)
            return np.minimum(gap, self.circumference - gap)
        if self.kind == "discrete":
            return np.any(diff != 0, axis=-1).astype(float)
        dist = np.linalg.norm(diff, axis=-1)
        return dist**self.alpha if self.kind == "snowflake" else dist


@dataclass(frozen=True)
class MapSpec:
    """A closed-form map ``rule: (..., d) -> (..., out_dim)`` with optional Jacobian.

    ``jacobian`` takes one point (d,) and returns an (out_dim, d) matrix.
    """

    rule: Callable
    jacobian: Optional[Callable] = None
    smooth: bool = True
    name: str = "map"
    out_dim: int = 1
    is_constant: bool = False

    def __call__(self, x):
        return np.asarray(self.rule(np.asarray(x, dtype=float)), dtype=float)

    def scaled(self, c: float) -> "MapSpec":
        """The map c * f (meaningful for Euclidean targets)."""
        rule, jac = self.rule, self.jacobian
        return replace(
            self,
            rule=lambda x: c * np.asarray(rule(x), dtype=float),
            jacobian=None if jac is None else (lambda x: c * np.asarray(jac(x), dtype=float)),
            name=f"{c:g}*{self.name}",
        )

    # builders ---------------------------------------------------------------

    @classmethod
    def identity(cls, d=1):
        return cls(lambda x: x[..., :d], lambda x: np.eye(d), name="identity", out_dim=d)

    @classmethod
    def linear(cls, matrix, offset=None):
        a = np.atleast_2d(np.asarray(matrix, dtype=float))
        b = np.zeros(a.shape[0]) if offset is None else np.asarray(offset, dtype=float)
        return cls(lambda x: x @ a.T + b, lambda x: a, name="linear", out_dim=a.shape[0])

    @classmethod
    def coordinate(cls, axis=0, d=None):
        def jac(x):
            row = np.zeros((1, len(x)))
            row[0, axis] = 1.0
            return row

        return cls(lambda x: x[..., axis : axis + 1], jac, name=f"x{axis + 1}")

    @classmethod
    def power(cls, exponent=2.0, axis=0):
        a = float(exponent)

        def jac(x):
            row = np.zeros((1, len(x)))
            row[0, axis] = a * x[axis] ** (a - 1)
            return row

        return cls(lambda x: x[..., axis : axis + 1] ** a, jac, name=f"power{a:g}")

    @classmethod
    def angle_wrap(cls, scale=2 * math.pi, axis=0):
        """x -> scale * x, read as an angle on a circle target."""

        def jac(x):
            row = np.zeros((1, len(x)))
            row[0, axis] = scale
            return row

        return cls(lambda x: scale * x[..., axis : axis + 1], jac, name="angle-wrap")

    @classmethod
    def constant(cls, value=0.0):
        v = np.atleast_1d(np.asarray(value, dtype=float))

        def rule(x):
            return np.broadcast_to(v, x.shape[:-1] + v.shape).copy()

        return cls(rule, lambda x: np.zeros((len(v), len(x))), name="constant", out_dim=len(v),
                   is_constant=True)


@dataclass(frozen=True)
class Seminorm:
    """v -> ||J v|| for a linear map J, or an arbitrary rule ``func``."""

    matrix: Optional[np.ndarray] = None
    func: Optional[Callable] = None

    def __call__(self, v):
        v = np.asarray(v, dtype=float)
        if self.func is not None:
            return np.asarray(self.func(v), dtype=float)
        j = np.atleast_2d(self.matrix)
        if j.shape[1] == 1 and (v.ndim == 0 or v.shape[-1] != 1):
            v = v[..., None]
        out = np.linalg.norm(v @ j.T, axis=-1)
        return float(out) if out.ndim == 0 else out


def pair_distance(map: MapSpec, target: TargetSpace, x, x_prime):
    """d_Y(f(x), f(x')), vectorized over leading axes."""
    return target.distance(map(x), map(x_prime))


def _finite_difference(map: MapSpec, target: TargetSpace, x, step):
    x = np.asarray(x, dtype=float)
    cols = []
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = step
        diff = map(x + e) - map(x - e)
        if target.kind == "circle":
            L = target.circumference
            diff = np.mod(diff + L / 2, L) - L / 2
        cols.append(diff / (2 * step))
    return np.stack(cols, axis=-1)


def metric_differential(map: MapSpec, target: TargetSpace, x, diameter: float = 1.0) -> Seminorm:
    """Seminorm v -> ||J_f(x) v|| measured in the target's infinitesimal metric.

    Falls back to central differences with step 1e-5 * ``diameter`` when the
    map has no Jacobian.
    """
    if target.kind in ("snowflake", "discrete"):
        raise UnsupportedTargetError(f"no metric differential into a {target.kind} target")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if map.jacobian is not None:
        j = np.atleast_2d(np.asarray(map.jacobian(x), dtype=float))
    else:
        warnings.warn("map has no Jacobian; using central finite differences", RuntimeWarning,
                      stacklevel=2)
        j = np.atleast_2d(_finite_difference(map, target, x, 1e-5 * diameter))
    return Seminorm(matrix=j)


def _angular_moments(jacs, p, order=64):
    """Mean over the unit circle of ||J w||^p for a batch of (m, 2) matrices."""
    gram = np.einsum("nij,nik->njk", jacs, jacs)
    vals, vecs = np.linalg.eigh(gram)
    null = vecs[:, :, 0]
    start = np.arctan2(null[:, 1], null[:, 0])
    # panels begin at a kernel direction so |<a, w>|^p kinks fall on panel ends
    t, w = gauss_legendre(order)
    offsets = np.concatenate([t * math.pi, math.pi + t * math.pi])
    wts = np.concatenate([w, w]) * math.pi
    theta = start[:, None] + offsets[None, :]
    omega = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    img = np.einsum("nij,nkj->nki", jacs, omega)
    speed = np.linalg.norm(img, axis=-1)
    return np.sum(wts * speed**p, axis=1) / (2 * math.pi)


def _spherical_moments(jacs, p, order=48):
    """Mean over the unit sphere in R^3 of ||J w||^p."""
    t, w = gauss_legendre(order)
    z = 2 * t - 1
    zw = 2 * w
    phi_n = 2 * order
    phi = 2 * math.pi * np.arange(phi_n) / phi_n
    zz, pp = np.meshgrid(z, phi, indexing="ij")
    s = np.sqrt(1 - zz**2)
    omega = np.stack([s * np.cos(pp), s * np.sin(pp), zz], axis=-1).reshape(-1, 3)
    ww = (zw[:, None] * np.full(phi_n, 2 * math.pi / phi_n)[None, :]).ravel()
    img = np.einsum("nij,kj->nki", jacs, omega)
    speed = np.linalg.norm(img, axis=-1)
    return np.sum(ww * speed**p, axis=1) / (4 * math.pi)


def jacobian_moments(jacs, p, d):
    """Average of ||J v||^p over the Euclidean unit ball B^d for a batch of Jacobians."""
    jacs = np.asarray(jacs, dtype=float)
    if d == 1:
        return np.linalg.norm(jacs[:, :, 0], axis=1) ** p / (p + 1)
    radial = d / (p + d)
    if d == 2:
        return radial * _angular_moments(jacs, p)
    if d == 3:
        return radial * _spherical_moments(jacs, p)
    raise ValueError("dimension must be 1, 2 or 3")


def unit_ball_moment(seminorm: Seminorm, p: float, d: int) -> float:
    """Average of md(v)^p over the Euclidean unit ball in R^d."""
    if d not in (1, 2, 3):
        raise ValueError("dimension must be 1, 2 or 3")
    if p < 1:
        raise ValueError("exponent must be >= 1")
    if seminorm.func is None:
        j = np.atleast_2d(np.asarray(seminorm.matrix, dtype=float))
        if j.shape[1] != d:
            raise ValueError("seminorm acts on a space of a different dimension")
        return float(jacobian_moments(j[None], p, d)[0])
    # generic seminorm: 1-homogeneous, so only the sphere average is needed
    radial = d / (p + d)
    if d == 1:
        vals = seminorm(np.array([[1.0], [-1.0]]))
        return float(radial * np.mean(np.asarray(vals) ** p))
    if d == 2:
        theta, w = composite_nodes(np.linspace(0, 2 * math.pi, 65), 16)
        theta, w = theta.ravel(), w.ravel()
        vals = seminorm(np.stack([np.cos(theta), np.sin(theta)], axis=-1))
        return float(radial * np.sum(w * np.asarray(vals) ** p) / (2 * math.pi))
    rng = np.random.default_rng(20240601)
    g = rng.standard_normal((1_000_000, 3))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return float(radial * np.mean(np.asarray(seminorm(g)) ** p))


def _jacobian_batch(map: MapSpec, target: TargetSpace, pts, diameter):
    if map.jacobian is not None:
        return np.stack([np.atleast_2d(np.asarray(map.jacobian(x), dtype=float)) for x in pts])
    warnings.warn("map has no Jacobian; using central finite differences", RuntimeWarning,
                  stacklevel=3)
    return np.stack([np.atleast_2d(_finite_difference(map, target, x, 1e-5 * diameter)) for x in pts])


def _theta_of(family, dim, p):
    if hasattr(family, "theta"):
        return family.theta(dim)
    from .mollifiers import theta_formula

    return theta_formula(family, p, dim)


def predicted_limit(space: Space, map: MapSpec, target: TargetSpace, p: float, family,
                    order: int = 32, panels: int = 8) -> float:
    """Integral over the domain of Theta(Dim(x), p) times the unit-ball moment of md_x[f]."""
    if target.kind in ("snowflake", "discrete"):
        raise UnsupportedTargetError(f"no energy density for a {target.kind} target")
    if map.is_constant:
        return 0.0
    pts, w = domain_rule(space, order, panels)
    jacs = _jacobian_batch(map, target, pts, space.diameter)
    dims = np.array([space.Dim(x) for x in pts])
    total = 0.0
    for dim in np.unique(dims):
        sel = dims == dim
        mom = jacobian_moments(jacs[sel][:, :, : int(dim)], p, int(dim))
        total += _theta_of(family, int(dim), p) * float(np.sum(w[sel] * mom))
    return total


def cheeger_energy_smooth(space: Space, map: MapSpec, p: float, target: Optional[TargetSpace] = None,
                          order: int = 32, panels: int = 8) -> float:
    """Integral of ||grad u||^p for a smooth real-valued map u."""
    if map.out_dim != 1 or (target is not None and target.kind != "euclidean"):
        raise UnsupportedTargetError("the smooth energy needs a real-valued map")
    if map.is_constant:
        return 0.0
    pts, w = domain_rule(space, order, panels)
    jacs = _jacobian_batch(map, target or TargetSpace(), pts, space.diameter)
    grad = np.linalg.norm(jacs[:, 0, :], axis=1)
    return float(np.sum(w * grad**p))
