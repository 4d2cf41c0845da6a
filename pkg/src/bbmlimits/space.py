"""Metric measure spaces with closed balls intrinsic to the declared domain.

Four kinds are built in:

* ``euclidean-box``: a box in R^d (d <= 3) with Lebesgue measure,
* ``weighted-interval``: an interval with a positive density,
* ``product``: a box whose measure is a product of per-axis densities,
* ``circle``: arc-length metric and arc-length measure on R / L Z.

Balls are closed, ``B(x, r) = {x' : d(x, x') <= r}``, and are always taken
inside the domain, so a ball near an edge is clipped.  Their boundaries have
zero measure in every built-in space, so open and closed balls give the same
numbers.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np

from ._quadrature import composite_nodes, disc_box_area

__all__ = [
    "DomainError",
    "DegenerateSpaceError",
    "Weight",
    "Space",
    "BallMeasureOracle",
    "SamplePoint",
    "SampleSet",
    "DoublingReport",
    "DimensionEstimate",
    "ball_measure",
    "sample_points",
    "estimate_doubling",
    "dimension_at",
    "domain_rule",
]

SPACE_KINDS = ("euclidean-box", "weighted-interval", "circle", "product")

# below this radius log-measures are extrapolated with the local dimension
_LOG_SCALE_FLOOR = 1e-100


class DomainError(ValueError):
    """A point, region or radius lies outside what the space supports."""


class DegenerateSpaceError(ArithmeticError):
    """A ball that should carry positive finite mass does not."""


@dataclass(frozen=True)
class Weight:
    """A positive density on one axis.

    ``kind`` is one of ``one``, ``inverse`` (1/x), ``power`` (x**param),
    ``exp`` (exp(param * x)) or ``custom`` (``func``, integrated numerically).
    """

    kind: str = "one"
    param: float = 0.0
    func: Optional[Callable] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in ("one", "inverse", "power", "exp", "custom"):
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if self.kind == "custom" and self.func is None:
            raise ValueError("custom weight needs func")
        if self.kind == "power" and self.param == -1.0:
            raise ValueError("use kind='inverse' for x**-1")

    @property
    def is_unit(self) -> bool:
        return self.kind == "one" or (self.kind in ("power", "exp") and self.param == 0.0)

    @property
    def closed_form(self) -> bool:
        return self.kind != "custom"

    def density(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "one":
            return np.ones_like(x)
        if self.kind == "inverse":
            return 1.0 / x
        if self.kind == "power":
            return x**self.param
        if self.kind == "exp":
            return np.exp(self.param * x)
        return np.asarray(self.func(x), dtype=float) * np.ones_like(x)

    def mass(self, lo, length):
        """Mass of [lo, lo + length], written to avoid cancellation."""
        lo = np.asarray(lo, dtype=float)
        length = np.asarray(length, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if self.kind == "one" or self.is_unit:
                out = length * 1.0
            elif self.kind == "inverse":
                out = np.log1p(length / lo)
            elif self.kind == "power":
                a1 = self.param + 1.0
                out = lo**a1 * np.expm1(a1 * np.log1p(length / lo)) / a1
            elif self.kind == "exp":
                c = self.param
                out = np.exp(c * lo) * np.expm1(c * length) / c
            else:
                nodes, wts = composite_nodes(np.linspace(0.0, 1.0, 9), 16)
                t = nodes.ravel()
                w = wts.ravel()
                pts = lo[..., None] + length[..., None] * t
                out = length * np.sum(w * self.density(pts), axis=-1)
        return np.where(length > 0, out, 0.0)

    def inverse_cdf(self, lo, hi, u):
        """Quantile of the normalized density on [lo, hi] (closed forms only)."""
        u = np.asarray(u, dtype=float)
        if self.is_unit:
            return lo + (hi - lo) * u
        if self.kind == "inverse":
            return lo * np.exp(u * math.log(hi / lo))
        if self.kind == "power":
            a1 = self.param + 1.0
            return ((1.0 - u) * lo**a1 + u * hi**a1) ** (1.0 / a1)
        if self.kind == "exp":
            c = self.param
            return lo + np.log1p(u * math.expm1(c * (hi - lo))) / c
        raise NotImplementedError("custom weights are sampled by importance weighting")


@dataclass(frozen=True)
class SamplePoint:
    coordinates: np.ndarray
    weight: float


@dataclass(frozen=True)
class SampleSet:
    """Sampled points with importance weights; iterating yields SamplePoint."""

    points: np.ndarray
    weights: np.ndarray

    def __len__(self):
        return len(self.weights)

    def __iter__(self):
        for p, w in zip(self.points, self.weights):
            yield SamplePoint(p.copy(), float(w))


@dataclass(frozen=True)
class DoublingReport:
    constant: float
    radii: tuple
    worst_center: tuple
    worst_radius: float


@dataclass(frozen=True)
class DimensionEstimate:
    value: float
    radii: tuple
    per_radius: tuple
    converged: bool

    def __float__(self):
        return self.value


class BallMeasureOracle:
    """Ball-measure evaluator with a memo keyed by quantized (center, radius)."""

    def __init__(self, space: "Space", method: str, mc_samples: int = 100_000):
        if method not in ("analytic", "quadrature", "monte-carlo"):
            raise ValueError(f"unknown ball-measure method {method!r}")
        self.space = space
        self.method = method
        self.mc_samples = mc_samples
        self._cache: dict = {}
        self.last_error = 0.0

    @staticmethod
    def _key(x, r):
        q = tuple(float(f"{v:.12g}") for v in np.atleast_1d(x))
        return q, float(f"{r:.12g}")

    def __call__(self, x, r) -> float:
        key = self._key(x, r)
        hit = self._cache.get(key)
        if hit is not None:
            self.last_error = hit[1]
            return hit[0]
        xq = np.array(key[0])
        if self.method == "monte-carlo":
            value, err = self._monte_carlo(xq, key[1], key)
        else:
            value = float(self.space.measure_balls(xq[None, :], np.array([key[1]]))[0])
            err = 0.0
        # setdefault keeps the first writer's value if two threads race
        value, err = self._cache.setdefault(key, (value, err))
        self.last_error = err
        return value

    def batch(self, x, r):
        """Vectorized evaluation without the memo."""
        if self.method == "monte-carlo":
            x = np.atleast_2d(np.asarray(x, dtype=float))
            r = np.broadcast_to(np.asarray(r, dtype=float), (x.shape[0],))
            return np.array([self(xi, ri) for xi, ri in zip(x, r)])
        return self.space.measure_balls(x, r)

    def _monte_carlo(self, x, r, key):
        sp = self.space
        lo = np.maximum(x - r, sp.lower)
        hi = np.minimum(x + r, sp.upper)
        if sp.kind == "circle":
            return float(min(2 * r, sp.circumference)), 0.0
        digest = hashlib.sha256(repr(key).encode()).digest()
        rng = np.random.default_rng(int.from_bytes(digest[:8], "little"))
        n = self.mc_samples
        d = sp.dim
        u = (np.argsort(rng.random((d, n)), axis=1).T + rng.random((n, d))) / n
        pts = lo + (hi - lo) * u
        inside = np.linalg.norm(pts - x, axis=1) <= r
        dens = np.ones(n)
        for axis, w in enumerate(sp.weights):
            dens = dens * w.density(pts[:, axis])
        vals = np.where(inside, dens, 0.0) * float(np.prod(hi - lo))
        return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(n))


@dataclass(frozen=True)
class Space:
    """Metric measure space (X, d, m) on a box or a circle.

    ``bounds`` holds one (lo, hi) pair per axis; for a circle it is
    ``((0, L),)`` and coordinates are angles read modulo L.  ``weights`` holds
    one axis density per axis.  ``dim_map`` returns the declared Dim(x); it
    defaults to the ambient dimension.
    """

    kind: str
    bounds: tuple
    weights: tuple = ()
    interior_margin: float = 0.0
    dim_map: Optional[Callable] = field(default=None, compare=False, repr=False)
    name: str = ""
    ball_method: Optional[str] = None
    mc_samples: int = 100_000

    def __post_init__(self):
        if self.kind not in SPACE_KINDS:
            raise ValueError(f"unknown space kind {self.kind!r}")
        bounds = tuple((float(a), float(b)) for a, b in self.bounds)
        object.__setattr__(self, "bounds", bounds)
        if not bounds or any(not a < b for a, b in bounds):
            raise DomainError("each axis needs lo < hi")
        if self.kind == "circle" and len(bounds) != 1:
            raise DomainError("a circle has one coordinate")
        if len(bounds) > 3:
            raise DomainError("ambient dimension is limited to 3")
        weights = tuple(self.weights) or tuple(Weight() for _ in bounds)
        if len(weights) != len(bounds):
            raise DomainError("one weight per axis")
        object.__setattr__(self, "weights", weights)
        if self.kind == "circle" and not weights[0].is_unit:
            raise DomainError("weighted circles are not supported")
        sides = [b - a for a, b in bounds]
        if not 0.0 <= self.interior_margin < 0.5 * min(sides):
            raise DomainError("interior margin must lie in [0, smallest side / 2)")
        for (a, b), w in zip(bounds, weights):
            probe = a + (b - a) * np.linspace(0.001, 0.999, 101)
            dens = w.density(probe)
            if not np.all(dens > 0):
                raise DomainError("weight must be strictly positive on the domain")

    # construction helpers -------------------------------------------------

    @classmethod
    def box(cls, bounds, *, interior_margin=0.0, name="", **kw):
        return cls("euclidean-box", tuple(bounds), interior_margin=interior_margin, name=name, **kw)

    @classmethod
    def interval(cls, lo=0.0, hi=1.0, weight=None, *, interior_margin=0.0, name="", **kw):
        kind = "euclidean-box" if weight is None or weight.is_unit else "weighted-interval"
        return cls(kind, ((lo, hi),), (weight or Weight(),), interior_margin=interior_margin,
                   name=name, **kw)

    @classmethod
    def circle(cls, circumference=2 * math.pi, *, name="", **kw):
        return cls("circle", ((0.0, circumference),), name=name, **kw)

    @classmethod
    def product(cls, bounds, weights, *, interior_margin=0.0, name="", **kw):
        return cls("product", tuple(bounds), tuple(weights), interior_margin=interior_margin,
                   name=name, **kw)

    # geometry ---------------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.bounds)

    @property
    def lower(self) -> np.ndarray:
        return np.array([a for a, _ in self.bounds])

    @property
    def upper(self) -> np.ndarray:
        return np.array([b for _, b in self.bounds])

    @property
    def circumference(self) -> float:
        return self.bounds[0][1] - self.bounds[0][0]

    @property
    def unweighted(self) -> bool:
        return all(w.is_unit for w in self.weights)

    @property
    def diameter(self) -> float:
        if self.kind == "circle":
            return self.circumference / 2
        return float(np.linalg.norm(self.upper - self.lower))

    @property
    def total_measure(self) -> float:
        if self.kind == "circle":
            return self.circumference
        out = 1.0
        for (a, b), w in zip(self.bounds, self.weights):
            out *= float(w.mass(a, b - a))
        return out

    def Dim(self, x) -> int:
        if self.dim_map is not None:
            return int(self.dim_map(x))
        return 1 if self.kind == "circle" else self.dim

    def as_points(self, x) -> np.ndarray:
        """Coerce to shape (n, d)."""
        x = np.asarray(x, dtype=float)
        if x.ndim == 0:
            x = x[None, None]
        elif x.ndim == 1:
            x = x[:, None] if self.dim == 1 else x[None, :]
        if x.shape[-1] != self.dim:
            raise DomainError(f"expected points of dimension {self.dim}")
        return x

    def as_point(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if x.shape != (self.dim,):
            raise DomainError(f"expected a point of dimension {self.dim}")
        return x

    def contains(self, x, tol=1e-12) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "circle":
            return np.isfinite(x[..., 0])
        return np.all((x >= self.lower - tol) & (x <= self.upper + tol), axis=-1)

    def check_point(self, x) -> np.ndarray:
        x = self.as_point(x)
        if not self.contains(x):
            raise DomainError(f"point {x.tolist()} lies outside the domain")
        return x

    def distance(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.kind == "circle":
            L = self.circumference
            gap = np.mod(np.abs(x[..., 0] - y[..., 0]), L)
            return np.minimum(gap, L - gap)
        return np.linalg.norm(x - y, axis=-1)

    def wrap(self, x):
        if self.kind == "circle":
            return np.mod(x - self.lower, self.circumference) + self.lower
        return x

    def farthest(self, x) -> float:
        """Largest distance from ``x`` to a point of the domain."""
        x = self.as_point(x)
        if self.kind == "circle":
            return self.circumference / 2
        far = np.maximum(np.abs(x - self.lower), np.abs(self.upper - x))
        return float(np.linalg.norm(far))

    def boundary_distance(self, x) -> float:
        x = self.as_point(x)
        if self.kind == "circle":
            return math.inf
        return float(np.min(np.minimum(x - self.lower, self.upper - x)))

    def edge_radii(self, x, box=None) -> np.ndarray:
        """Radii at which spheres around ``x`` start or stop touching faces and corners."""
        if self.kind == "circle":
            return np.array([self.circumference / 2])
        x = self.as_point(x)
        lo, hi = (self.lower, self.upper) if box is None else box
        per_axis = [sorted({abs(x[i] - lo[i]), abs(hi[i] - x[i])}) for i in range(self.dim)]
        out = set()
        for e in per_axis:
            out.update(e)
        if self.dim >= 2:
            for i in range(self.dim):
                for j in range(i + 1, self.dim):
                    for a in per_axis[i]:
                        for b in per_axis[j]:
                            out.add(math.hypot(a, b))
        if self.dim == 3:
            for a in per_axis[0]:
                for b in per_axis[1]:
                    for c in per_axis[2]:
                        out.add(math.sqrt(a * a + b * b + c * c))
        return np.array(sorted(v for v in out if v > 0))

    # measures -----------------------------------------------------------------

    @property
    def method(self) -> str:
        if self.ball_method is not None:
            return self.ball_method
        if self.kind == "circle":
            return "analytic"
        if self.dim == 1 and self.weights[0].closed_form:
            return "analytic"
        if self.dim == 2 and self.unweighted:
            return "analytic"
        return "quadrature"

    @cached_property
    def oracle(self) -> BallMeasureOracle:
        return BallMeasureOracle(self, self.method, self.mc_samples)

    def measure_balls(self, x, r) -> np.ndarray:
        """m(B(x, r)) for arrays of centers (n, d) and radii (n,), no memo."""
        x = self.as_points(x)
        r = np.broadcast_to(np.asarray(r, dtype=float), (x.shape[0],))
        if self.kind == "circle":
            return np.minimum(2.0 * r, self.circumference)
        return _box_measure(x, r, self.lower, self.upper, self.weights)

    def log_measure_balls(self, x, r) -> np.ndarray:
        """log m(B(x, r)), extrapolated with Dim(x) below 1e-100 to avoid underflow."""
        x = self.as_points(x)
        r = np.broadcast_to(np.asarray(r, dtype=float), (x.shape[0],)).copy()
        small = r < _LOG_SCALE_FLOOR
        r_eval = np.where(small, _LOG_SCALE_FLOOR, r)
        with np.errstate(divide="ignore"):
            out = np.log(self.measure_balls(x, r_eval))
        if np.any(small):
            dims = np.array([self.Dim(p) for p in x[small]], dtype=float)
            out[small] += dims * (np.log(r[small]) - math.log(_LOG_SCALE_FLOOR))
        return out

    def region_measure(self, region) -> float:
        lo, hi = region
        if self.kind == "circle":
            return float(hi[0] - lo[0])
        out = 1.0
        for i, w in enumerate(self.weights):
            out *= float(w.mass(lo[i], hi[i] - lo[i]))
        return out

    def normalize_region(self, region=None):
        """Return (lo, hi) arrays for a sub-box, defaulting to the whole domain."""
        if region is None:
            return self.lower.copy(), self.upper.copy()
        pairs = np.asarray(region, dtype=float).reshape(self.dim, 2)
        lo, hi = pairs[:, 0], pairs[:, 1]
        if np.any(hi <= lo):
            raise DomainError("region is empty")
        if np.any(lo < self.lower - 1e-12) or np.any(hi > self.upper + 1e-12):
            raise DomainError("region leaves the domain")
        return np.maximum(lo, self.lower), np.minimum(hi, self.upper)


def _interval_mass(x, r, a, b, weight):
    # lengths are formed from one-sided reaches so tiny radii keep full precision
    left = np.clip(np.minimum(r, x - a), 0.0, None)
    right = np.clip(np.minimum(r, b - x), 0.0, None)
    return weight.mass(x - left, left + right)


def _box_measure(x, r, lower, upper, weights):
    d = x.shape[1]
    if d == 1:
        return _interval_mass(x[:, 0], r, lower[0], upper[0], weights[0])
    if d == 2 and all(w.is_unit for w in weights):
        return disc_box_area(x, r, lower, upper)
    return _sliced_measure(x, r, lower, upper, weights)


def _sliced_measure(x, r, lower, upper, weights, order=20):
    """Integrate lower-dimensional ball slices along the first axis.

    The slice at offset t = r sin(phi) is a ball of radius r cos(phi) in the
    remaining axes; panels break where that radius meets a face or corner.
    """
    n = x.shape[0]
    safe_r = np.where(r > 0, r, 1.0)
    s_lo = np.clip((lower[0] - x[:, 0]) / safe_r, -1.0, 1.0)
    s_hi = np.clip((upper[0] - x[:, 0]) / safe_r, -1.0, 1.0)
    phi_lo, phi_hi = np.arcsin(s_lo), np.arcsin(s_hi)
    rest = x[:, 1:]
    gaps = np.concatenate([rest - lower[1:], upper[1:] - rest], axis=1)
    if rest.shape[1] == 2:
        a = gaps[:, [0, 2]]
        b = gaps[:, [1, 3]]
        corners = np.sqrt(a[:, :, None] ** 2 + b[:, None, :] ** 2).reshape(n, 4)
        gaps = np.concatenate([gaps, corners], axis=1)
    kink = np.arccos(np.clip(gaps / safe_r[:, None], 0.0, 1.0))
    breaks = np.concatenate([phi_lo[:, None], phi_hi[:, None], kink, -kink], axis=1)
    breaks = np.clip(breaks, phi_lo[:, None], phi_hi[:, None])
    breaks.sort(axis=1)
    nodes, wts = composite_nodes(breaks, order)
    k = nodes.shape[1] * nodes.shape[2]
    phi = nodes.reshape(n, k)
    w = wts.reshape(n, k)
    rr = r[:, None] * np.cos(phi)
    t = x[:, :1] + r[:, None] * np.sin(phi)
    sub_centers = np.repeat(rest, k, axis=0)
    sub = _box_measure(sub_centers, rr.ravel(), lower[1:], upper[1:], weights[1:]).reshape(n, k)
    dens = weights[0].density(t)
    total = np.sum(w * dens * sub * rr, axis=1)
    return np.where(r > 0, total, 0.0)


# public operations -----------------------------------------------------------


def ball_measure(space: Space, x, r) -> float:
    """m(B(x, r)) for one closed ball, memoized on quantized (x, r)."""
    x = space.check_point(x)
    if not r > 0:
        raise DomainError("radius must be positive")
    return space.oracle(x, r)


def _stratified_unit(rng, n, d):
    # one point per 1/n slab on every axis (Latin hypercube)
    perms = np.argsort(rng.random((d, n)), axis=1).T
    return (perms + rng.random((n, d))) / n


def sample_points(space: Space, region=None, n: int = 1000, seed: int = 0) -> SampleSet:
    """Stratified sample of the measure restricted to ``region``.

    Closed-form densities are sampled exactly through their quantile function,
    so every point carries mass m(region)/n.  Custom densities are sampled
    uniformly and importance weighted; weights are then rescaled to sum to
    m(region).
    """
    if n < 1:
        raise DomainError("need at least one sample")
    lo, hi = space.normalize_region(region)
    rng = np.random.default_rng(seed)
    u = _stratified_unit(rng, n, space.dim)
    pts = np.empty_like(u)
    factor = np.ones(n)
    for axis, w in enumerate(space.weights):
        if w.closed_form:
            pts[:, axis] = w.inverse_cdf(lo[axis], hi[axis], u[:, axis])
        else:
            pts[:, axis] = lo[axis] + (hi[axis] - lo[axis]) * u[:, axis]
            factor *= w.density(pts[:, axis])
    total = space.region_measure((lo, hi))
    weights = factor * (total / factor.sum())
    return SampleSet(pts, weights)


def _center_grid(space, lo, hi, n_per_axis):
    axes = [np.linspace(lo[i], hi[i], n_per_axis) for i in range(space.dim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def estimate_doubling(space: Space, region=None, radii: Sequence[float] = (0.1, 0.05, 0.02, 0.01),
                      n_per_axis: Optional[int] = None) -> DoublingReport:
    """Largest sampled ratio m(B(x, 2r)) / m(B(x, r)) over centers and radii."""
    lo, hi = space.normalize_region(region)
    radii = np.asarray(radii, dtype=float)
    if np.any(radii <= 0):
        raise DomainError("radii must be positive")
    if n_per_axis is None:
        n_per_axis = {1: 201, 2: 41, 3: 13}[space.dim]
    centers = _center_grid(space, lo, hi, n_per_axis)
    worst = (1.0, centers[0], float(radii[0]))
    for r in radii:
        small = space.measure_balls(centers, np.full(len(centers), r))
        big = space.measure_balls(centers, np.full(len(centers), 2 * r))
        if np.any(~(small > 0)) or np.any(~np.isfinite(big)):
            raise DegenerateSpaceError(f"a ball of radius {r} has zero or infinite measure")
        ratio = big / small
        i = int(np.argmax(ratio))
        if ratio[i] > worst[0]:
            worst = (float(ratio[i]), centers[i], float(r))
    return DoublingReport(max(worst[0], 1.0), tuple(radii.tolist()),
                          tuple(np.asarray(worst[1]).tolist()), worst[2])


def dimension_at(space: Space, x, radii: Sequence[float] = (1e-2, 5e-3, 2.5e-3, 1.25e-3, 6.25e-4),
                 h: float = 2.0) -> DimensionEstimate:
    """log(m(B(x, h r)) / m(B(x, r))) / log h, extrapolated linearly to r = 0."""
    if not h > 1:
        raise DomainError("ratio h must exceed 1")
    x = space.check_point(x)
    radii = np.asarray(radii, dtype=float)
    pts = np.repeat(x[None, :], len(radii), axis=0)
    small = space.measure_balls(pts, radii)
    big = space.measure_balls(pts, h * radii)
    if np.any(~(small > 0)):
        raise DegenerateSpaceError("zero-measure ball in dimension estimate")
    local = np.log(big / small) / math.log(h)
    if len(radii) >= 3:
        design = np.vstack([np.ones_like(radii), radii]).T
        coef, *_ = np.linalg.lstsq(design, local, rcond=None)
        value = float(coef[0])
        resid = local - design @ coef
        converged = bool(np.max(np.abs(resid)) <= 1e-2 * max(abs(value), 1.0))
    else:
        value = float(local[-1])
        converged = bool(np.ptp(local) <= 1e-2 * max(abs(value), 1.0))
    return DimensionEstimate(value, tuple(radii.tolist()), tuple(local.tolist()), converged)


def domain_rule(space: Space, order: int = 32, panels: int = 8, splits=None, box=None):
    """Tensor Gauss-Legendre nodes and weights for integrals against m.

    ``splits`` optionally lists extra breakpoints per axis so that panels
    line up with known kinks of the integrand.
    """
    lo, hi = (space.lower, space.upper) if box is None else space.normalize_region(box)
    axes_nodes, axes_weights = [], []
    for i in range(space.dim):
        br = set(np.linspace(lo[i], hi[i], panels + 1).tolist())
        if splits is not None:
            br.update(float(s) for s in splits[i] if lo[i] < s < hi[i])
        nodes, wts = composite_nodes(np.array(sorted(br)), order)
        nodes, wts = nodes.ravel(), wts.ravel()
        axes_nodes.append(nodes)
        axes_weights.append(wts * space.weights[i].density(nodes))
    mesh = np.meshgrid(*axes_nodes, indexing="ij")
    wmesh = np.meshgrid(*axes_weights, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    w = np.prod(np.stack([m.ravel() for m in wmesh], axis=1), axis=1)
    return pts, w
