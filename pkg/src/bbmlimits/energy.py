"""Nonlocal energies, Korevaar-Schoen densities, regularizers and smoothing."""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .maps import MapSpec, TargetSpace
from .mollifiers import MollifierFamily, pi_terms
from .shells import U_FLOOR, U_LINEAR, radial_integrate
from .space import DomainError, Space, domain_rule, sample_points

__all__ = [
    "QuadratureConfig",
    "EnergyEstimate",
    "DensityProfile",
    "MeasureWithDensity",
    "SmoothedFunction",
    "inner_integral",
    "nonlocal_energy",
    "tail_energy",
    "ks",
    "density_estimate",
    "regularize",
    "pou_smooth",
    "Sandwich",
    "sandwich",
]


@dataclass(frozen=True)
class QuadratureConfig:
    """Resolution settings.

    ``method`` is ``auto`` (deterministic for d <= 2 and closed-form ball
    measures, else Monte Carlo), ``quadrature`` or ``monte-carlo``.
    """

    method: str = "auto"
    radial_order: Optional[int] = None
    shell_order: int = 12
    outer_order: Optional[int] = None
    outer_panels: Optional[int] = None
    n_outer: int = 100_000
    n_shells: int = 16
    per_shell: int = 8
    chunk: int = 4096
    workers: int = 1

    def resolve(self, space: Space) -> str:
        if self.method != "auto":
            return self.method
        if space.dim <= 2 and space.method == "analytic":
            return "quadrature"
        if space.dim == 1:
            return "quadrature"
        return "monte-carlo"


@dataclass(frozen=True)
class EnergyEstimate:
    value: float
    stderr: float
    n_samples: int
    seed: Optional[int]
    method: str


@dataclass(frozen=True)
class DensityProfile:
    center: tuple
    samples: tuple
    density: float
    residual: float
    converged: bool = True
    note: str = ""


@dataclass(frozen=True)
class MeasureWithDensity:
    """G dm with G >= 0; ``support`` is an optional sub-box outside which G vanishes."""

    space: Space
    density: Callable
    support: Optional[tuple] = None

    def box(self):
        if self.support is None:
            return None
        lo, hi = self.space.normalize_region(self.support)
        return lo, hi


def _mask_box(space, mask):
    if mask is None:
        return None
    return space.normalize_region(mask)


def _beta(family, delta):
    # rho0 inner integrands behave like u**(p delta - 1) near the center
    return family.p * delta if family.kind == "rho0" else 1.0


def _integrand(map, target, p, x):
    fx = map(x[None, :])[0]

    def fn(pts):
        return target.distance(map(pts), fx) ** p

    return fn


def inner_integral(space: Space, map: MapSpec, target: TargetSpace, p: float, family: MollifierFamily,
                   delta: float, x, config: Optional[QuadratureConfig] = None, *,
                   within: Optional[float] = None, outside: Optional[float] = None, mask=None) -> float:
    """Deterministic  int d_f(x, x')^p rho_delta(x, x') dm(x').

    ``within`` restricts x' to B(x, within); ``outside`` to the complement of
    B(x, outside); ``mask`` to a sub-box.
    """
    config = config or QuadratureConfig()
    x = space.check_point(x)
    if map.is_constant:
        return 0.0
    if family.kind != "rho0" and outside is not None and outside >= delta:
        return 0.0
    u_max = within
    if family.kind != "rho0":
        reach = delta if u_max is None else min(u_max, delta)
        u_max = min(reach, space.farthest(x))
    return radial_integrate(
        space, x, lambda u: family.radial_value(delta, x, u), _integrand(map, target, p, x),
        box=_mask_box(space, mask), u_min=0.0 if outside is None else outside, u_max=u_max,
        extra_breaks=family.radial_breaks(delta, x), beta=_beta(family, delta) if outside is None else 1.0,
        order=config.radial_order, shell_order=config.shell_order, degree=p,
    )


def _outer_rule(space, family, delta, config):
    order = config.outer_order or (64 if space.dim == 1 else 12)
    panels = config.outer_panels or (4 if space.dim == 1 else 2)
    splits = [[a + delta, b - delta] for a, b in space.bounds]
    if family.kind == "rho0":
        splits = None
    return domain_rule(space, order, panels, splits)


def _run(workers, fn, items):
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(i) for i in items]


def _quadrature_energy(space, map, target, p, family, delta, config, outside):
    pts, w = _outer_rule(space, family, delta, config)
    vals = _run(config.workers,
                lambda x: inner_integral(space, map, target, p, family, delta, x, config, outside=outside),
                list(pts))
    return float(np.dot(w, vals)), len(w)


def _far(space, X):
    if space.kind == "circle":
        return np.full(len(X), space.circumference / 2)
    return np.linalg.norm(np.maximum(np.abs(X - space.lower), np.abs(space.upper - X)), axis=1)


def _inner_mc_batch(space, map, target, p, family, delta, X, rng, config, outside):
    """Shell-stratified Monte Carlo inner integrals for a batch of centers."""
    n = len(X)
    S, per = config.n_shells, config.per_shell
    d = 1 if space.kind == "circle" else space.dim
    u_max = _far(space, X)
    if family.kind != "rho0":
        u_max = np.minimum(u_max, delta)
    u_min = 0.0 if outside is None else outside
    beta = _beta(family, delta) if outside is None else 1.0
    j = np.arange(S + 1)
    edges = u_max[:, None] * 2.0 ** (j - S)[None, :].astype(float)
    edges[:, 0] = 0.0
    edges = np.clip(edges, u_min, np.maximum(u_max, u_min)[:, None])
    ta, tb = edges[:, :-1] ** beta, edges[:, 1:] ** beta
    strata = (np.arange(per)[None, None, :] + rng.random((n, S, per))) / per
    t = ta[..., None] + (tb - ta)[..., None] * strata
    u = np.maximum(t ** (1.0 / beta), U_FLOOR)
    jac = u ** (1.0 - beta) / beta
    # offsets below the linear scale round away; evaluate there and rescale
    lin = U_LINEAR * (1.0 + np.max(np.abs(X), axis=1))[:, None, None]
    ue = np.maximum(u, lin)
    if space.kind == "circle":
        sign = np.where(rng.random((n, S, per)) < 0.5, 1.0, -1.0)
        pts = space.wrap(X[:, None, None, :] + (sign * ue)[..., None])
        inside = np.ones(u.shape, dtype=bool)
        area = 2.0
    else:
        g = rng.standard_normal((n, S, per, d))
        g /= np.linalg.norm(g, axis=-1, keepdims=True)
        pts = X[:, None, None, :] + ue[..., None] * g
        inside = np.all((pts >= space.lower) & (pts <= space.upper), axis=-1)
        area = 2.0 * math.pi ** (d / 2) / math.gamma(d / 2)
    flat = np.clip(pts, space.lower, space.upper).reshape(-1, space.dim)
    centers = np.repeat(X, S * per, axis=0)
    dens = np.ones(len(flat))
    if space.kind != "circle":
        for axis, wgt in enumerate(space.weights):
            dens = dens * wgt.density(flat[:, axis])
    kern = family.values(delta, centers, u.ravel())
    fx = map(X)
    dist = target.distance(map(flat), np.repeat(fx, S * per, axis=0)) ** p * (u / ue).ravel() ** p
    vals = (kern * dist * dens).reshape(n, S, per)
    vals = np.where(inside, vals, 0.0) * area * u ** (d - 1) * jac * (tb - ta)[..., None]
    est = vals.mean(axis=2).sum(axis=1)
    var = (vals.var(axis=2, ddof=1) / per).sum(axis=1)
    return est, var


def _mc_energy(space, map, target, p, family, delta, config, seed, outside):
    n = config.n_outer
    chunks = [(i, min(config.chunk, n - s)) for i, s in enumerate(range(0, n, config.chunk))]

    def task(item):
        index, size = item
        rng = np.random.default_rng(np.random.SeedSequence([seed, index]))
        sample = sample_points(space, None, size, int(rng.integers(2**63)))
        est, var = _inner_mc_batch(space, map, target, p, family, delta, sample.points, rng, config, outside)
        return sample.weights, est, var

    parts = _run(config.workers, task, chunks)
    w = np.concatenate([a for a, _, _ in parts])
    est = np.concatenate([b for _, b, _ in parts])
    var = np.concatenate([c for _, _, c in parts])
    # every chunk is an independent estimate of the same integral
    scale = len(chunks)
    value = float(np.dot(w, est)) / scale
    contrib = w * est * len(w) / scale
    outer_var = float(np.var(contrib, ddof=1)) / len(w) if len(w) > 1 else 0.0
    inner_var = float(np.dot((w / scale) ** 2, var))
    return value, math.sqrt(outer_var + inner_var), n


def nonlocal_energy(space: Space, map: MapSpec, target: TargetSpace, p: float, family: MollifierFamily,
                    delta: float, config: Optional[QuadratureConfig] = None, seed: int = 0,
                    outside: Optional[float] = None) -> EnergyEstimate:
    """Double integral of d_f^p rho_delta over Omega x Omega."""
    if not 0 < delta < 1:
        raise DomainError("delta must lie in (0, 1)")
    config = config or QuadratureConfig()
    method = config.resolve(space)
    if map.is_constant:
        return EnergyEstimate(0.0, 0.0, 0, seed if method == "monte-carlo" else None, method)
    if method == "monte-carlo":
        value, err, n = _mc_energy(space, map, target, p, family, delta, config, seed, outside)
        return EnergyEstimate(max(value, 0.0), err, n, seed, method)
    value, n = _quadrature_energy(space, map, target, p, family, delta, config, outside)
    return EnergyEstimate(max(value, 0.0), 0.0, n, None, "quadrature")


def tail_energy(space: Space, map: MapSpec, target: TargetSpace, p: float, family: MollifierFamily,
                delta: float, r: float, config: Optional[QuadratureConfig] = None, seed: int = 0) -> float:
    """Energy carried by pairs at distance greater than r."""
    if not r > 0:
        raise DomainError("cutoff radius must be positive")
    if family.kind in ("rho1", "rho2", "rho3") and delta <= r:
        return 0.0
    return nonlocal_energy(space, map, target, p, family, delta, config, seed, outside=r).value


@dataclass
class Sandwich:
    lower: float
    middle: float
    upper: float
    error: float

    def holds(self, n_sigma: float = 3.0) -> tuple:
        slack = n_sigma * self.error
        return self.lower <= self.middle + slack, self.middle <= self.upper + slack


def sandwich(space: Space, map: MapSpec, target: TargetSpace, p: float, family: MollifierFamily,
             delta: float, x, r: float, h: float, *, shifted: bool = False,
             config: Optional[QuadratureConfig] = None) -> Sandwich:
    """Layer sums around the inner integral restricted to B(x, r).

    lower = sum_k Pi_L,k ks(x, r/h^(k+1)) and upper = sum_k Pi_U,k ks(x, r/h^k).
    With ``shifted`` the k-th jump of sigma is paired with the ball r/h^(k-1)
    (r for k = 0) in the upper sum instead.
    """
    config = config or QuadratureConfig()
    x = space.check_point(x)
    terms = pi_terms(family, delta, x, r, h)
    n = terms.truncated_at
    scales = r * float(h) ** -np.arange(n + 1, dtype=float)
    kv = np.array([ks(space, map, target, p, None, x, s, config) for s in scales])
    lower = float(np.sum(terms.lower * kv[1:])) + terms.tail_lower * kv[-1]
    if shifted:
        mass = space.measure_balls(np.repeat(x[None, :], n + 1, axis=0), scales)
        energy = kv * mass * scales**p
        jumps = terms.upper / (mass[:n] * scales[:n] ** p)
        upper = float(jumps[0] * energy[0] + np.sum(jumps[1:] * energy[: n - 1]))
        upper += terms.tail_upper * kv[-1] * h ** (p + space.dim)
    else:
        upper = float(np.sum(terms.upper * kv[:-1])) + terms.tail_upper * kv[-1]
    middle = inner_integral(space, map, target, p, family, delta, x, config, within=r)
    finer = QuadratureConfig(**{**asdict(config), "radial_order": 2 * (config.radial_order or 64)})
    check = inner_integral(space, map, target, p, family, delta, x, finer, within=r)
    error = abs(check - middle) + 1e-12 * abs(middle)
    return Sandwich(lower, middle, upper, float(error))


def ks(space: Space, map: MapSpec, target: TargetSpace, p: float, mask, x, r: float,
       config: Optional[QuadratureConfig] = None) -> float:
    """Korevaar-Schoen average of (d_f / r)^p over B(x, r) intersected with ``mask``."""
    if not r > 0:
        raise DomainError("radius must be positive")
    config = config or QuadratureConfig()
    x = space.check_point(x)
    mass = float(space.measure_balls(x[None, :], [r])[0])
    if mass == 0 or map.is_constant:
        return 0.0
    integral = radial_integrate(space, x, np.ones_like, _integrand(map, target, p, x),
                                box=_mask_box(space, mask), u_max=r,
                                order=config.radial_order, shell_order=config.shell_order)
    return max(integral, 0.0) / (mass * r**p)


def density_estimate(space: Space, map: MapSpec, target: TargetSpace, p: float, x,
                     radii: Sequence[float] = (0.1, 0.05, 0.025, 0.0125), gamma: Optional[float] = 1.0,
                     mask=None) -> DensityProfile:
    """Fit ks(x, r) = e + b r^gamma and report e.

    ``gamma=None`` fits the exponent too, which needs four radii.
    """
    x = space.check_point(x)
    radii = np.asarray(sorted(radii, reverse=True), dtype=float)
    vals = np.array([ks(space, map, target, p, mask, x, r) for r in radii])
    samples = tuple(zip(radii.tolist(), vals.tolist()))
    center = tuple(x.tolist())
    scale = max(float(np.max(np.abs(vals))), 1e-300)
    if np.ptp(vals) <= 1e-12 * scale:
        return DensityProfile(center, samples, float(vals[-1]), 0.0)
    from .harness.extrapolate import fit_power

    need = 3 if gamma is not None else 4
    if len(radii) < need:
        warnings.warn("too few radii for the fit; reporting the smallest-radius value", RuntimeWarning,
                      stacklevel=2)
        return DensityProfile(center, samples, float(vals[-1]), math.nan, False, "underdetermined")
    e, b, g, resid = fit_power(radii, vals, None, gamma)
    converged = bool(np.isfinite(e) and resid <= 1e-2 * scale)
    note = ""
    if not converged or e < 0:
        warnings.warn("density fit did not settle; reporting the smallest-radius value", RuntimeWarning,
                      stacklevel=2)
        e, note, converged = float(vals[-1]), "fallback to smallest radius", False
    return DensityProfile(center, samples, max(float(e), 0.0), float(resid), converged, note)


def _average(measure: MeasureWithDensity, x, r):
    space = measure.space
    mass = float(space.measure_balls(x[None, :], [r])[0])
    if mass == 0:
        return 0.0
    box = measure.box()
    if box is not None and (np.any(x + r < box[0]) or np.any(x - r > box[1])):
        return 0.0
    integral = radial_integrate(space, x, np.ones_like, lambda pts: measure.density(pts), box=box, u_max=r)
    return max(integral, 0.0) / mass


def regularize(measure: MeasureWithDensity, mode: str, x, r: float) -> float:
    """Averaging, Riesz-type or maximal regularization of G dm at (x, r)."""
    if not r > 0:
        raise DomainError("radius must be positive")
    x = measure.space.check_point(x)
    if mode == "average":
        return _average(measure, x, r)
    if mode == "riesz":
        total, k = 0.0, 0
        while k < 400:
            a = _average(measure, x, r / 2**k)
            total += (2.0 / 3.0) ** k * a / 3.0
            # remaining weight is (2/3)^(k+1); stop once it is negligible
            if (2.0 / 3.0) ** (k + 1) * max(a, total) < 1e-9 * total or (total == 0 and k > 60):
                break
            k += 1
        return total
    if mode == "maximal":
        best, k = 0.0, 0
        while r / 2**k >= 1e-6 * r:
            best = max(best, _average(measure, x, r / 2**k))
            k += 1
        return best
    raise ValueError(f"unknown regularization mode {mode!r}")


@dataclass(frozen=True)
class SmoothedFunction:
    """u^r(x) = sum_i phi_i(x) c_i with normalized tents phi_i of radius r."""

    space: Space
    centers: np.ndarray
    coefficients: np.ndarray
    r: float

    def _tents(self, points):
        pts = self.space.as_points(points)
        d = self.space.distance(pts[:, None, :], self.centers[None, :, :])
        return np.maximum(0.0, 1.0 - d / self.r)

    def partition_sum(self, points) -> np.ndarray:
        tents = self._tents(points)
        return np.sum(tents / tents.sum(axis=1, keepdims=True), axis=1)

    def __call__(self, points) -> np.ndarray:
        tents = self._tents(points)
        return tents @ self.coefficients / tents.sum(axis=1)


def _greedy_net(space, lo, hi, sep):
    step = sep / 4
    axes = [np.arange(lo[i], hi[i] + 0.5 * step, step) for i in range(space.dim)]
    for a, b, ax in zip(lo, hi, axes):
        ax[-1] = min(ax[-1], b)
    mesh = np.meshgrid(*axes, indexing="ij")
    cand = np.stack([m.ravel() for m in mesh], axis=1)
    chosen = []
    nearest = np.full(len(cand), np.inf)
    for i in range(len(cand)):
        if nearest[i] > sep:
            chosen.append(cand[i])
            nearest = np.minimum(nearest, space.distance(cand, cand[i]))
    return np.array(chosen)


def pou_smooth(space: Space, u: Callable, r: float, region=None) -> SmoothedFunction:
    """Partition-of-unity smoothing on a greedy (r/2)-net with averages over B(x_i, r/8)."""
    if not r > 0:
        raise DomainError("radius must be positive")
    lo, hi = space.normalize_region(region)
    if r >= float(np.min(hi - lo)):
        raise DomainError("smoothing radius exceeds the region")
    centers = _greedy_net(space, lo, hi, r / 2)
    if len(centers) == 0:
        raise DomainError("empty net")
    coef = np.empty(len(centers))
    for i, c in enumerate(centers):
        mass = float(space.measure_balls(c[None, :], [r / 8])[0])
        integral = radial_integrate(space, c, np.ones_like, lambda pts: np.asarray(u(pts), dtype=float),
                                    u_max=r / 8, extra_breaks=())
        coef[i] = integral / mass
    return SmoothedFunction(space, centers, coef, r)
