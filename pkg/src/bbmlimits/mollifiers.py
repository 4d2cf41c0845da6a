"""Mollifier families, tail envelopes, layer weights and an admissibility certifier.

For a scale delta in (0, 1), exponent p and distance d = d(x, x'):

    rho0 = delta / (d**(p (1 - delta)) * m(B(x, 4 d)))
    rho1 = 1[d <= delta] / (delta**p * m(B(x, delta)))
    rho2 = 1[d <= delta] / (d**p * m(B(x, delta)))
    rho3 = 1[d <= delta] / (delta**p * m(B(x, d)))

``annulus`` (1[delta/2 <= d <= delta] / (delta**p m(B(x, delta)))) is a
deliberately non-monotone kernel used as a negative control.  Kernels whose
formula is singular on the diagonal return 0 there.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .shells import radial_integrate
from .space import DegenerateSpaceError, DomainError, Space

__all__ = [
    "FAMILIES",
    "MollifierFamily",
    "PiTerms",
    "ConditionResult",
    "AdmissibilityReport",
    "kernel",
    "sigma",
    "sigma_bruteforce",
    "pi_terms",
    "theta_formula",
    "check_admissibility",
    "default_probes",
]

FAMILIES = ("rho0", "rho1", "rho2", "rho3")
KINDS = FAMILIES + ("annulus",)

SCALE_FLOOR = 1e-9
TERM_FLOOR = 1e-9


def theta_formula(family, p: float, D: int) -> float:
    """Theta constant of a family for exponent p and local dimension D."""
    kind = getattr(family, "kind", family)
    if D < 1:
        raise ValueError("dimension must be a positive integer")
    if kind == "rho0":
        return (D + p) / (4.0**D * p)
    if kind == "rho1":
        return 1.0
    if kind == "rho2":
        return (D + p) / D
    if kind == "rho3":
        return (D + p) / p
    raise ValueError(f"no Theta constant for kernel {kind!r}")


@dataclass(frozen=True)
class MollifierFamily:
    kind: str
    p: float
    space: Space

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown mollifier family {self.kind!r}")
        if not self.p >= 1:
            raise ValueError("exponent p must be >= 1")

    def theta(self, D: int) -> float:
        return theta_formula(self.kind, self.p, D)

    # kernel evaluation -----------------------------------------------------

    def values(self, delta: float, centers, d) -> np.ndarray:
        """Kernel values for centers (n, dim) at distances d (n,)."""
        sp = self.space
        centers = sp.as_points(centers)
        d = np.broadcast_to(np.asarray(d, dtype=float), (centers.shape[0],))
        p = self.p
        kind = self.kind
        out = np.zeros(d.shape)
        if kind == "rho0":
            live = d > 0
            if np.any(live):
                m = sp.measure_balls(centers[live], 4.0 * d[live])
                _check_mass(m)
                out[live] = _ratio(delta, d[live], p * (1.0 - delta), m)
            return out
        lower = 0.5 * delta if kind == "annulus" else 0.0
        live = (d <= delta) & (d >= lower)
        if kind in ("rho2", "rho3"):
            live &= d > 0
        if not np.any(live):
            return out
        if kind == "rho3":
            m = sp.measure_balls(centers[live], d[live])
            _check_mass(m)
            out[live] = _ratio(1.0, delta, p, m)
            return out
        m = sp.measure_balls(centers[live], np.full(int(live.sum()), delta))
        _check_mass(m)
        if kind == "rho2":
            out[live] = _ratio(1.0, d[live], p, m)
        else:
            out[live] = _ratio(1.0, delta, p, m)
        return out

    def radial_value(self, delta: float, x, d) -> np.ndarray:
        """Kernel at center ``x`` as a function of distance (vectorized in d)."""
        d = np.atleast_1d(np.asarray(d, dtype=float))
        x = np.asarray(x, dtype=float)
        return self.values(delta, np.repeat(x[None, :], len(d), axis=0), d)

    def kernel(self, delta: float, x, x_prime) -> float:
        x = self.space.check_point(x)
        xp = self.space.check_point(x_prime)
        d = float(self.space.distance(x, xp))
        return float(self.radial_value(delta, x, [d])[0])

    def radial_breaks(self, delta: float, x) -> list:
        """Distances where the kernel at ``x`` has kinks or jumps."""
        if self.kind == "rho0":
            return (self.space.edge_radii(x) / 4.0).tolist()
        if self.kind == "annulus":
            return [0.5 * delta, delta]
        return [delta]

    # tail envelope ------------------------------------------------------------

    def sigma_many(self, delta: float, x, radii) -> np.ndarray:
        """sup of the kernel outside B(x, r) for each r; monotonicity gives a closed form."""
        x = np.asarray(x, dtype=float)
        radii = np.atleast_1d(np.asarray(radii, dtype=float))
        far = self.space.farthest(x)
        out = self.radial_value(delta, x, np.minimum(radii, far))
        if self.kind == "annulus":
            top = self.radial_value(delta, x, [delta])[0]
            out = np.where(radii < min(delta, far), top, 0.0)
        elif self.kind != "rho0":
            out = np.where(radii < delta, out, 0.0)
        # nothing lies strictly outside a ball that already covers the domain
        return np.where(radii < far, out, 0.0)

    def log_sigma_many(self, delta: float, x, radii) -> np.ndarray:
        """log sigma, stable for radii far below the float range of ball measures."""
        sp = self.space
        x = np.asarray(x, dtype=float)
        radii = np.atleast_1d(np.asarray(radii, dtype=float))
        pts = np.repeat(x[None, :], len(radii), axis=0)
        p = self.p
        with np.errstate(divide="ignore"):
            if self.kind == "rho0":
                out = math.log(delta) - p * (1 - delta) * np.log(radii) - sp.log_measure_balls(pts, 4 * radii)
            elif self.kind == "rho3":
                out = -p * math.log(delta) - sp.log_measure_balls(pts, radii)
            else:
                log_m = math.log(float(sp.measure_balls(x[None, :], [delta])[0]))
                if self.kind == "rho2":
                    out = -p * np.log(radii) - log_m
                else:
                    out = np.full(len(radii), -p * math.log(delta) - log_m)
            if self.kind != "rho0":
                out = np.where(radii < delta, out, -np.inf)
        return out


_LOG_MAX = math.log(np.finfo(float).max)


def _ratio(num, base, power, mass):
    """num / (base**power * mass), finite even when the denominator underflows."""
    base = np.asarray(base, dtype=float)
    with np.errstate(under="ignore"):
        den = base**power * mass
    normal = den >= np.finfo(float).tiny
    if np.all(normal):
        return num / den
    with np.errstate(divide="ignore"):
        logs = math.log(num) - power * np.log(base) - np.log(mass)
    return np.where(normal, num / np.where(normal, den, 1.0), np.exp(np.minimum(logs, _LOG_MAX)))


def _check_mass(m):
    if np.any(~(m > 0)) or np.any(~np.isfinite(m)):
        raise DegenerateSpaceError("kernel normalization hit a ball of zero or infinite measure")


def kernel(family: MollifierFamily, delta: float, x, x_prime) -> float:
    return family.kernel(delta, x, x_prime)


def sigma(family: MollifierFamily, delta: float, x, r: float) -> float:
    if not r > 0:
        raise DomainError("radius must be positive")
    x = family.space.check_point(x)
    return float(family.sigma_many(delta, x, [r])[0])


def sigma_bruteforce(family: MollifierFamily, delta: float, x, r: float, n: int = 10_000,
                     seed: int = 0) -> float:
    """Definitional sup over sampled points outside B(x, r).

    Points are placed at log-uniform distances from x in random directions,
    so the region just outside the ball is sampled as densely as far away.
    """
    sp = family.space
    x = sp.check_point(x)
    far = sp.farthest(x)
    if far <= r:
        return 0.0
    rng = np.random.default_rng(seed)
    t = (np.arange(n) + rng.random(n)) / n
    u = r * (far / r) ** t
    if sp.kind == "circle" or sp.dim == 1:
        omega = np.where(rng.random(n) < 0.5, 1.0, -1.0)[:, None]
    else:
        omega = rng.standard_normal((n, sp.dim))
        omega /= np.linalg.norm(omega, axis=1, keepdims=True)
    pts = x + u[:, None] * omega
    pts = sp.wrap(pts) if sp.kind == "circle" else pts
    inside = sp.contains(pts, tol=0.0)
    d = sp.distance(pts[inside], x)
    keep = d > r
    if not np.any(keep):
        return 0.0
    return float(np.max(family.values(delta, np.repeat(x[None, :], int(keep.sum()), axis=0), d[keep])))


@dataclass(frozen=True)
class PiTerms:
    lower: np.ndarray
    upper: np.ndarray
    tail_lower: float
    tail_upper: float
    truncated_at: int
    scales: np.ndarray

    @property
    def sum_lower(self) -> float:
        return float(np.sum(self.lower)) + self.tail_lower

    @property
    def sum_upper(self) -> float:
        return float(np.sum(self.upper)) + self.tail_upper


def _geometric_tail(terms):
    if len(terms) < 2 or terms[-1] <= 0:
        return 0.0
    prev, last = terms[-2], terms[-1]
    if not prev > 0:
        return 0.0
    q = last / prev
    if not 0 < q < 1:
        return 0.0
    return float(last * q / (1 - q))


def _pi_raw(family, delta, x, r, h, n_terms):
    k = np.arange(n_terms + 1)
    scales = r * float(h) ** -k.astype(float)
    sig = family.sigma_many(delta, x, scales[:-1])
    pts = np.repeat(np.asarray(x, float)[None, :], len(scales), axis=0)
    mass = family.space.measure_balls(pts, scales)
    weight = mass * scales**family.p
    jumps = np.abs(np.diff(sig, prepend=0.0))
    jumps[0] = sig[0]
    upper = jumps * weight[:-1]
    lower = jumps * weight[1:]
    return lower, upper, scales[:-1]


def pi_terms(family: MollifierFamily, delta: float, x, r: float, h: float = 2.0,
             k_max: Optional[int] = None) -> PiTerms:
    """Layer weights Pi_L,k and Pi_U,k for k = 0, 1, ...

    Without ``k_max`` the series stops at the first k where the scale r/h^k
    falls below 1e-9 r or the upper term falls below 1e-9 of the running sum;
    a geometric estimate of the remainder is reported as the tail.
    """
    if not h > 1:
        raise DomainError("ratio h must exceed 1")
    if not r > 0:
        raise DomainError("radius must be positive")
    x = family.space.check_point(x)
    floor_k = int(math.floor(math.log(1.0 / SCALE_FLOOR) / math.log(h))) + 1
    n = floor_k if k_max is None else int(k_max)
    if n < 1:
        raise DomainError("k_max must be at least 1")
    lower, upper, scales = _pi_raw(family, delta, x, r, h, n)
    if not np.isfinite(family.space.measure_balls(x[None, :], [r])[0]):
        raise DegenerateSpaceError("ball measure is infinite")
    stop = n
    if k_max is None:
        running = np.cumsum(upper)
        small = upper[1:] < TERM_FLOOR * running[:-1]
        hits = np.nonzero(small)[0]
        if hits.size:
            stop = int(hits[0]) + 1
    lower, upper, scales = lower[:stop], upper[:stop], scales[:stop]
    return PiTerms(lower, upper, _geometric_tail(lower), _geometric_tail(upper), stop, scales)


# admissibility ------------------------------------------------------------------


@dataclass
class ConditionResult:
    verdict: bool
    margin: float
    detail: dict = field(default_factory=dict)


@dataclass
class AdmissibilityReport:
    family: str
    p: float
    space: str
    conditions: dict
    cm_bracket: tuple
    theta_table: list
    theta_expected: float
    truncation: dict

    def passed(self, names=("i", "ii", "iii", "iv", "v", "vi", "vii")) -> bool:
        return all(self.conditions[n].verdict for n in names if n in self.conditions)

    def to_dict(self) -> dict:
        out = asdict(self)
        return _jsonable(out)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def default_probes(space: Space, n_per_axis: Optional[int] = None) -> np.ndarray:
    """Interior probe grid on the middle 40% of each axis."""
    lo, hi = space.lower, space.upper
    if n_per_axis is None:
        n_per_axis = {1: 5, 2: 3, 3: 2}[space.dim]
    axes = [np.linspace(lo[i] + 0.3 * (hi[i] - lo[i]), hi[i] - 0.3 * (hi[i] - lo[i]), n_per_axis)
            for i in range(space.dim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _boundary_points(space: Space) -> np.ndarray:
    if space.kind == "circle":
        return space.lower[None, :]
    mesh = np.meshgrid(*[np.array([a, 0.5 * (a + b), b]) for a, b in space.bounds], indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    mid = np.all(np.isclose(pts, 0.5 * (space.lower + space.upper)), axis=1)
    return pts[~mid]


def _limit_margin(deltas, values, scale):
    """Normalized δ -> 0 limit of a sampled sequence and whether it is non-increasing."""
    values = np.asarray(values, dtype=float)
    if scale <= 0:
        return 0.0, True
    order = np.argsort(-np.asarray(deltas))
    v = values[order] / scale
    d = np.asarray(deltas)[order]
    monotone = bool(np.all(np.diff(v) <= 1e-9))
    # Richardson-style: the interpolating polynomial through every sample, read at 0
    coef = np.polyfit(d, v, len(d) - 1)
    intercept = abs(float(coef[-1]))
    return min(abs(float(v[-1])), intercept), monotone


def _delta_sweep(r, h, delta_small, n=5):
    """Scales covering one log-period of r/delta in base h near ``delta_small``."""
    k0 = math.ceil(math.log(r / delta_small) / math.log(h))
    thetas = np.linspace(1e-6, 1 - 1e-6, n)
    return [r * h**-k0 / h**t for t in thetas]


def _local_radii(r_grid, probes, space):
    margin = min(space.boundary_distance(x) for x in probes)
    radii = [r for r in r_grid if 4 * r <= margin]
    return radii or [margin / 4]


def _condition_i(family, deltas, r_grid, points):
    space = family.space
    table = {}
    ok, worst = True, 0.0
    for r in r_grid:
        row = []
        for delta in deltas:
            best = 0.0
            for x in points:
                def both(pts, x=x, delta=delta):
                    flat = pts.reshape(-1, pts.shape[-1])
                    d = space.distance(flat, x)
                    fwd = family.radial_value(delta, x, d)
                    back = family.values(delta, flat, d)
                    return (fwd + back).reshape(pts.shape[:-1])

                breaks = family.radial_breaks(delta, x)
                val = radial_integrate(space, x, np.ones_like, both, u_min=r, extra_breaks=breaks)
                best = max(best, val)
            row.append(best)
        margin, monotone = _limit_margin(deltas, row, max(row))
        table[r] = {"values": row, "margin": margin, "monotone": monotone}
        ok &= monotone and margin < 1e-2
        worst = max(worst, margin)
    return ConditionResult(bool(ok), worst, {"per_radius": table})


def _condition_ii(family, deltas, r_grid, probes):
    table = {}
    ok, worst = True, 0.0
    for r in r_grid:
        for i, x in enumerate(probes):
            row = [float(family.sigma_many(delta, x, [r])[0]) for delta in deltas]
            margin, monotone = _limit_margin(deltas, row, max(row))
            table[f"r={r:g},probe={i}"] = {"values": row, "margin": margin, "monotone": monotone}
            ok &= monotone and margin < 1e-2
            worst = max(worst, margin)
    return ConditionResult(bool(ok), worst, {"per_probe": table})


def _condition_iii(family, deltas, n_probes, seed):
    space = family.space
    rng = np.random.default_rng(seed)
    violations = 0
    worst = 0.0
    lo, hi = space.lower, space.upper
    for _ in range(n_probes):
        delta = float(rng.choice(np.concatenate([deltas, rng.uniform(0.001, 0.999, 1)])))
        x = lo + (hi - lo) * rng.random(space.dim)
        if rng.random() < 0.5:
            # pairs at comparable distances near the kernel scale
            dist = np.sort(rng.uniform(0, 1.5 * delta, 2))
            direction = rng.standard_normal(space.dim)
            direction /= np.linalg.norm(direction)
            d1, d2 = dist
        else:
            x1 = lo + (hi - lo) * rng.random(space.dim)
            x2 = lo + (hi - lo) * rng.random(space.dim)
            d1, d2 = sorted((float(space.distance(x, x1)), float(space.distance(x, x2))))
        k1, k2 = family.radial_value(delta, x, [d1, d2]) if d1 > 0 else (math.inf, 0.0)
        if k1 < k2 * (1 - 1e-12):
            violations += 1
            worst = max(worst, (k2 - k1) / k2)
    return ConditionResult(violations == 0, worst, {"probes": n_probes, "violations": violations})


def _condition_iv(family, deltas, r_start, probes):
    radii = np.concatenate([[r_start], 10.0 ** -np.arange(math.ceil(-math.log10(r_start)), 306)])
    radii = radii[radii <= r_start]
    ok, worst = True, 0.0
    table = {}
    space = family.space
    for delta in deltas:
        for i, x in enumerate(probes):
            pts = np.repeat(np.asarray(x, float)[None, :], len(radii), axis=0)
            logv = family.log_sigma_many(delta, x, radii) + space.log_measure_balls(pts, radii) \
                + family.p * np.log(radii)
            finite = np.isfinite(logv)
            if not np.any(finite):
                table[f"delta={delta:g},probe={i}"] = {"ratio": 0.0, "slope": math.inf}
                continue
            top = np.max(logv[finite])
            rel = np.where(finite, logv - top, -np.inf)
            monotone = bool(np.all(np.diff(logv[finite]) <= 1e-9 * max(1.0, abs(top))))
            tail = logv[-6:]
            slope = float(np.polyfit(np.log(radii[-6:]), tail, 1)[0]) if np.all(np.isfinite(tail)) else math.inf
            ratio = float(math.exp(rel[-1])) if np.isfinite(rel[-1]) else 0.0
            good = monotone and (ratio <= 1e-6 or slope >= 1e-3)
            ok &= good
            worst = max(worst, ratio)
            table[f"delta={delta:g},probe={i}"] = {"ratio": ratio, "slope": slope, "monotone": monotone}
    return ConditionResult(bool(ok), worst, {"per_case": table})


def _condition_v(family, deltas, radii, probes, delta_small, workers):
    lows, ups = [], []
    tail_frac = 0.0
    for r in radii:
        cand = [d for d in deltas if d < r] + _delta_sweep(r, 2.0, delta_small, 3)
        for delta in cand:
            terms = _map(workers, lambda x: pi_terms(family, delta, x, r, 2.0), probes)
            n = max(len(t.lower) for t in terms)
            low = np.full((len(terms), n), 0.0)
            up = np.full((len(terms), n), 0.0)
            for i, t in enumerate(terms):
                low[i, : len(t.lower)] = t.lower
                up[i, : len(t.upper)] = t.upper
                if len(t.lower) < n:
                    # after truncation the terms are negligible; pad with zero
                    low[i, len(t.lower):] = 0.0
            lows.append(float(np.sum(np.min(low, axis=0)) + min(t.tail_lower for t in terms)))
            ups.append(float(np.sum(np.max(up, axis=0)) + max(t.tail_upper for t in terms)))
            tot = max(t.sum_upper for t in terms)
            if tot > 0:
                tail_frac = max(tail_frac, max(t.tail_upper for t in terms) / tot)
    low, up = min(lows), max(ups)
    ok = 0 < low <= up < math.inf
    cm = max(up, 1.0 / low if low > 0 else math.inf, 1.0)
    return ConditionResult(bool(ok), low, {"lower_sum": low, "upper_sum": up, "C_M": cm}), (low, up), tail_frac


def _map(workers, fn, items):
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _trend_intercept(hs, values):
    """Value at h = 1 of a quadratic fit of log(value) against log(h).

    Layer sums are built from powers of h, so they are smooth in log h; the
    three h closest to 1 are used.
    """
    order = np.argsort(hs)[:3]
    lh = np.log(np.asarray(hs, dtype=float)[order])
    values = np.asarray(values, dtype=float)[order]
    if np.any(values <= 0):
        return float(np.polyval(np.polyfit(lh, values, min(2, len(lh) - 1)), 0.0))
    return float(np.exp(np.polyval(np.polyfit(lh, np.log(values), min(2, len(lh) - 1)), 0.0)))


def _condition_vi_vii(family, h_grid, radii, probes, delta_small, workers, tol):
    rows = []
    thetas = np.array([family.theta(family.space.Dim(x)) for x in probes])
    for h in h_grid:
        lo_u, hi_u, lo_l, hi_l = math.inf, -math.inf, math.inf, -math.inf
        rel = []
        for r in radii:
            for delta in _delta_sweep(r, h, delta_small):
                terms = _map(workers, lambda x: pi_terms(family, delta, x, r, h), probes)
                su = np.array([t.sum_upper for t in terms]) / thetas
                sl = np.array([t.sum_lower for t in terms]) / thetas
                lo_u, hi_u = min(lo_u, su.min()), max(hi_u, su.max())
                lo_l, hi_l = min(lo_l, sl.min()), max(hi_l, sl.max())
                rel.extend([max(t.tail_upper / t.sum_upper, 0.0) if t.sum_upper > 0 else 0.0 for t in terms])
        rows.append({"h": h, "upper_min": float(lo_u), "upper_max": float(hi_u),
                     "lower_min": float(lo_l), "lower_max": float(hi_l),
                     "max_tail_fraction": max(rel)})
    finite = all(math.isfinite(r["upper_max"]) for r in rows)
    vi = ConditionResult(finite, float(max(r["upper_max"] for r in rows)), {})
    hs = [r["h"] for r in rows]
    trend = {key: _trend_intercept(hs, [r[key] for r in rows])
             for key in ("upper_min", "upper_max", "lower_min", "lower_max")}
    dev = max(abs(v - 1.0) for v in trend.values())
    nearest = rows[int(np.argmin(hs))]
    raw_dev = max(abs(nearest[k] - 1.0) for k in ("upper_min", "upper_max", "lower_min", "lower_max"))
    vii = ConditionResult(bool(dev <= tol), dev, {"trend_at_h1": trend, "closest_h": nearest["h"],
                                                   "closest_h_deviation": raw_dev,
                                                   "upper_deviation_closest_h": max(
                                                       abs(nearest["upper_min"] - 1), abs(nearest["upper_max"] - 1))})
    return vi, vii, rows


def check_admissibility(family: MollifierFamily, deltas: Sequence[float] = (0.08, 0.04, 0.02, 0.01),
                        r_grid: Sequence[float] = (0.2, 0.1, 0.05),
                        h_grid: Sequence[float] = (2.0, 1.5, 1.2, 1.1, 1.05),
                        probes=None, *, delta_small: float = 1e-4, theta_tol: float = 0.05,
                        n_monotone: int = 2000, seed: int = 0, workers: int = 1,
                        conditions: Sequence[str] = ("i", "ii", "iii", "iv", "v", "vi", "vii")
                        ) -> AdmissibilityReport:
    """Numerical certificate for conditions i)-vii) on finite grids.

    Theta columns in the trend table are normalized by the expected constant,
    so every entry should approach 1 as h decreases to 1.
    """
    space = family.space
    probes = default_probes(space) if probes is None else space.as_points(probes)
    deltas = sorted(map(float, deltas), reverse=True)
    r_grid = sorted(map(float, r_grid), reverse=True)
    radii = _local_radii(r_grid, probes, space)
    results = {}
    cm = (math.nan, math.nan)
    rows: list = []
    trunc = {}
    if "i" in conditions:
        pts = np.concatenate([probes, _boundary_points(space)])
        results["i"] = _condition_i(family, deltas, r_grid, pts)
    if "ii" in conditions:
        results["ii"] = _condition_ii(family, deltas, r_grid, probes)
    if "iii" in conditions:
        results["iii"] = _condition_iii(family, deltas, n_monotone, seed)
    if "iv" in conditions:
        results["iv"] = _condition_iv(family, deltas, min(r_grid), probes)
    if "v" in conditions:
        results["v"], cm, frac = _condition_v(family, deltas, radii, probes, delta_small, workers)
        trunc["v_max_tail_fraction"] = frac
    if family.kind not in FAMILIES:
        note = {"reason": "no Theta constant for this kernel"}
        for name in ("vi", "vii"):
            if name in conditions:
                results[name] = ConditionResult(False, math.nan, dict(note))
    elif "vi" in conditions or "vii" in conditions:
        vi, vii, rows = _condition_vi_vii(family, list(h_grid), radii, probes, delta_small, workers, theta_tol)
        results["vi"], results["vii"] = vi, vii
        trunc["vii_max_tail_fraction"] = max(r["max_tail_fraction"] for r in rows)
    expected = float(family.theta(space.Dim(probes[0]))) if family.kind in FAMILIES else math.nan
    return AdmissibilityReport(family.kind, family.p, space.name or space.kind, results, cm, rows,
                               expected, trunc)
