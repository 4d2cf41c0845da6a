"""Radial quadrature around a center point.

Integrals of the form  int_{Omega} K(d(x, x')) F(x') dm(x')  are split into
spheres S(x, u) and the radius u.  The radial integral is done with composite
Gauss-Legendre on panels that break wherever the sphere starts or stops
touching a face, a corner, or a kernel cutoff.  An optional power substitution
t = u**beta flattens integrable singularities of the form u**(beta - 1).
"""

from __future__ import annotations

import math

import numpy as np

from ._quadrature import composite_nodes
from .space import DomainError, Space

__all__ = ["shell_rule", "radial_breaks", "radial_integrate", "radial_integrate_mc", "U_FLOOR"]

# smallest radius evaluated under a power substitution; powers of it stay in range
U_FLOOR = 1e-40
# below this multiple of (1 + |x|) the offset x' - x is lost to rounding
U_LINEAR = 1e-8


def linear_scale(x) -> float:
    return U_LINEAR * (1.0 + float(np.max(np.abs(x))))


def _sphere_area(d):
    return 2.0 * math.pi ** (d / 2) / math.gamma(d / 2)


def _box_of(space, box):
    if box is None:
        return space.lower, space.upper
    lo, hi = box
    return np.maximum(np.asarray(lo, float), space.lower), np.minimum(np.asarray(hi, float), space.upper)


def shell_rule(space: Space, x, u, box=None, order: int = 16):
    """Points and weights on S(x, u) inside the domain (and ``box``).

    Returns ``points`` with shape (len(u), M, d) and ``weights`` with shape
    (len(u), M); weights include the density and the surface element, so
    summing ``weights * F(points)`` approximates the sphere integral.
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    x = np.asarray(x, dtype=float)
    if space.kind == "circle":
        half = space.circumference / 2
        pts = np.stack([x[0] + u, x[0] - u], axis=1)[..., None]
        # the two arcs meet at the antipode; count it once
        w = np.where(u < half, 1.0, 0.5)
        wts = np.stack([w, w], axis=1) * (u[:, None] <= half)
        return space.wrap(pts), wts
    lo, hi = _box_of(space, box)
    if space.dim == 1:
        pts = np.stack([x[0] + u, x[0] - u], axis=1)
        inside = (pts >= lo[0]) & (pts <= hi[0])
        dens = space.weights[0].density(np.clip(pts, lo[0], hi[0]))
        wts = np.where(inside, dens, 0.0)
        # u = 0 is a single point; it carries no length anyway
        return pts[..., None], wts
    if space.dim == 2:
        return _circle_in_box(space, x, u, lo, hi, order)
    raise DomainError("deterministic shells are available for d <= 2; use monte-carlo")


def _circle_in_box(space, x, u, lo, hi, order):
    n = len(u)
    safe = np.where(u > 0, u, 1.0)[:, None]
    cands = [np.zeros((n, 1)), np.full((n, 1), 2 * math.pi)]
    for axis, edges in ((0, (lo[0], hi[0])), (1, (lo[1], hi[1]))):
        for e in edges:
            c = (e - x[axis]) / safe
            ok = np.abs(c) <= 1.0
            c = np.clip(c, -1.0, 1.0)
            if axis == 0:
                a = np.arccos(c)
                pair = np.concatenate([a, -a], axis=1)
            else:
                a = np.arcsin(c)
                pair = np.concatenate([a, math.pi - a], axis=1)
            pair = np.mod(pair, 2 * math.pi)
            cands.append(np.where(ok, pair, 2 * math.pi))
    angles = np.sort(np.concatenate(cands, axis=1), axis=1)
    mid = 0.5 * (angles[:, :-1] + angles[:, 1:])
    mx = x[0] + u[:, None] * np.cos(mid)
    my = x[1] + u[:, None] * np.sin(mid)
    tol = 1e-14 * max(1.0, float(np.max(np.abs(np.concatenate([lo, hi])))))
    inside = (mx >= lo[0] - tol) & (mx <= hi[0] + tol) & (my >= lo[1] - tol) & (my <= hi[1] + tol)
    theta, tw = composite_nodes(angles, order)
    tw = tw * inside[..., None]
    theta = theta.reshape(n, -1)
    tw = tw.reshape(n, -1)
    pts = np.stack([x[0] + u[:, None] * np.cos(theta), x[1] + u[:, None] * np.sin(theta)], axis=-1)
    pts[..., 0] = np.clip(pts[..., 0], lo[0], hi[0])
    pts[..., 1] = np.clip(pts[..., 1], lo[1], hi[1])
    dens = space.weights[0].density(pts[..., 0]) * space.weights[1].density(pts[..., 1])
    return pts, tw * u[:, None] * dens


def radial_breaks(space: Space, x, box=None, extra=(), u_min=0.0, u_max=None):
    """Sorted panel boundaries in [u_min, u_max]."""
    x = np.asarray(x, dtype=float)
    if u_max is None:
        u_max = _farthest(space, x, box)
    pts = [u_min, u_max]
    lo, hi = _box_of(space, box)
    pts.extend(space.edge_radii(x, (lo, hi)).tolist())
    pts.extend(float(e) for e in extra)
    arr = np.unique(np.clip(np.asarray(pts, dtype=float), u_min, u_max))
    return arr


def _farthest(space, x, box):
    if space.kind == "circle":
        return space.circumference / 2
    lo, hi = _box_of(space, box)
    far = np.maximum(np.abs(x - lo), np.abs(hi - x))
    return float(np.linalg.norm(far))


def radial_integrate(space: Space, x, radial, point_fn=None, *, box=None, u_min=0.0, u_max=None,
                     extra_breaks=(), beta=1.0, order=None, shell_order=16, degree=None):
    """Deterministic  int radial(d(x, x')) * point_fn(x') dm(x')  over the shell range.

    ``radial`` maps an array of radii to kernel values; ``point_fn`` maps an
    array of points (..., d) to values (...).  Panels are mapped through
    t = u**beta when ``beta`` differs from 1.

    With ``degree`` set, ``point_fn`` is taken to vanish like u**degree at
    the center: spheres smaller than :func:`linear_scale` are evaluated at
    that scale and rescaled, since the offsets themselves round away.
    """
    x = np.asarray(x, dtype=float)
    breaks = radial_breaks(space, x, box, extra_breaks, u_min, u_max)
    if len(breaks) < 2:
        return 0.0
    if order is None:
        order = 64 if space.dim == 1 else 24
    if beta != 1.0:
        head = breaks[0] < U_FLOOR
        if head:
            breaks = np.unique(np.clip(breaks, U_FLOOR, None))
        tb = breaks**beta
        tn, tw = composite_nodes(tb, order)
        tn, tw = tn.ravel(), tw.ravel()
        un = tn ** (1.0 / beta)
        uw = tw * un / (beta * tn)
        if head:
            # below U_FLOOR the integrand in t is constant to working precision
            un = np.concatenate([[U_FLOOR], un])
            uw = np.concatenate([[U_FLOOR / beta], uw])
    else:
        un, uw = composite_nodes(breaks, order)
        un, uw = un.ravel(), uw.ravel()
    keep = uw > 0
    un, uw = un[keep], uw[keep]
    if un.size == 0:
        return 0.0
    kern = np.asarray(radial(un), dtype=float)
    if degree is None:
        pts, sw = shell_rule(space, x, un, box, shell_order)
        vals = np.ones(sw.shape) if point_fn is None else np.asarray(point_fn(pts), dtype=float)
    else:
        ue = np.maximum(un, linear_scale(x))
        pts, sw = shell_rule(space, x, ue, box, shell_order)
        ratio = (un / ue)[:, None]
        if space.dim == 2 and space.kind != "circle":
            sw = sw * ratio
        vals = np.asarray(point_fn(pts), dtype=float) * ratio**degree
    per_shell = np.sum(sw * vals, axis=1)
    terms = uw * kern * per_shell
    terms = np.where(per_shell == 0, 0.0, terms)
    return float(np.sum(terms))


def radial_integrate_mc(space: Space, x, radial, point_fn=None, *, rng, n: int = 4096, n_shells: int = 16,
                        box=None, u_min=0.0, u_max=None, beta=1.0):
    """Stratified Monte Carlo version of :func:`radial_integrate`.

    Radii are stratified into geometric shells with equal budgets; within a
    shell t = u**beta is uniform and directions are uniform on the sphere.
    Returns (estimate, standard error).
    """
    x = np.asarray(x, dtype=float)
    if u_max is None:
        u_max = _farthest(space, x, box)
    d = 1 if space.kind == "circle" else space.dim
    lo, hi = _box_of(space, box)
    edges = u_max * 2.0 ** -np.arange(n_shells, -1, -1, dtype=float)
    edges[0] = 0.0
    edges = np.clip(edges, u_min, u_max)
    per = max(2, n // n_shells)
    total, var = 0.0, 0.0
    area = 2.0 if space.kind == "circle" else _sphere_area(d)
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a:
            continue
        ta, tb = a**beta, b**beta
        t = ta + (tb - ta) * (np.arange(per) + rng.random(per)) / per
        u = np.maximum(t ** (1.0 / beta), U_FLOOR)
        jac = u ** (1.0 - beta) / beta
        if space.kind == "circle":
            sign = np.where(rng.random(per) < 0.5, 1.0, -1.0)
            pts = space.wrap(x[0] + sign * u)[:, None]
            inside = np.ones(per, dtype=bool)
            dens = np.ones(per)
        else:
            g = rng.standard_normal((per, d))
            g /= np.linalg.norm(g, axis=1, keepdims=True)
            pts = x + u[:, None] * g
            inside = np.all((pts >= lo) & (pts <= hi), axis=1)
            dens = np.ones(per)
            for axis, w in enumerate(space.weights):
                dens = dens * w.density(np.clip(pts[:, axis], lo[axis], hi[axis]))
        vals = np.ones(per) if point_fn is None else np.asarray(point_fn(pts), dtype=float)
        with np.errstate(invalid="ignore"):
            f = np.where(inside, radial(u) * vals * dens, 0.0) * area * u ** (d - 1) * jac * (tb - ta)
        total += float(f.mean())
        var += float(f.var(ddof=1)) / per
    return total, math.sqrt(var)
