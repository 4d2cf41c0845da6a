"""Gauss-Legendre helpers and closed-form disc/box overlap areas."""

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=64)
def gauss_legendre(order):
    """Nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    return (x + 1.0) / 2.0, w / 2.0


def composite_nodes(breaks, order):
    """Map a Gauss rule onto every panel between consecutive ``breaks``.

    ``breaks`` has shape (..., K); the result has shape (..., K-1, order).
    Zero-width panels get zero weight.
    """
    t, w = gauss_legendre(order)
    breaks = np.asarray(breaks, dtype=float)
    lo = breaks[..., :-1, None]
    width = np.diff(breaks, axis=-1)[..., None]
    return lo + width * t, width * w


def _half_chord_primitive(t):
    # F(t) = integral_0^t sqrt(1 - s^2) ds
    t = np.clip(t, -1.0, 1.0)
    return 0.5 * (t * np.sqrt(np.maximum(1.0 - t * t, 0.0)) + np.arcsin(t))


def _upper_quadrant(a, b):
    """Area of {X >= a, Y >= b} inside the unit disc, for b >= 0."""
    c = np.sqrt(np.maximum(1.0 - b * b, 0.0))
    lo = np.maximum(a, -c)
    area = _half_chord_primitive(c) - _half_chord_primitive(lo) - b * (c - lo)
    return np.where(lo < c, np.maximum(area, 0.0), 0.0)


def _quadrant(a, b):
    """Area of {X >= a, Y >= b} inside the unit disc."""
    a = np.clip(a, -1.0, 1.0)
    b = np.clip(b, -1.0, 1.0)
    half_plane = 2.0 * (_half_chord_primitive(1.0) - _half_chord_primitive(a))
    pos = _upper_quadrant(a, np.abs(b))
    return np.where(b >= 0.0, pos, half_plane - pos)


def disc_box_area(center, r, lower, upper):
    """Area of the closed disc B(center, r) intersected with a rectangle.

    ``center`` has shape (..., 2); ``r`` broadcasts against ``center[..., 0]``.
    Offsets are scaled by ``r`` before evaluation so tiny discs do not lose
    precision to cancellation.
    """
    center = np.asarray(center, dtype=float)
    r = np.asarray(r, dtype=float)
    safe_r = np.where(r > 0, r, 1.0)
    x1 = (lower[0] - center[..., 0]) / safe_r
    x2 = (upper[0] - center[..., 0]) / safe_r
    y1 = (lower[1] - center[..., 1]) / safe_r
    y2 = (upper[1] - center[..., 1]) / safe_r
    unit = _quadrant(x1, y1) - _quadrant(x2, y1) - _quadrant(x1, y2) + _quadrant(x2, y2)
    return np.where(r > 0, np.maximum(unit, 0.0) * r * r, 0.0)
