"""Limit extrapolation of sampled sequences as the scale parameter goes to 0."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

__all__ = ["InputError", "Extrapolation", "fit_power", "extrapolate", "MODELS"]

MODELS = ("linear", "power")


class InputError(ValueError):
    """Too few or malformed samples for the requested model."""


@dataclass(frozen=True)
class Extrapolation:
    limit: float
    uncertainty: float
    raw_smallest: float
    model: str
    slope: float
    exponent: float
    residual: float


def _weights(err, n):
    if err is None:
        return np.ones(n)
    err = np.asarray(err, dtype=float)
    if np.all(err > 0):
        return 1.0 / err**2
    return np.ones(n)


def _wls(x, y, w, gamma):
    design = np.vstack([np.ones_like(x), x**gamma]).T
    sw = np.sqrt(w)
    coef, *_ = np.linalg.lstsq(design * sw[:, None], y * sw, rcond=None)
    resid = y - design @ coef
    return coef, resid, design


def fit_power(x, y, err=None, gamma: Optional[float] = 1.0):
    """Weighted fit y = e + b x^gamma; ``gamma=None`` also fits the exponent.

    Returns (e, b, gamma, rms residual).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    w = _weights(err, len(x))
    if gamma is None:
        def cost(g):
            _, resid, _ = _wls(x, y, w, g)
            return float(np.sum(w * resid**2))

        grid = np.linspace(0.05, 4.0, 80)
        costs = [cost(g) for g in grid]
        i = int(np.argmin(costs))
        lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
        best = minimize_scalar(cost, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
        gamma = float(best.x) if best.fun <= costs[i] else float(grid[i])
    coef, resid, _ = _wls(x, y, w, gamma)
    return float(coef[0]), float(coef[1]), float(gamma), float(math.sqrt(np.mean(resid**2)))


def extrapolate(samples: Sequence, model: str = "linear") -> Extrapolation:
    """Fit value = a + b delta (``linear``) or a + b delta^gamma (``power``) and return a.

    ``samples`` holds (delta, value) or (delta, value, stderr) tuples.
    """
    if model not in MODELS:
        raise InputError(f"unknown model {model!r}")
    rows = [tuple(s) for s in samples]
    need = 3 if model == "linear" else 4
    if len(rows) < need:
        raise InputError(f"model {model!r} needs at least {need} samples, got {len(rows)}")
    x = np.array([r[0] for r in rows], dtype=float)
    y = np.array([r[1] for r in rows], dtype=float)
    err = np.array([r[2] if len(r) > 2 else 0.0 for r in rows], dtype=float)
    if np.any(x <= 0):
        raise InputError("scales must be positive")
    raw = float(y[np.argmin(x)])
    if np.all(y == y[0]):
        return Extrapolation(float(y[0]), 0.0, raw, model, 0.0, 1.0, 0.0)
    gamma = 1.0 if model == "linear" else None
    e, b, g, rms = fit_power(x, y, err, gamma)
    w = _weights(err, len(x))
    coef, resid, design = _wls(x, y, w, g)
    dof = len(x) - (2 if model == "linear" else 3)
    cov = np.linalg.pinv(design.T @ (design * w[:, None]))
    if np.all(err > 0):
        chi2 = float(np.sum(w * resid**2))
        scale = max(1.0, chi2 / dof) if dof > 0 else 1.0
    else:
        scale = float(np.sum(resid**2)) / dof if dof > 0 else 0.0
    unc = math.sqrt(max(float(cov[0, 0]) * scale, 0.0))
    return Extrapolation(e, unc, raw, model, b, g, rms)
