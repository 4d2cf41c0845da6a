"""Run a scenario: sweep delta, extrapolate, compare with the predicted limit."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .. import __version__
from ..energy import nonlocal_energy
from ..maps import UnsupportedTargetError, cheeger_energy_smooth, predicted_limit
from ..mollifiers import MollifierFamily
from .config import ScenarioConfig
from .extrapolate import extrapolate

__all__ = ["Report", "run_scenario", "verdict"]

FLOOR = 1e-12


def verdict(extrapolated: float, predicted: float, tolerance: float) -> bool:
    return abs(extrapolated - predicted) <= tolerance * max(predicted, FLOOR)


@dataclass
class Report:
    family: str
    p: float
    deltas: list
    estimates: list
    predicted: Optional[float]
    extrapolated: Optional[float]
    uncertainty: Optional[float]
    raw_smallest: Optional[float]
    rel_dev: Optional[float]
    verdict: str
    fingerprint: str
    model: str
    tolerance: float
    version: str = __version__
    cheeger_ratios: Optional[list] = None
    error: Optional[dict] = None
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def rows(self):
        for delta, est in zip(self.deltas, self.estimates):
            row = {"delta": delta, "value": est.value, "stderr": est.stderr, "n_samples": est.n_samples,
                   "method": est.method}
            if self.family == "rho0":
                row["s"] = 1.0 - delta
            yield row

    def summary(self) -> dict:
        out = {
            "record": "summary",
            "predicted": self.predicted,
            "extrapolated": self.extrapolated,
            "rel_dev": self.rel_dev,
            "verdict": self.verdict,
            "fingerprint": self.fingerprint,
            "uncertainty": self.uncertainty,
            "raw_smallest_delta_value": self.raw_smallest,
            "model": self.model,
            "tolerance": self.tolerance,
            "family": self.family,
            "p": self.p,
            "version": self.version,
        }
        if self.cheeger_ratios is not None:
            out["cheeger_ratios"] = self.cheeger_ratios
        if self.error is not None:
            out["error"] = self.error
        out.update(self.extra)
        return out


def run_scenario(config: ScenarioConfig) -> Report:
    """Evaluate the nonlocal energy on the delta grid and judge the extrapolated limit."""
    fp = config.fingerprint()
    base = dict(family=config.family, p=config.p, deltas=list(config.deltas), fingerprint=fp,
                model=config.model, tolerance=config.tolerance)
    estimates: list = []
    try:
        space, fmap, target = config.build()
        family = MollifierFamily(config.family, config.p, space)
        quad = config.quadrature_config()
        for i, delta in enumerate(config.deltas):
            estimates.append(nonlocal_energy(space, fmap, target, config.p, family, delta, quad,
                                             seed=config.seed * 1000 + i))
        fit = extrapolate([(d, e.value, e.stderr) for d, e in zip(config.deltas, estimates)], config.model)
        predicted = predicted_limit(space, fmap, target, config.p, family)
    except (ValueError, ArithmeticError, UnsupportedTargetError) as exc:
        return Report(estimates=estimates, predicted=None, extrapolated=None, uncertainty=None,
                      raw_smallest=None, rel_dev=None, verdict="error",
                      error={"type": type(exc).__name__, "message": str(exc)}, **base)
    rel = abs(fit.limit - predicted) / max(predicted, FLOOR)
    ratios = None
    if fmap.out_dim == 1 and target.kind == "euclidean":
        ref = cheeger_energy_smooth(space, fmap, config.p, target)
        if ref > 0:
            ratios = [e.value / ref for e in estimates]
    extra = {}
    if config.family == "rho0":
        extra["s_grid"] = [1.0 - d for d in config.deltas]
    return Report(estimates=estimates, predicted=predicted, extrapolated=fit.limit,
                  uncertainty=fit.uncertainty, raw_smallest=fit.raw_smallest,
                  rel_dev=rel if math.isfinite(rel) else None,
                  verdict="pass" if verdict(fit.limit, predicted, config.tolerance) else "fail",
                  cheeger_ratios=ratios, extra=extra, **base)
