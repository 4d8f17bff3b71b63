"""Censoring-corrected Nadaraya-Watson regression.

Each uncensored response is reweighted by the inverse of the censoring
survival at its observed time, ``delta_i T_i / G(T_i)``, and smoothed with
kernel weights. ``G`` is either known (``GSource.oracle``), estimated by
Kaplan-Meier (``GSource.km``), or identically 1 (``GSource.none``).

With the Kaplan-Meier source the curve is read at its left limit
``G_n(T_i-)`` by default. The right-continuous value is 0 at the largest
observation, which would make that term's divisor vanish.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .sampledata import CensoredSample
from .smoothing import KernelSpec, as_points, kernel_matrix
from .survival import SurvivalCurve, km_censoring_survival

DENSITY_FLOOR = 1e-8
UNDEFINED_REASON = "density below threshold"


@dataclass(frozen=True, eq=False)
class GSource:
    """Where the censoring survival used in the weights comes from."""

    kind: str
    func: Callable | None = None
    curve: SurvivalCurve | None = None
    side: str = "left"

    def __post_init__(self):
        if self.kind not in ("none", "oracle", "km"):
            raise ValueError(f"unknown g source {self.kind!r}")
        if self.kind == "oracle" and self.func is None:
            raise ValueError("oracle source needs a survival function")
        if self.side not in ("left", "right"):
            raise ValueError("side must be 'left' or 'right'")

    @classmethod
    def none(cls) -> "GSource":
        return cls("none")

    @classmethod
    def oracle(cls, func: Callable) -> "GSource":
        return cls("oracle", func=func)

    @classmethod
    def km(cls, curve: SurvivalCurve | None = None, side: str = "left") -> "GSource":
        """Kaplan-Meier source; the curve is fitted on the sample when omitted."""
        return cls("km", curve=curve, side=side)

    def values_at(self, sample: CensoredSample) -> np.ndarray:
        """Divisors ``G(T_i)`` for every observation."""
        t = sample.t
        if self.kind == "none":
            return np.ones_like(t)
        if self.kind == "km":
            curve = self.curve if self.curve is not None else km_censoring_survival(sample)
            return np.asarray(curve(t, side=self.side), dtype=float)
        g = np.broadcast_to(np.asarray(self.func(t), dtype=float), t.shape)
        if not np.all((g >= 0) & (g <= 1)):
            raise ValueError("oracle survival must map into [0, 1]")
        order = np.argsort(t, kind="stable")
        if np.any(np.diff(g[order]) > 1e-12):
            raise ValueError("oracle survival must be non-increasing")
        return np.array(g)


def as_gsource(g) -> GSource:
    if isinstance(g, GSource):
        return g
    if g in ("none", "km"):
        return GSource(g)
    if callable(g):
        return GSource.oracle(g)
    raise ValueError(f"cannot interpret {g!r} as a g source")


class WeightVector(NamedTuple):
    weights: np.ndarray
    defined: bool


class NumeratorValue(NamedTuple):
    value: float
    dropped_terms: int


@dataclass(frozen=True)
class PointEstimate:
    """Estimate at one point. ``m`` is NaN when the density is at or below the floor."""

    x: tuple
    ell: float
    r1: float
    m: float
    dropped_terms: int = 0
    reason: str | None = None

    @property
    def defined(self) -> bool:
        return self.reason is None


def _check_h(h):
    if not h > 0:
        raise ValueError("bandwidth must be positive")


def nw_weights(sample: CensoredSample, spec: KernelSpec, h: float, x) -> WeightVector:
    """Nadaraya-Watson weights ``K((x - X_i)/h) / sum_j K((x - X_j)/h)``.

    Computed from log-kernel values shifted by their maximum, so Gaussian
    weights stay defined far from the data. Undefined (all zero) only when
    no observation lies in the kernel support.
    """
    _check_h(h)
    pt = as_points(x, sample.d)
    if pt.shape[0] != 1:
        raise ValueError("nw_weights takes a single point")
    logk = spec.log((pt[0][None, :] - sample.x) / h)
    top = np.max(logk)
    if not np.isfinite(top):
        return WeightVector(np.zeros(len(sample)), False)
    w = np.exp(logk - top)
    return WeightVector(w / w.sum(), True)


def _reweighted_responses(sample: CensoredSample, g: GSource):
    """``delta_i T_i / G(T_i)`` with zero-divisor terms dropped."""
    gbar = g.values_at(sample)
    uncensored = sample.delta == 1
    drop = uncensored & (gbar <= 0)
    keep = uncensored & ~drop
    z = np.zeros(len(sample))
    z[keep] = sample.t[keep] / gbar[keep]
    return z, int(drop.sum())


def _fit_points(sample, spec, h, points, z):
    n, d = sample.x.shape
    if spec.d != d:
        raise ValueError(f"dimension mismatch: kernel has d={spec.d}, data has d={d}")
    K = kernel_matrix(spec, sample.x, points, h)
    scale = n * h**d
    ell = K.sum(axis=1) / scale
    r1 = (K * z[None, :]).sum(axis=1) / scale
    return ell, r1


def censoring_adjusted_numerator(sample: CensoredSample, spec: KernelSpec, h: float, x, g="km") -> NumeratorValue:
    """``(1 / (n h^d)) sum_i delta_i T_i / G(T_i) K_d((x - X_i) / h)``.

    Terms whose divisor is 0 are dropped and counted.
    """
    _check_h(h)
    g = as_gsource(g)
    z, dropped = _reweighted_responses(sample, g)
    pt = as_points(x, sample.d)
    _, r1 = _fit_points(sample, spec, h, pt, z)
    return NumeratorValue(float(r1[0]), dropped)


def _estimates(points, ell, r1, dropped):
    out = []
    for p, e, r in zip(points, ell, r1):
        xp = tuple(float(v) for v in p)
        if e > DENSITY_FLOOR:
            out.append(PointEstimate(xp, float(e), float(r), float(r / e), dropped))
        else:
            out.append(PointEstimate(xp, float(e), float(r), math.nan, dropped, UNDEFINED_REASON))
    return out


def regression_estimate(sample: CensoredSample, spec: KernelSpec, h: float, x, g="km") -> PointEstimate:
    """Ratio estimate ``m(x) = r1(x) / ell(x)`` at a single point."""
    _check_h(h)
    g = as_gsource(g)
    pt = as_points(x, sample.d)
    if pt.shape[0] != 1:
        raise ValueError("regression_estimate takes a single point; use estimate_on_grid")
    z, dropped = _reweighted_responses(sample, g)
    ell, r1 = _fit_points(sample, spec, h, pt, z)
    return _estimates(pt, ell, r1, dropped)[0]


def estimate_on_grid(sample: CensoredSample, spec: KernelSpec, h: float, grid, g="km") -> list[PointEstimate]:
    """Pointwise estimates over an :class:`EvaluationGrid` (or an array of points).

    The Kaplan-Meier curve, when needed, is fitted once and shared by all
    points; every result equals the corresponding single-point call.
    """
    _check_h(h)
    g = as_gsource(g)
    if g.kind == "km" and g.curve is None:
        g = GSource.km(km_censoring_survival(sample), side=g.side)
    pts = grid.points if hasattr(grid, "points") else as_points(grid, sample.d)
    if pts.shape[0] == 0:
        raise ValueError("grid must be non-empty")
    z, dropped = _reweighted_responses(sample, g)
    ell, r1 = _fit_points(sample, spec, h, pts, z)
    return _estimates(pts, ell, r1, dropped)
