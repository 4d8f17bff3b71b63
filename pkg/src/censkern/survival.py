"""Product-limit estimation of the censoring survival function.

The estimator is built from the order statistics of the observed times
``T`` with concomitant indicators. At the ``i``-th order statistic the
factor ``1 - (1 - delta_(i)) / (n - i + 1)`` is applied, so only censored
observations (``delta = 0``) move the curve. At tied times, observations
with ``delta = 1`` are ordered before those with ``delta = 0``. The curve
is forced to 0 at and beyond the largest observation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .sampledata import CensoredSample


@dataclass(frozen=True, eq=False)
class SurvivalCurve:
    """Right-continuous, non-increasing step function with values in [0, 1].

    Attributes
    ----------
    jump_times : ndarray
        Strictly increasing times at which the value changes.
    values : ndarray
        Value on ``[jump_times[k], jump_times[k+1])``. The value before the
        first jump is 1.
    sample_size : int
    top_time : float
        Largest observation; the curve is 0 on ``[top_time, inf)``.
    """

    jump_times: np.ndarray
    values: np.ndarray
    sample_size: int
    top_time: float

    def __post_init__(self):
        jt = np.array(self.jump_times, dtype=float).reshape(-1)
        v = np.array(self.values, dtype=float).reshape(-1)
        if jt.shape != v.shape:
            raise ValueError("jump_times and values must have the same length")
        if np.any(np.diff(jt) <= 0):
            raise ValueError("jump_times must be strictly increasing")
        if np.any((v < 0) | (v > 1)) or np.any(np.diff(np.r_[1.0, v]) > 0):
            raise ValueError("values must be non-increasing in [0, 1]")
        jt.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "jump_times", jt)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "top_time", float(self.top_time))

    def __call__(self, t, side: str = "right"):
        """Evaluate at ``t``; ``side='left'`` gives the left limit ``G(t-)``."""
        t = np.asarray(t, dtype=float)
        if side == "right":
            k = np.searchsorted(self.jump_times, t, side="right")
            past_top = t >= self.top_time
        elif side == "left":
            k = np.searchsorted(self.jump_times, t, side="left")
            past_top = t > self.top_time
        else:
            raise ValueError("side must be 'right' or 'left'")
        vals = np.r_[1.0, self.values][k]
        out = np.where(past_top, 0.0, vals)
        return float(out) if out.ndim == 0 else out


def kaplan_meier_censoring(t, delta) -> SurvivalCurve:
    """Product-limit estimate of the censoring survival from raw arrays."""
    t = np.asarray(t, dtype=float).reshape(-1)
    delta = np.asarray(delta).reshape(-1)
    n = t.shape[0]
    if n == 0:
        raise ValueError("empty sample")
    if not np.all(np.isfinite(t)):
        raise ValueError("invalid time")
    order = np.lexsort((-delta, t))
    ts = t[order]
    ds = delta[order]
    at_risk = np.arange(n, 0, -1, dtype=float)
    factors = 1.0 - (1.0 - ds) / at_risk
    cum = np.cumprod(factors)
    # value at a distinct time is the product through the last tied index
    last_of_group = np.r_[ts[1:] != ts[:-1], True]
    times = ts[last_of_group]
    vals = cum[last_of_group]
    vals[-1] = 0.0
    prev = np.r_[1.0, vals[:-1]]
    change = vals != prev
    return SurvivalCurve(times[change], vals[change], n, ts[-1])


def km_censoring_survival(sample: CensoredSample) -> SurvivalCurve:
    """Kaplan-Meier estimate of ``P(C > t)`` from a censored sample.

    Raises
    ------
    ValueError
        ``"empty sample"`` or ``"invalid time"``.
    """
    return kaplan_meier_censoring(sample.t, sample.delta)


def survival_at(curve: SurvivalCurve, t, side: str = "right"):
    return curve(t, side=side)


Reference = Union[SurvivalCurve, Callable]


def _eval_ref(reference, t, side):
    if isinstance(reference, SurvivalCurve):
        return reference(t, side=side)
    return np.asarray(reference(np.asarray(t, dtype=float)), dtype=float)


def km_sup_distance(curve: SurvivalCurve, reference: Reference, tau: float, *, lower=None, refine: int = 16) -> float:
    """Uniform distance ``sup_{t <= tau} |curve(t) - reference(t)|``.

    For a step-function ``reference`` the supremum is exact: both curves are
    evaluated (right values and left limits) at the union of their jump
    points up to ``tau``. A callable ``reference`` is taken to be continuous;
    it is evaluated at every knot and at ``refine`` interior points of each
    constant segment of ``curve``, which is exact for monotone references.

    ``lower`` bounds the evaluation range from below; it defaults to
    ``min(0, first knot)``, where survival functions of non-negative
    variables equal 1.
    """
    tau = float(tau)
    if not math.isfinite(tau):
        raise ValueError("tau must be finite")
    knots = curve.jump_times
    if curve.top_time <= tau:
        knots = np.r_[knots, curve.top_time]
    if isinstance(reference, SurvivalCurve):
        knots = np.r_[knots, reference.jump_times]
        if reference.top_time <= tau:
            knots = np.r_[knots, reference.top_time]
    knots = np.unique(np.r_[knots[knots <= tau], tau])
    if lower is None:
        lower = min(0.0, float(knots[0]))
    knots = knots[knots >= lower]
    edges = np.r_[lower, knots]

    right = np.abs(curve(edges, "right") - _eval_ref(reference, edges, "right"))
    left = np.abs(curve(edges, "left") - _eval_ref(reference, edges, "left"))
    best = max(float(right.max()), float(left.max()))
    if refine > 0 and not isinstance(reference, SurvivalCurve) and edges.size > 1:
        frac = np.arange(1, refine + 1) / (refine + 1)
        a, b = edges[:-1], edges[1:]
        inner = (a[:, None] + (b - a)[:, None] * frac[None, :]).ravel()
        gap = np.abs(curve(inner, "right") - _eval_ref(reference, inner, "right"))
        best = max(best, float(gap.max()))
    return best
