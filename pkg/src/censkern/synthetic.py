"""Strongly mixing AR(1)-driven censored regression models with known truth.

The covariate path is the stationary Gaussian AR(1)

    X_i = rho X_{i-1} + sqrt(1 - rho^2) eps_i,   X_0 ~ N(0, 1),

which is geometrically strongly mixing. Responses follow one of three
families and are censored by independent Exponential(lam) times:

* ``linear``:    Y_i = X_{i+1},                m(x) = rho x
* ``sinus``:     Y_i = sin(pi X_i / 2),        m(x) = sin(pi x / 2)
* ``parabolic``: Y_i = 5/12 X_{i+1}^2 - 2,     m(x) = 5/12 rho^2 x^2 + 5/12 (1 - rho^2) - 2

Censoring times are non-negative, so negative responses are never censored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import signal, stats

from .sampledata import CensoredSample

FAMILIES = ("linear", "sinus", "parabolic")

# substream indices
_INIT, _NOISE, _CENSOR = 0, 1, 2


@dataclass(frozen=True)
class ModelSpec:
    """Data-generating model.

    ``censored=False`` replaces every censoring time by ``+inf`` (no
    censoring); the analytic censoring survival is then 1 everywhere.
    """

    family: str = "linear"
    rho: float = 0.9
    lam: float = 1.5
    n: int = 100
    seed: int = 0
    censored: bool = True

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown model family {self.family!r}")
        if not 0 < self.rho < 1:
            raise ValueError("rho must lie in (0, 1)")
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise ValueError("lam must be positive and finite")
        if self.n < 2:
            raise ValueError("n must be >= 2")

    def with_(self, **changes) -> "ModelSpec":
        return replace(self, **changes)


def _streams(seed, count=3):
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


def _ar1_path(n, rho, init_rng, noise_rng):
    x0 = init_rng.standard_normal()
    eps = noise_rng.standard_normal(n + 1)
    scale = math.sqrt(1.0 - rho * rho)
    path, _ = signal.lfilter([scale], [1.0, -rho], eps, zi=[rho * x0])
    return path


def generate_covariate_path(n: int, rho: float, seed) -> np.ndarray:
    """Return ``X_1, ..., X_{n+1}`` of the stationary AR(1) path.

    ``rho = 0`` gives i.i.d. standard normal draws. Deterministic in ``seed``.
    """
    if not 0 <= rho < 1:
        raise ValueError("rho must lie in [0, 1)")
    if n < 1:
        raise ValueError("n must be >= 1")
    rngs = _streams(seed)
    return _ar1_path(n, rho, rngs[_INIT], rngs[_NOISE])


def _responses(family, path, n):
    x = path[:n]
    nxt = path[1 : n + 1]
    if family == "linear":
        return x, nxt.copy()
    if family == "sinus":
        return x, np.sin(0.5 * math.pi * x)
    return x, (5.0 / 12.0) * nxt**2 - 2.0


def generate_dataset(model: ModelSpec) -> CensoredSample:
    """Draw a censored sample of size ``model.n`` with latent ``(y, c)``."""
    rngs = _streams(model.seed)
    path = _ar1_path(model.n, model.rho, rngs[_INIT], rngs[_NOISE])
    x, y = _responses(model.family, path, model.n)
    if model.censored:
        c = rngs[_CENSOR].exponential(1.0 / model.lam, size=model.n)
    else:
        c = np.full(model.n, np.inf)
    t = np.minimum(y, c)
    delta = (y <= c).astype(np.int64)
    return CensoredSample(x, t, delta, y, c)


def true_regression(model: ModelSpec, x):
    x = np.asarray(x, dtype=float)
    if model.family == "linear":
        out = model.rho * x
    elif model.family == "sinus":
        out = np.sin(0.5 * math.pi * x)
    else:
        r2 = model.rho**2
        out = (5.0 / 12.0) * r2 * x**2 + (5.0 / 12.0) * (1.0 - r2) - 2.0
    return float(out) if out.ndim == 0 else out


def true_density(x):
    """Stationary marginal density of the covariate (standard normal)."""
    out = stats.norm.pdf(x)
    return float(out) if np.ndim(out) == 0 else out


def true_numerator(model: ModelSpec, x):
    """``r1(x) = m(x) * ell(x)``."""
    out = np.asarray(true_regression(model, x)) * np.asarray(true_density(x))
    return float(out) if out.ndim == 0 else out


def true_censoring_survival(lam: float, t):
    """``P(C > t)`` for ``C ~ Exponential(lam)``: ``exp(-lam t)`` for ``t >= 0``, else 1."""
    if not lam > 0:
        raise ValueError("lam must be positive")
    t = np.asarray(t, dtype=float)
    out = np.where(t < 0, 1.0, np.exp(-lam * np.maximum(t, 0.0)))
    return float(out) if out.ndim == 0 else out


def censoring_survival_for(model: ModelSpec):
    """Analytic censoring survival of ``model`` as a vectorised callable."""
    if not model.censored:
        return lambda t: np.ones_like(np.asarray(t, dtype=float))
    lam = model.lam
    return lambda t: true_censoring_survival(lam, t)


def censored_fraction_linear(lam: float) -> float:
    """``P(C < Y)`` for ``Y ~ N(0, 1)`` and ``C ~ Exp(lam)``: ``Phi(0) - exp(lam^2/2) Phi(-lam)``."""
    return 0.5 - math.exp(0.5 * lam * lam) * stats.norm.cdf(-lam)
