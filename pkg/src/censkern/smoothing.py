"""Product kernels, bandwidth rules and the kernel density estimate."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .sampledata import CensoredSample

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

FAMILIES = ("gaussian", "epanechnikov")


def _gauss_log(u):
    return -0.5 * u * u - _LOG_SQRT_2PI


def _epan_log(u):
    with np.errstate(divide="ignore"):
        return np.where(np.abs(u) <= 1.0, np.log(0.75 * np.clip(1.0 - u * u, 0.0, None)), -np.inf)


def _gauss(u):
    return np.exp(-0.5 * u * u) / math.sqrt(2.0 * math.pi)


def _epan(u):
    return np.where(np.abs(u) <= 1.0, 0.75 * (1.0 - u * u), 0.0)


_ONE_D = {"gaussian": (_gauss, _gauss_log, 10.0), "epanechnikov": (_epan, _epan_log, 1.0)}


@dataclass(frozen=True)
class KernelSpec:
    """Product kernel ``K_d(u) = prod_j k(u_j)`` on R^d.

    ``family`` is ``"gaussian"`` or ``"epanechnikov"`` (the ``-product``
    suffix is accepted). Both families are Lipschitz, so ``gamma = 1``.
    """

    family: str = "gaussian"
    d: int = 1
    gamma: float = field(default=1.0)

    def __post_init__(self):
        fam = self.family.removesuffix("-product")
        if fam not in _ONE_D:
            raise ValueError(f"unknown kernel family {self.family!r}")
        if self.d < 1:
            raise ValueError("d must be >= 1")
        object.__setattr__(self, "family", fam)

    @property
    def truncation(self) -> float:
        """Half-width of a box outside which the kernel mass is negligible (< 1e-22)."""
        return _ONE_D[self.family][2]

    def _check(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if self.d == 1 and (u.ndim == 0 or u.shape[-1] != 1):
            u = u[..., None]
        if u.shape[-1] != self.d:
            raise ValueError(f"dimension mismatch: kernel has d={self.d}, got {u.shape[-1]}")
        return u

    def __call__(self, u):
        u = self._check(u)
        out = np.prod(_ONE_D[self.family][0](u), axis=-1)
        return float(out) if out.ndim == 0 else out

    def log(self, u):
        """``log K_d(u)``; ``-inf`` outside the support."""
        u = self._check(u)
        out = np.sum(_ONE_D[self.family][1](u), axis=-1)
        return float(out) if out.ndim == 0 else out


def kernel_eval(spec: KernelSpec, u):
    return spec(u)


@dataclass(frozen=True)
class BandwidthRule:
    """Deterministic bandwidth sequence.

    ``kind="fixed"`` returns ``value``; ``kind="optimal"`` returns
    ``value * (log n / n) ** (1 / (d + 2))``.
    """

    kind: str
    value: float

    def __post_init__(self):
        if self.kind not in ("fixed", "optimal"):
            raise ValueError("kind must be 'fixed' or 'optimal'")
        if not (self.value > 0 and math.isfinite(self.value)):
            raise ValueError("bandwidth parameter must be positive and finite")

    @classmethod
    def fixed(cls, h: float) -> "BandwidthRule":
        return cls("fixed", h)

    @classmethod
    def optimal(cls, c: float = 1.0) -> "BandwidthRule":
        return cls("optimal", c)

    def __call__(self, n: int, d: int = 1) -> float:
        return bandwidth_for(self, n, d)


def bandwidth_for(rule: BandwidthRule, n: int, d: int = 1) -> float:
    if n < 2:
        raise ValueError("bandwidth undefined for n < 2")
    if rule.kind == "fixed":
        return float(rule.value)
    return rule.value * (math.log(n) / n) ** (1.0 / (d + 2))


def covariates(sample) -> np.ndarray:
    """Covariate matrix of shape (n, d) from a sample or array."""
    if isinstance(sample, CensoredSample):
        return sample.x
    x = np.asarray(sample, dtype=float)
    return x[:, None] if x.ndim == 1 else x


def as_points(x, d: int) -> np.ndarray:
    """Evaluation points as an (m, d) array."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        x = x.reshape(1, 1)
    elif x.ndim == 1:
        x = x[:, None] if d == 1 else x[None, :]
    if x.shape[-1] != d:
        raise ValueError(f"dimension mismatch: data has d={d}, point has {x.shape[-1]}")
    return x


def kernel_matrix(spec: KernelSpec, X: np.ndarray, points: np.ndarray, h: float) -> np.ndarray:
    """``K_d((x_k - X_i) / h)`` for every point ``x_k`` (rows) and observation (cols)."""
    u = (points[:, None, :] - X[None, :, :]) / h
    return spec(u)


def density_estimate(sample, spec: KernelSpec, h: float, x):
    """Kernel density estimate ``(1 / (n h^d)) sum_i K_d((x - X_i) / h)``.

    Returns a float for a single point, an array for an (m, d) batch.
    """
    if not h > 0:
        raise ValueError("bandwidth must be positive")
    X = covariates(sample)
    n, d = X.shape
    if d != spec.d:
        raise ValueError(f"dimension mismatch: kernel has d={spec.d}, data has d={d}")
    scalar = np.ndim(x) == (0 if d == 1 else 1)
    pts = as_points(x, d)
    out = kernel_matrix(spec, X, pts, h).sum(axis=1) / (n * h**d)
    return float(out[0]) if scalar else out


# --- kernel admissibility -------------------------------------------------


@dataclass(frozen=True)
class KernelCheck:
    passed: bool
    value: float


@dataclass(frozen=True)
class KernelReport:
    integrates_to_one: KernelCheck
    first_moment_finite: KernelCheck
    square_integrable: KernelCheck
    lipschitz_gamma: KernelCheck
    bounded: KernelCheck
    coordinate_sum_square_moment: float

    @property
    def all_pass(self) -> bool:
        return all(
            c.passed
            for c in (
                self.integrates_to_one,
                self.first_moment_finite,
                self.square_integrable,
                self.lipschitz_gamma,
                self.bounded,
            )
        )


def _tensor_quadrature(radius: float, d: int, panels: int = 40, order: int = 10):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    per_axis = max(2, int(round(min(panels, (2e6 ** (1.0 / d)) / order))))
    edges = np.linspace(-radius, radius, per_axis + 1)
    half = np.diff(edges) / 2
    mid = (edges[:-1] + edges[1:]) / 2
    pts1 = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w1 = (half[:, None] * weights[None, :]).ravel()
    grids = np.meshgrid(*([pts1] * d), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    w = np.ones(pts.shape[0])
    for wg in np.meshgrid(*([w1] * d), indexing="ij"):
        w = w * wg.ravel()
    return pts, w


def verify_kernel_properties(spec, tol: float = 1e-6) -> KernelReport:
    """Numerically check the kernel admissibility conditions.

    ``spec`` is any kernel-like object exposing ``d``, ``gamma``,
    ``truncation`` (half-width of a box carrying all but negligible mass)
    and ``__call__`` on (..., d) arrays. Integrals use tensor Gauss-Legendre
    quadrature on the truncation box. The Lipschitz check compares the
    largest difference quotient at two resolutions along every axis: a
    finite, non-growing quotient passes.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    d, gamma, R = spec.d, spec.gamma, float(spec.truncation)
    pts, w = _tensor_quadrature(R, d)
    k = np.asarray(spec(pts), dtype=float)
    mass = float(np.sum(w * k))
    first = float(np.sum(w * np.abs(pts).sum(axis=1) * k))
    sq = float(np.sum(w * k * k))
    coord_sq = float(np.sum(w * pts.sum(axis=1) * k * k))

    rng = np.random.default_rng(0)
    offsets = np.vstack([np.zeros(d), rng.uniform(-R / 2, R / 2, size=(3, d))])
    quotients = []
    peak = 0.0
    for m in (2001, 200001):
        line = np.linspace(-R, R, m)
        q = 0.0
        for j in range(d):
            for off in offsets:
                p = np.tile(off, (m, 1))
                p[:, j] = line
                v = np.asarray(spec(p), dtype=float)
                peak = max(peak, float(np.max(np.abs(v))))
                step = (line[1] - line[0]) ** gamma
                q = max(q, float(np.max(np.abs(np.diff(v)))) / step)
        quotients.append(q)
    lip = quotients[-1]
    lip_ok = math.isfinite(lip) and lip <= 2.0 * quotients[0] + tol

    return KernelReport(
        integrates_to_one=KernelCheck(abs(mass - 1.0) <= tol, mass),
        first_moment_finite=KernelCheck(math.isfinite(first), first),
        square_integrable=KernelCheck(math.isfinite(sq) and math.isfinite(coord_sq), sq),
        lipschitz_gamma=KernelCheck(lip_ok, lip),
        bounded=KernelCheck(math.isfinite(peak), peak),
        coordinate_sum_square_moment=coord_sq,
    )
