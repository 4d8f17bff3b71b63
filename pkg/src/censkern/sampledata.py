"""Containers for right-censored regression samples and evaluation grids.

A sample holds the observed triplets ``(X_i, T_i, delta_i)`` with
``T_i = min(Y_i, C_i)`` and ``delta_i = 1{Y_i <= C_i}``. Synthetic samples
may also carry the latent pair ``(Y_i, C_i)``; estimators never read it.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Sequence

import numpy as np


class DataError(ValueError):
    """Raised when an input file cannot be turned into a sample.

    ``row`` is the 1-based data row (header excluded) when known.
    """

    def __init__(self, message: str, row: int | None = None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class CensoredObservation(NamedTuple):
    x: tuple
    t: float
    delta: int
    latent: tuple | None = None


def _frozen(a, dtype=float) -> np.ndarray:
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class CensoredSample:
    """Observed censored data in temporal order.

    Parameters
    ----------
    x : array_like, shape (n, d) or (n,)
        Covariates. A 1-D array is read as ``d = 1``.
    t : array_like, shape (n,)
        Observed times ``min(Y, C)``.
    delta : array_like, shape (n,)
        Indicators ``1{Y <= C}``.
    y, c : array_like, optional
        Latent response and censoring times (synthetic data only).
    """

    x: np.ndarray
    t: np.ndarray
    delta: np.ndarray
    y: np.ndarray | None = None
    c: np.ndarray | None = None
    d: int = field(init=False)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        if x.ndim != 2:
            raise ValueError("x must be 1-D or 2-D")
        n = x.shape[0]
        t = np.asarray(self.t, dtype=float).reshape(-1)
        delta = np.asarray(self.delta).reshape(-1)
        if t.shape[0] != n or delta.shape[0] != n:
            raise ValueError("x, t and delta must have the same length")
        if (self.y is None) != (self.c is None):
            raise ValueError("latent y and c must be given together")
        object.__setattr__(self, "x", _frozen(x))
        object.__setattr__(self, "t", _frozen(t))
        object.__setattr__(self, "delta", _frozen(delta, dtype=np.int64))
        object.__setattr__(self, "d", int(x.shape[1]))
        if self.y is not None:
            y = np.asarray(self.y, dtype=float).reshape(-1)
            c = np.asarray(self.c, dtype=float).reshape(-1)
            if y.shape[0] != n or c.shape[0] != n:
                raise ValueError("latent arrays must match the sample length")
            object.__setattr__(self, "y", _frozen(y))
            object.__setattr__(self, "c", _frozen(c))

    @classmethod
    def from_observations(cls, observations: Sequence[CensoredObservation], d: int | None = None):
        obs = list(observations)
        if d is None:
            d = len(obs[0].x) if obs else 1
        x = np.array([o.x for o in obs], dtype=float).reshape(len(obs), d)
        has_latent = [o.latent is not None for o in obs]
        if any(has_latent) and not all(has_latent):
            raise ValueError("latent fields must be present on all observations or none")
        y = c = None
        if obs and all(has_latent):
            y = [o.latent[0] for o in obs]
            c = [o.latent[1] for o in obs]
        return cls(x, [o.t for o in obs], [o.delta for o in obs], y, c)

    def __len__(self) -> int:
        return self.t.shape[0]

    @property
    def n(self) -> int:
        return len(self)

    @property
    def has_latent(self) -> bool:
        return self.y is not None

    def __iter__(self) -> Iterator[CensoredObservation]:
        for i in range(len(self)):
            latent = None
            if self.has_latent:
                latent = (float(self.y[i]), float(self.c[i]))
            yield CensoredObservation(
                tuple(float(v) for v in self.x[i]), float(self.t[i]), int(self.delta[i]), latent
            )

    @property
    def observations(self) -> list[CensoredObservation]:
        return list(self)

    @property
    def censored_fraction(self) -> float:
        return float(np.mean(self.delta == 0)) if len(self) else math.nan


class Violation(NamedTuple):
    index: int
    rule: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


def validate_sample(sample: CensoredSample) -> ValidationReport:
    """Check every observation against the data-model invariants.

    Violations are returned, never raised. Each names the offending
    0-based index and the broken rule.
    """
    out = []
    for i in range(len(sample)):
        x = sample.x[i]
        t = sample.t[i]
        delta = sample.delta[i]
        if x.shape[0] != sample.d or not np.all(np.isfinite(x)):
            out.append(Violation(i, "x must have d finite coordinates"))
        if not math.isfinite(t):
            out.append(Violation(i, "t not finite"))
        if delta not in (0, 1):
            out.append(Violation(i, "delta not in {0,1}"))
        if sample.has_latent:
            y, c = sample.y[i], sample.c[i]
            if t != min(y, c):
                out.append(Violation(i, "t ≠ min(y,c)"))
            if delta in (0, 1) and bool(delta) != bool(y <= c):
                out.append(Violation(i, "delta ≠ 1{y ≤ c}"))
    return ValidationReport(tuple(out))


@dataclass(frozen=True, eq=False)
class EvaluationGrid:
    """Rectangular grid over the compact set ``[lower, upper]``.

    ``axes`` holds one strictly increasing coordinate vector per dimension;
    ``points`` is their Cartesian product, last axis varying fastest.
    """

    axes: tuple
    lower: tuple
    upper: tuple

    def __post_init__(self):
        axes = tuple(_frozen(np.atleast_1d(a)) for a in self.axes)
        lower = tuple(float(v) for v in np.atleast_1d(self.lower))
        upper = tuple(float(v) for v in np.atleast_1d(self.upper))
        if not (len(axes) == len(lower) == len(upper)) or not axes:
            raise ValueError("axes, lower and upper must share the dimension")
        for a, lo, hi in zip(axes, lower, upper):
            if a.size == 0:
                raise ValueError("grid axes must be non-empty")
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise ValueError("grid bounds must be finite")
            if np.any(np.diff(a) <= 0):
                raise ValueError("grid axes must be strictly increasing")
            if a[0] < lo or a[-1] > hi:
                raise ValueError("grid points must lie inside [lower, upper]")
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def linspace(cls, lower: float, upper: float, num: int) -> "EvaluationGrid":
        if num < 1:
            raise ValueError("num must be >= 1")
        return cls((np.linspace(lower, upper, num),), (lower,), (upper,))

    @classmethod
    def lattice(cls, lower, upper, num) -> "EvaluationGrid":
        lower = np.atleast_1d(lower)
        upper = np.atleast_1d(upper)
        num = np.broadcast_to(num, lower.shape)
        axes = tuple(np.linspace(lo, hi, k) for lo, hi, k in zip(lower, upper, num))
        return cls(axes, lower, upper)

    @property
    def d(self) -> int:
        return len(self.axes)

    @property
    def points(self) -> np.ndarray:
        return np.array(list(itertools.product(*self.axes)), dtype=float).reshape(-1, self.d)

    def __len__(self) -> int:
        return int(np.prod([a.size for a in self.axes]))


# --- CSV ------------------------------------------------------------------


def format_float(v) -> str:
    """Shortest decimal string that round-trips to the same double."""
    return repr(float(v))


def write_sample_csv(sample: CensoredSample, fh) -> None:
    """Write ``x1,...,xd,t,delta[,y,c]`` rows to the text stream ``fh``."""
    header = [f"x{j + 1}" for j in range(sample.d)] + ["t", "delta"]
    if sample.has_latent:
        header += ["y", "c"]
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(header)
    for i in range(len(sample)):
        row = [format_float(v) for v in sample.x[i]]
        row += [format_float(sample.t[i]), str(int(sample.delta[i]))]
        if sample.has_latent:
            row += [format_float(sample.y[i]), format_float(sample.c[i])]
        writer.writerow(row)


def _parse_float(text: str, row: int, col: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise DataError(f"column {col!r}: cannot parse {text!r} as a number", row) from None


def read_sample_csv(fh) -> CensoredSample:
    """Parse a sample CSV from a text stream. ``#`` lines are skipped.

    Raises
    ------
    DataError
        On a malformed header or an unparseable row. Invariant violations
        (e.g. ``delta = 2``) are *not* raised here; use
        :func:`validate_sample`.
    """
    if isinstance(fh, str):
        fh = io.StringIO(fh)
    lines = (line for line in fh if not line.lstrip().startswith("#"))
    reader = csv.reader(lines)
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise DataError("empty file") from None
    if "t" not in header or "delta" not in header:
        raise DataError("header must contain 't' and 'delta' columns")
    xcols = [h for h in header if h.startswith("x") and h[1:].isdigit()]
    d = len(xcols)
    if d == 0 or xcols != [f"x{j + 1}" for j in range(d)]:
        raise DataError("header must start with covariate columns x1,...,xd")
    latent = "y" in header and "c" in header
    idx = {h: k for k, h in enumerate(header)}
    xs, ts, ds, ys, cs = [], [], [], [], []
    for r, rec in enumerate(reader, start=1):
        if not rec or all(not v.strip() for v in rec):
            continue
        if len(rec) != len(header):
            raise DataError(f"expected {len(header)} fields, got {len(rec)}", r)
        xs.append([_parse_float(rec[idx[c]], r, c) for c in xcols])
        ts.append(_parse_float(rec[idx["t"]], r, "t"))
        dv = _parse_float(rec[idx["delta"]], r, "delta")
        if not math.isfinite(dv) or dv != int(dv):
            raise DataError(f"delta not in {{0,1}} (got {rec[idx['delta']]!r})", r)
        ds.append(int(dv))
        if latent:
            ys.append(_parse_float(rec[idx["y"]], r, "y"))
            cs.append(_parse_float(rec[idx["c"]], r, "c"))
    x = np.array(xs, dtype=float).reshape(len(xs), d)
    if latent:
        return CensoredSample(x, ts, ds, ys, cs)
    return CensoredSample(x, ts, ds)
