"""Monte Carlo study of the uniform error of the censored kernel estimator.

Every replication draws a fresh dataset from an independent seed derived
from ``(master_seed, n, replication)``, so results do not depend on how
replications are scheduled across worker processes.
"""

from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .regression import GSource, PointEstimate, estimate_on_grid
from .sampledata import EvaluationGrid, format_float, validate_sample
from .smoothing import BandwidthRule, KernelSpec, bandwidth_for
from .survival import km_censoring_survival
from .synthetic import ModelSpec, censoring_survival_for, generate_dataset, true_regression

log = logging.getLogger(__name__)

MAX_FAILURE_FRACTION = 0.02


class MonteCarloError(RuntimeError):
    pass


# --- sup error and rates -------------------------------------------------


@dataclass(frozen=True)
class SupError:
    sup: float
    undefined_count: int


def sup_error(estimates: Sequence[PointEstimate], truth) -> SupError:
    """Largest absolute error over the defined estimates.

    ``truth`` is a :class:`ModelSpec` or a callable evaluated on the grid
    coordinates (1-D array for ``d = 1``, otherwise an (m, d) array).
    """
    defined = [e for e in estimates if e.defined]
    undefined = len(estimates) - len(defined)
    if not defined:
        raise ValueError("no defined estimates")
    xs = np.array([e.x for e in defined], dtype=float)
    if xs.shape[1] == 1:
        xs = xs[:, 0]
    if isinstance(truth, ModelSpec):
        target = true_regression(truth, xs)
    else:
        target = truth(xs)
    m = np.array([e.m for e in defined])
    return SupError(float(np.max(np.abs(m - np.asarray(target, dtype=float)))), undefined)


def optimal_rate(n, d: int = 1):
    """``(log n / n) ** (1 / (d + 2))``."""
    n = np.asarray(n, dtype=float)
    return (np.log(n) / n) ** (1.0 / (d + 2))


def general_rate(n, h, d: int = 1):
    """``max(sqrt(log n / (n h^d)), h)``."""
    n = np.asarray(n, dtype=float)
    h = np.asarray(h, dtype=float)
    return np.maximum(np.sqrt(np.log(n) / (n * h**d)), h)


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    r_squared: float


def fit_log_log(errors, rates) -> RateFit:
    """Ordinary least squares of ``log(errors)`` on ``log(rates)``."""
    x = np.log(np.asarray(rates, dtype=float))
    y = np.log(np.asarray(errors, dtype=float))
    if x.size < 3 or np.unique(x).size < 3:
        raise ValueError("need at least 3 distinct points to fit a rate")
    xc = x - x.mean()
    slope = float(np.dot(xc, y - y.mean()) / np.dot(xc, xc))
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (intercept + slope * x)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum(resid**2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else (1.0 if ss_res == 0 else math.nan)
    return RateFit(slope, intercept, r2)


# --- configuration and report ---------------------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    """Monte Carlo design. ``model.n`` and ``model.seed`` are overridden per run."""

    model: ModelSpec = field(default_factory=ModelSpec)
    n_values: tuple = (50, 100, 300)
    replications: int = 100
    grid: EvaluationGrid = field(default_factory=lambda: EvaluationGrid.linspace(-1.5, 1.5, 61))
    kernel: KernelSpec = field(default_factory=KernelSpec)
    bandwidth: BandwidthRule = field(default_factory=BandwidthRule.optimal)
    g_sources: tuple = ("km", "oracle")
    master_seed: int = 0

    def __post_init__(self):
        nv = tuple(int(n) for n in self.n_values)
        if not nv or any(b <= a for a, b in zip(nv, nv[1:])):
            raise ValueError("n_values must be non-empty and strictly ascending")
        if any(n < 2 for n in nv):
            raise ValueError("every n must be >= 2")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        gs = tuple(self.g_sources)
        if not gs or any(g not in ("km", "oracle", "none") for g in gs):
            raise ValueError("g_sources must be a non-empty subset of {km, oracle, none}")
        if self.grid.d != self.kernel.d:
            raise ValueError("grid and kernel dimensions differ")
        object.__setattr__(self, "n_values", nv)
        object.__setattr__(self, "g_sources", gs)

    def to_dict(self) -> dict:
        return {
            "model": {k: v for k, v in asdict(self.model).items() if k not in ("n", "seed")},
            "n_values": list(self.n_values),
            "replications": self.replications,
            "grid": {
                "lower": list(self.grid.lower),
                "upper": list(self.grid.upper),
                "points": [a.size for a in self.grid.axes],
            },
            "kernel": {"family": self.kernel.family, "d": self.kernel.d, "gamma": self.kernel.gamma},
            "bandwidth": {"kind": self.bandwidth.kind, "value": self.bandwidth.value},
            "g_sources": list(self.g_sources),
            "master_seed": self.master_seed,
        }


def replication_seed(master_seed: int, n: int, rep: int) -> int:
    """64-bit seed for one replication, independent of execution order."""
    state = np.random.SeedSequence([master_seed, n, rep]).generate_state(2, np.uint32)
    return int(state[0]) << 32 | int(state[1])


@dataclass
class SourceSummary:
    mean: float
    median: float
    max: float
    undefined_total: int
    replications_ok: int


@dataclass
class ErrorReport:
    """Monte Carlo results.

    ``raw`` holds one record per (n, replication, g source); every summary
    statistic is recomputable from it.
    """

    config: dict
    n_values: list
    bandwidths: dict
    summaries: dict
    censored_fraction: dict
    oracle_gap: dict
    raw: list
    gaps: list
    failures: list
    slope_fit: dict | None = None

    def raw_errors(self, n: int, g_source: str) -> np.ndarray:
        return np.array([r["sup_error"] for r in self.raw if r["n"] == n and r["g_source"] == g_source])

    def medians(self, g_source: str = "km") -> np.ndarray:
        return np.array([self.summaries[n][g_source].median for n in self.n_values])

    def to_dict(self, include_raw: bool = False) -> dict:
        d = self.config["kernel"]["d"]
        per_n = []
        for n in self.n_values:
            h = self.bandwidths[n]
            per_n.append(
                {
                    "n": n,
                    "h": h,
                    "optimal_rate": float(optimal_rate(n, d)),
                    "general_rate": float(general_rate(n, h, d)),
                    "censored_fraction_mean": self.censored_fraction[n],
                    "oracle_gap_median": self.oracle_gap.get(n),
                    "sources": {g: asdict(s) for g, s in self.summaries[n].items()},
                }
            )
        out = {"config": self.config, "per_n": per_n, "slope_fit": self.slope_fit, "failures": self.failures}
        if include_raw:
            out["raw"] = self.raw
        return out

    def to_json(self, include_raw: bool = False) -> str:
        return json.dumps(self.to_dict(include_raw), indent=2, sort_keys=True, allow_nan=True) + "\n"

    def raw_csv(self) -> str:
        lines = ["n,rep,g_source,sup_error,undefined_count"]
        for r in self.raw:
            lines.append(f"{r['n']},{r['rep']},{r['g_source']},{format_float(r['sup_error'])},{r['undefined_count']}")
        return "\n".join(lines) + "\n"


# --- execution --------------------------------------------------------------


def _g_source(name: str, model: ModelSpec, sample) -> GSource:
    if name == "km":
        return GSource.km(km_censoring_survival(sample))
    if name == "oracle":
        return GSource.oracle(censoring_survival_for(model))
    return GSource.none()


def run_replication(config: ExperimentConfig, n: int, rep: int) -> dict:
    """One dataset, every configured g source. Errors are returned, not raised."""
    seed = replication_seed(config.master_seed, n, rep)
    try:
        model = config.model.with_(n=n, seed=seed)
        sample = generate_dataset(model)
        report = validate_sample(sample)
        if not report.ok:
            raise ValueError(f"invalid sample: {report.violations[0]}")
        h = bandwidth_for(config.bandwidth, n, config.kernel.d)
        fits = {}
        errors = {}
        for name in config.g_sources:
            est = estimate_on_grid(sample, config.kernel, h, config.grid, _g_source(name, model, sample))
            fits[name] = est
            errors[name] = sup_error(est, model)
        gap = None
        if "km" in fits and "oracle" in fits:
            a = np.array([e.m for e in fits["km"]])
            b = np.array([e.m for e in fits["oracle"]])
            ok = ~(np.isnan(a) | np.isnan(b))
            gap = float(np.max(np.abs(a[ok] - b[ok]))) if ok.any() else math.nan
        return {
            "n": n,
            "rep": rep,
            "seed": seed,
            "ok": True,
            "errors": {k: (v.sup, v.undefined_count) for k, v in errors.items()},
            "censored_fraction": sample.censored_fraction,
            "gap": gap,
        }
    except Exception as exc:  # a failed replication is data, not fatal
        return {"n": n, "rep": rep, "seed": seed, "ok": False, "error": f"{type(exc).__name__}: {exc}"}


def _run_task(args):
    config, n, rep = args
    return run_replication(config, n, rep)


def run_monte_carlo(
    config: ExperimentConfig,
    n_jobs: int = 1,
    progress: Callable[[int], None] | None = None,
) -> ErrorReport:
    """Run every (n, replication) pair and aggregate the sup errors.

    ``n_jobs > 1`` spreads replications over worker processes; the report
    is identical for any ``n_jobs``. Failed replications are recorded with
    their seeds and excluded from summaries; more than 2% failures raises
    :class:`MonteCarloError`.
    """
    tasks = [(config, n, rep) for n in config.n_values for rep in range(config.replications)]
    results = {}
    if n_jobs > 1:
        chunk = max(1, len(tasks) // (8 * n_jobs))
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            for res in pool.map(_run_task, tasks, chunksize=chunk):
                results[(res["n"], res["rep"])] = res
                if progress and res["rep"] == config.replications - 1:
                    progress(res["n"])
    else:
        for task in tasks:
            res = _run_task(task)
            results[(res["n"], res["rep"])] = res
            if progress and res["rep"] == config.replications - 1:
                progress(res["n"])

    failures = [
        {"n": r["n"], "rep": r["rep"], "seed": r["seed"], "error": r["error"]}
        for _, r in sorted(results.items())
        if not r["ok"]
    ]
    for f in failures:
        log.warning("replication failed: n=%d rep=%d seed=%d: %s", f["n"], f["rep"], f["seed"], f["error"])
    if len(failures) > MAX_FAILURE_FRACTION * len(tasks):
        raise MonteCarloError(f"{len(failures)} of {len(tasks)} replications failed; run is invalid")

    raw, gaps = [], []
    summaries, cens, gap_med, bandwidths = {}, {}, {}, {}
    for n in config.n_values:
        ok = [results[(n, r)] for r in range(config.replications) if results[(n, r)]["ok"]]
        bandwidths[n] = bandwidth_for(config.bandwidth, n, config.kernel.d)
        per_source = {}
        for g in config.g_sources:
            errs = np.array([r["errors"][g][0] for r in ok])
            undef = sum(r["errors"][g][1] for r in ok)
            for r in ok:
                raw.append(
                    {
                        "n": n,
                        "rep": r["rep"],
                        "g_source": g,
                        "sup_error": r["errors"][g][0],
                        "undefined_count": r["errors"][g][1],
                    }
                )
            if errs.size:
                per_source[g] = SourceSummary(
                    float(np.mean(errs)), float(np.median(errs)), float(np.max(errs)), int(undef), int(errs.size)
                )
            else:
                per_source[g] = SourceSummary(math.nan, math.nan, math.nan, 0, 0)
        summaries[n] = per_source
        cens[n] = float(np.mean([r["censored_fraction"] for r in ok])) if ok else math.nan
        g_vals = [r["gap"] for r in ok if r["gap"] is not None]
        for r in ok:
            if r["gap"] is not None:
                gaps.append({"n": n, "rep": r["rep"], "gap": r["gap"]})
        if g_vals:
            gap_med[n] = float(np.median(g_vals))

    report = ErrorReport(
        config=config.to_dict(),
        n_values=list(config.n_values),
        bandwidths=bandwidths,
        summaries=summaries,
        censored_fraction=cens,
        oracle_gap=gap_med,
        raw=raw,
        gaps=gaps,
        failures=failures,
    )
    if len(config.n_values) >= 3:
        primary = "km" if "km" in config.g_sources else config.g_sources[0]
        fit = rate_slope(report, g_source=primary)
        report.slope_fit = {"g_source": primary, "rate": "optimal", **asdict(fit)}
    return report


def rate_slope(report: ErrorReport, rates=None, g_source: str = "km") -> RateFit:
    """Fit ``log(median sup error)`` against ``log(rate)`` across n.

    ``rates`` defaults to ``(log n / n) ** (1 / (d + 2))``. A slope near 1
    means the errors scale like the rate.
    """
    ns = report.n_values
    if len(ns) < 3:
        raise ValueError("need at least 3 sample sizes to fit a rate")
    if rates is None:
        rates = optimal_rate(ns, report.config["kernel"]["d"])
    return fit_log_log(report.medians(g_source), rates)


def oracle_gap(config: ExperimentConfig, n_jobs: int = 1) -> dict:
    """Median over replications of ``sup_x |m_km(x) - m_oracle(x)|`` for each n."""
    if not {"km", "oracle"} <= set(config.g_sources):
        raise ValueError("oracle_gap needs both 'km' and 'oracle' g sources")
    report = run_monte_carlo(config, n_jobs=n_jobs)
    return {n: report.oracle_gap[n] for n in config.n_values}


# --- assumption checks ------------------------------------------------------


@dataclass(frozen=True)
class AssumptionParams:
    """Constants entering the bandwidth and mixing conditions.

    ``nu`` is the polynomial mixing exponent, ``alpha(n) = O(n^-nu)``;
    geometrically mixing processes satisfy it for every ``nu``, which is
    encoded as ``math.inf``.
    """

    d: int = 1
    gamma: float = 1.0
    nu: float = math.inf
    theta: float = 0.5
    mu: float = 0.5
    c1: float = 1.0
    c2: float = 1.0

    def __post_init__(self):
        if self.d < 1 or not self.gamma > 0 or not (self.c1 > 0 and self.c2 > 0):
            raise ValueError("need d >= 1, gamma > 0, c1 > 0, c2 > 0")

    @property
    def p(self) -> float:
        return (self.gamma * (4 + self.d) + self.d) / (2 * self.gamma)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    details: dict


@dataclass(frozen=True)
class AssumptionReport:
    a1: CheckResult
    a3: CheckResult
    a7: CheckResult

    @property
    def all_pass(self) -> bool:
        return self.a1.passed and self.a3.passed and self.a7.passed


def mixing_threshold(params: AssumptionParams) -> float:
    """Lower bound that the mixing exponent must exceed: ``p + sqrt(p^2 + 3(d-1))``."""
    p = params.p
    return p + math.sqrt(p * p + 3 * (params.d - 1))


def a7_exponents(params: AssumptionParams) -> tuple[float, float]:
    """Exponents (lower, upper) of n bracketing ``h^d``; limits are used for ``nu = inf``."""
    g, d, nu = params.gamma, params.d, params.nu
    if math.isinf(nu):
        return -1.0 / d + params.theta * d, 0.0
    lower = g * (3 - nu) / (d * (g * (nu + 1) + 2 * g + 1)) + params.theta * d
    return lower, d / (1 - nu)


def theta_interval(params: AssumptionParams) -> tuple[float, float]:
    """Admissible open interval for theta; limits are used for ``nu = inf``."""
    g, d, nu = params.gamma, params.d, params.nu
    if math.isinf(nu):
        return 0.0, 1.0 / d
    denom = g * (nu + 1) + 2 * g + 1
    return 1.0 / denom, 1.0 / (1 - nu) - g * (3 - nu) / (d * denom)


def check_assumptions(params: AssumptionParams, rule: BandwidthRule, n_range=(1e2, 1e9), num: int = 400) -> AssumptionReport:
    """Numerically check the bandwidth (A1, A7) and mixing-rate (A3) conditions.

    A1 is checked on a log-spaced grid over ``n_range``: ``n h^d`` must be
    increasing, and ``h^mu log log n`` must decrease over the second half
    of the range and end below its starting value. A7 is checked at the
    two endpoints of ``n_range``.
    """
    d = params.d
    n_lo = max(float(n_range[0]), 3.0)
    n_hi = float(n_range[1])
    ns = np.geomspace(n_lo, n_hi, num)
    hs = np.array([bandwidth_for(rule, n, d) for n in ns])

    nhd = ns * hs**d
    grows = bool(np.all(np.diff(nhd) > 0))
    s = hs**params.mu * np.log(np.log(ns))
    tail = s[num // 2 :]
    decays = bool(np.all(np.diff(tail) < 0) and s[-1] < s[0])
    mu_ok = 0 < params.mu < d
    a1 = CheckResult(
        "A1",
        grows and decays and mu_ok,
        {
            "n_h_d_increasing": grows,
            "n_h_d_range": [float(nhd[0]), float(nhd[-1])],
            "h_mu_loglog_decreasing": decays,
            "h_mu_loglog_range": [float(s[0]), float(s[-1])],
            "mu_in_range": mu_ok,
        },
    )

    p = params.p
    thr = mixing_threshold(params)
    a3 = CheckResult("A3", params.nu > thr, {"p": p, "threshold": thr, "nu": params.nu})

    e_lo, e_hi = a7_exponents(params)
    ends = []
    for n in (n_lo, n_hi):
        hd = bandwidth_for(rule, n, d) ** d
        lo = params.c1 * n**e_lo
        hi = params.c2 * n**e_hi
        ends.append({"n": n, "lower": lo, "h_d": hd, "upper": hi, "ok": bool(lo <= hd <= hi)})
    t_lo, t_hi = theta_interval(params)
    empty = not t_lo < t_hi
    theta_ok = t_lo < params.theta < t_hi
    a7 = CheckResult(
        "A7",
        all(e["ok"] for e in ends) and theta_ok,
        {
            "exponents": [e_lo, e_hi],
            "endpoints": ends,
            "theta_interval": [t_lo, t_hi],
            "theta_interval_empty": empty,
            "theta_admissible": theta_ok,
        },
    )
    return AssumptionReport(a1, a3, a7)
