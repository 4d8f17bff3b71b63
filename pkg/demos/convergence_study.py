"""
How fast does the uniform error shrink?
=======================================

Repeat the fit over many seeds for growing n and regress the log median
sup error on log (log n / n)^(1/3). A slope near one means the error
scales like that rate. Replications are seeded from (master seed, n,
replication), so the numbers do not depend on the number of workers.
"""

from censkern import ExperimentConfig, ModelSpec, rate_slope, run_monte_carlo

for family in ("linear", "sinus", "parabolic"):
    cfg = ExperimentConfig(model=ModelSpec(family), n_values=(50, 100, 300), replications=100)
    report = run_monte_carlo(cfg)
    print(family, "median sup error:", [round(float(v), 3) for v in report.medians("km")])

cfg = ExperimentConfig(n_values=(250, 500, 1000, 2000, 4000), replications=100, g_sources=("km",))
report = run_monte_carlo(cfg, progress=lambda n: print(f"  n={n} done"))
fit = rate_slope(report)
print(f"slope = {fit.slope:.3f}, r^2 = {fit.r_squared:.3f}")
