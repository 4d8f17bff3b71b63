"""
Estimating the censoring survival curve
=======================================

Under right censoring we see T = min(Y, C) and delta = 1{Y <= C}. The
reweighting used by the regression estimator needs P(C > t), estimated by
the Kaplan-Meier product limit with the roles of Y and C swapped.
"""

import numpy as np

from censkern import kaplan_meier_censoring, km_sup_distance, true_censoring_survival

# A toy sample: the second observation is censored.
curve = kaplan_meier_censoring([1.0, 2.0, 3.0], [1, 0, 1])
for t in (0.5, 1.0, 2.0, 2.5, 3.0):
    print(f"G({t}) = {curve(t)}   G({t}-) = {curve(t, 'left')}")

# Exponential lifetimes censored at rate 1.5: the estimate approaches exp(-1.5 t).
rng = np.random.default_rng(0)
truth = lambda t: true_censoring_survival(1.5, t)
for n in (100, 400, 1600, 6400):
    dist = []
    for _ in range(50):
        y = rng.exponential(1.0, n)
        c = rng.exponential(1 / 1.5, n)
        g = kaplan_meier_censoring(np.minimum(y, c), (y <= c).astype(int))
        dist.append(km_sup_distance(g, truth, 1.0))
    print(f"n={n:5d}  median over 50 draws of sup_[0,1] |G_n - G| = {np.median(dist):.4f}")
