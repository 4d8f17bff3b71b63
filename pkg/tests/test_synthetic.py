import math

import numpy as np
import pytest
from scipy import integrate, stats

from censkern.sampledata import validate_sample
from censkern.synthetic import (
    ModelSpec,
    censored_fraction_linear,
    generate_covariate_path,
    generate_dataset,
    true_censoring_survival,
    true_density,
    true_numerator,
    true_regression,
)


def test_iid_when_rho_zero():
    x = generate_covariate_path(100_000, 0.0, seed=1)
    assert -0.02 < x.mean() < 0.02
    assert 0.98 < x.var() < 1.02


def test_path_deterministic_and_length():
    a = generate_covariate_path(50, 0.9, seed=123)
    b = generate_covariate_path(50, 0.9, seed=123)
    assert a.shape == (51,)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, generate_covariate_path(50, 0.9, seed=124))


def test_path_recurrence():
    # the path must satisfy X_i = rho X_{i-1} + sqrt(1-rho^2) eps_i with eps ~ N(0,1)
    x = generate_covariate_path(100_000, 0.9, seed=2)
    eps = (x[1:] - 0.9 * x[:-1]) / math.sqrt(1 - 0.81)
    assert abs(eps.mean()) < 0.02 and 0.98 < eps.var() < 1.02


def test_lag_one_autocorrelation():
    x = generate_covariate_path(100_000, 0.9, seed=3)
    r = np.corrcoef(x[:-1], x[1:])[0, 1]
    assert 0.88 < r < 0.92
    assert 0.95 < x.var() < 1.05


def test_rho_out_of_range():
    with pytest.raises(ValueError):
        generate_covariate_path(10, 1.0, 0)
    with pytest.raises(ValueError):
        ModelSpec(rho=0.0)
    with pytest.raises(ValueError):
        ModelSpec(lam=-1)
    with pytest.raises(ValueError):
        ModelSpec(family="cubic")
    with pytest.raises(ValueError):
        ModelSpec(n=1)


@pytest.mark.parametrize("family", ["linear", "sinus", "parabolic"])
def test_dataset_rows_consistent(family):
    s = generate_dataset(ModelSpec(family, n=500, seed=5))
    assert len(s) == 500 and s.has_latent
    assert validate_sample(s).ok
    np.testing.assert_array_equal(s.t, np.minimum(s.y, s.c))
    np.testing.assert_array_equal(s.delta, (s.y <= s.c).astype(int))


def test_dataset_uses_the_covariate_path():
    m = ModelSpec("linear", n=40, seed=77)
    path = generate_covariate_path(40, 0.9, 77)
    s = generate_dataset(m)
    np.testing.assert_array_equal(s.x[:, 0], path[:40])
    np.testing.assert_array_equal(s.y, path[1:41])
    p = generate_dataset(m.with_(family="parabolic"))
    np.testing.assert_allclose(p.y, 5 / 12 * path[1:41] ** 2 - 2)
    sn = generate_dataset(m.with_(family="sinus"))
    np.testing.assert_allclose(sn.y, np.sin(np.pi / 2 * path[:40]))
    # censoring comes from its own substream: same across families
    np.testing.assert_array_equal(s.c, p.c)


def test_dataset_deterministic():
    a = generate_dataset(ModelSpec(n=100, seed=8))
    b = generate_dataset(ModelSpec(n=100, seed=8))
    for f in ("x", "t", "delta", "y", "c"):
        np.testing.assert_array_equal(getattr(a, f), getattr(b, f))


def test_uncensored_hook():
    s = generate_dataset(ModelSpec(n=200, seed=1, censored=False))
    assert np.all(s.delta == 1)
    np.testing.assert_array_equal(s.t, s.y)


def test_negative_responses_never_censored():
    s = generate_dataset(ModelSpec(n=5000, seed=2))
    assert np.all(s.delta[s.y < 0] == 1)


def test_censored_fraction_closed_form_vs_quadrature():
    lam = 1.5
    quad, _ = integrate.quad(lambda y: (1 - math.exp(-lam * y)) * stats.norm.pdf(y), 0, np.inf)
    assert censored_fraction_linear(lam) == pytest.approx(quad, abs=1e-12)
    assert censored_fraction_linear(lam) == pytest.approx(0.294, abs=5e-4)


def test_censored_fraction_independent_monte_carlo():
    # direct draw, no package code: Y ~ N(0,1), C ~ Exp(1.5)
    rng = np.random.default_rng(2024)
    y = rng.standard_normal(1_000_000)
    c = rng.exponential(1 / 1.5, 1_000_000)
    assert np.mean(c < y) == pytest.approx(censored_fraction_linear(1.5), abs=2e-3)


def test_censoring_independent_of_response():
    s = generate_dataset(ModelSpec(n=100_000, seed=4))
    r = np.corrcoef(s.c, s.y)[0, 1]
    assert -0.02 < r < 0.02


def test_true_regression_values():
    assert true_regression(ModelSpec("linear"), 1.0) == pytest.approx(0.9)
    assert true_regression(ModelSpec("sinus"), 1.0) == pytest.approx(1.0)
    assert true_regression(ModelSpec("parabolic"), 0.0) == pytest.approx(5 / 12 * 0.19 - 2)
    assert true_regression(ModelSpec("parabolic"), 0.0) == pytest.approx(-1.920833, abs=1e-6)


@pytest.mark.parametrize("family", ["linear", "sinus", "parabolic"])
def test_true_regression_matches_conditional_mean(family):
    # E[Y | X = x] by Gauss-Hermite quadrature over X_{i+1} | X_i = x ~ N(rho x, 1 - rho^2)
    m = ModelSpec(family)
    nodes, weights = np.polynomial.hermite_e.hermegauss(60)
    weights = weights / weights.sum()
    for x in (-1.2, 0.0, 0.4, 1.5):
        nxt = 0.9 * x + math.sqrt(1 - 0.81) * nodes
        if family == "linear":
            ey = np.dot(weights, nxt)
        elif family == "sinus":
            ey = math.sin(math.pi / 2 * x)
        else:
            ey = np.dot(weights, 5 / 12 * nxt**2 - 2)
        assert true_regression(m, x) == pytest.approx(ey, abs=1e-12)


def test_true_density():
    assert true_density(0.0) == pytest.approx(0.398942, abs=1e-6)
    assert true_density(1.3) == true_density(-1.3)
    val, _ = integrate.quad(true_density, -np.inf, np.inf)
    assert val == pytest.approx(1.0, abs=1e-8)


def test_true_numerator():
    lin = ModelSpec("linear")
    assert true_numerator(lin, 0.0) == 0.0
    assert true_numerator(lin, 1.0) == pytest.approx(0.9 * math.exp(-0.5) / math.sqrt(2 * math.pi), rel=1e-14)
    for fam in ("linear", "sinus", "parabolic"):
        m = ModelSpec(fam)
        xs = np.linspace(-3, 3, 13)
        np.testing.assert_allclose(true_numerator(m, xs) / true_density(xs), true_regression(m, xs), rtol=1e-13)


def test_true_censoring_survival():
    assert true_censoring_survival(1.5, 0.0) == 1.0
    assert true_censoring_survival(1.5, math.log(2) / 1.5) == pytest.approx(0.5, abs=1e-15)
    assert true_censoring_survival(1.5, -3.0) == 1.0
    with pytest.raises(ValueError):
        true_censoring_survival(0.0, 1.0)
