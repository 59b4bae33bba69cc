import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from covertnu import noise
from covertnu.noise import (GaussianApprox, LogNormalModel, LogUniformModel,
                            gaussian_approx_params)
from covertnu.special import K_DB, DomainError, Tolerance, integrate

RHO_DB_GRID = (0.5, 1.0, 2.0, 3.0, 5.0)
SIGMA_DELTA_GRID = (0.1, 0.5, 1.0, 2.0)
NORM_TOL = Tolerance(1e-13, 1e-13, 400)

# mpmath references
LN_PDF_AT_1 = 1.7325843097624202042  # 1 / (k sqrt(2 pi))
PHI_0_1 = (1.0268639927219595736, 0.057414424973874088740, 0.99999088393836849723)
PHI1_M100_05 = 1.0066493822672799712e-10


def all_models():
    for rho_db in RHO_DB_GRID:
        yield LogUniformModel.from_db(0.0, rho_db)
    for sd in SIGMA_DELTA_GRID:
        yield LogNormalModel(0.0, sd)
        yield GaussianApprox(LogNormalModel(0.0, sd))


def normalization(model):
    lo, hi = model.support()
    return integrate(model.pdf, lo, hi, NORM_TOL)


def test_model_validation():
    with pytest.raises(DomainError):
        LogUniformModel(1.0, 1.0)
    with pytest.raises(DomainError):
        LogUniformModel(-1.0, 2.0)
    with pytest.raises(DomainError):
        LogNormalModel(0.0, 0.0)


def test_logu_pdf_examples():
    m = LogUniformModel(1.0, 2.0)
    assert noise.pdf(m, 1.0) == pytest.approx(1.0 / (2.0 * math.log(2.0)), rel=1e-15)
    assert noise.pdf(m, 3.0) == 0.0
    assert noise.pdf(m, 0.4) == 0.0


def test_logn_pdf_example():
    m = LogNormalModel(0.0, 1.0)
    assert noise.pdf(m, 1.0) == pytest.approx(LN_PDF_AT_1, rel=1e-14)
    assert noise.pdf(m, 1.0) == pytest.approx(1.0 / (K_DB * math.sqrt(2 * math.pi)), rel=1e-14)
    assert noise.pdf(m, 0.0) == 0.0
    assert noise.pdf(m, -1.0) == 0.0


@pytest.mark.parametrize("model", list(all_models()), ids=repr)
def test_pdf_normalizes(model):
    assert normalization(model) == pytest.approx(1.0, abs=1e-10)


def test_logu_cdf_examples():
    m = LogUniformModel(1.0, 2.0)
    assert noise.cdf(m, 0.5) == 0.0
    assert noise.cdf(m, 2.0) == 1.0
    assert noise.cdf(m, 1.0) == pytest.approx(0.5, abs=1e-15)
    assert noise.cdf(m, -3.0) == 0.0


def test_logn_cdf_median_is_nominal():
    assert noise.cdf(LogNormalModel(0.0, 1.0), 1.0) == pytest.approx(0.5, abs=1e-15)


@pytest.mark.parametrize("model", list(all_models()), ids=repr)
def test_cdf_matches_integrated_pdf(model):
    lo, hi = model.support()
    for q in (0.1, 0.37, 0.5, 0.8, 0.99):
        x = float(model.quantile(q))
        assert model.cdf(x) == pytest.approx(q, abs=1e-12)
        assert integrate(model.pdf, lo, x, NORM_TOL) == pytest.approx(model.cdf(x), abs=1e-8)


@pytest.mark.parametrize("model", list(all_models()), ids=repr)
def test_cdf_derivative_is_pdf(model):
    for q in (0.2, 0.5, 0.8):
        x = float(model.quantile(q))
        h = 1e-6 * x
        deriv = (model.cdf(x + h) - model.cdf(x - h)) / (2 * h)
        assert deriv == pytest.approx(model.pdf(x), rel=1e-6)


@pytest.mark.parametrize("model", list(all_models()), ids=repr)
def test_cdf_is_a_distribution_function(model):
    xs = np.linspace(-1.0, 5.0, 4001)
    vals = model.cdf(xs)
    assert np.all(np.diff(vals) >= 0)
    assert vals[0] == 0.0
    assert model.cdf(1e6) == pytest.approx(1.0, abs=1e-15)


def test_gaussian_params_example():
    p = gaussian_approx_params(LogNormalModel(0.0, 1.0))
    assert (p.phi1, p.phi2, p.phi3) == pytest.approx(PHI_0_1, rel=1e-12)


def test_gaussian_params_paper_setup():
    p = gaussian_approx_params(LogNormalModel(-100.0, 0.5))
    assert p.phi1 == pytest.approx(PHI1_M100_05, rel=1e-12)
    assert p.phi3 == pytest.approx(1.0, abs=1e-15)


def test_gaussian_params_degenerate_limit():
    p = gaussian_approx_params(LogNormalModel(-7.0, 1e-6))
    assert p.phi1 == pytest.approx(10 ** -0.7, rel=1e-10)
    assert p.phi2 < 1e-12 * p.phi1 ** 2


@pytest.mark.parametrize("sd", SIGMA_DELTA_GRID)
@pytest.mark.parametrize("mu_db", (-100.0, 0.0, 7.0))
def test_gaussian_params_are_lognormal_moments(mu_db, sd):
    model = LogNormalModel(mu_db, sd)
    p = gaussian_approx_params(model)
    # moments by quadrature in log space, independent of the closed forms
    s, m = model.log_std, model.log_mean
    dens = lambda z: math.exp(-0.5 * z * z) / math.sqrt(2 * math.pi)
    mean = integrate(lambda z: math.exp(m + s * z) * dens(z), -12, 12, NORM_TOL)
    second = integrate(lambda z: math.exp(2 * (m + s * z)) * dens(z), -12, 12, NORM_TOL)
    assert p.phi1 == pytest.approx(mean, rel=1e-8)
    assert p.phi2 == pytest.approx(second - mean * mean, rel=1e-8)


def test_surrogate_converges_as_spread_shrinks():
    def sup_distance(sd):
        exact = LogNormalModel(0.0, sd)
        approx = GaussianApprox(exact)
        xs = exact.quantile(np.linspace(1e-6, 1 - 1e-6, 20001))
        return float(np.max(np.abs(exact.cdf(xs) - approx.cdf(xs))))

    distances = [sup_distance(sd) for sd in (2.0, 1.0, 0.5, 0.25)]
    assert all(a > b for a, b in zip(distances, distances[1:]))


def test_sample_support_and_determinism():
    m = LogUniformModel(1.0, 2.0)
    a = noise.sample(m, 123, 50_000)
    assert a.min() >= 0.5 and a.max() <= 2.0
    assert np.array_equal(a, noise.sample(m, 123, 50_000))
    assert not np.array_equal(a, noise.sample(m, 124, 50_000))


def test_sample_independent_of_workers():
    m = LogNormalModel(0.0, 1.0)
    assert np.array_equal(noise.sample(m, 5, 300_000), noise.sample(m, 5, 300_000, workers=4))


def test_sample_rejects_zero_count():
    with pytest.raises(DomainError):
        noise.sample(LogUniformModel(1.0, 2.0), 0, 0)


def test_lognormal_sample_mean_is_phi1():
    draws = noise.sample(LogNormalModel(0.0, 1.0), 2024, 1_000_000)
    assert draws.mean() == pytest.approx(PHI_0_1[0], abs=0.001)


@pytest.mark.parametrize("model", [LogUniformModel(1.0, 2.0), LogNormalModel(0.0, 1.0),
                                   GaussianApprox(LogNormalModel(0.0, 2.0))], ids=repr)
def test_sample_passes_ks(model):
    count = 20_000
    draws = noise.sample(model, 99, count)
    d = stats.kstest(draws, model.cdf).statistic
    assert d <= 1.63 / math.sqrt(count)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 64 - 1), st.integers(1, 500))
def test_sample_is_positive_for_any_seed(seed, count):
    for model in (LogUniformModel(1e-10, 3.0), LogNormalModel(-100.0, 2.0),
                  GaussianApprox(LogNormalModel(0.0, 5.0))):
        assert np.all(noise.sample(model, seed, count) > 0)
