import logging

import numpy as np
import pytest
from scipy.integrate import trapezoid

from tiltko.knockoffs.gaussian import build_spec, gaussian_knockoff_spec, sample_knockoffs
from tiltko.knockoffs.tilting import (
    SecondOrderTiltKnockoffs, TiltSpec, canonical_key, component_posterior_q1,
    discretize_response, estimate_tilted_moments, exact_mixture_tilt,
    exact_tilted_knockoffs, group_keys, rejection_sample_tilt,
    sample_mixture_knockoff, second_order_tilted_knockoffs, tilted_moments_by_group
)
from tiltko.models.covariates import GaussianBlock, block_toeplitz_covariance
from tiltko.models.population import LabeledSample
from tiltko.models.selection import (
    LogisticSelection, SquaredExponential, case_control_inclusion_prob, stratum_prob
)
from tiltko.utils.checks_utils import (
    ConvergenceWarning, DegenerateTiltError, InvalidMixtureWeightError
)

LOGGER = logging.getLogger(__name__)

SIGMA_2D = np.array([[1.0, 0.3], [0.3, 1.0]])
GAMMA_X = np.array([0.8, -0.5])
GAMMA_Y = 1.5


def case_control_sample(x, y, rate_case=0.5, rate_control=0.1):
    d = np.zeros(x.shape[0])
    d[: x.shape[0] // 2] = 1
    return LabeledSample(x=x, y=y, d=d, rate_case=rate_case, rate_control=rate_control)


def a1_geometry(p=20, n_nonnull=4):
    sigma = block_toeplitz_covariance(p, block_size=10, rho=0.5)
    gamma_x = np.zeros(p)
    gamma_x[[1, 6, 12, 17][:n_nonnull]] = [0.5, -0.4, 0.6, -0.3][:n_nonnull]
    return sigma, SquaredExponential(gamma_x, 2.0)


def weighted_standard_errors(x, w):
    """Delta method standard errors of self-normalized weighted means and covariances."""
    w = w / w.sum()
    mean = w @ x
    xc = x - mean
    se_mean = np.sqrt((w ** 2) @ xc ** 2)
    p = x.shape[1]
    se_cov = np.empty((p, p))
    for i in range(p):
        f = xc[:, i:i + 1] * xc
        cov_i = w @ f
        se_cov[i] = np.sqrt((w ** 2) @ (f - cov_i) ** 2)
    return se_mean, se_cov

##########################################
#                                        #
#         Test exact mixture tilt        #
#                                        #
##########################################

def test_no_covariate_tilt():
    tilt = exact_mixture_tilt(SIGMA_2D, np.zeros(2), 3.0, 1.2, 0.5, 0.1)
    assert np.allclose(tilt.sigma_tilde, SIGMA_2D)
    assert np.allclose(tilt.mu_tilde, 0.0)


def test_scalar_tilt():
    tilt = exact_mixture_tilt(np.eye(1), np.ones(1), 1.0, 0.0, 0.5, 0.1)
    assert tilt.sigma_tilde[0, 0] == pytest.approx(0.5)


def test_sigma_tilde_inverse():
    tilt = exact_mixture_tilt(SIGMA_2D, GAMMA_X, GAMMA_Y, 0.7, 0.5, 0.1)
    expected = np.linalg.inv(np.linalg.inv(SIGMA_2D) + np.outer(GAMMA_X, GAMMA_X))
    assert np.allclose(tilt.sigma_tilde, expected)
    assert np.allclose(tilt.mu_tilde, -expected @ GAMMA_X * GAMMA_Y * 0.7)


def test_zero_response_weight():
    tilt = exact_mixture_tilt(SIGMA_2D, GAMMA_X, GAMMA_Y, 0.0, 0.5, 0.1)
    assert np.allclose(tilt.mu_tilde, 0.0)
    assert tilt.w1_raw == pytest.approx(0.4)
    assert tilt.w2_raw == pytest.approx(0.1)


def test_invalid_mixture_weight():
    with pytest.raises(InvalidMixtureWeightError, match="invalid mixture weight"):
        exact_mixture_tilt(SIGMA_2D, GAMMA_X, GAMMA_Y, 0.3, 0.1, 0.5)


@pytest.mark.parametrize("rate_case, rate_control", [(0.0, 0.0), (1.5, 0.1), (0.5, -0.1)])
def test_invalid_rates(rate_case, rate_control):
    with pytest.raises(ValueError):
        exact_mixture_tilt(SIGMA_2D, GAMMA_X, GAMMA_Y, 0.3, rate_case, rate_control)


def test_equal_rates_first_component_vanishes():
    tilt = exact_mixture_tilt(SIGMA_2D, GAMMA_X, GAMMA_Y, 0.3, 0.2, 0.2)
    assert tilt.w1_raw == 0.0
    x = np.random.default_rng(0).standard_normal((20, 2))
    assert np.all(component_posterior_q1(tilt, x) == 0.0)
    assert tilt.mixture_weights() == (0.0, 1.0)


def test_no_controls_first_component_only():
    tilt = exact_mixture_tilt(SIGMA_2D, GAMMA_X, GAMMA_Y, 0.3, 0.2, 0.0)
    x = np.random.default_rng(0).standard_normal((20, 2))
    assert np.all(component_posterior_q1(tilt, x) == 1.0)
    assert component_posterior_q1(tilt, x[0]) == 1.0


def test_identical_components_half():
    tilt = exact_mixture_tilt(SIGMA_2D, np.zeros(2), 0.0, 0.0, 0.4, 0.2)
    x = 3 * np.random.default_rng(1).standard_normal((20, 2))
    assert np.allclose(component_posterior_q1(tilt, x), 0.5)
    assert tilt.mixture_weights() == pytest.approx((0.5, 0.5))


@pytest.mark.parametrize("y", [-1.0, 0.0, 0.8])
def test_posterior_q1_monotone_in_first_weight(y):
    x = np.random.default_rng(5).standard_normal((200, 2)) * 2
    previous = np.zeros(200)
    for rate_case in [0.15, 0.3, 0.6, 0.9]:
        tilt = exact_mixture_tilt(SIGMA_2D, GAMMA_X, GAMMA_Y, y, rate_case, 0.1)
        q1 = component_posterior_q1(tilt, x)
        assert np.all(q1 >= previous)
        previous = q1
    assert np.all(previous > 0) and np.all(previous < 1)


def test_log_density_normalized():
    tilt = exact_mixture_tilt(np.eye(1), np.ones(1), 1.0, 0.5, 0.6, 0.1)
    grid = np.linspace(-12, 12, 24001)
    density = np.exp(tilt.log_density(grid[:, None]))
    assert trapezoid(density, grid) == pytest.approx(1.0, abs=1e-6)


def test_log_density_proportional_to_inclusion():
    rate_case, rate_control, y = 0.6, 0.1, 0.7
    sigma, selection = a1_geometry()
    tilt = exact_mixture_tilt(sigma, selection.gamma_x, selection.gamma_y, y,
                              rate_case, rate_control)
    base = GaussianBlock(np.zeros(sigma.shape[0]), sigma)
    x = base.sample(200, np.random.default_rng(2))
    log_p = -0.5 * np.sum(np.linalg.solve(base.chol, x.T) ** 2, axis=0)
    log_r = np.log(case_control_inclusion_prob(selection, x, y, rate_case, rate_control))
    diff = tilt.log_density(x) - log_p - log_r
    assert np.allclose(diff - diff[0], 0.0, rtol=0.0, atol=1e-8)


def test_mixture_moments_match_rejection_draws():
    rate_case, rate_control, y = 0.6, 0.1, 0.7
    tilt = exact_mixture_tilt(SIGMA_2D, GAMMA_X, GAMMA_Y, y, rate_case, rate_control)
    selection = SquaredExponential(GAMMA_X, GAMMA_Y)
    draws = rejection_sample_tilt(
        GaussianBlock(np.zeros(2), SIGMA_2D),
        lambda x, y, d: case_control_inclusion_prob(selection, x, y, rate_case, rate_control),
        (y,), 40_000, np.random.default_rng(3))
    mean, cov = tilt.moments()
    LOGGER.info('mixture mean {} empirical {}'.format(mean, draws.mean(axis=0)))
    assert np.allclose(draws.mean(axis=0), mean, atol=0.03)
    assert np.allclose(np.cov(draws, rowvar=False), cov, atol=0.04)

##########################################
#                                        #
#        Test exact tilted knockoffs     #
#                                        #
##########################################

def test_mixture_knockoff_zero_s_returns_input():
    tilt = exact_mixture_tilt(SIGMA_2D, GAMMA_X, GAMMA_Y, 0.7, 0.6, 0.1)
    specs = (build_spec(tilt.mu_tilde, tilt.sigma_tilde, np.zeros(2)),
             build_spec(np.zeros(2), SIGMA_2D, np.zeros(2)))
    x_row = np.array([0.3, -1.1])
    for seed in range(5):
        assert np.array_equal(sample_mixture_knockoff(tilt, x_row, specs, seed), x_row)


def test_exact_knockoffs_equal_rates_is_standard():
    sigma = block_toeplitz_covariance(4)
    rng = np.random.default_rng(0)
    x = rng.standard_normal((200, 4))
    y = rng.standard_normal(200)
    sample = case_control_sample(x, y, rate_case=0.3, rate_control=0.3)
    selection = SquaredExponential(rng.standard_normal(4), 2.0)
    x_tilde = exact_tilted_knockoffs(sample, sigma, selection, np.random.default_rng(7))
    ref_rng = np.random.default_rng(7)
    ref_rng.random(200)
    expected = sample_knockoffs(gaussian_knockoff_spec(np.zeros(4), sigma), x, ref_rng)
    assert np.allclose(x_tilde, expected)


def test_exact_knockoffs_shape_and_seed():
    sigma = block_toeplitz_covariance(6)
    rng = np.random.default_rng(1)
    sample = case_control_sample(rng.standard_normal((50, 6)), rng.standard_normal(50))
    selection = SquaredExponential(rng.standard_normal(6), 2.0)
    a = exact_tilted_knockoffs(sample, sigma, selection, 4)
    b = exact_tilted_knockoffs(sample, sigma, selection, 4)
    assert a.shape == (50, 6)
    assert np.array_equal(a, b)


def test_exact_knockoffs_require_case_control():
    x = np.zeros((5, 2))
    with pytest.raises(ValueError):
        exact_tilted_knockoffs(LabeledSample(x=x, y=np.zeros(5)), SIGMA_2D,
                               SquaredExponential(GAMMA_X, GAMMA_Y), 0)
    with pytest.raises(ValueError):
        exact_tilted_knockoffs(case_control_sample(x, np.zeros(5)), SIGMA_2D,
                               LogisticSelection(0.0, GAMMA_X, GAMMA_Y), 0)

##########################################
#                                        #
#     Test importance sampling moments   #
#                                        #
##########################################

def test_constant_weights_plain_moments():
    base = GaussianBlock(np.zeros(3), block_toeplitz_covariance(3))
    spec = TiltSpec(base, lambda x, y, d: np.full(x.shape[0], 2.0), mc_draws=1000)
    moments = estimate_tilted_moments(spec, (0.0,), np.random.default_rng(5))
    x = base.sample(1000, np.random.default_rng(5))
    assert np.allclose(moments.mu_hat, x.mean(axis=0))
    expected = np.cov(x, rowvar=False, bias=True) + moments.ridge * np.eye(3)
    assert np.allclose(moments.sigma_hat, expected)
    assert moments.ess == pytest.approx(1000)
    assert moments.warnings == ()


def test_single_draw():
    base = GaussianBlock(np.zeros(2), np.eye(2))
    spec = TiltSpec(base, lambda x, y, d: np.ones(x.shape[0]), mc_draws=1)
    with pytest.warns(ConvergenceWarning):
        moments = estimate_tilted_moments(spec, (1.0,), np.random.default_rng(6))
    x1 = base.sample(1, np.random.default_rng(6))[0]
    assert np.allclose(moments.mu_hat, x1)
    assert np.allclose(moments.sigma_hat, moments.ridge * np.eye(2))
    assert moments.ridge > 0


def test_degenerate_weights():
    spec = TiltSpec(GaussianBlock(np.zeros(2), np.eye(2)),
                    lambda x, y, d: np.zeros(x.shape[0]), mc_draws=100)
    with pytest.raises(DegenerateTiltError, match="degenerate tilt"):
        estimate_tilted_moments(spec, (0.0,), 0)


def test_negative_weights_rejected():
    spec = TiltSpec(GaussianBlock(np.zeros(2), np.eye(2)),
                    lambda x, y, d: -np.ones(x.shape[0]), mc_draws=100)
    with pytest.raises(ValueError):
        estimate_tilted_moments(spec, (0.0,), 0)


def test_low_ess_warning():
    spec = TiltSpec(GaussianBlock(np.zeros(1), np.eye(1)),
                    lambda x, y, d: np.exp(40 * x[:, 0]), mc_draws=2000)
    with pytest.warns(ConvergenceWarning):
        moments = estimate_tilted_moments(spec, (0.0,), 0)
    assert moments.ess < 50
    assert len(moments.warnings) == 1


def test_default_draws():
    base = GaussianBlock(np.zeros(7), np.eye(7))
    assert TiltSpec(base, None).n_draws == 700
    assert TiltSpec(base, None, mc_draws=33).n_draws == 33


def test_chunking_does_not_change_estimate():
    base = GaussianBlock(np.zeros(2), SIGMA_2D)
    spec = TiltSpec.for_selection(base, SquaredExponential(GAMMA_X, GAMMA_Y), mc_draws=3000)
    a = estimate_tilted_moments(spec, (0.5,), 3, chunk_size=3000)
    b = estimate_tilted_moments(spec, (0.5,), 3, chunk_size=1000)
    assert np.allclose(a.mu_hat, b.mu_hat)
    assert np.allclose(a.sigma_hat, b.sigma_hat)
    assert a.ess == pytest.approx(b.ess)


@pytest.mark.slow
@pytest.mark.parametrize("y", [-1.0, 0.0, 0.8])
def test_importance_moments_match_mixture(y):
    rate_case, rate_control, n_draws = 0.6, 0.1, 100_000
    sigma, selection = a1_geometry()
    base = GaussianBlock(np.zeros(sigma.shape[0]), sigma)
    spec = TiltSpec.for_inclusion(base, selection, rate_case, rate_control,
                                  mc_draws=n_draws)
    moments = estimate_tilted_moments(spec, (y,), np.random.default_rng(8))
    mean, cov = exact_mixture_tilt(sigma, selection.gamma_x, selection.gamma_y, y,
                                   rate_case, rate_control).moments()
    # Standard errors estimated on an independent batch of the same size
    x = base.sample(n_draws, np.random.default_rng(9))
    w = case_control_inclusion_prob(selection, x, y, rate_case, rate_control)
    se_mean, se_cov = weighted_standard_errors(x, w)
    z_mean = np.abs(moments.mu_hat - mean) / se_mean
    # The ridge is added to the diagonal of the estimate
    z_cov = np.abs(moments.sigma_hat - moments.ridge * np.eye(sigma.shape[0]) - cov) / se_cov
    LOGGER.info('y={} ESS={:.0f} max z mean={:.2f} max z cov={:.2f}'.format(
        y, moments.ess, z_mean.max(), z_cov.max()))
    assert z_mean.max() < 4
    assert z_cov.max() < 4

##########################################
#                                        #
#          Test conditioning keys        #
#                                        #
##########################################

def test_canonical_key():
    assert canonical_key(0.1 + 0.2) == canonical_key(0.3)
    assert canonical_key(-0.0) == (0.0,)
    assert canonical_key(1.0, 1.0) == (1.0, 1)


def test_binary_y_and_d_four_groups():
    rng = np.random.default_rng(0)
    n = 400
    sample = LabeledSample(x=rng.standard_normal((n, 3)),
                           y=rng.integers(0, 2, n).astype(float),
                           d=np.repeat([1.0, 0.0], n // 2))
    keys, inverse = group_keys(sample)
    assert keys == [(0.0, 0), (0.0, 1), (1.0, 0), (1.0, 1)]
    for i, (y, d) in enumerate(keys):
        rows = inverse == i
        assert np.all(sample.y[rows] == y) and np.all(sample.d[rows] == d)


def test_continuous_y_requires_bins():
    rng = np.random.default_rng(1)
    sample = LabeledSample(x=rng.standard_normal((100, 2)), y=rng.standard_normal(100))
    with pytest.raises(ValueError):
        group_keys(sample)
    keys, inverse = group_keys(sample, n_bins=5)
    assert len(keys) == 5
    assert np.bincount(inverse).min() >= 19


def test_discretize_response():
    y = np.arange(100, dtype=float)
    binned = discretize_response(y, 4)
    assert np.unique(binned).size == 4
    assert np.all(np.diff(binned) >= 0)
    assert np.array_equal(discretize_response(np.ones(10), 3), np.ones(10))

##########################################
#                                        #
#      Test second order knockoffs       #
#                                        #
##########################################

def test_group_moments_parallel_matches_sequential():
    rng = np.random.default_rng(2)
    sample = LabeledSample(x=rng.standard_normal((60, 2)),
                           y=rng.integers(0, 3, 60).astype(float))
    spec = TiltSpec.for_selection(GaussianBlock(np.zeros(2), SIGMA_2D),
                                  LogisticSelection(-1.0, GAMMA_X, 1.0), mc_draws=500)
    _, _, seq = tilted_moments_by_group(sample, spec, 11, n_jobs=1)
    keys, _, par = tilted_moments_by_group(sample, spec, 11, n_jobs=2)
    assert len(keys) == 3
    for a, b in zip(seq, par):
        assert a.key == b.key
        assert np.allclose(a.mu_hat, b.mu_hat) and np.allclose(a.sigma_hat, b.sigma_hat)


def test_second_order_constant_selection_is_standard():
    p = 3
    sigma = block_toeplitz_covariance(p, rho=0.6)
    base = GaussianBlock(np.zeros(p), sigma)
    rng = np.random.default_rng(3)
    n = 20_000
    x = base.sample(n, rng)
    sample = LabeledSample(x=x, y=rng.integers(0, 2, n).astype(float))
    spec = TiltSpec.for_selection(base, LogisticSelection(50.0, np.zeros(p), 0.0),
                                  mc_draws=100_000)
    x_tilde = second_order_tilted_knockoffs(sample, spec, rng)
    emp = np.cov(np.hstack([x, x_tilde]), rowvar=False)
    G = gaussian_knockoff_spec(np.zeros(p), sigma).joint_covariance()
    LOGGER.info('max |cov - G| = {:.4f}'.format(np.abs(emp - G).max()))
    assert np.allclose(emp, G, atol=0.06)


def test_second_order_seeded():
    rng = np.random.default_rng(4)
    x = rng.standard_normal((40, 2))
    sample = LabeledSample(x=x, y=np.repeat([0.0, 1.0], 20))
    spec = TiltSpec(GaussianBlock(np.zeros(2), np.eye(2)),
                    lambda x, y, d: np.ones(x.shape[0]), mc_draws=200)
    x_tilde = second_order_tilted_knockoffs(sample, spec, 0)
    assert x_tilde.shape == x.shape
    assert np.array_equal(x_tilde, second_order_tilted_knockoffs(sample, spec, 0))


def test_sampler_picks_case_control_weights():
    rng = np.random.default_rng(5)
    selection = LogisticSelection(-1.0, GAMMA_X, 1.0)
    sampler = SecondOrderTiltKnockoffs(GaussianBlock(np.zeros(2), SIGMA_2D), selection)
    x = rng.standard_normal((10, 2))
    cc = case_control_sample(x, np.ones(10))
    spec = sampler.tilt_spec(cc)
    assert np.allclose(spec.weight_fn(x, 1.0, 0), stratum_prob(selection, x, 1.0, 0))
    spec = sampler.tilt_spec(LabeledSample(x=x, y=np.ones(10)))
    assert np.allclose(spec.weight_fn(x, 1.0, None), selection.prob(x, 1.0))


def test_rejection_sampling_exhausted():
    base = GaussianBlock(np.zeros(2), np.eye(2))
    with pytest.raises(DegenerateTiltError):
        rejection_sample_tilt(base, lambda x, y, d: np.zeros(x.shape[0]), (0.0,), 5, 0,
                              max_draws=20_000)
