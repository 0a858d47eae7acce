# -*- coding: utf-8 -*-
"""
Tilted distributions Q_y(x) ∝ P(x) P(S=1|x,y) and Q_{y,d}(x) ∝ P(x) P(D=d|x,y),
and knockoffs that are pairwise exchangeable with respect to them.

Two constructions are provided:

- the exact law when X is Gaussian and the case-control diagnosis
  probability is squared exponential: Q_y is then a mixture of two Gaussians
  whose parameters are closed-form functions of y;
- a second order approximation for any covariate law and selection law,
  where the mean and covariance of Q_y are estimated by self-normalized
  importance sampling and Gaussian knockoffs are drawn on these moments.
"""
import logging
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from joblib import Parallel, delayed
from scipy import linalg
from scipy.special import expit, logsumexp
from sklearn.base import BaseEstimator

from tiltko.knockoffs.gaussian import gaussian_knockoff_spec, sample_knockoffs
from tiltko.models.selection import (
    SquaredExponential, case_control_inclusion_prob, stratum_prob
)
from tiltko.utils.checks_utils import (
    ConvergenceWarning, DegenerateTiltError, InvalidMixtureWeightError,
    check_array_1D, check_n_jobs, check_positive_int, check_rng,
    check_square_matrix, child_rng, draw_seed
)
from tiltko.utils.linalg_utils import cholesky_factor, regularize_covariance

logger = logging.getLogger(__name__)

ESS_MIN = 50
IS_DRAWS_PER_DIM = 100
IS_DRAWS_CAP = 10**6
IS_CHUNK = 10_000
DEFAULT_N_BINS = 10
# Above this number of distinct values a response is treated as continuous.
MAX_DISCRETE_LEVELS = 20
KEY_DECIMALS = 12


# --------------------------------------------------------------------------- #
# Exact two-component Gaussian mixture
# --------------------------------------------------------------------------- #


@dataclass(frozen=True, eq=False)
class GaussianMixtureTilt:
    """
    Q_y(x) ∝ w1' k1(x) + w2 k2(x) with the unnormalized Gaussian kernels
    k1(x) = exp(-(x - mu_tilde)' Sigma_tilde^-1 (x - mu_tilde) / 2) and
    k2(x) = exp(-x' Sigma^-1 x / 2).

    The precision of the first component is Sigma^-1 + gamma_x gamma_x', its
    Mahalanobis term is evaluated as ||L^-1 u||^2 + (gamma_x' u)^2 with L the
    Cholesky factor of Sigma, so Sigma_tilde is never inverted.

    Attributes
    ----------
    sigma : array, shape=(p, p)
        Covariance of the population law N(0, Sigma).
    gamma_x : array, shape=(p)
    gamma_y : float
    y : float
        Conditioning response value.
    sigma_tilde : array, shape=(p, p)
    mu_tilde : array, shape=(p)
    log_w1_raw : float
        log w1', -inf when the case and control rates are equal.
    w2_raw : float
        Rate of the controls.
    """
    sigma: np.ndarray
    gamma_x: np.ndarray
    gamma_y: float
    y: float
    sigma_tilde: np.ndarray
    mu_tilde: np.ndarray
    log_w1_raw: float
    w2_raw: float
    chol: np.ndarray = field(repr=False)

    @property
    def w1_raw(self):
        return float(np.exp(self.log_w1_raw))

    @property
    def p(self):
        return self.sigma.shape[0]

    @property
    def log_det_ratio(self):
        """log(|Sigma_tilde| / |Sigma|) = -log(1 + gamma_x' Sigma gamma_x)."""
        return -np.log1p(self.gamma_x @ self.sigma @ self.gamma_x)

    def _maha(self, x):
        x = np.atleast_2d(x)
        u1 = x - self.mu_tilde
        m1 = np.sum(linalg.solve_triangular(self.chol, u1.T, lower=True) ** 2, axis=0)
        m1 += (u1 @ self.gamma_x) ** 2
        m2 = np.sum(linalg.solve_triangular(self.chol, x.T, lower=True) ** 2, axis=0)
        return m1, m2

    def component_log_weights(self, x):
        m1, m2 = self._maha(x)
        return self.log_w1_raw - 0.5 * m1, np.log(self.w2_raw) - 0.5 * m2

    def mixture_weights(self):
        """Normalized weights (pi1, pi2) of the two Gaussian components."""
        with np.errstate(divide='ignore'):
            logs = np.array([self.log_w1_raw + 0.5 * self.log_det_ratio,
                             np.log(self.w2_raw)])
        pi = np.exp(logs - logsumexp(logs))
        return float(pi[0]), float(pi[1])

    def log_density(self, x):
        """Normalized log density of Q_y at rows x."""
        x = np.atleast_2d(x)
        pi1, pi2 = self.mixture_weights()
        m1, m2 = self._maha(x)
        log_norm2 = -0.5 * (self.p * np.log(2 * np.pi)
                            + 2.0 * np.sum(np.log(np.diag(self.chol))))
        log_norm1 = log_norm2 - 0.5 * self.log_det_ratio
        with np.errstate(divide='ignore'):
            terms = np.stack([np.log(pi1) + log_norm1 - 0.5 * m1,
                              np.log(pi2) + log_norm2 - 0.5 * m2])
        return logsumexp(terms, axis=0)

    def moments(self):
        """Mean and covariance of the mixture."""
        pi1, pi2 = self.mixture_weights()
        mean = pi1 * self.mu_tilde
        second = pi1 * (self.sigma_tilde + np.outer(self.mu_tilde, self.mu_tilde))
        second += pi2 * self.sigma
        return mean, second - np.outer(mean, mean)


def _sherman_morrison_tilt(sigma, gamma_x):
    """Sigma_tilde = (Sigma^-1 + g g')^-1 = Sigma - Sigma g g' Sigma / (1 + g' Sigma g)."""
    sg = sigma @ gamma_x
    a = float(gamma_x @ sg)
    sigma_tilde = sigma - np.outer(sg, sg) / (1.0 + a)
    return (sigma_tilde + sigma_tilde.T) / 2.0, sg / (1.0 + a), a


def _log_w1(gamma_y, y, a, rate_case, rate_control):
    with np.errstate(divide='ignore'):
        log_diff = np.log(rate_case - rate_control)
    return log_diff - 0.5 * gamma_y ** 2 * np.asarray(y) ** 2 / (1.0 + a)


def _check_rates(rate_case, rate_control):
    if not (0.0 < rate_case <= 1.0 and 0.0 <= rate_control <= 1.0):
        raise ValueError(
            "Sampling rates must lie in (0, 1], got rate_case={} and "
            "rate_control={}".format(rate_case, rate_control)
        )
    if rate_case < rate_control:
        raise InvalidMixtureWeightError(
            "invalid mixture weight: rate_case ({:.4g}) < rate_control ({:.4g}) "
            "gives a negative first component".format(rate_case, rate_control)
        )


def exact_mixture_tilt(sigma, gamma_x, gamma_y, y, rate_case, rate_control):
    """
    Exact tilted law of a case-control sample with X ~ N(0, Sigma) and
    P(D=1|x,y) = exp(-(x gamma_x + y gamma_y)^2 / 2).

    A row of the pool is kept with probability
    r0 + (r1 - r0) exp(-v^2 / 2), so Q_y is the mixture
    (r1 - r0) N(x; 0, Sigma) exp(-v^2 / 2) + r0 N(x; 0, Sigma), the first
    term being a Gaussian kernel with covariance
    Sigma_tilde = (Sigma^-1 + gamma_x gamma_x')^-1 and mean
    mu_tilde = -Sigma_tilde gamma_x gamma_y y.

    Parameters
    ----------
    sigma : array, shape=(p, p)
        Positive definite covariance of X.
    gamma_x : array, shape=(p)
    gamma_y : float
    y : float
        Conditioning response value.
    rate_case : float
        n1 / N1, fraction of the pool cases that were sampled.
    rate_control : float
        n0 / N0, fraction of the pool controls that were sampled.

    Raises
    ------
    InvalidMixtureWeightError
        If rate_case < rate_control.
    NotPositiveDefiniteError
        If sigma is not positive definite.

    Returns
    -------
    GaussianMixtureTilt

    """
    sigma = check_square_matrix(sigma, name='sigma')
    gamma_x = check_array_1D(gamma_x, size=sigma.shape[0], name='gamma_x')
    _check_rates(rate_case, rate_control)
    chol = cholesky_factor(sigma, name='sigma')
    sigma_tilde, direction, a = _sherman_morrison_tilt(sigma, gamma_x)
    y = float(y)
    return GaussianMixtureTilt(
        sigma=sigma, gamma_x=gamma_x, gamma_y=float(gamma_y), y=y,
        sigma_tilde=sigma_tilde,
        mu_tilde=-direction * gamma_y * y,
        log_w1_raw=float(_log_w1(gamma_y, y, a, rate_case, rate_control)),
        w2_raw=float(rate_control),
        chol=chol,
    )


def component_posterior_q1(tilt, x_row):
    """
    Probability that x comes from the first mixture component,
    w1' k1(x) / (w1' k1(x) + w2 k2(x)), computed in log space.

    Accepts a single row or a matrix of rows.
    """
    with np.errstate(divide='ignore', invalid='ignore'):
        l1, l2 = tilt.component_log_weights(x_row)
        q1 = np.where(
            np.isneginf(l1), 0.0, np.where(np.isneginf(l2), 1.0, expit(l1 - l2))
        )
    return float(q1[0]) if np.ndim(x_row) == 1 else q1


def sample_mixture_knockoff(tilt, x_row, specs, rng=None):
    """
    Knockoff row for x under the mixture tilt.

    Draws Z ~ Bernoulli(q1(x)) and samples from the knockoff conditional of
    the first component when Z = 1, of the second otherwise.

    Parameters
    ----------
    tilt : GaussianMixtureTilt
    x_row : array, shape=(p)
    specs : tuple of GaussianKnockoffSpec
        Specs built on (mu_tilde, Sigma_tilde) and (0, Sigma).
    rng : None, int or Generator, optional

    Returns
    -------
    array, shape=(p)

    """
    rng = check_rng(rng)
    x = np.atleast_2d(np.asarray(x_row, dtype=np.float64))
    z = rng.random() < component_posterior_q1(tilt, x[0])
    return sample_knockoffs(specs[0] if z else specs[1], x, rng)[0]


def exact_tilted_knockoffs(labeled_sample, sigma, selection, rng=None):
    """
    Exact tilted knockoffs for a whole case-control sample.

    Sigma_tilde and both knockoff conditionals are shared by all rows, only
    mu_tilde and q1 depend on the response of the row.

    Parameters
    ----------
    labeled_sample : LabeledSample
        Case-control sample with its sampling rates.
    sigma : array, shape=(p, p)
        Covariance of the centered Gaussian covariates.
    selection : SquaredExponential
        Diagnosis probability.
    rng : None, int or Generator, optional

    Returns
    -------
    x_tilde : array, shape=(n, p)

    """
    rng = check_rng(rng)
    if not isinstance(selection, SquaredExponential):
        raise ValueError("The exact tilt requires a SquaredExponential selection law")
    if labeled_sample.rate_case is None:
        raise ValueError("The exact tilt requires a case-control sample")
    x, y = labeled_sample.x, labeled_sample.y
    p = x.shape[1]
    base = exact_mixture_tilt(sigma, selection.gamma_x, selection.gamma_y, 0.0,
                              labeled_sample.rate_case, labeled_sample.rate_control)
    _, direction, a = _sherman_morrison_tilt(base.sigma, base.gamma_x)
    mu_rows = -np.outer(y, direction) * selection.gamma_y
    log_w1 = _log_w1(selection.gamma_y, y, a,
                     labeled_sample.rate_case, labeled_sample.rate_control)

    u1 = x - mu_rows
    m1 = np.sum(linalg.solve_triangular(base.chol, u1.T, lower=True) ** 2, axis=0)
    m1 += (u1 @ base.gamma_x) ** 2
    m2 = np.sum(linalg.solve_triangular(base.chol, x.T, lower=True) ** 2, axis=0)
    with np.errstate(divide='ignore', invalid='ignore'):
        l1 = log_w1 - 0.5 * m1
        l2 = np.log(base.w2_raw) - 0.5 * m2
        q1 = np.where(np.isneginf(l1), 0.0, np.where(np.isneginf(l2), 1.0, expit(l1 - l2)))
    z = rng.random(x.shape[0]) < q1
    logger.debug("Exact tilt: {} of {} rows drawn from the first component".format(
        int(z.sum()), x.shape[0]))

    spec1 = gaussian_knockoff_spec(np.zeros(p), base.sigma_tilde)
    spec2 = gaussian_knockoff_spec(np.zeros(p), base.sigma)
    x_tilde = np.empty_like(x)
    if z.any():
        x_tilde[z] = sample_knockoffs(spec1, x[z], rng, mu=mu_rows[z])
    if (~z).any():
        x_tilde[~z] = sample_knockoffs(spec2, x[~z], rng)
    return x_tilde


# --------------------------------------------------------------------------- #
# Second order approximation by importance sampling
# --------------------------------------------------------------------------- #


@dataclass(frozen=True, eq=False)
class TiltSpec:
    """
    Definition of Q_y (or Q_{y,d}) as a reweighted base law.

    Parameters
    ----------
    base : GaussianBlock or MarkovChain3
        Population law of X, anything with a sample(n, rng) method.
    weight_fn : callable
        weight_fn(x, y, d) -> array of non-negative weights for the rows of x.
        d is None for a tilt keyed by y only.
    mc_draws : int, optional
        Number K of importance draws. None gives min(100 p, 10^6).
    """
    base: object
    weight_fn: Callable
    mc_draws: Optional[int] = None

    @property
    def n_draws(self):
        if self.mc_draws is not None:
            return check_positive_int(self.mc_draws, 'mc_draws')
        return min(IS_DRAWS_PER_DIM * self.base.p, IS_DRAWS_CAP)

    @classmethod
    def for_selection(cls, base, selection, mc_draws=None):
        """Q_y(x) ∝ P(x) P(S=1|x,y)."""
        return cls(base, lambda x, y, d: selection.prob(x, y), mc_draws)

    @classmethod
    def for_case_control(cls, base, selection, mc_draws=None):
        """Q_{y,d}(x) ∝ P(x) P(D=d|x,y)."""
        return cls(base, lambda x, y, d: stratum_prob(selection, x, y, d), mc_draws)

    @classmethod
    def for_inclusion(cls, base, selection, rate_case, rate_control, mc_draws=None):
        """Q_y(x) ∝ P(x) (r0 + (r1 - r0) P(D=1|x,y)), d ignored."""
        return cls(
            base,
            lambda x, y, d: case_control_inclusion_prob(
                selection, x, y, rate_case, rate_control),
            mc_draws
        )


@dataclass(frozen=True, eq=False)
class TiltedMoments:
    """
    Importance sampling estimate of the mean and covariance of Q_y.

    Attributes
    ----------
    key : tuple
        (y,) or (y, d).
    mu_hat : array, shape=(p)
    sigma_hat : array, shape=(p, p)
        Symmetrized and ridge regularized covariance.
    ess : float
        Effective sample size (sum w)^2 / sum w^2.
    ridge : float
        Ridge added to the diagonal of sigma_hat.
    n_draws : int
    warnings : tuple of str
    """
    key: tuple
    mu_hat: np.ndarray
    sigma_hat: np.ndarray
    ess: float
    ridge: float
    n_draws: int
    warnings: tuple = ()


def estimate_tilted_moments(spec, key, rng=None, ess_min=ESS_MIN, chunk_size=IS_CHUNK):
    """
    Self-normalized importance sampling estimate of the moments of Q_y.

    Draws X_k from the base law, weights them by w_k = weight_fn(X_k, y, d)
    and returns mu = sum w X / sum w and
    Sigma = sum w X X' / sum w - mu mu', symmetrized and ridge regularized.
    Draws are processed by chunks so that memory does not grow with K.

    Parameters
    ----------
    spec : TiltSpec
    key : tuple
        (y,) or (y, d).
    rng : None, int or Generator, optional
    ess_min : float, optional
        A ConvergenceWarning is emitted and recorded on the result below this
        effective sample size. The default is 50.
    chunk_size : int, optional
        Number of draws held in memory at once. The default is 10000.

    Raises
    ------
    DegenerateTiltError
        If all the weights are zero.

    Returns
    -------
    TiltedMoments

    """
    rng = check_rng(rng)
    key = tuple(key)
    y = key[0]
    d = key[1] if len(key) > 1 else None
    n_draws = spec.n_draws
    p = spec.base.p
    sw, sw2 = 0.0, 0.0
    swx = np.zeros(p)
    swxx = np.zeros((p, p))
    remaining = n_draws
    while remaining > 0:
        n_chunk = min(chunk_size, remaining)
        remaining -= n_chunk
        x = spec.base.sample(n_chunk, rng)
        w = np.asarray(spec.weight_fn(x, y, d), dtype=np.float64)
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("weight_fn must return finite non-negative weights")
        sw += w.sum()
        sw2 += w @ w
        swx += w @ x
        swxx += (x * w[:, None]).T @ x
    if sw <= 0:
        raise DegenerateTiltError(
            "degenerate tilt: all {} importance weights are zero for key {}".format(
                n_draws, key)
        )
    mu_hat = swx / sw
    sigma_hat, ridge = regularize_covariance(swxx / sw - np.outer(mu_hat, mu_hat))
    ess = sw ** 2 / sw2
    notes = []
    if ess < ess_min:
        msg = "Effective sample size {:.1f} below {} for key {}".format(ess, ess_min, key)
        warnings.warn(msg, ConvergenceWarning)
        logger.warning(msg)
        notes.append(msg)
    logger.debug("Tilted moments for key {}: ESS={:.1f}, ridge={:.2e}".format(
        key, ess, ridge))
    return TiltedMoments(key, mu_hat, sigma_hat, float(ess), ridge, n_draws, tuple(notes))


def canonical_key(y, d=None):
    y = float(np.round(y, KEY_DECIMALS)) + 0.0
    return (y,) if d is None else (y, int(d))


def discretize_response(y, n_bins=DEFAULT_N_BINS):
    """
    Replace a continuous response by the midpoint of its quantile bin.

    Parameters
    ----------
    y : array, shape=(n)
    n_bins : int, optional
        Number of quantile bins. The default is 10.

    Returns
    -------
    array, shape=(n)

    """
    y = check_array_1D(y, name='y')
    n_bins = check_positive_int(n_bins, 'n_bins')
    edges = np.unique(np.quantile(y, np.linspace(0, 1, n_bins + 1)))
    if edges.size < 2:
        return y.copy()
    bins = np.clip(np.searchsorted(edges, y, side='right') - 1, 0, edges.size - 2)
    return (edges[bins] + edges[bins + 1]) / 2.0


def group_keys(labeled_sample, n_bins=None):
    """
    Conditioning key of each row: (y,) or (y, d).

    Raises
    ------
    ValueError
        If y is continuous and n_bins is None.

    Returns
    -------
    keys : list of tuple
        Sorted distinct keys.
    inverse : array, shape=(n)
        Position in keys of the key of each row.

    """
    y = labeled_sample.y
    if n_bins is not None:
        y = discretize_response(y, n_bins)
    elif np.unique(y).size > MAX_DISCRETE_LEVELS:
        raise ValueError(
            "The response takes {} distinct values, set n_bins to condition on "
            "quantile bins of a continuous response".format(np.unique(y).size)
        )
    d = labeled_sample.d
    row_keys = [canonical_key(y[i], None if d is None else d[i]) for i in range(y.shape[0])]
    keys = sorted(set(row_keys))
    position = {k: i for i, k in enumerate(keys)}
    return keys, np.array([position[k] for k in row_keys], dtype=np.int64)


def tilted_moments_by_group(labeled_sample, spec, rng=None, n_bins=None, n_jobs=1):
    """
    Estimate TiltedMoments for each conditioning key of the sample.

    Each group consumes its own child stream derived from one seed drawn
    from rng and the position of its key in sorted order.

    Returns
    -------
    keys : list of tuple
    inverse : array, shape=(n)
    moments : list of TiltedMoments
        Aligned with keys.

    """
    rng = check_rng(rng)
    keys, inverse = group_keys(labeled_sample, n_bins)
    seed = draw_seed(rng)
    moments = Parallel(n_jobs=check_n_jobs(n_jobs))(
        delayed(estimate_tilted_moments)(spec, key, child_rng(seed, i))
        for i, key in enumerate(keys)
    )
    return keys, inverse, moments


def second_order_tilted_knockoffs(labeled_sample, spec, rng=None, n_bins=None, n_jobs=1):
    """
    Second order tilted knockoffs.

    Rows are grouped by y, or by (y, d) in a case-control sample. For each
    group the moments of the tilted law are estimated and Gaussian knockoffs
    with the equicorrelated s of the estimated covariance are drawn for the
    rows of the group. Row order is preserved.

    Parameters
    ----------
    labeled_sample : LabeledSample
    spec : TiltSpec
    rng : None, int or Generator, optional
    n_bins : int, optional
        Number of quantile bins of a continuous response. The default is
        None, which requires a discrete response.
    n_jobs : int, optional
        Workers for the per-group moment estimation. The default is 1.

    Returns
    -------
    x_tilde : array, shape=(n, p)

    """
    rng = check_rng(rng)
    keys, inverse, moments = tilted_moments_by_group(
        labeled_sample, spec, rng, n_bins=n_bins, n_jobs=n_jobs)
    x = labeled_sample.x
    x_tilde = np.empty_like(x)
    for i, m in enumerate(moments):
        rows = inverse == i
        logger.debug("Group {}: {} rows, ESS={:.1f}".format(keys[i], int(rows.sum()), m.ess))
        ko_spec = gaussian_knockoff_spec(m.mu_hat, m.sigma_hat)
        x_tilde[rows] = sample_knockoffs(ko_spec, x[rows], rng)
    return x_tilde


def rejection_sample_tilt(base, weight_fn, key, n, rng=None, max_draws=10**7):
    """
    Exact draws from Q_y by rejection: X ~ P is accepted with probability
    weight_fn(X, y, d), which must be bounded by 1.

    Raises
    ------
    DegenerateTiltError
        If fewer than n draws are accepted within max_draws proposals.

    """
    rng = check_rng(rng)
    y = key[0]
    d = key[1] if len(key) > 1 else None
    accepted = []
    n_accepted, n_proposed = 0, 0
    while n_accepted < n:
        if n_proposed >= max_draws:
            raise DegenerateTiltError(
                "Only {} of {} draws accepted after {} proposals".format(
                    n_accepted, n, n_proposed))
        x = base.sample(IS_CHUNK, rng)
        n_proposed += IS_CHUNK
        keep = rng.random(IS_CHUNK) < weight_fn(x, y, d)
        accepted.append(x[keep])
        n_accepted += int(keep.sum())
    return np.concatenate(accepted)[:n]


# --------------------------------------------------------------------------- #
# Samplers sharing the sample(labeled_sample, rng) interface
# --------------------------------------------------------------------------- #


class ExactTiltKnockoffs(BaseEstimator):
    """
    Exact tilted knockoffs of a case-control sample with Gaussian covariates
    and a squared exponential diagnosis probability.

    Parameters
    ----------
    sigma : array, shape=(p, p)
        Covariance of the centered Gaussian covariates.
    selection : SquaredExponential
        Diagnosis probability P(D=1|x,y).
    """

    def __init__(self, sigma, selection):
        self.sigma = sigma
        self.selection = selection

    def sample(self, labeled_sample, rng=None):
        return exact_tilted_knockoffs(labeled_sample, self.sigma, self.selection, rng)


class SecondOrderTiltKnockoffs(BaseEstimator):
    """
    Second order tilted knockoffs.

    In a case-control sample rows are grouped by (y, d) and weighted by
    P(D=d|x,y), otherwise they are grouped by y and weighted by P(S=1|x,y).

    Parameters
    ----------
    covariates : GaussianBlock or MarkovChain3
        Population law of X.
    selection : LogisticSelection or SquaredExponential
        Selection law, known or estimated.
    mc_draws : int, optional
        Importance draws per group. The default is None (100 p, capped).
    n_bins : int, optional
        Quantile bins of a continuous response. The default is None.
    n_jobs : int, optional
        Workers for the per-group moment estimation. The default is 1.
    """

    def __init__(self, covariates, selection, mc_draws=None, n_bins=None, n_jobs=1):
        self.covariates = covariates
        self.selection = selection
        self.mc_draws = mc_draws
        self.n_bins = n_bins
        self.n_jobs = n_jobs

    def tilt_spec(self, labeled_sample):
        if labeled_sample.d is not None:
            return TiltSpec.for_case_control(self.covariates, self.selection, self.mc_draws)
        return TiltSpec.for_selection(self.covariates, self.selection, self.mc_draws)

    def sample(self, labeled_sample, rng=None):
        return second_order_tilted_knockoffs(
            labeled_sample, self.tilt_spec(labeled_sample), rng,
            n_bins=self.n_bins, n_jobs=self.n_jobs
        )
