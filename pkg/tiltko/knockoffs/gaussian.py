# -*- coding: utf-8 -*-
"""
Gaussian model-X knockoffs: equicorrelated decorrelation vector and
sampling of X_tilde | X from the exchangeable conditional law.
"""
from dataclasses import dataclass

import numpy as np
from scipy import linalg
from sklearn.base import BaseEstimator

from tiltko.utils.checks_utils import (
    NotPositiveDefiniteError, check_array_1D, check_array_2D, check_square_matrix,
    check_rng
)
from tiltko.utils.linalg_utils import (
    PSD_TOL, cholesky_factor, min_eigenvalue, psd_factor, symmetrize
)

# Applied to s when the equicorrelation bound 2 * lambda_min(R) binds.
S_SHRINK = 1.0 - 1e-6


def solve_s_equicorrelation(sigma):
    """
    Equicorrelated decorrelation vector.

    With R the correlation matrix of sigma, s_corr = min(2 lambda_min(R), 1)
    and s_j = s_corr * sigma_jj. When 2 lambda_min(R) <= 1 the value is
    multiplied by S_SHRINK so that the conditional covariance stays
    numerically positive definite.

    Parameters
    ----------
    sigma : array, shape=(p, p)
        Positive definite covariance.

    Raises
    ------
    NotPositiveDefiniteError
        If sigma is not positive definite.

    Returns
    -------
    s : array, shape=(p)

    """
    sigma = check_square_matrix(sigma, name='sigma')
    cholesky_factor(sigma, name='sigma')
    sd = np.sqrt(np.diag(sigma))
    corr = sigma / np.outer(sd, sd)
    bound = 2.0 * min_eigenvalue(corr)
    s_corr = min(bound, 1.0)
    if bound <= 1.0:
        s_corr *= S_SHRINK
    return np.full(sigma.shape[0], max(s_corr, 0.0)) * np.diag(sigma)


@dataclass(frozen=True, eq=False)
class GaussianKnockoffSpec:
    """
    Conditional law X_tilde | X ~ N(x - (x - mu) Sigma^-1 diag(s),
    2 diag(s) - diag(s) Sigma^-1 diag(s)) for rows x.

    Attributes
    ----------
    mu : array, shape=(p)
    sigma : array, shape=(p, p)
    s : array, shape=(p)
    cond_mean_map : array, shape=(p, p)
        diag(s) Sigma^-1.
    cond_cov_chol : array, shape=(p, p)
        Factor F of the conditional covariance, F @ F.T == C.
    """
    mu: np.ndarray
    sigma: np.ndarray
    s: np.ndarray
    cond_mean_map: np.ndarray
    cond_cov_chol: np.ndarray

    @property
    def p(self):
        return self.mu.shape[0]

    def joint_covariance(self):
        """G = [[Sigma, Sigma - diag(s)], [Sigma - diag(s), Sigma]]."""
        off = self.sigma - np.diag(self.s)
        return np.block([[self.sigma, off], [off, self.sigma]])


def build_spec(mu, sigma, s, tol=PSD_TOL):
    """
    Precompute the conditional law of Gaussian knockoffs.

    The joint matrix G is positive semi-definite if and only if diag(s) and
    2 Sigma - diag(s) are, its spectrum being the union of both spectra.

    Parameters
    ----------
    mu : array, shape=(p)
    sigma : array, shape=(p, p)
        Positive definite covariance.
    s : array, shape=(p)
        Non-negative decorrelation vector.
    tol : float, optional
        Tolerance relative to the largest diagonal entry. The default is 1e-8.

    Raises
    ------
    NotPositiveDefiniteError
        If G has an eigenvalue below the tolerance. The error carries the
        most negative eigenvalue.

    Returns
    -------
    GaussianKnockoffSpec

    """
    sigma = symmetrize(check_square_matrix(sigma, name='sigma'))
    p = sigma.shape[0]
    mu = check_array_1D(mu, size=p, name='mu')
    s = check_array_1D(s, size=p, name='s')
    scale = max(float(np.max(np.diag(sigma))), 1.0)
    lam = min(float(s.min()), min_eigenvalue(2.0 * sigma - np.diag(s)))
    if lam < -tol * scale:
        raise NotPositiveDefiniteError(
            "The joint knockoff covariance is not positive semi-definite "
            "(most negative eigenvalue {:.3e})".format(lam),
            min_eigenvalue=lam
        )
    L = cholesky_factor(sigma, name='sigma')
    # Sigma^-1 diag(s)
    sigma_inv_s = linalg.cho_solve((L, True), np.diag(s), check_finite=False)
    cond_cov = 2.0 * np.diag(s) - np.diag(s) @ sigma_inv_s
    return GaussianKnockoffSpec(
        mu=mu, sigma=sigma, s=s,
        cond_mean_map=sigma_inv_s.T,
        cond_cov_chol=psd_factor(cond_cov),
    )


def sample_knockoffs(spec, x, rng=None, mu=None):
    """
    Draw one knockoff row for each row of x.

    Parameters
    ----------
    spec : GaussianKnockoffSpec
    x : array, shape=(n, p)
    rng : None, int or Generator, optional
    mu : array, shape=(p) or (n, p), optional
        Mean to use instead of spec.mu, possibly one per row. Only the mean
        moves, the conditional covariance of the spec is kept.

    Returns
    -------
    x_tilde : array, shape=(n, p)

    """
    rng = check_rng(rng)
    x = check_array_2D(x, n_columns=spec.p)
    mu = spec.mu if mu is None else np.asarray(mu, dtype=np.float64)
    mean = x - (x - mu) @ spec.cond_mean_map.T
    z = rng.standard_normal(x.shape)
    return mean + z @ spec.cond_cov_chol.T


def gaussian_knockoff_spec(mu, sigma):
    """Spec with the equicorrelated s of sigma."""
    return build_spec(mu, sigma, solve_s_equicorrelation(sigma))


class StandardKnockoffs(BaseEstimator):
    """
    Standard Gaussian model-X knockoffs built on the population law of X,
    ignoring how the sample was drawn.

    Parameters
    ----------
    mu : array, shape=(p)
        Population mean of X.
    sigma : array, shape=(p, p)
        Population covariance of X.
    """

    def __init__(self, mu, sigma):
        self.mu = mu
        self.sigma = sigma

    def sample(self, labeled_sample, rng=None):
        spec = gaussian_knockoff_spec(self.mu, self.sigma)
        return sample_knockoffs(spec, labeled_sample.x, rng)
