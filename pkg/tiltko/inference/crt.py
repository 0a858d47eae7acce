# -*- coding: utf-8 -*-
"""
Tilted conditional randomization test: resample X_j from its conditional
law under the tilted distribution and compare the observed statistic to the
resampled ones with a rank p-value.
"""
import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import linalg
from scipy.special import expit

from tiltko.utils.checks_utils import check_positive_int, check_rng
from tiltko.utils.linalg_utils import conditional_gaussian

logger = logging.getLogger(__name__)


def marginal_covariance(xj, x_rest, y):
    """|x_j' (y - y_bar)| / n."""
    return float(np.abs(xj @ (y - y.mean())) / y.shape[0])


def conditional_gaussian_draw(moments, x_row, j, rng=None):
    """
    One draw of X_j given x_{-j} under N(mu_hat, sigma_hat).

    Parameters
    ----------
    moments : TiltedMoments
    x_row : array, shape=(p)
    j : int
    rng : None, int or Generator, optional

    Raises
    ------
    NotPositiveDefiniteError
        If sigma_hat restricted to the other coordinates is not positive
        definite.

    Returns
    -------
    float

    """
    rng = check_rng(rng)
    coef, intercept, variance = conditional_gaussian(moments.mu_hat, moments.sigma_hat, j)
    mean = intercept + coef @ np.delete(np.asarray(x_row, dtype=np.float64), j)
    return float(mean + np.sqrt(variance) * rng.standard_normal())


class _ColumnSampler:
    """Draws a full column X_j^(k) given the fixed other columns."""

    def __init__(self, means, sds, q1=None, means2=None, sds2=None):
        self.means, self.sds = means, sds
        self.q1, self.means2, self.sds2 = q1, means2, sds2

    def draw(self, rng):
        z = rng.standard_normal(self.means.shape[0])
        column = self.means + self.sds * z
        if self.q1 is not None:
            second = rng.random(self.q1.shape[0]) >= self.q1
            column[second] = self.means2[second] + self.sds2[second] * z[second]
        return column


def _gaussian_conditional_rows(mu, sigma, x, j):
    coef, intercept, variance = conditional_gaussian(mu, sigma, j)
    means = intercept + np.delete(x, j, axis=1) @ coef
    return means, np.full(x.shape[0], np.sqrt(variance))


class GaussianConditionalResampler:
    """
    Gaussian conditional of X_j given X_{-j} per group of rows.

    Parameters
    ----------
    inverse : array, shape=(n)
        Group of each row.
    moments : list of TiltedMoments or of (mu, sigma) pairs
        Moments of each group.
    """

    def __init__(self, inverse, moments):
        self.inverse = np.asarray(inverse, dtype=np.int64)
        self.moments = [
            (m.mu_hat, m.sigma_hat) if hasattr(m, 'mu_hat') else m for m in moments
        ]

    @classmethod
    def population(cls, mu, sigma, n):
        """Unadjusted resampler using the population law for every row."""
        return cls(np.zeros(n, dtype=np.int64), [(mu, sigma)])

    def prepare(self, x, j):
        means = np.empty(x.shape[0])
        sds = np.empty(x.shape[0])
        for g, (mu, sigma) in enumerate(self.moments):
            rows = self.inverse == g
            if rows.any():
                means[rows], sds[rows] = _gaussian_conditional_rows(mu, sigma, x[rows], j)
        return _ColumnSampler(means, sds)


class MixtureConditionalResampler:
    """
    Conditional of X_j given (X_{-j}, y) under the exact two-component tilt.

    The component is drawn from its posterior given x_{-j}, computed from
    the Gaussian marginals of x_{-j} under each component, then X_j is drawn
    from the Gaussian conditional of that component.

    Parameters
    ----------
    tilt : GaussianMixtureTilt
        Tilt at y = 0; the mean and weight of the first component are
        recomputed for the response of each row.
    y : array, shape=(n)
    rate_case, rate_control : float
    """

    def __init__(self, tilt, y, rate_case, rate_control):
        self.tilt = tilt
        self.y = np.asarray(y, dtype=np.float64)
        self.rate_case = rate_case
        self.rate_control = rate_control

    def prepare(self, x, j):
        tilt = self.tilt
        p = tilt.p
        sg = tilt.sigma @ tilt.gamma_x
        a = float(tilt.gamma_x @ sg)
        mu_rows = -np.outer(self.y, sg / (1.0 + a)) * tilt.gamma_y
        with np.errstate(divide='ignore'):
            log_pi1 = (np.log(self.rate_case - self.rate_control)
                       - 0.5 * tilt.gamma_y ** 2 * self.y ** 2 / (1.0 + a)
                       - 0.5 * np.log1p(a))
            log_pi2 = np.log(self.rate_control)

        others = np.delete(np.arange(p), j)
        x_rest = x[:, others]
        means, sds, log_m = [], [], []
        for sigma, mu in ((tilt.sigma_tilde, mu_rows), (tilt.sigma, np.zeros_like(mu_rows))):
            coef, _, variance = conditional_gaussian(np.zeros(p), sigma, j)
            means.append(mu[:, j] + (x_rest - mu[:, others]) @ coef)
            sds.append(np.full(x.shape[0], np.sqrt(variance)))
            s_oo = sigma[np.ix_(others, others)]
            L = linalg.cholesky(s_oo, lower=True)
            u = linalg.solve_triangular(L, (x_rest - mu[:, others]).T, lower=True)
            log_m.append(-0.5 * np.sum(u ** 2, axis=0) - np.sum(np.log(np.diag(L))))
        with np.errstate(divide='ignore', invalid='ignore'):
            l1, l2 = log_pi1 + log_m[0], log_pi2 + log_m[1]
            q1 = np.where(np.isneginf(l1), 0.0, np.where(np.isneginf(l2), 1.0, expit(l1 - l2)))
        return _ColumnSampler(means[0], sds[0], q1, means[1], sds[1])


@dataclass(frozen=True, eq=False)
class CrtConfig:
    """
    Parameters
    ----------
    j : int
        Tested column.
    K : int
        Number of resamples, 0 gives p = 1.
    resampler : GaussianConditionalResampler or MixtureConditionalResampler
    statistic : callable, optional
        statistic(x_j, x_{-j}, y) -> float. The default is
        |x_j' (y - y_bar)| / n.
    """
    j: int
    K: int
    resampler: object
    statistic: Callable = marginal_covariance

    def __post_init__(self):
        check_positive_int(self.K, 'K', minimum=0)
        check_positive_int(self.j, 'j', minimum=0)


def crt_pvalue(labeled_sample, cfg, rng=None):
    """
    Rank p-value (1 + #{k : T^(k) >= T}) / (K + 1).

    Each of the K resamples redraws the whole column j, one value per row,
    and evaluates the statistic once.

    Raises
    ------
    ValueError
        If the statistic is not finite.

    Returns
    -------
    float
        A value of the lattice {m / (K + 1) : m = 1..K+1}.

    """
    rng = check_rng(rng)
    x, y, j = labeled_sample.x, labeled_sample.y, cfg.j
    if j >= x.shape[1]:
        raise ValueError("j={} is out of range for p={}".format(j, x.shape[1]))
    x_rest = np.delete(x, j, axis=1)

    def _stat(column):
        value = cfg.statistic(column, x_rest, y)
        if not np.isfinite(value):
            raise ValueError("The CRT statistic is not finite: {}".format(value))
        return value

    observed = _stat(x[:, j])
    if cfg.K == 0:
        return 1.0
    sampler = cfg.resampler.prepare(x, j)
    exceed = sum(_stat(sampler.draw(rng)) >= observed for _ in range(cfg.K))
    logger.debug("CRT on column {}: {} of {} resamples at least as large".format(
        j, exceed, cfg.K))
    return (1 + exceed) / (cfg.K + 1)
