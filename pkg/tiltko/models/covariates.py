# -*- coding: utf-8 -*-
"""
Population laws of the covariates X.
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import linalg

from tiltko.utils.checks_utils import (
    check_array_1D, check_square_matrix, check_positive_int, check_is_boolean,
    check_rng
)
from tiltko.utils.linalg_utils import cholesky_factor

# Transition matrix of the three-state chain used by the case-control
# scenario with estimated selection parameters.
DEFAULT_TRANSITION = np.array([
    [0.5, 0.3, 0.2],
    [0.2, 0.5, 0.3],
    [0.3, 0.2, 0.5],
])
MARKOV_STATES = np.array([0.0, 1.0, 2.0])


def block_toeplitz_covariance(p, block_size=10, rho=0.5):
    """
    Block diagonal covariance with blocks Sigma_ij = rho^|i-j|.

    Parameters
    ----------
    p : int
        Dimension. The last block is truncated when block_size does not
        divide p.
    block_size : int, optional
        Size of the diagonal blocks. The default is 10.
    rho : float, optional
        Correlation decay inside a block. The default is 0.5.

    Returns
    -------
    sigma : array, shape=(p, p)

    """
    p = check_positive_int(p, 'p')
    block_size = check_positive_int(block_size, 'block_size')
    idx = np.arange(p)
    same_block = (idx[:, None] // block_size) == (idx[None, :] // block_size)
    return np.where(same_block, rho ** np.abs(idx[:, None] - idx[None, :]), 0.0)


@dataclass(frozen=True, eq=False)
class GaussianBlock:
    """
    Multivariate Gaussian covariates N(mu, sigma).

    Parameters
    ----------
    mu : array, shape=(p)
        Mean vector.
    sigma : array, shape=(p, p)
        Symmetric positive definite covariance.
    """
    mu: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        sigma = check_square_matrix(self.sigma, name='sigma')
        mu = check_array_1D(self.mu, size=sigma.shape[0], name='mu')
        if not np.allclose(sigma, sigma.T):
            raise ValueError('sigma must be symmetric')
        object.__setattr__(self, 'mu', mu)
        object.__setattr__(self, 'sigma', sigma)

    @classmethod
    def block_toeplitz(cls, p, block_size=10, rho=0.5):
        return cls(np.zeros(p), block_toeplitz_covariance(p, block_size, rho))

    @property
    def p(self):
        return self.mu.shape[0]

    @cached_property
    def chol(self):
        return cholesky_factor(self.sigma, name='sigma')

    def moments(self):
        """Population mean and covariance."""
        return self.mu.copy(), self.sigma.copy()

    def sample(self, n, rng=None):
        rng = check_rng(rng)
        z = rng.standard_normal((n, self.p))
        return self.mu + z @ self.chol.T


@dataclass(frozen=True, eq=False)
class MarkovChain3:
    """
    Stationary three-state Markov chain along the covariate index.

    States take the values 0, 1 and 2. The first coordinate is drawn from the
    stationary distribution, each next coordinate from the row of the
    transition matrix given by the current state. When centered, the exact
    stationary mean is subtracted so the law does not depend on the sample.

    Parameters
    ----------
    transition : array, shape=(3, 3)
        Row-stochastic transition matrix.
    p : int
        Number of covariates (chain length).
    centered : bool, optional
        Whether to subtract the stationary mean. The default is True.
    """
    transition: np.ndarray
    p: int
    centered: bool = True

    def __post_init__(self):
        P = check_square_matrix(self.transition, name='transition')
        if P.shape != (3, 3):
            raise ValueError('transition must be a 3x3 matrix, got {}'.format(P.shape))
        if np.any(P < 0) or np.any(P > 1) or not np.allclose(P.sum(axis=1), 1.0):
            raise ValueError('transition rows must be probability vectors')
        object.__setattr__(self, 'transition', P)
        object.__setattr__(self, 'p', check_positive_int(self.p, 'p'))
        object.__setattr__(self, 'centered', check_is_boolean(self.centered))

    @cached_property
    def stationary(self):
        """Stationary distribution, the left eigenvector for eigenvalue 1."""
        lam, vecs = linalg.eig(self.transition.T)
        v = np.real(vecs[:, np.argmin(np.abs(lam - 1.0))])
        return v / v.sum()

    @cached_property
    def state_mean(self):
        return float(self.stationary @ MARKOV_STATES)

    def moments(self):
        """
        Exact mean and covariance of the chain at stationarity.

        Cov(X_i, X_j) = sum_{k,l} pi_k v_k v_l (P^|i-j|)_{kl} - m^2 with v the
        state values and m the stationary mean.
        """
        pi, v, m = self.stationary, MARKOV_STATES, self.state_mean
        lag_cov = np.empty(self.p)
        Pk = np.eye(3)
        for lag in range(self.p):
            lag_cov[lag] = (pi * v) @ Pk @ v - m ** 2
            Pk = Pk @ self.transition
        idx = np.arange(self.p)
        sigma = lag_cov[np.abs(idx[:, None] - idx[None, :])]
        mu = np.zeros(self.p) if self.centered else np.full(self.p, m)
        return mu, sigma

    def sample(self, n, rng=None):
        rng = check_rng(rng)
        cum = np.cumsum(self.transition, axis=1)
        cum[:, -1] = 1.0
        states = np.empty((n, self.p), dtype=np.int64)
        states[:, 0] = rng.choice(3, size=n, p=self.stationary)
        u = rng.random((n, self.p - 1))
        for j in range(1, self.p):
            rows = cum[states[:, j - 1]]
            states[:, j] = (u[:, j - 1, None] > rows).sum(axis=1)
        X = MARKOV_STATES[states]
        if self.centered:
            X = X - self.state_mean
        return X


def sample_covariates(model, n, rng=None):
    """
    Draw n i.i.d. rows from a covariate law.

    Parameters
    ----------
    model : GaussianBlock or MarkovChain3
        Covariate law.
    n : int
        Number of rows.
    rng : None, int or Generator, optional
        Random stream. The default is None.

    Raises
    ------
    NotPositiveDefiniteError
        If a Gaussian covariance cannot be factorized.

    Returns
    -------
    X : array, shape=(n, p)

    """
    n = check_positive_int(n, 'n')
    return model.sample(n, rng)
