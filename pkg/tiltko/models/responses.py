# -*- coding: utf-8 -*-
"""
Laws of the response Y given the covariates X.
"""
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from tiltko.utils.checks_utils import (
    check_array_1D, check_array_2D, check_is_numeric, check_rng
)


@dataclass(frozen=True, eq=False)
class LinearGaussian:
    """
    Y = X beta + eps with eps ~ N(0, noise_sd^2).

    Parameters
    ----------
    beta : array, shape=(p)
        Regression coefficients.
    noise_sd : float, optional
        Standard deviation of the noise. The default is 1.0.
    """
    beta: np.ndarray
    noise_sd: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, 'beta', check_array_1D(self.beta, name='beta'))
        noise_sd = check_is_numeric(self.noise_sd)
        if noise_sd <= 0:
            raise ValueError('noise_sd must be positive, got {}'.format(noise_sd))
        object.__setattr__(self, 'noise_sd', float(noise_sd))

    @property
    def p(self):
        return self.beta.shape[0]

    def sample(self, x, rng=None):
        rng = check_rng(rng)
        return x @ self.beta + self.noise_sd * rng.standard_normal(x.shape[0])


@dataclass(frozen=True, eq=False)
class Logistic:
    """
    Binary response with P(Y=1|X) = 1 / (1 + exp(-X beta)).

    Parameters
    ----------
    beta : array, shape=(p)
        Regression coefficients.
    """
    beta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'beta', check_array_1D(self.beta, name='beta'))

    @property
    def p(self):
        return self.beta.shape[0]

    def sample(self, x, rng=None):
        rng = check_rng(rng)
        return (rng.random(x.shape[0]) < expit(x @ self.beta)).astype(np.float64)


def sample_response(model, x, rng=None):
    """
    Draw one response per row of x.

    Parameters
    ----------
    model : LinearGaussian or Logistic
        Response law.
    x : array, shape=(n, p)
        Covariates.
    rng : None, int or Generator, optional
        Random stream. The default is None.

    Raises
    ------
    ValueError
        If x does not have p columns.

    Returns
    -------
    y : array, shape=(n)

    """
    x = check_array_2D(x, n_columns=model.p)
    return model.sample(x, rng)
