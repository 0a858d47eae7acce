# -*- coding: utf-8 -*-
"""
Selection laws P(S=1|X,Y). In a case-control design the same objects give
the diagnosis probability P(D=1|X,Y).
"""
from dataclasses import dataclass

import numpy as np
from scipy.special import expit, log_expit

from tiltko.utils.checks_utils import check_array_1D, check_is_numeric


@dataclass(frozen=True, eq=False)
class LogisticSelection:
    """
    P(S=1|x,y) = 1 / (1 + exp(-(gamma0 + x gamma_x + y gamma_y))).

    Parameters
    ----------
    gamma0 : float
        Intercept.
    gamma_x : array, shape=(p)
        Covariate effects.
    gamma_y : float
        Response effect.
    """
    gamma0: float
    gamma_x: np.ndarray
    gamma_y: float

    def __post_init__(self):
        object.__setattr__(self, 'gamma0', float(check_is_numeric(self.gamma0)))
        object.__setattr__(self, 'gamma_x', check_array_1D(self.gamma_x, name='gamma_x'))
        object.__setattr__(self, 'gamma_y', float(check_is_numeric(self.gamma_y)))

    @property
    def p(self):
        return self.gamma_x.shape[0]

    def linear_predictor(self, x, y):
        return self.gamma0 + x @ self.gamma_x + self.gamma_y * y

    def prob(self, x, y):
        return expit(self.linear_predictor(x, y))

    def log_prob(self, x, y):
        return log_expit(self.linear_predictor(x, y))


@dataclass(frozen=True, eq=False)
class SquaredExponential:
    """
    P(S=1|x,y) = exp(-v^2 / 2) with v = x gamma_x + y gamma_y.

    Parameters
    ----------
    gamma_x : array, shape=(p)
        Covariate effects.
    gamma_y : float
        Response effect.
    """
    gamma_x: np.ndarray
    gamma_y: float

    def __post_init__(self):
        object.__setattr__(self, 'gamma_x', check_array_1D(self.gamma_x, name='gamma_x'))
        object.__setattr__(self, 'gamma_y', float(check_is_numeric(self.gamma_y)))

    @property
    def p(self):
        return self.gamma_x.shape[0]

    def linear_predictor(self, x, y):
        return x @ self.gamma_x + self.gamma_y * y

    def prob(self, x, y):
        return np.exp(self.log_prob(x, y))

    def log_prob(self, x, y):
        return -0.5 * self.linear_predictor(x, y) ** 2


def selection_prob(model, x, y):
    """
    Probability of selection (or of being a case) given x and y.

    Parameters
    ----------
    model : LogisticSelection or SquaredExponential
        Selection law.
    x : array, shape=(p) or (n, p)
        One row or a matrix of rows.
    y : float or array, shape=(n)
        Response value(s).

    Raises
    ------
    ValueError
        If the dimension of x does not match the model.

    Returns
    -------
    float or array, shape=(n)
        Values in [0, 1].

    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != model.p:
        raise ValueError(
            "x must have {} covariates, but found shape: {}".format(model.p, x.shape)
        )
    prob = model.prob(x, np.asarray(y, dtype=np.float64))
    if np.ndim(prob) == 0:
        return float(prob)
    return prob


def stratum_prob(model, x, y, d):
    """P(D=d|x,y) for d in {0, 1}, vectorized over rows."""
    prob = model.prob(x, y)
    return np.where(np.asarray(d) == 1, prob, 1.0 - prob)


def case_control_inclusion_prob(model, x, y, rate_case, rate_control):
    """
    Probability that a pool row ends up in a case-control sample.

    With rate_case = n1/N1 and rate_control = n0/N0 the inclusion probability
    is r0 + (r1 - r0) P(D=1|x,y). The law of the sample rows is the
    population law tilted by this quantity.
    """
    return rate_control + (rate_case - rate_control) * model.prob(x, y)
