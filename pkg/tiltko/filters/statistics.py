# -*- coding: utf-8 -*-
"""
Lasso entry statistics: the largest penalty at which each column of the
augmented design [X, X_tilde] enters the lasso path.
"""
import logging
from dataclasses import dataclass

import numpy as np

from tiltko.estimation.logistic import logistic_lasso_path
from tiltko.utils.checks_utils import (
    check_array_1D, check_array_2D, check_binary, check_positive_int, check_rng
)
from tiltko.utils.numba_utils import gaussian_lasso_path

logger = logging.getLogger(__name__)

LASSO_EPS = 1e-3
LASSO_GRID = 100
LASSO_TOL = 1e-9
LASSO_MAX_PASS = 100_000

FAMILIES = ('gaussian', 'binomial')


@dataclass(frozen=True, eq=False)
class FeatureStats:
    """
    Entry penalties of the columns of an augmented design.

    Attributes
    ----------
    z : array, shape=(2p)
        Entry penalty of the original columns followed by the knockoff
        columns, 0 for a column that never enters.
    family : str
        'gaussian' or 'binomial'.
    lambda_grid : array
        Decreasing grid of penalties.
    permutation : array, shape=(2p)
        Column order used by the solver.
    """
    z: np.ndarray
    family: str
    lambda_grid: np.ndarray
    permutation: np.ndarray

    @property
    def p(self):
        return self.z.shape[0] // 2


def standardize_columns(x):
    """Center and scale columns to unit mean square, constant columns set to 0."""
    mean = x.mean(axis=0)
    sd = x.std(axis=0)
    constant = sd == 0
    xs = (x - mean) / np.where(constant, 1.0, sd)
    xs[:, constant] = 0.0
    return xs


def lambda_grid(lambda_max, grid_size=LASSO_GRID, eps=LASSO_EPS):
    """Geometric grid from lambda_max down to lambda_max * eps."""
    return lambda_max * np.geomspace(1.0, eps, grid_size)


def lasso_path(x, y, lambdas, standardize=True, tol=LASSO_TOL, max_pass=LASSO_MAX_PASS):
    """
    Gaussian lasso path of (1/2n)||y - y_bar - X b||^2 + lambda ||b||_1.

    Parameters
    ----------
    x : array, shape=(n, m)
    y : array, shape=(n)
    lambdas : array
        Decreasing penalties.
    standardize : bool, optional
        Standardize the columns first. The default is True.

    Returns
    -------
    coefs : array, shape=(m, n_lambdas)
        Coefficients on the scale of the (standardized) columns.
    entry : array, shape=(m)
        Largest grid penalty at which each column is active.

    """
    x = check_array_2D(x)
    y = check_array_1D(y, size=x.shape[0], name='y')
    xs = standardize_columns(x) if standardize else x - x.mean(axis=0)
    XT = np.ascontiguousarray(xs.T)
    col_sq = np.mean(xs ** 2, axis=0)
    lambdas = np.ascontiguousarray(lambdas, dtype=np.float64)
    return gaussian_lasso_path(XT, y - y.mean(), col_sq, lambdas, max_pass, tol)


def lasso_entry_stats(x_aug, y, family='gaussian', grid_size=LASSO_GRID, rng=None,
                      eps=LASSO_EPS):
    """
    Entry penalty Z_j = sup{lambda : b_j(lambda) != 0} of each column of the
    augmented design along a lasso path.

    Columns are standardized, then randomly permuted so that the solver
    visits a variable and its knockoff in an order that does not favor
    either of them.

    Parameters
    ----------
    x_aug : array, shape=(n, 2p)
        Original columns followed by knockoff columns.
    y : array, shape=(n)
    family : str, optional
        'gaussian' for a least squares path, 'binomial' for an l1 logistic
        path. The default is 'gaussian'.
    grid_size : int, optional
        Number of penalties. The default is 100.
    rng : None, int or Generator, optional
        Stream of the column permutation.
    eps : float, optional
        Ratio of the smallest to the largest penalty. The default is 1e-3.

    Raises
    ------
    ValueError
        On non-finite inputs, an odd number of columns or an unknown family.

    Returns
    -------
    FeatureStats

    """
    x_aug = check_array_2D(x_aug, name='x_aug')
    if x_aug.shape[1] % 2:
        raise ValueError("x_aug must have an even number of columns, got {}".format(
            x_aug.shape[1]))
    if family not in FAMILIES:
        raise ValueError("family must be one of {}, got {!r}".format(FAMILIES, family))
    y = check_binary(y) if family == 'binomial' else check_array_1D(y, name='y')
    if y.shape[0] != x_aug.shape[0]:
        raise ValueError("x_aug and y must have the same number of rows")
    grid_size = check_positive_int(grid_size, 'grid_size')
    rng = check_rng(rng)

    n, m = x_aug.shape
    permutation = rng.permutation(m)
    xs = standardize_columns(x_aug)[:, permutation]
    lmax = float(np.max(np.abs(xs.T @ (y - y.mean()))) / n)
    grid = lambda_grid(lmax, grid_size, eps)
    z = np.zeros(m)
    if lmax == 0:
        return FeatureStats(z, family, grid, permutation)

    if family == 'gaussian':
        _, entry = lasso_path(xs, y, grid, standardize=False)
    else:
        _, coefs = logistic_lasso_path(xs, y, grid)
        active = coefs != 0
        first = np.argmax(active, axis=1)
        entry = np.where(active.any(axis=1), grid[first], 0.0)
    z[permutation] = entry
    logger.debug("Lasso entry stats ({}): lambda_max={:.4e}, {} of {} columns entered".format(
        family, lmax, int(np.count_nonzero(z)), m))
    return FeatureStats(z, family, grid, permutation)
