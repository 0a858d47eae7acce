# -*- coding: utf-8 -*-
"""
Logistic regression fits used to estimate P(S=1|X,Y) or P(D=1|X,Y):
Newton / IRLS for the maximum likelihood, proximal Newton with coordinate
descent for the l1 penalized likelihood, cross-validation of the penalty and
the intercept offset correcting for case enrichment.
"""
import logging
import warnings
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy import linalg
from scipy.special import expit
from sklearn.model_selection import KFold, StratifiedKFold

from tiltko.utils.checks_utils import (
    ConvergenceWarning, check_array_2D, check_binary, check_open_unit,
    check_positive_int, check_rng, draw_seed
)
from tiltko.utils.numba_utils import weighted_lasso_cd

logger = logging.getLogger(__name__)

IRLS_TOL = 1e-8
IRLS_MAX_ITER = 500
MAX_HALVING = 30
CD_MAX_PASS = 100_000
CD_TOL = 1e-12
MIN_WEIGHT = 1e-5
CV_GRID = 20
CV_EPS = 1e-2


@dataclass(frozen=True, eq=False)
class LogisticFit:
    """
    Fitted logistic regression P(Y=1|x) = 1 / (1 + exp(-(intercept + x coef))).

    Attributes
    ----------
    intercept : float
    coef : array, shape=(p)
        Coefficients on the original scale of the columns.
    converged : bool
    iterations : int
        Newton iterations performed.
    final_gradient_norm : float
        Sup norm of the gradient of the mean log likelihood, or of the l1
        subgradient violation for penalized fits.
    lambda_l1 : float
        Penalty level on the standardized scale.
    deviance : float
    null_deviance : float
        Deviance of the intercept only model.
    support : array, optional
        Columns of the design the fit was restricted to, when it was.
    """
    intercept: float
    coef: np.ndarray
    converged: bool
    iterations: int
    final_gradient_norm: float
    lambda_l1: float = 0.0
    deviance: float = np.nan
    null_deviance: float = np.nan
    support: Optional[np.ndarray] = None

    @property
    def pseudo_r2(self):
        """(null deviance - deviance) / null deviance."""
        return 1.0 - self.deviance / self.null_deviance

    def linear_predictor(self, x):
        return self.intercept + np.asarray(x) @ self.coef

    def predict_proba(self, x):
        return expit(self.linear_predictor(x))


@dataclass(frozen=True)
class PrevalenceAdjustment:
    """
    Prevalence of the cases in the sample and in the population.
    """
    sample_prevalence: float
    population_prevalence: float

    def __post_init__(self):
        check_open_unit(self.sample_prevalence, 'sample_prevalence')
        check_open_unit(self.population_prevalence, 'population_prevalence')

    @property
    def offset(self):
        """log[p_hat (1 - pi) / (pi (1 - p_hat))]."""
        p_hat, pi = self.sample_prevalence, self.population_prevalence
        return float(np.log(p_hat * (1.0 - pi) / (pi * (1.0 - p_hat))))


def _mean_nll(eta, y):
    return float(np.mean(np.logaddexp(0.0, eta) - y * eta))


def _check_classes(y):
    if y.shape[0] < 2 or y.min() == y.max():
        raise ValueError(
            "Logistic regression needs at least two observations of both classes")


def _standardize(x):
    mean = x.mean(axis=0)
    sd = x.std(axis=0)
    constant = sd == 0
    sd = np.where(constant, 1.0, sd)
    xs = (x - mean) / sd
    xs[:, constant] = 0.0
    return xs, mean, sd


def _kkt_violation(xs, y, b0, beta, lam):
    """Sup norm of the l1 subgradient violation of the mean log likelihood."""
    resid = y - expit(b0 + xs @ beta)
    g = xs.T @ resid / y.shape[0]
    active = beta != 0
    viol = np.where(active, np.abs(g - lam * np.sign(beta)),
                    np.maximum(np.abs(g) - lam, 0.0))
    return max(abs(float(resid.mean())), float(viol.max()) if viol.size else 0.0)


def _penalized_objective(xs, y, b0, beta, lam):
    return _mean_nll(b0 + xs @ beta, y) + lam * float(np.abs(beta).sum())


def _newton(A, y, theta, tol, max_iter, max_halving):
    """Damped Newton iterations on the mean negative log likelihood."""
    n = y.shape[0]
    objective = _mean_nll(A @ theta, y)
    grad_norm = np.inf
    for it in range(max_iter + 1):
        eta = A @ theta
        prob = expit(eta)
        grad = A.T @ (y - prob) / n
        grad_norm = float(np.max(np.abs(grad)))
        if grad_norm < tol:
            return theta, True, it, grad_norm
        if it == max_iter:
            break
        hess = (A * (prob * (1 - prob))[:, None]).T @ A / n
        try:
            step = linalg.solve(hess, grad, assume_a='pos', check_finite=False)
        except linalg.LinAlgError:
            step = linalg.lstsq(hess, grad, check_finite=False)[0]
        t = 1.0
        for _ in range(max_halving):
            candidate = theta + t * step
            new_objective = _mean_nll(A @ candidate, y)
            if new_objective <= objective:
                break
            t /= 2.0
        else:
            logger.debug("Step halving exhausted at iteration {}".format(it))
            return theta, False, it, grad_norm
        theta, objective = candidate, new_objective
    return theta, False, max_iter, grad_norm


def _prox_newton(xs, y, lam, b0, beta, tol, max_iter, max_halving):
    """
    Proximal Newton iterations on the l1 penalized mean negative log
    likelihood of standardized columns. beta is updated in place.
    """
    XT = np.ascontiguousarray(xs.T)
    objective = _penalized_objective(xs, y, b0, beta, lam)
    viol = np.inf
    for it in range(max_iter + 1):
        viol = _kkt_violation(xs, y, b0, beta, lam)
        if viol < tol:
            return b0, True, it, viol
        if it == max_iter:
            break
        eta = b0 + xs @ beta
        prob = expit(eta)
        w = np.maximum(prob * (1 - prob), MIN_WEIGHT)
        z = eta + (y - prob) / w
        new_beta = beta.copy()
        new_b0 = weighted_lasso_cd(XT, z, w, new_beta, b0, lam, CD_MAX_PASS, CD_TOL)
        d_beta, d_b0 = new_beta - beta, new_b0 - b0
        t = 1.0
        for _ in range(max_halving):
            cand_beta, cand_b0 = beta + t * d_beta, b0 + t * d_b0
            new_objective = _penalized_objective(xs, y, cand_b0, cand_beta, lam)
            if new_objective <= objective + 1e-15 * max(abs(objective), 1.0):
                break
            t /= 2.0
        else:
            logger.debug("Step halving exhausted at iteration {}".format(it))
            return b0, False, it, viol
        beta[:] = cand_beta
        b0, objective = cand_b0, new_objective
    return b0, False, max_iter, viol


def _deviances(x, y, intercept, coef):
    dev = 2.0 * y.shape[0] * _mean_nll(intercept + x @ coef, y)
    ybar = y.mean()
    null_dev = 2.0 * y.shape[0] * _mean_nll(np.full(y.shape[0], np.log(ybar / (1 - ybar))), y)
    return dev, null_dev


def fit_logistic(x, y01, lambda_l1=0.0, tol=IRLS_TOL, max_iter=IRLS_MAX_ITER,
                 max_halving=MAX_HALVING):
    """
    Fit a logistic regression with an unpenalized intercept.

    Without penalty the likelihood is maximized by Newton / IRLS steps with
    step halving. With lambda_l1 > 0 the objective
    mean negative log likelihood + lambda_l1 ||b||_1 is minimized over the
    coefficients b of the standardized columns (mean 0, standard deviation
    1 with ddof=0) by proximal Newton steps, whose inner weighted lasso is
    solved by coordinate descent. Coefficients are returned on the original
    scale.

    Parameters
    ----------
    x : array, shape=(n, p)
    y01 : array, shape=(n)
        Binary response.
    lambda_l1 : float, optional
        Penalty level on the standardized scale, comparable with
        lambda_max(x, y01). On raw columns whose standard deviation is not
        1 the threshold max_j |x_j^T (y - ybar)| / n does not zero the
        coefficients. The default is 0.0.
    tol : float, optional
        Tolerance on the sup norm of the (sub)gradient. The default is 1e-8.
    max_iter : int, optional
        Maximum number of Newton iterations. The default is 500.
    max_halving : int, optional
        Maximum number of step halvings per iteration. The default is 30.

    Raises
    ------
    ValueError
        If y01 is not binary or holds a single class.

    Returns
    -------
    LogisticFit
        converged is False when the tolerance was not reached, a
        ConvergenceWarning is emitted in that case.

    """
    x = check_array_2D(x)
    y = check_binary(y01, name='y01')
    if x.shape[0] != y.shape[0]:
        raise ValueError("x and y01 must have the same number of rows")
    _check_classes(y)
    if lambda_l1 < 0:
        raise ValueError("lambda_l1 must be non-negative, got {}".format(lambda_l1))
    n, p = x.shape
    ybar = y.mean()
    b0 = float(np.log(ybar / (1 - ybar)))

    if lambda_l1 == 0:
        A = np.hstack([np.ones((n, 1)), x])
        theta = np.concatenate([[b0], np.zeros(p)])
        theta, converged, iterations, grad_norm = _newton(A, y, theta, tol, max_iter, max_halving)
        intercept, coef = float(theta[0]), theta[1:]
    else:
        xs, mean, sd = _standardize(x)
        beta = np.zeros(p)
        b0, converged, iterations, grad_norm = _prox_newton(
            xs, y, lambda_l1, b0, beta, tol, max_iter, max_halving)
        coef = beta / sd
        intercept = float(b0 - mean @ coef)

    if not converged:
        warnings.warn(
            "Logistic fit stopped after {} iterations with gradient norm "
            "{:.3e}".format(iterations, grad_norm), ConvergenceWarning)
    deviance, null_deviance = _deviances(x, y, intercept, coef)
    return LogisticFit(
        intercept=intercept, coef=coef, converged=converged, iterations=iterations,
        final_gradient_norm=grad_norm, lambda_l1=float(lambda_l1),
        deviance=deviance, null_deviance=null_deviance,
    )


def lambda_max(x, y01):
    """Smallest penalty for which every standardized coefficient is 0."""
    xs, _, _ = _standardize(check_array_2D(x))
    y = np.asarray(y01, dtype=np.float64)
    return float(np.max(np.abs(xs.T @ (y - y.mean()))) / y.shape[0])


def logistic_lasso_path(xs, y, lambdas, tol=1e-6, max_iter=IRLS_MAX_ITER):
    """
    Warm-started l1 logistic path on standardized columns.

    Returns
    -------
    intercepts : array, shape=(n_lambdas)
    coefs : array, shape=(p, n_lambdas)
        Coefficients on the standardized scale.
    """
    n, p = xs.shape
    ybar = y.mean()
    b0 = float(np.log(ybar / (1 - ybar)))
    beta = np.zeros(p)
    intercepts = np.zeros(len(lambdas))
    coefs = np.zeros((p, len(lambdas)))
    for k, lam in enumerate(lambdas):
        b0, converged, _, viol = _prox_newton(xs, y, lam, b0, beta, tol, max_iter, MAX_HALVING)
        if not converged:
            logger.debug("Path fit at lambda={:.3e} stopped at violation {:.2e}".format(
                lam, viol))
        intercepts[k] = b0
        coefs[:, k] = beta
    return intercepts, coefs


def _held_out_deviance(xs_test, y_test, intercept, beta):
    return 2.0 * y_test.shape[0] * _mean_nll(intercept + xs_test @ beta, y_test)


def cross_validate_lambda(x, y01, grid=None, folds=5, rng=None):
    """
    Penalty minimizing the held-out deviance of l1 logistic fits.

    Parameters
    ----------
    x : array, shape=(n, p)
    y01 : array, shape=(n)
    grid : array, optional
        Candidate penalties. The default is a geometric grid of 20 values
        from lambda_max down to lambda_max / 100.
    folds : int, optional
        Number of folds, at least 2. Folds are stratified on y01 when every
        class has at least that many members. The default is 5.
    rng : None, int or Generator, optional
        Stream used to shuffle the folds.

    Raises
    ------
    ValueError
        If a training fold holds a single class.

    Returns
    -------
    float
        A grid value. Ties are broken towards the larger penalty.

    """
    x = check_array_2D(x)
    y = check_binary(y01, name='y01')
    _check_classes(y)
    folds = check_positive_int(folds, 'folds', minimum=2)
    rng = check_rng(rng)
    if grid is None:
        lmax = lambda_max(x, y)
        grid = lmax * np.geomspace(1.0, CV_EPS, CV_GRID)
    grid = np.sort(np.asarray(grid, dtype=np.float64))[::-1]
    if np.any(grid <= 0):
        raise ValueError("Penalty grid values must be positive")

    min_class = int(min(y.sum(), y.shape[0] - y.sum()))
    splitter_cls = StratifiedKFold if folds <= min_class else KFold
    splitter = splitter_cls(n_splits=folds, shuffle=True, random_state=draw_seed(rng))
    deviance = np.zeros(grid.shape[0])
    for train, test in splitter.split(x, y):
        _check_classes(y[train])
        xs_train, mean, sd = _standardize(x[train])
        xs_test = (x[test] - mean) / sd
        intercepts, coefs = logistic_lasso_path(xs_train, y[train], grid, tol=IRLS_TOL)
        for k in range(grid.shape[0]):
            deviance[k] += _held_out_deviance(xs_test, y[test], intercepts[k], coefs[:, k])
    best = np.min(deviance)
    chosen = int(np.flatnonzero(np.isclose(deviance, best, rtol=1e-10, atol=0.0))[0])
    logger.debug("CV deviance {} -> lambda={:.4e}".format(np.round(deviance, 3), grid[chosen]))
    return float(grid[chosen])


def adjust_intercept(fit, adj):
    """
    Shift the intercept of a fit on a case-enriched sample to the population
    prevalence: intercept - log[p_hat (1 - pi) / (pi (1 - p_hat))].

    The shift is additive, applying it twice shifts twice.
    """
    return replace(fit, intercept=fit.intercept - adj.offset)
