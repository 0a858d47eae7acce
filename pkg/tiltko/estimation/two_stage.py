# -*- coding: utf-8 -*-
"""
Estimation of the case-control diagnosis model P(D=1|X,Y) from the biased
sample: plain logistic regression, l1 logistic at the cross-validated
penalty, and a two-stage procedure screening covariates with knockoffs.
"""
import logging
from dataclasses import replace

import numpy as np

from tiltko.estimation.logistic import (
    PrevalenceAdjustment, adjust_intercept, cross_validate_lambda, fit_logistic
)
from tiltko.filters.knockoff_filter import knockoff_filter
from tiltko.knockoffs.gaussian import gaussian_knockoff_spec, sample_knockoffs
from tiltko.models.selection import LogisticSelection
from tiltko.utils.checks_utils import (
    check_array_1D, check_array_2D, check_binary, check_open_unit, check_rng
)
from tiltko.utils.linalg_utils import regularize_covariance

logger = logging.getLogger(__name__)

ESTIMATORS = ('logistic', 'l1_cv', 'two_stage')
TWO_STAGE_Q = 0.25


def two_stage_selection_model(x, y, d01, q=TWO_STAGE_Q, rng=None, mu=None, sigma=None):
    """
    Two-stage estimate of P(D=1|x,y).

    Stage 1 runs the standard knockoff filter at level q with d01 as the
    response and an l1 logistic path as statistic. Stage 2 fits an
    unpenalized logistic regression of d01 on the selected columns of x and
    on y. Coefficients of the columns that were not selected are 0.

    Parameters
    ----------
    x : array, shape=(n, p)
    y : array, shape=(n)
    d01 : array, shape=(n)
        Case-control status.
    q : float, optional
        FDR level of stage 1. The default is 0.25.
    rng : None, int or Generator, optional
    mu, sigma : array, optional
        Law of X used to draw the stage 1 knockoffs. The default estimates
        them from x.

    Returns
    -------
    LogisticFit
        coef has p + 1 entries, the last one being the effect of y, support
        holds the stage 1 selection. The intercept is not adjusted.

    """
    x = check_array_2D(x)
    n, p = x.shape
    y = check_array_1D(y, size=n, name='y')
    d = check_binary(d01, name='d01')
    q = check_open_unit(q, 'q')
    rng = check_rng(rng)
    if mu is None:
        mu = x.mean(axis=0)
    if sigma is None:
        sigma, _ = regularize_covariance(np.cov(x, rowvar=False).reshape(p, p))

    x_tilde = sample_knockoffs(gaussian_knockoff_spec(mu, sigma), x, rng)
    support = knockoff_filter(x, x_tilde, d, q, family='binomial', rng=rng)[0].selected
    if support.size == 0:
        logger.info("Two-stage estimator: stage 1 selected nothing, fitting on y alone")
    else:
        logger.debug("Two-stage estimator: stage 1 selected {} columns".format(support.size))
    fit = fit_logistic(np.column_stack([x[:, support], y]), d)
    coef = np.zeros(p + 1)
    coef[support] = fit.coef[:-1]
    coef[p] = fit.coef[-1]
    return replace(fit, coef=coef, support=support)


def selection_from_fit(fit, p):
    """LogisticSelection read from a fit of d on [x, y]."""
    return LogisticSelection(fit.intercept, fit.coef[:p], fit.coef[p])


def estimate_selection_model(labeled_sample, estimator='logistic', rng=None,
                             q=TWO_STAGE_Q, mu=None, sigma=None, folds=5):
    """
    Estimated diagnosis model of a case-control sample, with the intercept
    adjusted to the population prevalence of the cases.

    Parameters
    ----------
    labeled_sample : LabeledSample
        Case-control sample with its pool prevalence.
    estimator : str, optional
        'logistic', 'l1_cv' or 'two_stage'. The default is 'logistic'.
    rng : None, int or Generator, optional
    q : float, optional
        Stage 1 level of the two-stage estimator. The default is 0.25.
    mu, sigma : array, optional
        Law of X for the two-stage knockoffs.
    folds : int, optional
        Folds of the l1 cross-validation. The default is 5.

    Returns
    -------
    selection : LogisticSelection
    fit : LogisticFit
        Adjusted fit the selection model was read from.

    """
    if labeled_sample.d is None or labeled_sample.population_prevalence is None:
        raise ValueError("Estimating the diagnosis model requires a case-control sample")
    rng = check_rng(rng)
    x, y, d = labeled_sample.x, labeled_sample.y, labeled_sample.d
    p = x.shape[1]
    if estimator == 'logistic':
        fit = fit_logistic(np.column_stack([x, y]), d)
    elif estimator == 'l1_cv':
        design = np.column_stack([x, y])
        lam = cross_validate_lambda(design, d, folds=folds, rng=rng)
        fit = fit_logistic(design, d, lambda_l1=lam)
    elif estimator == 'two_stage':
        fit = two_stage_selection_model(x, y, d, q=q, rng=rng, mu=mu, sigma=sigma)
    else:
        raise ValueError("estimator must be one of {}, got {!r}".format(ESTIMATORS, estimator))
    adj = PrevalenceAdjustment(labeled_sample.sample_prevalence,
                               labeled_sample.population_prevalence)
    fit = adjust_intercept(fit, adj)
    logger.debug("Estimated selection model ({}): intercept={:.3f}, gamma_y={:.3f}".format(
        estimator, fit.intercept, fit.coef[p]))
    return selection_from_fit(fit, p), fit
