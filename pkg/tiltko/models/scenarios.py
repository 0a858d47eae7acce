# -*- coding: utf-8 -*-
"""
The four simulation protocols: exact tilt under case-control sampling,
no selection, second order tilt under selection and Markov chain covariates
with a case-control design and estimated selection parameters.
"""
import logging
from math import floor

import numpy as np

from tiltko.models.covariates import DEFAULT_TRANSITION, GaussianBlock, MarkovChain3
from tiltko.models.population import (
    CaseControlDesign, PopulationModel, RandomDesign, SelectionDesign
)
from tiltko.models.responses import LinearGaussian, Logistic
from tiltko.models.selection import LogisticSelection, SquaredExponential
from tiltko.utils.checks_utils import check_is_numeric, check_rng

logger = logging.getLogger(__name__)

_A1 = {
    'covariates': 'gaussian_block',
    'p': 400,
    'block_size': 10,
    'rho': 0.5,
    'response': 'linear',
    'noise_sd': 1.0,
    'beta_nonnull_frac': 0.1,
    'beta_nonnull_count': None,
    'beta_sd': 0.5,
    'selection': 'squared_exponential',
    'gamma0': 0.0,
    'gamma_nonnull_frac': 0.2,
    'gamma_nonnull_count': None,
    'gamma_sd': 0.5,
    'gamma_y': 2.0,
    'design': 'case_control',
    'n_cases': 2000,
    'n_controls': 2000,
    'pool_size': 40_000,
    'n': None,
}

SCENARIO_DEFAULTS = {
    'a1_exact': dict(_A1),
    'a2_noselect': dict(_A1, design='random', n=4000, pool_size=None,
                        n_cases=None, n_controls=None),
    'a3_second_order': dict(_A1, p=200, selection='logistic', gamma0=-4.0,
                            gamma_sd=0.25, design='selection', pool_size=5000,
                            n_cases=None, n_controls=None),
    'a4_markov_cc': dict(_A1, covariates='markov', p=200,
                         transition=DEFAULT_TRANSITION.tolist(),
                         response='logistic', beta_nonnull_frac=None,
                         beta_nonnull_count=40, beta_sd=0.4,
                         selection='logistic', gamma0=-6.0,
                         gamma_nonnull_frac=None, gamma_nonnull_count=40,
                         gamma_sd=0.4, pool_size=200_000),
}

SCENARIO_ALIASES = {name.split('_')[0]: name for name in SCENARIO_DEFAULTS}


def resolve_scenario_name(name):
    name = SCENARIO_ALIASES.get(name, name)
    if name not in SCENARIO_DEFAULTS:
        raise ValueError(
            "Unknown scenario {!r}, expected one of {}".format(
                name, sorted(SCENARIO_DEFAULTS) + sorted(SCENARIO_ALIASES))
        )
    return name


def _scaled(value, scale):
    return None if value is None else max(1, floor(value * scale))


def _n_nonnull(params, prefix, p, scale):
    count = params['{}_nonnull_count'.format(prefix)]
    if count is not None:
        return min(p, _scaled(count, scale))
    return min(p, max(1, floor(params['{}_nonnull_frac'.format(prefix)] * p)))


def _sparse_coefficients(p, n_nonnull, sd, rng, excluded=None):
    candidates = np.arange(p)
    if excluded is not None and excluded.size:
        candidates = np.setdiff1d(candidates, excluded)
        if candidates.size < n_nonnull:
            raise ValueError(
                "Cannot draw {} non-null coefficients outside of {} excluded "
                "columns with p={}".format(n_nonnull, excluded.size, p)
            )
    support = np.sort(rng.choice(candidates, size=n_nonnull, replace=False))
    coef = np.zeros(p)
    coef[support] = sd * rng.standard_normal(n_nonnull)
    return coef, support


def scenario_parameters(name, scale=1.0, overrides=None):
    """
    Constants of a scenario after overrides, with dimensions and counts
    multiplied by scale and floored. The block size is not scaled.
    """
    name = resolve_scenario_name(name)
    scale = check_is_numeric(scale)
    if not 0 < scale <= 1:
        raise ValueError("scale must lie in (0, 1], but found: {}".format(scale))
    params = dict(SCENARIO_DEFAULTS[name])
    unknown = set(overrides or {}) - set(params) - {'transition'}
    if unknown:
        raise ValueError("Unknown scenario constants: {}".format(sorted(unknown)))
    params.update(overrides or {})
    for key in ['p', 'n_cases', 'n_controls', 'pool_size', 'n']:
        params[key] = _scaled(params[key], scale)
    params['n_beta_nonnull'] = _n_nonnull(params, 'beta', params['p'], scale)
    params['n_gamma_nonnull'] = _n_nonnull(params, 'gamma', params['p'], scale)
    params['name'] = name
    return params


def make_scenario(name, scale=1.0, rng=None, overrides=None, forbid_overlap=False):
    """
    Instantiate a simulation protocol.

    Parameters
    ----------
    name : str
        One of 'a1_exact', 'a2_noselect', 'a3_second_order', 'a4_markov_cc'
        or the short forms 'a1' to 'a4'.
    scale : float, optional
        Factor in (0, 1] applied to the dimension and to every count. The
        default is 1.0.
    rng : None, int or Generator, optional
        Stream used to draw the supports and values of beta and gamma_x.
    overrides : dict, optional
        Replacement values for entries of SCENARIO_DEFAULTS.
    forbid_overlap : bool, optional
        Draw the support of gamma_x outside of the support of beta. The
        default is False.

    Raises
    ------
    ValueError
        Unknown scenario name or constant, or scale outside of (0, 1].

    Returns
    -------
    pop : PopulationModel
    design : CaseControlDesign, SelectionDesign or RandomDesign

    """
    rng = check_rng(rng)
    params = scenario_parameters(name, scale, overrides)
    p = params['p']

    if params['covariates'] == 'gaussian_block':
        covariates = GaussianBlock.block_toeplitz(p, params['block_size'], params['rho'])
    elif params['covariates'] == 'markov':
        covariates = MarkovChain3(np.asarray(params['transition'], dtype=np.float64), p)
    else:
        raise ValueError("Unknown covariate law {!r}".format(params['covariates']))

    beta, beta_support = _sparse_coefficients(
        p, params['n_beta_nonnull'], params['beta_sd'], rng)
    gamma_x, _ = _sparse_coefficients(
        p, params['n_gamma_nonnull'], params['gamma_sd'], rng,
        excluded=beta_support if forbid_overlap else None)

    if params['response'] == 'linear':
        response = LinearGaussian(beta, params['noise_sd'])
    elif params['response'] == 'logistic':
        response = Logistic(beta)
    else:
        raise ValueError("Unknown response law {!r}".format(params['response']))

    if params['selection'] == 'squared_exponential':
        selection = SquaredExponential(gamma_x, params['gamma_y'])
    elif params['selection'] == 'logistic':
        selection = LogisticSelection(params['gamma0'], gamma_x, params['gamma_y'])
    else:
        raise ValueError("Unknown selection law {!r}".format(params['selection']))

    if params['design'] == 'case_control':
        design = CaseControlDesign(params['n_cases'], params['n_controls'], params['pool_size'])
    elif params['design'] == 'selection':
        design = SelectionDesign(params['pool_size'])
    elif params['design'] == 'random':
        design = RandomDesign(params['n'])
    else:
        raise ValueError("Unknown design {!r}".format(params['design']))

    logger.debug("Scenario {} at scale {}: p={}, design={}".format(
        params['name'], scale, p, design))
    return PopulationModel(covariates, response, selection), design
