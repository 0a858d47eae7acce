# -*- coding: utf-8 -*-
"""
Population models and the biased sampling designs that produce the
observed samples: case-control, selection on S=1 and plain random sampling.
"""
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from tiltko.models.covariates import sample_covariates
from tiltko.models.responses import sample_response
from tiltko.utils.checks_utils import (
    EmptySelectionError, InsufficientStratumError, check_positive_int, check_rng
)

logger = logging.getLogger(__name__)

# Rows drawn at once when streaming a case-control pool.
POOL_CHUNK = 20_000


@dataclass(frozen=True, eq=False)
class PopulationModel:
    """
    Generative model of (X, Y, S) or (X, Y, D).

    Parameters
    ----------
    covariates : GaussianBlock or MarkovChain3
        Law of X.
    response : LinearGaussian or Logistic
        Law of Y given X.
    selection : LogisticSelection or SquaredExponential
        P(S=1|X,Y), or P(D=1|X,Y) in a case-control design.
    """
    covariates: object
    response: object
    selection: object

    def __post_init__(self):
        p = self.covariates.p
        if self.response.p != p or self.selection.p != p:
            raise ValueError(
                "Dimension mismatch: covariates p={}, response p={}, "
                "selection p={}".format(p, self.response.p, self.selection.p)
            )

    @property
    def p(self):
        return self.covariates.p

    @property
    def truth_beta_nonnull(self):
        return np.flatnonzero(self.response.beta)

    @property
    def truth_gamma_nonnull(self):
        return np.flatnonzero(self.selection.gamma_x)

    def draw(self, n, rng):
        """Draw n triples (x, y, s) from the population."""
        x = sample_covariates(self.covariates, n, rng)
        y = sample_response(self.response, x, rng)
        s = (rng.random(n) < self.selection.prob(x, y)).astype(np.float64)
        return x, y, s


@dataclass(frozen=True)
class CaseControlDesign:
    """Fixed numbers of cases and controls sub-sampled from a pool of size N."""
    n_cases: int
    n_controls: int
    pool_size: int

    def __post_init__(self):
        check_positive_int(self.n_cases, 'n_cases')
        check_positive_int(self.n_controls, 'n_controls')
        check_positive_int(self.pool_size, 'pool_size')
        if self.n_cases + self.n_controls > self.pool_size:
            raise ValueError(
                "n_cases + n_controls ({}) cannot exceed pool_size ({})".format(
                    self.n_cases + self.n_controls, self.pool_size)
            )


@dataclass(frozen=True)
class SelectionDesign:
    """Keep the rows of a pool of size N with S=1."""
    pool_size: int

    def __post_init__(self):
        check_positive_int(self.pool_size, 'pool_size')


@dataclass(frozen=True)
class RandomDesign:
    """n i.i.d. rows from the population, no selection."""
    n: int

    def __post_init__(self):
        check_positive_int(self.n, 'n')


@dataclass(frozen=True, eq=False)
class LabeledSample:
    """
    Observed rows together with the ground truth of the scenario.

    Indexes of the truth sets are 0-based column positions.

    Parameters
    ----------
    x : array, shape=(n, p)
    y : array, shape=(n)
    d : array, shape=(n), optional
        Case-control status, None outside case-control designs.
    truth_beta_nonnull : array
        Columns with a non-null effect on Y.
    truth_gamma_nonnull : array
        Columns with a non-null effect on the selection.
    rate_case, rate_control : float, optional
        Sampling rates n1/N1 and n0/N0 of a case-control design.
    population_prevalence : float, optional
        Fraction N1/N of cases in the pool.
    """
    x: np.ndarray
    y: np.ndarray
    d: Optional[np.ndarray] = None
    truth_beta_nonnull: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    truth_gamma_nonnull: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    rate_case: Optional[float] = None
    rate_control: Optional[float] = None
    population_prevalence: Optional[float] = None

    def __post_init__(self):
        n, p = self.x.shape
        if self.y.shape[0] != n or (self.d is not None and self.d.shape[0] != n):
            raise ValueError("x, y and d must have the same number of rows")
        for name in ['truth_beta_nonnull', 'truth_gamma_nonnull']:
            idx = np.asarray(getattr(self, name), dtype=np.int64)
            if idx.size and (idx.min() < 0 or idx.max() >= p):
                raise ValueError("{} must index columns in [0, {})".format(name, p))
            object.__setattr__(self, name, idx)

    @property
    def n(self):
        return self.x.shape[0]

    @property
    def p(self):
        return self.x.shape[1]

    @property
    def sample_prevalence(self):
        return None if self.d is None else float(self.d.mean())


def _keep_smallest(keys, rows, k):
    """Keep the k rows with the smallest priority keys."""
    if keys.shape[0] <= k:
        return keys, rows
    idx = np.argpartition(keys, k - 1)[:k]
    return keys[idx], tuple(r[idx] for r in rows)


def draw_case_control(pop, design, rng=None):
    """
    Case-control sample: draw a pool of N triples (X, Y, D) and sub-sample
    n_cases rows with D=1 and n_controls rows with D=0, uniformly without
    replacement.

    The pool is streamed by chunks. Each row gets a uniform priority key and
    a stratum keeps its rows with the smallest keys, which is a uniform
    sample without replacement of the stratum.

    Parameters
    ----------
    pop : PopulationModel
    design : CaseControlDesign
    rng : None, int or Generator, optional

    Raises
    ------
    InsufficientStratumError
        If the pool holds fewer cases or controls than requested.

    Returns
    -------
    LabeledSample
        Cases first, then controls; d recorded together with the sampling
        rates and the pool prevalence.

    """
    rng = check_rng(rng)
    wanted = {1: design.n_cases, 0: design.n_controls}
    kept = {k: (np.zeros(0), None) for k in wanted}
    counts = {0: 0, 1: 0}
    remaining = design.pool_size
    while remaining > 0:
        n_chunk = min(POOL_CHUNK, remaining)
        remaining -= n_chunk
        x, y, d = pop.draw(n_chunk, rng)
        keys = rng.random(n_chunk)
        for stratum in (1, 0):
            mask = d == stratum
            counts[stratum] += int(mask.sum())
            old_keys, old_rows = kept[stratum]
            new_rows = (x[mask], y[mask])
            if old_rows is not None:
                new_rows = tuple(np.concatenate([o, r]) for o, r in zip(old_rows, new_rows))
            kept[stratum] = _keep_smallest(
                np.concatenate([old_keys, keys[mask]]), new_rows, wanted[stratum]
            )
    for stratum, label in ((1, 'cases'), (0, 'controls')):
        if counts[stratum] < wanted[stratum]:
            raise InsufficientStratumError(label, wanted[stratum], counts[stratum])
    logger.debug("Case-control pool of {} rows holds {} cases and {} controls".format(
        design.pool_size, counts[1], counts[0]))
    x = np.concatenate([kept[1][1][0], kept[0][1][0]])
    y = np.concatenate([kept[1][1][1], kept[0][1][1]])
    d = np.concatenate([np.ones(design.n_cases), np.zeros(design.n_controls)])
    return LabeledSample(
        x=x, y=y, d=d,
        truth_beta_nonnull=pop.truth_beta_nonnull,
        truth_gamma_nonnull=pop.truth_gamma_nonnull,
        rate_case=design.n_cases / counts[1],
        rate_control=design.n_controls / counts[0],
        population_prevalence=counts[1] / design.pool_size,
    )


def draw_selected(pop, n_pool, rng=None):
    """
    Selected sample: draw n_pool triples (X, Y, S) and keep the rows with S=1.

    Raises
    ------
    EmptySelectionError
        If no row of the pool is selected.

    """
    rng = check_rng(rng)
    n_pool = check_positive_int(n_pool, 'n_pool')
    x, y, s = pop.draw(n_pool, rng)
    keep = s == 1
    if not np.any(keep):
        raise EmptySelectionError(
            "No row was selected out of a pool of {} rows".format(n_pool))
    logger.debug("Selected {} rows out of {}".format(int(keep.sum()), n_pool))
    return LabeledSample(
        x=x[keep], y=y[keep],
        truth_beta_nonnull=pop.truth_beta_nonnull,
        truth_gamma_nonnull=pop.truth_gamma_nonnull,
    )


def draw_random(pop, n, rng=None):
    """n i.i.d. rows from the population, selection ignored."""
    rng = check_rng(rng)
    x = sample_covariates(pop.covariates, n, rng)
    y = sample_response(pop.response, x, rng)
    return LabeledSample(
        x=x, y=y,
        truth_beta_nonnull=pop.truth_beta_nonnull,
        truth_gamma_nonnull=pop.truth_gamma_nonnull,
    )


def draw_sample(pop, design, rng=None):
    """Dispatch on the type of design."""
    if isinstance(design, CaseControlDesign):
        return draw_case_control(pop, design, rng)
    if isinstance(design, SelectionDesign):
        return draw_selected(pop, design.pool_size, rng)
    if isinstance(design, RandomDesign):
        return draw_random(pop, design.n, rng)
    raise ValueError("Unknown sampling design {!r}".format(design))
