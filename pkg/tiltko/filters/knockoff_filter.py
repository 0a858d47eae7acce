# -*- coding: utf-8 -*-
"""
Knockoff filter: antisymmetric W scores, knockoff(+) threshold, selection
and its false discovery proportion and power.
"""
import logging
from dataclasses import dataclass

import numpy as np

from tiltko.filters.statistics import FeatureStats, lasso_entry_stats
from tiltko.utils.checks_utils import check_array_1D, check_array_2D, check_open_unit

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class KnockoffResult:
    """
    Outcome of the knockoff filter at one FDR level.

    Attributes
    ----------
    w : array, shape=(p)
    tau : float
        Threshold, +inf when nothing is selected.
    selected : array
        Sorted 0-based indexes with w_j >= tau.
    q : float
    fdp : float
        nan when the truth is unknown.
    power : float
        nan when the truth is unknown.
    """
    w: np.ndarray
    tau: float
    selected: np.ndarray
    q: float
    fdp: float = np.nan
    power: float = np.nan

    @property
    def n_selected(self):
        return int(self.selected.shape[0])


def w_scores(stats):
    """
    W_j = max(Z_j, Z_{j+p}) * sign(Z_j - Z_{j+p}), with sign(0) = 0.

    Parameters
    ----------
    stats : FeatureStats or array, shape=(2p)

    Returns
    -------
    array, shape=(p)

    """
    z = stats.z if isinstance(stats, FeatureStats) else check_array_1D(stats, name='z')
    if z.shape[0] % 2:
        raise ValueError("z must have an even length, got {}".format(z.shape[0]))
    p = z.shape[0] // 2
    orig, ko = z[:p], z[p:]
    return np.maximum(orig, ko) * np.sign(orig - ko)


def knockoff_threshold(w, q, offset=1):
    """
    tau = min{t > 0 : (offset + #{j : W_j <= -t}) / #{j : W_j >= t} <= q}.

    Candidate thresholds are the non-zero |W_j|. offset=1 gives the
    knockoff+ threshold, offset=0 the knockoff threshold.

    Parameters
    ----------
    w : array, shape=(p)
    q : float
        Target FDR level in (0, 1).
    offset : int, optional
        0 or 1. The default is 1.

    Returns
    -------
    float
        +inf if no candidate satisfies the bound.

    """
    w = check_array_1D(w, name='w')
    q = check_open_unit(q, 'q')
    if offset not in (0, 1):
        raise ValueError("offset must be 0 or 1, got {}".format(offset))
    candidates = np.unique(np.abs(w[w != 0]))
    if candidates.size == 0:
        return np.inf
    w_sorted = np.sort(w)
    n_neg = np.searchsorted(w_sorted, -candidates, side='right')
    n_pos = w.shape[0] - np.searchsorted(w_sorted, candidates, side='left')
    with np.errstate(divide='ignore'):
        ratio = np.where(n_pos > 0, (offset + n_neg) / np.maximum(n_pos, 1), np.inf)
    ok = np.flatnonzero(ratio <= q)
    return float(candidates[ok[0]]) if ok.size else np.inf


def fdp_power(selected, truth, p):
    """
    False discovery proportion |S \\ T| / max(|S|, 1) and power
    |S ∩ T| / max(|T|, 1).
    """
    selected = np.unique(np.asarray(selected, dtype=np.int64))
    truth = np.unique(np.asarray(truth, dtype=np.int64))
    for name, idx in (('selected', selected), ('truth', truth)):
        if idx.size and (idx.min() < 0 or idx.max() >= p):
            raise ValueError("{} must index columns in [0, {})".format(name, p))
    true_pos = np.intersect1d(selected, truth).size
    fdp = (selected.size - true_pos) / max(selected.size, 1)
    power = true_pos / max(truth.size, 1)
    return float(fdp), float(power)


def select(w, q, offset=1, truth=None):
    """Threshold W at level q and score the selection against truth."""
    tau = knockoff_threshold(w, q, offset)
    selected = np.flatnonzero(w >= tau)
    fdp, power = (np.nan, np.nan) if truth is None else fdp_power(selected, truth, w.shape[0])
    return KnockoffResult(w=w, tau=tau, selected=selected, q=float(q), fdp=fdp, power=power)


def knockoff_filter(x, x_tilde, y, q_levels, truth=None, family='gaussian', rng=None,
                    offset=1, grid_size=100):
    """
    Lasso entry statistics on [X, X_tilde], W scores and one selection per
    FDR level.

    Parameters
    ----------
    x : array, shape=(n, p)
    x_tilde : array, shape=(n, p)
        Knockoff copies of x.
    y : array, shape=(n)
    q_levels : float or sequence of float
        Target FDR levels.
    truth : array, optional
        Non-null columns, used to report FDP and power.
    family : str, optional
        Family of the lasso path. The default is 'gaussian'.
    rng : None, int or Generator, optional
        Stream of the column permutation of the statistics.
    offset : int, optional
        1 for knockoff+, 0 for knockoff. The default is 1.
    grid_size : int, optional
        Penalty grid size. The default is 100.

    Returns
    -------
    list of KnockoffResult
        One per level, in the order of q_levels.

    """
    x = check_array_2D(x)
    x_tilde = check_array_2D(x_tilde, n_columns=x.shape[1], name='x_tilde')
    stats = lasso_entry_stats(np.hstack([x, x_tilde]), y, family=family,
                              grid_size=grid_size, rng=rng)
    w = w_scores(stats)
    results = [select(w, q, offset, truth) for q in np.atleast_1d(q_levels)]
    logger.debug("Knockoff filter selections: {}".format(
        {r.q: r.n_selected for r in results}))
    return results
