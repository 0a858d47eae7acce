# -*- coding: utf-8 -*-
"""
Coordinate descent kernels shared by the lasso path of the knockoff
statistics and the proximal Newton fit of penalized logistic regressions.

Design matrices are passed transposed (XT, shape=(n_features, n_samples),
C-contiguous) so that each coordinate update reads one contiguous row.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def soft_threshold(x, lam):
    if x > lam:
        return x - lam
    if x < -lam:
        return x + lam
    return 0.0


@njit(cache=True)
def _gaussian_pass(XT, r, beta, col_sq, lam, n, active_only):
    """One cycle of coordinate updates; returns the largest scaled change."""
    max_delta = 0.0
    for j in range(XT.shape[0]):
        if col_sq[j] == 0.0:
            continue
        if active_only and beta[j] == 0.0:
            continue
        xj = XT[j]
        g = 0.0
        for i in range(n):
            g += xj[i] * r[i]
        g = g / n + col_sq[j] * beta[j]
        new = soft_threshold(g, lam) / col_sq[j]
        delta = new - beta[j]
        if delta != 0.0:
            for i in range(n):
                r[i] -= delta * xj[i]
            beta[j] = new
            delta = abs(delta) * np.sqrt(col_sq[j])
            if delta > max_delta:
                max_delta = delta
    return max_delta


@njit(cache=True)
def gaussian_lasso_cd(XT, r, beta, col_sq, lam, max_pass, tol):
    """
    Minimize (1/2n)||r0 - X beta||^2 + lam ||beta||_1 by coordinate descent.

    Full cycles alternate with cycles restricted to the active set, and the
    solver stops when a full cycle changes no coordinate by more than tol.

    Parameters
    ----------
    XT : array, shape=(m, n)
        Transposed centered design.
    r : array, shape=(n)
        Current residual r0 - X beta, updated in place.
    beta : array, shape=(m)
        Warm start, updated in place.
    col_sq : array, shape=(m)
        Mean squared value of each column; 0 marks a column to skip.
    lam : float
        Penalty level.
    max_pass : int
        Maximum number of cycles.
    tol : float
        Convergence tolerance on scaled coefficient changes.

    Returns
    -------
    int
        Number of cycles performed.

    """
    n = r.shape[0]
    n_pass = 0
    while n_pass < max_pass:
        delta = _gaussian_pass(XT, r, beta, col_sq, lam, n, False)
        n_pass += 1
        if delta < tol:
            break
        while n_pass < max_pass:
            delta = _gaussian_pass(XT, r, beta, col_sq, lam, n, True)
            n_pass += 1
            if delta < tol:
                break
    return n_pass


@njit(cache=True)
def gaussian_lasso_path(XT, y, col_sq, lambdas, max_pass, tol):
    """
    Warm-started lasso path over a decreasing grid of penalties.

    Returns
    -------
    coefs : array, shape=(m, n_lambdas)
        Solution at each grid point.
    entry : array, shape=(m)
        Largest grid penalty at which each coefficient is non-zero, 0 if the
        coefficient never enters.

    """
    m = XT.shape[0]
    n_lambdas = lambdas.shape[0]
    beta = np.zeros(m)
    r = y.copy()
    coefs = np.zeros((m, n_lambdas))
    entry = np.zeros(m)
    for k in range(n_lambdas):
        gaussian_lasso_cd(XT, r, beta, col_sq, lambdas[k], max_pass, tol)
        for j in range(m):
            coefs[j, k] = beta[j]
            if beta[j] != 0.0 and entry[j] == 0.0:
                entry[j] = lambdas[k]
    return coefs, entry


@njit(cache=True)
def _weighted_pass(XT, r, w, beta, wx_sq, lam, n, active_only):
    max_delta = 0.0
    for j in range(XT.shape[0]):
        if wx_sq[j] == 0.0:
            continue
        if active_only and beta[j] == 0.0:
            continue
        xj = XT[j]
        g = 0.0
        for i in range(n):
            g += w[i] * xj[i] * r[i]
        g = g / n + wx_sq[j] * beta[j]
        new = soft_threshold(g, lam) / wx_sq[j]
        delta = new - beta[j]
        if delta != 0.0:
            for i in range(n):
                r[i] -= delta * xj[i]
            beta[j] = new
            delta = abs(delta) * np.sqrt(wx_sq[j])
            if delta > max_delta:
                max_delta = delta
    return max_delta


@njit(cache=True)
def _intercept_step(r, w, sum_w):
    s = 0.0
    for i in range(r.shape[0]):
        s += w[i] * r[i]
    delta = s / sum_w
    for i in range(r.shape[0]):
        r[i] -= delta
    return delta


@njit(cache=True)
def weighted_lasso_cd(XT, z, w, beta, b0, lam, max_pass, tol):
    """
    Minimize (1/2n) sum_i w_i (z_i - b0 - x_i beta)^2 + lam ||beta||_1 with an
    unpenalized intercept b0, by coordinate descent. This is the inner
    problem of a proximal Newton step for the logistic likelihood.

    Returns
    -------
    b0 : float
        Updated intercept; beta is updated in place.

    """
    n = z.shape[0]
    m = XT.shape[0]
    wx_sq = np.zeros(m)
    for j in range(m):
        s = 0.0
        for i in range(n):
            s += w[i] * XT[j, i] * XT[j, i]
        wx_sq[j] = s / n
    sum_w = 0.0
    for i in range(n):
        sum_w += w[i]
    r = z.copy()
    for i in range(n):
        r[i] -= b0
    for j in range(m):
        if beta[j] != 0.0:
            for i in range(n):
                r[i] -= beta[j] * XT[j, i]
    n_pass = 0
    while n_pass < max_pass:
        b0 += _intercept_step(r, w, sum_w)
        delta = _weighted_pass(XT, r, w, beta, wx_sq, lam, n, False)
        n_pass += 1
        if delta < tol:
            break
        while n_pass < max_pass:
            b0 += _intercept_step(r, w, sum_w)
            delta = _weighted_pass(XT, r, w, beta, wx_sq, lam, n, True)
            n_pass += 1
            if delta < tol:
                break
    b0 += _intercept_step(r, w, sum_w)
    return b0
