# -*- coding: utf-8 -*-
"""
Small dense linear algebra helpers for covariance matrices.
"""
import logging

import numpy as np
from scipy import linalg

from tiltko.utils.checks_utils import NotPositiveDefiniteError, check_square_matrix

logger = logging.getLogger(__name__)

# Relative to the largest diagonal entry.
PSD_TOL = 1e-8
RIDGE_FACTOR = 1e-6
RIDGE_ESCALATION = 10.0
MAX_RIDGE_STEPS = 30


def symmetrize(A):
    return (A + A.T) / 2.0


def min_eigenvalue(A):
    """Smallest eigenvalue of a symmetric matrix."""
    return float(linalg.eigvalsh(symmetrize(A), subset_by_index=[0, 0])[0])


def cholesky_factor(A, name='matrix'):
    """
    Lower triangular Cholesky factor of a symmetric positive definite matrix.

    Parameters
    ----------
    A : array, shape=(p, p)
        Symmetric positive definite matrix.
    name : str, optional
        Name used in the error message. The default is 'matrix'.

    Raises
    ------
    NotPositiveDefiniteError
        If the factorization fails. The error carries the smallest eigenvalue.

    Returns
    -------
    L : array, shape=(p, p)
        Lower triangular matrix with L @ L.T == A.

    """
    A = check_square_matrix(A, name=name)
    try:
        return linalg.cholesky(symmetrize(A), lower=True, check_finite=False)
    except linalg.LinAlgError:
        lam = min_eigenvalue(A)
        raise NotPositiveDefiniteError(
            "{} is not positive definite (smallest eigenvalue {:.3e})".format(name, lam),
            min_eigenvalue=lam
        )


def psd_factor(A):
    """
    Factor F with F @ F.T == A for a positive semi-definite matrix.

    Uses a Cholesky factorization when it succeeds and an eigendecomposition
    with negative round-off eigenvalues clipped to 0 otherwise, so that
    singular matrices (e.g. the zero matrix) are accepted.
    """
    A = symmetrize(np.asarray(A, dtype=np.float64))
    if not np.any(A):
        return np.zeros_like(A)
    try:
        return linalg.cholesky(A, lower=True, check_finite=False)
    except linalg.LinAlgError:
        lam, U = linalg.eigh(A)
        return U * np.sqrt(np.clip(lam, 0.0, None))


def check_psd(A, name='matrix', tol=PSD_TOL):
    """
    Raise if A has an eigenvalue below -tol * max(diag(A)).

    Returns
    -------
    float
        The smallest eigenvalue of A.
    """
    lam = min_eigenvalue(A)
    scale = max(float(np.max(np.diag(A))), 1.0)
    if lam < -tol * scale:
        raise NotPositiveDefiniteError(
            "{} is not positive semi-definite (smallest eigenvalue {:.3e})".format(
                name, lam),
            min_eigenvalue=lam
        )
    return lam


def regularize_covariance(sigma, factor=RIDGE_FACTOR, max_steps=MAX_RIDGE_STEPS):
    """
    Symmetrize an estimated covariance matrix and add a ridge until it is
    positive definite.

    The first ridge is factor * tr(sigma) / p (or factor when the trace is 0)
    and is multiplied by 10 until the Cholesky factorization succeeds.

    Parameters
    ----------
    sigma : array, shape=(p, p)
        Estimated covariance matrix.
    factor : float, optional
        Relative size of the first ridge. The default is 1e-6.
    max_steps : int, optional
        Maximum number of escalations. The default is 30.

    Raises
    ------
    NotPositiveDefiniteError
        If the matrix is still not positive definite after max_steps.

    Returns
    -------
    sigma : array, shape=(p, p)
        Regularized covariance.
    ridge : float
        The ridge that was added to the diagonal.

    """
    sigma = symmetrize(check_square_matrix(sigma, name='sigma'))
    p = sigma.shape[0]
    trace = float(np.trace(sigma))
    ridge = factor * trace / p if trace > 0 else factor
    eye = np.eye(p)
    for step in range(max_steps + 1):
        candidate = sigma + ridge * eye
        try:
            linalg.cholesky(candidate, lower=True, check_finite=False)
        except linalg.LinAlgError:
            ridge *= RIDGE_ESCALATION
            continue
        if step > 0:
            logger.warning(
                "Covariance needed {} ridge escalations (ridge={:.3e})".format(step, ridge))
        return candidate, ridge
    lam = min_eigenvalue(sigma)
    raise NotPositiveDefiniteError(
        "Covariance is not positive definite after {} ridge escalations "
        "(smallest eigenvalue {:.3e})".format(max_steps, lam),
        min_eigenvalue=lam
    )


def conditional_gaussian(mu, sigma, j):
    """
    Parameters of X_j | X_{-j} under N(mu, sigma).

    Returns
    -------
    coef : array, shape=(p-1)
        Regression coefficients of X_j on X_{-j}.
    intercept : float
        mu_j - coef @ mu_{-j}, so that the conditional mean is
        intercept + coef @ x_{-j}.
    variance : float
        Schur complement sigma_jj - sigma_{j,-j} sigma_{-j,-j}^{-1} sigma_{-j,j}.
    """
    mu = np.asarray(mu, dtype=np.float64)
    sigma = np.asarray(sigma, dtype=np.float64)
    p = sigma.shape[0]
    others = np.delete(np.arange(p), j)
    if others.size == 0:
        return np.zeros(0), float(mu[j]), float(sigma[j, j])
    s_oo = sigma[np.ix_(others, others)]
    s_jo = sigma[j, others]
    L = cholesky_factor(s_oo, name='sigma_{-j,-j}')
    coef = linalg.cho_solve((L, True), s_jo, check_finite=False)
    variance = float(sigma[j, j] - s_jo @ coef)
    if variance < -PSD_TOL * max(float(sigma[j, j]), 1.0):
        raise NotPositiveDefiniteError(
            "Negative conditional variance {:.3e} for coordinate {}".format(variance, j),
            min_eigenvalue=variance
        )
    return coef, float(mu[j] - coef @ mu[others]), max(variance, 0.0)
