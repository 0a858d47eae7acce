# -*- coding: utf-8 -*-
"""
Input validation helpers, the exception hierarchy shared by the package and
random number stream helpers.
"""
import numbers
import zlib
from os import cpu_count

import numpy as np


class TiltkoError(ValueError):
    """Base class of the errors raised by tiltko."""


class NotPositiveDefiniteError(TiltkoError):
    """A matrix that must be positive (semi-)definite is not."""

    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class InsufficientStratumError(TiltkoError):
    """A case-control pool holds fewer cases or controls than requested."""

    def __init__(self, stratum, needed, available):
        super().__init__(
            "Insufficient {}: requested {} but the pool only holds {} "
            "(shortfall {})".format(stratum, needed, available, needed - available)
        )
        self.stratum = stratum
        self.needed = needed
        self.available = available


class EmptySelectionError(TiltkoError):
    """No row of the pool was selected."""


class DegenerateTiltError(TiltkoError):
    """All importance weights of a tilted distribution are zero."""


class InvalidMixtureWeightError(TiltkoError):
    """The exact mixture tilt would need a negative component weight."""


class ConvergenceWarning(UserWarning):
    """A numerical routine stopped before reaching its tolerance."""


def is_int(x):
    """Check if x is of integer type, but not boolean."""
    # boolean are subclasses of integers in Python, so explicitly exclude them
    return isinstance(x, (int, np.integer)) and not isinstance(x, bool)


def check_is_numeric(x):
    if isinstance(x, (numbers.Real, np.floating, np.integer)) and not isinstance(x, bool):
        return x
    raise ValueError('Expected a numerical value, but got {}'.format(type(x)))


def check_is_boolean(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    raise ValueError('Expected a boolean, but got {}'.format(type(x)))


def check_positive_int(x, name, minimum=1):
    if not is_int(x) or x < minimum:
        raise ValueError(
            "`{}` must be an integer >= {}, but found: {}".format(name, minimum, x)
        )
    return int(x)


def check_open_unit(x, name):
    """Check that x is a real number in the open interval (0, 1)."""
    x = check_is_numeric(x)
    if not 0.0 < x < 1.0:
        raise ValueError("`{}` must lie in (0, 1), but found: {}".format(name, x))
    return float(x)


def check_n_jobs(n_jobs):
    """Check `n_jobs` parameter according to the scikit-learn convention.

    Parameters
    ----------
    n_jobs : int, positive or -1
        The number of jobs for parallelization.

    Returns
    -------
    n_jobs : int
        Checked number of jobs.
    """
    if n_jobs is None:
        return 1
    elif not is_int(n_jobs):
        raise ValueError(f"`n_jobs` must be None or an integer, but found: {n_jobs}")
    elif n_jobs < 0:
        return max(1, cpu_count() + n_jobs + 1)
    else:
        return max(1, min(n_jobs, cpu_count()))


def check_array_2D(X, n_columns=None, name='X'):
    """
    Perform checks on the input to verify if it is a finite 2D float array.

    Parameters
    ----------
    X : array, shape = (n_samples, n_features)
        Input matrix
    n_columns : int, optional
        If given, the number of columns X must have. The default is None.
    name : str, optional
        Name used in error messages. The default is 'X'.

    Raises
    ------
    ValueError
        If X is not 2-dimensional, is empty, has the wrong number of columns
        or contains non-finite values.

    Returns
    -------
    X : array, shape = (n_samples, n_features)
        Input matrix as float64.

    """
    X = check_is_numpy(X)
    if X.ndim != 2:
        raise ValueError(
            "{} must be a 2-dimensional array, but found shape: {}".format(name, X.shape)
        )
    if X.size == 0:
        raise ValueError(
            "{} is empty or have a dimension of size 0"
            ", found shape: {}".format(name, X.shape)
        )
    if n_columns is not None and X.shape[1] != n_columns:
        raise ValueError(
            "{} must have {} columns, but found shape: {}".format(name, n_columns, X.shape)
        )
    X = X.astype(np.float64, copy=False)
    if not np.all(np.isfinite(X)):
        raise ValueError("{} contains non-finite values".format(name))
    return X


def check_array_1D(X, size=None, name='x'):
    """
    Perform checks on the input to verify if it is a finite 1D float array.

    Parameters
    ----------
    X : array, shape = (n_values)
        Input vector
    size : int, optional
        If given, the length X must have. The default is None.
    name : str, optional
        Name used in error messages. The default is 'x'.

    Raises
    ------
    ValueError

    Returns
    -------
    X : array, shape = (n_values)
        Input vector as float64.

    """
    X = check_is_numpy(X)
    if X.ndim != 1:
        raise ValueError(
            "{} must be a 1-dimensional array, but found shape: {}".format(name, X.shape)
        )
    if X.size == 0:
        raise ValueError(
            "{} is empty, found shape: {}".format(name, X.shape)
        )
    if size is not None and X.shape[0] != size:
        raise ValueError(
            "{} must have length {}, but found length {}".format(name, size, X.shape[0])
        )
    X = X.astype(np.float64, copy=False)
    if not np.all(np.isfinite(X)):
        raise ValueError("{} contains non-finite values".format(name))
    return X


def check_binary(y, name='y'):
    """Check that y only holds 0/1 values and return it as float64."""
    y = check_array_1D(y, name=name)
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("{} must only contain 0 and 1 values".format(name))
    return y


def check_square_matrix(A, name='sigma'):
    A = check_array_2D(A, name=name)
    if A.shape[0] != A.shape[1]:
        raise ValueError("{} must be square, but found shape: {}".format(name, A.shape))
    return A


def check_is_numpy(X):
    """
    Check if the input is a numpy array, else raise an error

    Parameters
    ----------
    X : array
        Input data

    Raises
    ------
    ValueError

    Returns
    -------
    X : array
        Input data.

    """
    if isinstance(X, (list, tuple)):
        return np.asarray(X)
    if isinstance(X, np.ndarray):
        return X
    raise ValueError(
        "Expected an python list or numpy array as input "
        "but got {}".format(str(type(X)))
    )


def check_rng(rng):
    """
    Turn `rng` into a numpy Generator, following the scikit-learn
    `check_random_state` convention.

    Parameters
    ----------
    rng : None, int, SeedSequence or Generator
        None gives a fresh unseeded stream, an int or SeedSequence seeds a new
        stream and a Generator is returned unchanged.

    Returns
    -------
    numpy.random.Generator

    """
    if rng is None or is_int(rng) or isinstance(rng, np.random.SeedSequence):
        return np.random.default_rng(rng)
    if isinstance(rng, np.random.Generator):
        return rng
    raise ValueError(
        "{!r} cannot be used to seed a numpy.random.Generator".format(rng)
    )


def key_to_int(key):
    """Stable non-negative integer for a string or integer key."""
    if is_int(key):
        return int(key)
    return zlib.crc32(str(key).encode("utf-8"))


def child_rng(seed, *keys):
    """
    Independent stream derived from a master seed and a tuple of keys.

    The same (seed, keys) always gives the same stream, and different keys
    give streams that do not overlap, whatever the order in which they are
    requested.

    Parameters
    ----------
    seed : int
        Master seed.
    *keys : int or str
        Keys identifying the child stream, e.g. (replicate index, method name).

    Returns
    -------
    numpy.random.Generator

    """
    seed = int(seed)
    if seed < 0:
        raise ValueError("seed must be non-negative, got {}".format(seed))
    spawn_key = tuple(key_to_int(k) for k in keys)
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=spawn_key))


def draw_seed(rng):
    """Draw an integer seed from a Generator, used to derive child streams."""
    return int(check_rng(rng).integers(np.iinfo(np.uint32).max))
