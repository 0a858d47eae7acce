"""
Estimation of the selection or diagnosis probability from the biased sample.

The two-stage estimator lives in tiltko.estimation.two_stage, it depends on
the knockoff filter which itself uses the logistic path of this package.
"""
from .logistic import (
    LogisticFit, PrevalenceAdjustment, fit_logistic, cross_validate_lambda,
    adjust_intercept
)

__all__ = [
    "LogisticFit", "PrevalenceAdjustment", "fit_logistic", "cross_validate_lambda",
    "adjust_intercept",
]
