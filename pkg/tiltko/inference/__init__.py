"""
Conditional randomization test under the tilted law.
"""
from .crt import (
    CrtConfig, GaussianConditionalResampler, MixtureConditionalResampler,
    conditional_gaussian_draw, crt_pvalue, marginal_covariance
)

__all__ = [
    "CrtConfig", "GaussianConditionalResampler", "MixtureConditionalResampler",
    "conditional_gaussian_draw", "crt_pvalue", "marginal_covariance",
]
