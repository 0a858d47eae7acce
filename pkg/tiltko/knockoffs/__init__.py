"""
Knockoff samplers: standard Gaussian knockoffs and knockoffs exchangeable
with respect to the tilted law of a biased sample.
"""
from .gaussian import (
    GaussianKnockoffSpec, StandardKnockoffs, build_spec, sample_knockoffs,
    solve_s_equicorrelation
)
from .tilting import (
    GaussianMixtureTilt, TiltSpec, TiltedMoments, ExactTiltKnockoffs,
    SecondOrderTiltKnockoffs, exact_mixture_tilt, component_posterior_q1,
    sample_mixture_knockoff, exact_tilted_knockoffs, estimate_tilted_moments,
    second_order_tilted_knockoffs
)

__all__ = [
    "GaussianKnockoffSpec", "StandardKnockoffs", "build_spec", "sample_knockoffs",
    "solve_s_equicorrelation", "GaussianMixtureTilt", "TiltSpec", "TiltedMoments",
    "ExactTiltKnockoffs", "SecondOrderTiltKnockoffs", "exact_mixture_tilt",
    "component_posterior_q1", "sample_mixture_knockoff", "exact_tilted_knockoffs",
    "estimate_tilted_moments", "second_order_tilted_knockoffs",
]
