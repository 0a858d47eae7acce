"""
Population models of (X, Y, S) and the biased sampling designs of the
simulation scenarios.
"""
from .covariates import GaussianBlock, MarkovChain3, sample_covariates
from .responses import LinearGaussian, Logistic, sample_response
from .selection import LogisticSelection, SquaredExponential, selection_prob
from .population import (
    PopulationModel, LabeledSample, CaseControlDesign, SelectionDesign, RandomDesign,
    draw_case_control, draw_selected, draw_random, draw_sample
)
from .scenarios import make_scenario, SCENARIO_DEFAULTS

__all__ = [
    "GaussianBlock", "MarkovChain3", "sample_covariates",
    "LinearGaussian", "Logistic", "sample_response",
    "LogisticSelection", "SquaredExponential", "selection_prob",
    "PopulationModel", "LabeledSample", "CaseControlDesign", "SelectionDesign",
    "RandomDesign", "draw_case_control", "draw_selected", "draw_random", "draw_sample",
    "make_scenario", "SCENARIO_DEFAULTS",
]
