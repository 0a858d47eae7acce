"""
Feature statistics and the knockoff filter.
"""
from .statistics import FeatureStats, lasso_entry_stats, lasso_path
from .knockoff_filter import (
    KnockoffResult, w_scores, knockoff_threshold, fdp_power, knockoff_filter
)

__all__ = [
    "FeatureStats", "lasso_entry_stats", "lasso_path", "KnockoffResult", "w_scores",
    "knockoff_threshold", "fdp_power", "knockoff_filter",
]
