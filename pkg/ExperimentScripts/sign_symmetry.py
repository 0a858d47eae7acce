# -*- coding: utf-8 -*-
"""
Signs of the W statistics of null features under the exact tilt. The
coefficients are drawn once so that each column keeps its role, then for
each null feature the number of positive signs over the replicates should be
Binomial(B', 1/2), B' being the number of replicates where W_j != 0.
"""
import logging

import numpy as np
from scipy.stats import binomtest

from tiltko.filters.knockoff_filter import knockoff_filter
from tiltko.knockoffs.tilting import ExactTiltKnockoffs
from tiltko.models.population import draw_sample
from tiltko.models.scenarios import make_scenario
from tiltko.utils.checks_utils import child_rng

logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s [%(levelname)8s] %(message)s (%(filename)s:%(lineno)s)"
)

replicates = 300
alpha = 0.01
scale = 0.25
seed = 7

# In[Null signs]:

pop, design = make_scenario('a1_exact', scale=scale, rng=child_rng(seed, 'scenario'))
_, sigma = pop.covariates.moments()
sampler = ExactTiltKnockoffs(sigma, pop.selection)
nulls = np.setdiff1d(np.arange(pop.p), pop.truth_beta_nonnull)
positives = np.zeros(nulls.size, dtype=int)
non_zero = np.zeros(nulls.size, dtype=int)

for rep in range(replicates):
    rng = child_rng(seed, rep, 'symmetry')
    sample = draw_sample(pop, design, rng)
    x_tilde = sampler.sample(sample, rng)
    W = knockoff_filter(sample.x, x_tilde, sample.y, 0.1, rng=rng)[0].w[nulls]
    positives += W > 0
    non_zero += W != 0

tested = non_zero > 0
pvalues = np.array([binomtest(k, m, 0.5).pvalue
                    for k, m in zip(positives[tested], non_zero[tested])])
# Bonferroni over the tested columns
n_rejected = int(np.sum(pvalues <= alpha / pvalues.size))
print('{} columns tested, {} asymmetric at level {}'.format(pvalues.size, n_rejected, alpha))
