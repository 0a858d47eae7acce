# -*- coding: utf-8 -*-
"""
Mean FDP and power of the knockoff constructions on the four simulation
scenarios. Runs at scale 0.5 take from a few minutes (a2) to a few hours (a4)
with all cores.
"""
import logging

from tiltko.utils.experiments_utils import (
    ExperimentConfig, aggregate, run_experiment, write_results
)

logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s [%(levelname)8s] %(message)s (%(filename)s:%(lineno)s)"
)

# Number of parallel workers
n_jobs = -1
# Factor applied to the full dimensions and counts
scale = 0.5
seed = 42
q_levels = (0.1, 0.2, 0.3)
base_path = 'results/'

runs = {
    'a1_exact': dict(
        methods=('no_adjustment', 'tilted_exact'), replicates=200),
    'a2_noselect': dict(
        methods=('no_adjustment',), replicates=200),
    'a3_second_order': dict(
        methods=('no_adjustment', 'tilted_second_order_known'), replicates=200),
    'a4_markov_cc': dict(
        methods=('no_adjustment', 'tilted_second_order_known',
                 'tilted_second_order_estimated(logistic)'), replicates=300),
}

# In[Replicated runs]:

for scenario, params in runs.items():
    config = ExperimentConfig(
        scenario=scenario, scale=scale, q_levels=q_levels, seed=seed,
        n_jobs=n_jobs, output_path=base_path + scenario + '.csv', **params
    )
    records = run_experiment(config)
    write_results(records, config)
    summary = aggregate(records)
    summary.to_csv(base_path + scenario + '_summary.csv', index=False)
    print(summary.to_string(index=False))
