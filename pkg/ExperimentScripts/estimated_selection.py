# -*- coding: utf-8 -*-
"""
Second order tilted knockoffs with an estimated selection model on the
Markov case-control scenario, compared with the known selection model.
"""
import logging

from tiltko.utils.experiments_utils import (
    ExperimentConfig, aggregate, run_experiment, write_results
)

logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s [%(levelname)8s] %(message)s (%(filename)s:%(lineno)s)"
)

n_jobs = -1
scale = 0.5
replicates = 300
seed = 42
csv_name = 'results/a4_estimators.csv'

methods = (
    'no_adjustment',
    'tilted_second_order_known',
    'tilted_second_order_estimated(logistic)',
    'tilted_second_order_estimated(l1_cv)',
    'tilted_second_order_estimated(two_stage:0.25)',
)

config = ExperimentConfig(
    scenario='a4_markov_cc', scale=scale, methods=methods,
    q_levels=(0.1, 0.2, 0.3), replicates=replicates, seed=seed,
    n_jobs=n_jobs, output_path=csv_name
)

# In[Replicated runs]:

records = run_experiment(config)
write_results(records, config)
summary = aggregate(records)
print(summary.to_string(index=False))

# Relative power of the estimated models against the known model
known = summary[summary['method'] == 'tilted_second_order_known'].set_index('q')
for method in methods[2:]:
    estimated = summary[summary['method'] == method].set_index('q')
    ratio = estimated['mean_power'] / known['mean_power']
    print(method, ratio.round(3).to_dict())
