# -*- coding: utf-8 -*-
"""
Null p-values of the conditional randomization test on the second order
scenario, for the tilted resampler and for the resampler built on the
population law of X.
"""
import logging

import numpy as np

from tiltko.utils.experiments_utils import (
    ExperimentConfig, crt_rejection_rates, run_crt_calibration
)

logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s [%(levelname)8s] %(message)s (%(filename)s:%(lineno)s)"
)

n_jobs = -1
replicates = 500
K = 200
csv_name = 'results/crt_a3.csv'

config = ExperimentConfig(
    scenario='a3_second_order', scale=0.05, replicates=replicates, seed=42,
    n_jobs=n_jobs, output_path=csv_name
)

# In[Null p-values]:

df = run_crt_calibration(config, K=K)
df.to_csv(csv_name, index=False)
rates = crt_rejection_rates(df)
print(rates.to_string(index=False))

# Three binomial standard errors above each level
for alpha in (0.05, 0.1):
    bound = alpha + 3 * np.sqrt(alpha * (1 - alpha) / replicates)
    print('alpha={} bound={:.4f}'.format(alpha, bound))
