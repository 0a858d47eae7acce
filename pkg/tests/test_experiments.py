import json
import logging

import numpy as np
import pandas as pd
import pytest

from tiltko.models.population import LabeledSample
from tiltko.utils.experiments_utils import (
    CSV_COLUMNS, CSV_HEADER, CRT_COLUMNS, ExperimentConfig, ReplicateRecord, aggregate,
    choose_null_column, crt_rejection_rates, parse_method, read_results,
    run_crt_calibration, run_experiment, run_replicate, write_results
)

LOGGER = logging.getLogger(__name__)


def small_config(**kwargs):
    values = dict(scenario='a2_noselect', scale=0.05, methods=('no_adjustment',),
                  q_levels=(0.1, 0.2), replicates=2, seed=3)
    values.update(kwargs)
    return ExperimentConfig(**values)


def record(method='no_adjustment', rep=0, q=0.1, fdp=0.0, power=1.0, n_selected=3,
           error=None):
    return ReplicateRecord(scenario='a1_exact', method=method, rep=rep, q=q, fdp=fdp,
                           power=power, n_selected=n_selected, tau=1.0, seed=0,
                           wall_ms=1.0, error=error)


def without_timing(records):
    return [(r.method, r.rep, r.q, r.fdp, r.power, r.n_selected, r.tau) for r in records]

##########################################
#                                        #
#           Test method labels           #
#                                        #
##########################################

@pytest.mark.parametrize("name, expected", [
    ('no_adjustment', ('no_adjustment', None, None)),
    ('tilted_exact', ('tilted_exact', None, None)),
    ('tilted_second_order_known', ('tilted_second_order_known', None, None)),
    ('tilted_second_order_estimated(logistic)',
     ('tilted_second_order_estimated', 'logistic', None)),
    ('tilted_second_order_estimated(l1_cv)', ('tilted_second_order_estimated', 'l1_cv', None)),
    ('tilted_second_order_estimated(two_stage)',
     ('tilted_second_order_estimated', 'two_stage', 0.25)),
    ('tilted_second_order_estimated(two_stage:0.1)',
     ('tilted_second_order_estimated', 'two_stage', 0.1)),
])
def test_parse_method(name, expected):
    assert parse_method(name) == expected


@pytest.mark.parametrize("name", [
    'knockoffs', 'tilted_second_order_estimated(heckman)',
    'tilted_second_order_estimated(two_stage:1.5)', 'tilted_second_order_estimated',
])
def test_parse_method_invalid(name):
    with pytest.raises(ValueError):
        parse_method(name)

##########################################
#                                        #
#          Test configuration            #
#                                        #
##########################################

def test_config_resolves_alias():
    config = ExperimentConfig(scenario='a3')
    assert config.scenario == 'a3_second_order'


@pytest.mark.parametrize("kwargs", [
    {'q_levels': (0.0,)},
    {'q_levels': ()},
    {'methods': ('unknown',)},
    {'replicates': 0},
    {'seed': -1},
    {'scale': 2.0},
    {'scenario': 'a7'},
    {'is_draws': 0},
])
def test_config_invalid(kwargs):
    with pytest.raises(ValueError):
        ExperimentConfig(**kwargs)


def test_config_from_json(tmp_path):
    path = tmp_path / 'config.json'
    path.write_text(json.dumps({'scenario': 'a4', 'methods': ['no_adjustment'],
                                'q_levels': [0.1], 'replicates': 5}))
    config = ExperimentConfig.from_json(path)
    assert config.scenario == 'a4_markov_cc'
    assert config.methods == ('no_adjustment',) and config.q_levels == (0.1,)
    assert ExperimentConfig.from_dict(config.to_dict()) == config


def test_config_unknown_key():
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({'scenario': 'a1', 'iterations': 3})


def test_config_updated_ignores_none():
    config = small_config()
    updated = config.updated(seed=None, replicates=7)
    assert updated.seed == config.seed and updated.replicates == 7

##########################################
#                                        #
#            Test replicates             #
#                                        #
##########################################

def test_replicate_records():
    config = small_config()
    records = run_replicate(config, 0)
    assert len(records) == 2
    for r in records:
        assert r.scenario == 'a2_noselect' and r.rep == 0 and r.seed == 3
        assert not r.failed
        assert 0 <= r.fdp <= 1 and 0 <= r.power <= 1
        assert r.n_selected >= 0 and r.wall_ms >= 0


def test_failing_method_is_isolated():
    config = small_config(methods=('tilted_exact', 'no_adjustment'))
    records = run_replicate(config, 0)
    failed = [r for r in records if r.method == 'tilted_exact']
    ok = [r for r in records if r.method == 'no_adjustment']
    assert len(failed) == 2 and len(ok) == 2
    for r in failed:
        assert r.failed and r.n_selected == -1
        assert np.isnan(r.fdp) and np.isnan(r.power)
        assert 'ValueError' in r.error
    assert not any(r.failed for r in ok)


def test_experiment_deterministic():
    config = small_config()
    a = run_experiment(config)
    b = run_experiment(config)
    assert without_timing(a) == without_timing(b)
    assert [(r.rep, r.method, r.q) for r in a] == sorted((r.rep, r.method, r.q) for r in a)


def test_experiment_parallel_matches_sequential():
    config = small_config(replicates=3)
    sequential = run_experiment(config)
    parallel = run_experiment(config.updated(n_jobs=2))
    assert without_timing(sequential) == without_timing(parallel)


def test_methods_share_the_sample():
    config = small_config(methods=('no_adjustment', 'tilted_second_order_known'),
                          is_draws=500)
    records = run_replicate(config, 1)
    assert {r.method for r in records} == set(config.methods)
    assert not any(r.failed for r in records)


def test_exact_and_second_order_methods_run():
    config = ExperimentConfig(
        scenario='a1', scale=0.02, methods=('tilted_exact', 'tilted_second_order_known'),
        q_levels=(0.2,), replicates=1, seed=1, is_draws=1000, n_bins=4)
    records = run_experiment(config)
    for r in records:
        LOGGER.info('{}: {}'.format(r.method, r.error))
    assert len(records) == 2
    assert not any(r.failed for r in records)


@pytest.mark.parametrize("estimator", ['logistic', 'l1_cv', 'two_stage:0.25'])
def test_estimated_methods_run(estimator):
    method = 'tilted_second_order_estimated({})'.format(estimator)
    config = ExperimentConfig(
        scenario='a4', scale=0.05, methods=(method,), q_levels=(0.2,), replicates=1,
        seed=2, is_draws=1000, overrides={'gamma0': -3.0})
    records = run_experiment(config)
    assert len(records) == 1
    assert not records[0].failed, records[0].error

##########################################
#                                        #
#          Test output and summary       #
#                                        #
##########################################

def test_write_and_read_results(tmp_path):
    config = small_config(output_path=str(tmp_path / 'out' / 'results.csv'))
    records = [record(), record(rep=1, fdp=np.nan, power=np.nan, n_selected=-1,
                                error='ValueError: boom')]
    csv_path, json_path = write_results(records, config)
    assert csv_path.read_text().splitlines()[0] == CSV_HEADER
    df = read_results(csv_path)
    assert list(df.columns) == CSV_COLUMNS
    assert len(df) == 2
    metadata = json.loads(json_path.read_text())
    assert metadata['config']['scenario'] == 'a2_noselect'
    assert metadata['failures'] == [
        {'rep': 1, 'method': 'no_adjustment', 'q': 0.1, 'error': 'ValueError: boom'}]


def test_aggregate():
    records = [record(rep=0, fdp=0.0, power=1.0), record(rep=1, fdp=0.5, power=0.5),
               record(rep=2, fdp=np.nan, power=np.nan, n_selected=-1, error='x'),
               record(method='tilted_exact', fdp=0.2, power=0.8)]
    summary = aggregate(records).set_index('method')
    row = summary.loc['no_adjustment']
    assert row['mean_fdp'] == pytest.approx(0.25)
    assert row['median_fdp'] == pytest.approx(0.25)
    assert row['se_fdp'] == pytest.approx(0.25)
    assert row['mean_power'] == pytest.approx(0.75)
    assert row['n_reps'] == 2 and row['n_failed'] == 1
    single = summary.loc['tilted_exact']
    assert single['se_fdp'] == 0.0 and single['n_failed'] == 0


def test_aggregate_ignores_record_order():
    rng = np.random.default_rng(11)
    records = [record(method=m, rep=r, q=q, fdp=rng.random(), power=rng.random(),
                      n_selected=int(rng.integers(0, 10)))
               for m in ('no_adjustment', 'tilted_exact') for r in range(6)
               for q in (0.1, 0.2)]
    records.append(record(rep=6, fdp=np.nan, power=np.nan, n_selected=-1, error='x'))
    expected = aggregate(records)
    for _ in range(5):
        shuffled = [records[i] for i in rng.permutation(len(records))]
        pd.testing.assert_frame_equal(aggregate(shuffled), expected)


def test_aggregate_empty():
    with pytest.raises(ValueError):
        aggregate([])

##########################################
#                                        #
#         Test CRT calibration           #
#                                        #
##########################################

def test_choose_null_column_prefers_collider():
    x = np.zeros((3, 6))
    sample = LabeledSample(x=x, y=np.zeros(3), truth_beta_nonnull=[0, 1],
                           truth_gamma_nonnull=[1, 4])
    assert choose_null_column(sample) == 4
    sample = LabeledSample(x=x, y=np.zeros(3), truth_beta_nonnull=[0, 1])
    assert choose_null_column(sample) == 2
    with pytest.raises(ValueError):
        choose_null_column(LabeledSample(x=x, y=np.zeros(3),
                                         truth_beta_nonnull=np.arange(6)))


def test_crt_calibration_exact_scenario():
    config = ExperimentConfig(scenario='a1', scale=0.02, replicates=2, seed=5)
    df = run_crt_calibration(config, K=9)
    assert list(df.columns) == CRT_COLUMNS
    assert len(df) == 4
    assert set(df['resampler']) == {'tilted', 'unadjusted'}
    lattice = df['pvalue'] * 10
    assert np.allclose(lattice, np.round(lattice))


def test_crt_calibration_second_order_scenario():
    config = ExperimentConfig(scenario='a3', scale=0.05, replicates=1, seed=6,
                              is_draws=500, n_bins=3)
    df = run_crt_calibration(config, K=4)
    assert len(df) == 2
    assert df['pvalue'].between(0.2, 1.0).all()


def test_crt_rejection_rates():
    df = pd.DataFrame({'resampler': ['tilted'] * 4 + ['unadjusted'] * 4,
                       'pvalue': [0.01, 0.5, 0.9, 0.3, 0.01, 0.02, 0.08, 0.6]})
    rates = crt_rejection_rates(df).set_index('resampler')
    assert rates.loc['tilted', 'alpha_0.05'] == pytest.approx(0.25)
    assert rates.loc['unadjusted', 'alpha_0.1'] == pytest.approx(0.75)
