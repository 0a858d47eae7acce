# -*- coding: utf-8 -*-
"""
Simulation harness: replicated runs of a scenario with several knockoff
constructions on the same sample, aggregation of FDP and power, CSV output
with a JSON sidecar, and the calibration runs of the conditional
randomization test.
"""
import json
import logging
import re
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from timeit import default_timer as timer
from typing import Optional

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from tiltko import __version__
from tiltko.estimation.two_stage import TWO_STAGE_Q, estimate_selection_model
from tiltko.filters.knockoff_filter import knockoff_filter
from tiltko.filters.statistics import LASSO_EPS, LASSO_GRID
from tiltko.inference.crt import (
    CrtConfig, GaussianConditionalResampler, MixtureConditionalResampler, crt_pvalue
)
from tiltko.knockoffs.gaussian import StandardKnockoffs
from tiltko.knockoffs.tilting import (
    DEFAULT_N_BINS, MAX_DISCRETE_LEVELS, ExactTiltKnockoffs, SecondOrderTiltKnockoffs,
    exact_mixture_tilt, tilted_moments_by_group
)
from tiltko.models.covariates import GaussianBlock
from tiltko.models.population import draw_sample
from tiltko.models.scenarios import make_scenario, resolve_scenario_name
from tiltko.models.selection import SquaredExponential
from tiltko.utils.checks_utils import (
    check_n_jobs, check_open_unit, check_positive_int, child_rng
)

logger = logging.getLogger(__name__)

CSV_COLUMNS = ['scenario', 'method', 'rep', 'q', 'fdp', 'power', 'n_selected',
               'tau', 'seed', 'wall_ms']
CSV_HEADER = '# tiltko-results v1'
CRT_COLUMNS = ['scenario', 'resampler', 'rep', 'j', 'K', 'pvalue', 'seed']

NO_ADJUSTMENT = 'no_adjustment'
TILTED_EXACT = 'tilted_exact'
TILTED_SO_KNOWN = 'tilted_second_order_known'
TILTED_SO_ESTIMATED = 'tilted_second_order_estimated'

_ESTIMATED = re.compile(
    r'^tilted_second_order_estimated\((logistic|l1_cv|two_stage(?::([0-9.]+))?)\)$')


def parse_method(name):
    """
    Split a method label into (kind, estimator, q).

    Labels are 'no_adjustment', 'tilted_exact', 'tilted_second_order_known'
    and 'tilted_second_order_estimated(E)' with E one of 'logistic', 'l1_cv'
    or 'two_stage:q'.
    """
    if name in (NO_ADJUSTMENT, TILTED_EXACT, TILTED_SO_KNOWN):
        return name, None, None
    match = _ESTIMATED.match(name)
    if match is None:
        raise ValueError("Unknown method {!r}".format(name))
    estimator = match.group(1).split(':')[0]
    q = None
    if estimator == 'two_stage':
        q = check_open_unit(float(match.group(2)) if match.group(2) else TWO_STAGE_Q, 'q')
    return TILTED_SO_ESTIMATED, estimator, q


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Parameters of a replicated simulation.

    Parameters
    ----------
    scenario : str
        Scenario name or its short form.
    scale : float
        Factor in (0, 1] applied to dimensions and counts.
    methods : tuple of str
        Method labels, see parse_method.
    q_levels : tuple of float
        Target FDR levels.
    replicates : int
        Number B of replicates.
    seed : int
        Master seed.
    is_draws : int, optional
        Importance draws per group, None for 100 p.
    output_path : str
        CSV path of the results.
    n_jobs : int
        Workers running replicates.
    n_bins : int
        Quantile bins of a continuous response for the second order tilt.
    overrides : dict, optional
        Replacement values of scenario constants.
    forbid_overlap : bool
        Draw the selection support outside of the response support.
    """
    scenario: str = 'a1_exact'
    scale: float = 1.0
    methods: tuple = (NO_ADJUSTMENT,)
    q_levels: tuple = (0.1, 0.2, 0.3)
    replicates: int = 100
    seed: int = 0
    is_draws: Optional[int] = None
    output_path: str = 'results.csv'
    n_jobs: int = 1
    n_bins: int = DEFAULT_N_BINS
    overrides: Optional[dict] = None
    forbid_overlap: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'scenario', resolve_scenario_name(self.scenario))
        object.__setattr__(self, 'methods', tuple(self.methods))
        object.__setattr__(self, 'q_levels', tuple(
            check_open_unit(q, 'q') for q in self.q_levels))
        if not self.methods or not self.q_levels:
            raise ValueError("methods and q_levels must not be empty")
        for method in self.methods:
            parse_method(method)
        check_positive_int(self.replicates, 'replicates')
        check_positive_int(self.seed, 'seed', minimum=0)
        check_positive_int(self.n_bins, 'n_bins')
        if self.is_draws is not None:
            check_positive_int(self.is_draws, 'is_draws')
        if not 0 < self.scale <= 1:
            raise ValueError("scale must lie in (0, 1], but found: {}".format(self.scale))

    @classmethod
    def from_dict(cls, values):
        known = {f.name for f in fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise ValueError("Unknown configuration keys: {}".format(sorted(unknown)))
        values = dict(values)
        for key in ('methods', 'q_levels'):
            if key in values:
                values[key] = tuple(values[key])
        return cls(**values)

    @classmethod
    def from_json(cls, path):
        with open(path, encoding='utf-8') as f:
            return cls.from_dict(json.load(f))

    def to_dict(self):
        values = asdict(self)
        values['methods'] = list(self.methods)
        values['q_levels'] = list(self.q_levels)
        return values

    def updated(self, **changes):
        """Copy with the given non-None values replaced."""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


@dataclass(frozen=True)
class ReplicateRecord:
    """One row of the results: one replicate, one method, one FDR level."""
    scenario: str
    method: str
    rep: int
    q: float
    fdp: float
    power: float
    n_selected: int
    tau: float
    seed: int
    wall_ms: float
    error: Optional[str] = field(default=None, compare=False)

    @property
    def failed(self):
        return self.error is not None


def _continuous(y):
    return np.unique(y).size > MAX_DISCRETE_LEVELS


def build_sampler(method, pop, labeled_sample, config, rng):
    """Knockoff sampler of a method for one replicate."""
    kind, estimator, q = parse_method(method)
    mu, sigma = pop.covariates.moments()
    n_bins = config.n_bins if _continuous(labeled_sample.y) else None
    if kind == NO_ADJUSTMENT:
        return StandardKnockoffs(mu, sigma)
    if kind == TILTED_EXACT:
        if not (isinstance(pop.covariates, GaussianBlock)
                and isinstance(pop.selection, SquaredExponential)
                and labeled_sample.d is not None and not np.any(mu)):
            raise ValueError(
                "tilted_exact needs centered Gaussian covariates, a squared "
                "exponential diagnosis law and a case-control sample")
        return ExactTiltKnockoffs(sigma, pop.selection)
    if kind == TILTED_SO_KNOWN:
        selection = pop.selection
    else:
        selection, _ = estimate_selection_model(
            labeled_sample, estimator, rng, q=q if q is not None else TWO_STAGE_Q,
            mu=mu, sigma=sigma)
    return SecondOrderTiltKnockoffs(pop.covariates, selection, mc_draws=config.is_draws,
                                    n_bins=n_bins)


def draw_replicate(config, rep_index):
    """Population and sample of one replicate, shared by every method."""
    pop, design = make_scenario(
        config.scenario, config.scale, rng=child_rng(config.seed, rep_index, 'scenario'),
        overrides=config.overrides, forbid_overlap=config.forbid_overlap)
    sample = draw_sample(pop, design, child_rng(config.seed, rep_index, 'sample'))
    return pop, sample


def run_replicate(config, rep_index):
    """
    Run every method of the configuration on one replicate.

    All methods see the same sample. Each method consumes its own child
    stream derived from (seed, rep_index, method). A method that raises is
    logged and reported by records carrying the error, with NaN FDP and
    power and n_selected = -1.

    Parameters
    ----------
    config : ExperimentConfig
    rep_index : int

    Returns
    -------
    list of ReplicateRecord
        One record per (method, q).

    """
    logger.info("Replicate {} of {} ({})".format(rep_index, config.replicates, config.scenario))
    try:
        pop, sample = draw_replicate(config, rep_index)
    except Exception as e:
        logger.exception("Replicate {} failed while drawing the sample".format(rep_index))
        return [_failed_record(config, m, rep_index, q, 0.0, e)
                for m in config.methods for q in config.q_levels]

    records = []
    for method in config.methods:
        rng = child_rng(config.seed, rep_index, method)
        t0 = timer()
        try:
            sampler = build_sampler(method, pop, sample, config, rng)
            x_tilde = sampler.sample(sample, rng)
            results = knockoff_filter(sample.x, x_tilde, sample.y, config.q_levels,
                                      truth=sample.truth_beta_nonnull, rng=rng)
        except Exception as e:
            logger.exception("Method {} failed on replicate {}".format(method, rep_index))
            wall_ms = (timer() - t0) * 1000
            records.extend(_failed_record(config, method, rep_index, q, wall_ms, e)
                           for q in config.q_levels)
            continue
        wall_ms = (timer() - t0) * 1000
        for res in results:
            records.append(ReplicateRecord(
                scenario=config.scenario, method=method, rep=rep_index, q=res.q,
                fdp=res.fdp, power=res.power, n_selected=res.n_selected, tau=res.tau,
                seed=config.seed, wall_ms=wall_ms))
    return records


def _failed_record(config, method, rep, q, wall_ms, error):
    return ReplicateRecord(
        scenario=config.scenario, method=method, rep=rep, q=q, fdp=np.nan,
        power=np.nan, n_selected=-1, tau=np.nan, seed=config.seed, wall_ms=wall_ms,
        error='{}: {}'.format(type(error).__name__, error))


def sort_records(records):
    return sorted(records, key=lambda r: (r.rep, r.method, r.q))


def run_experiment(config):
    """
    Run all replicates in a worker pool.

    Returns
    -------
    list of ReplicateRecord
        Sorted by (rep, method, q) whatever the scheduling.

    """
    n_jobs = check_n_jobs(config.n_jobs)
    logger.info("Running {} replicates of {} at scale {} with {} workers".format(
        config.replicates, config.scenario, config.scale, n_jobs))
    batches = Parallel(n_jobs=n_jobs)(
        delayed(run_replicate)(config, rep) for rep in range(config.replicates)
    )
    return sort_records([r for batch in batches for r in batch])


def records_to_frame(records):
    return pd.DataFrame(
        [{c: getattr(r, c) for c in CSV_COLUMNS} for r in records], columns=CSV_COLUMNS
    )


def sidecar_path(path):
    return Path(path).with_suffix('.json')


def write_results(records, config, path=None):
    """
    Write the records as CSV, preceded by a version comment line, and the
    run metadata as a JSON sidecar next to it.

    Returns
    -------
    csv_path, json_path : Path

    """
    path = Path(path or config.output_path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        f.write(CSV_HEADER + '\n')
        records_to_frame(records).to_csv(f, index=False, float_format='%.10g')
    failures = [
        {'rep': r.rep, 'method': r.method, 'q': r.q, 'error': r.error}
        for r in records if r.failed
    ]
    metadata = {
        'tiltko_version': __version__,
        'csv_schema': CSV_HEADER.lstrip('# '),
        'config': config.to_dict(),
        'seeds': {
            'master': config.seed,
            'streams': 'SeedSequence(seed, spawn_key=(rep, crc32(label)))',
        },
        'lasso_grid': {'size': LASSO_GRID, 'eps': LASSO_EPS},
        'n_records': len(records),
        'failures': failures,
    }
    json_path = sidecar_path(path)
    with open(json_path, 'w', encoding='utf-8') as f:
        json.dump(metadata, f, indent=2)
    logger.info("Wrote {} records to {} ({} failures)".format(
        len(records), path, len(failures)))
    return path, json_path


def read_results(path):
    return pd.read_csv(path, comment='#')


def aggregate(records):
    """
    Summary per (scenario, method, q).

    Parameters
    ----------
    records : list of ReplicateRecord or DataFrame
        Failed records (n_selected = -1) are counted but not averaged.

    Returns
    -------
    DataFrame
        mean_fdp, median_fdp, se_fdp, mean_power, se_power, mean_selected,
        n_reps and n_failed. Standard errors are 0 for a single replicate.

    """
    df = records if isinstance(records, pd.DataFrame) else records_to_frame(records)
    if df.empty:
        raise ValueError("Cannot aggregate an empty set of records")
    keys = ['scenario', 'method', 'q']
    ok = df[df['n_selected'] >= 0]

    def _se(s):
        return float(s.std(ddof=1) / np.sqrt(s.size)) if s.size > 1 else 0.0

    summary = ok.groupby(keys).agg(
        mean_fdp=('fdp', 'mean'),
        median_fdp=('fdp', 'median'),
        se_fdp=('fdp', _se),
        mean_power=('power', 'mean'),
        se_power=('power', _se),
        mean_selected=('n_selected', 'mean'),
        n_reps=('fdp', 'size'),
    )
    failed = df[df['n_selected'] < 0].groupby(keys).size().rename('n_failed')
    summary = summary.join(failed, how='outer').reset_index()
    summary['n_failed'] = summary['n_failed'].fillna(0).astype(int)
    summary['n_reps'] = summary['n_reps'].fillna(0).astype(int)
    return summary.sort_values(keys).reset_index(drop=True)


# --------------------------------------------------------------------------- #
# Calibration of the conditional randomization test
# --------------------------------------------------------------------------- #


def choose_null_column(labeled_sample):
    """
    A null column for the CRT, preferably one that drives the selection so
    that an unadjusted resampler is visibly anti-conservative.
    """
    p = labeled_sample.p
    nulls = np.setdiff1d(np.arange(p), labeled_sample.truth_beta_nonnull)
    if nulls.size == 0:
        raise ValueError("The scenario has no null column")
    colliders = np.intersect1d(nulls, labeled_sample.truth_gamma_nonnull)
    return int(colliders[0] if colliders.size else nulls[0])


def tilted_resampler(pop, labeled_sample, config, rng):
    """Exact mixture resampler when available, second order groups otherwise."""
    mu, sigma = pop.covariates.moments()
    if (isinstance(pop.covariates, GaussianBlock)
            and isinstance(pop.selection, SquaredExponential)
            and labeled_sample.d is not None and not np.any(mu)):
        tilt = exact_mixture_tilt(sigma, pop.selection.gamma_x, pop.selection.gamma_y, 0.0,
                                  labeled_sample.rate_case, labeled_sample.rate_control)
        return MixtureConditionalResampler(tilt, labeled_sample.y,
                                           labeled_sample.rate_case,
                                           labeled_sample.rate_control)
    sampler = SecondOrderTiltKnockoffs(pop.covariates, pop.selection,
                                       mc_draws=config.is_draws)
    n_bins = config.n_bins if _continuous(labeled_sample.y) else None
    _, inverse, moments = tilted_moments_by_group(
        labeled_sample, sampler.tilt_spec(labeled_sample), rng, n_bins=n_bins)
    return GaussianConditionalResampler(inverse, moments)


def run_crt_replicate(config, rep_index, K, j=None):
    """Null CRT p-values of one replicate for the tilted and unadjusted resamplers."""
    pop, sample = draw_replicate(config, rep_index)
    j = choose_null_column(sample) if j is None else j
    mu, sigma = pop.covariates.moments()
    rows = []
    resamplers = {
        'tilted': lambda rng: tilted_resampler(pop, sample, config, rng),
        'unadjusted': lambda rng: GaussianConditionalResampler.population(mu, sigma, sample.n),
    }
    for name, build in resamplers.items():
        rng = child_rng(config.seed, rep_index, 'crt', name)
        pvalue = crt_pvalue(sample, CrtConfig(j=j, K=K, resampler=build(rng)), rng)
        rows.append({'scenario': config.scenario, 'resampler': name, 'rep': rep_index,
                     'j': j, 'K': K, 'pvalue': pvalue, 'seed': config.seed})
    return rows


def run_crt_calibration(config, K=200, j=None):
    """
    Null p-values over the replicates of a scenario.

    Returns
    -------
    DataFrame
        One row per (rep, resampler), columns CRT_COLUMNS.

    """
    K = check_positive_int(K, 'K', minimum=0)
    batches = Parallel(n_jobs=check_n_jobs(config.n_jobs))(
        delayed(run_crt_replicate)(config, rep, K, j) for rep in range(config.replicates)
    )
    df = pd.DataFrame([row for batch in batches for row in batch], columns=CRT_COLUMNS)
    return df.sort_values(['rep', 'resampler']).reset_index(drop=True)


def crt_rejection_rates(df, alphas=(0.05, 0.1)):
    """Fraction of p-values at or below each alpha, per resampler."""
    rates = {
        'alpha_{}'.format(a): df.groupby('resampler')['pvalue'].apply(lambda s: float((s <= a).mean()))
        for a in alphas
    }
    return pd.DataFrame(rates).reset_index()
