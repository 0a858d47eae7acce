# -*- coding: utf-8 -*-
"""
Command line interface.

    tk run --scenario a1 --scale 0.25 --methods no_adjustment,tilted_exact \
           --q 0.1,0.2,0.3 --reps 100 --seed 42 --out results.csv
    tk summarize results.csv
    tk crt-calibration --scenario a3 --scale 0.1 --reps 500 --K 200 --out crt.csv
"""
import argparse
import logging
import sys

from tiltko import __version__
from tiltko.utils.experiments_utils import (
    ExperimentConfig, aggregate, crt_rejection_rates, read_results, run_crt_calibration,
    run_experiment, write_results
)

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s [%(levelname)8s] %(message)s (%(filename)s:%(lineno)s)"
LOG_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def _floats(text):
    return tuple(float(v) for v in text.split(',') if v.strip())


def _names(text):
    return tuple(v.strip() for v in text.split(',') if v.strip())


def _add_experiment_arguments(parser):
    parser.add_argument('--config', help='JSON file with ExperimentConfig values')
    parser.add_argument('--scenario', help='a1, a2, a3, a4 or a full scenario name')
    parser.add_argument('--scale', type=float, help='factor in (0, 1] on dimensions and counts')
    parser.add_argument('--reps', type=int, dest='replicates', help='number of replicates')
    parser.add_argument('--seed', type=int, help='master seed')
    parser.add_argument('--is-draws', type=int, dest='is_draws',
                        help='importance draws per group (default 100 p)')
    parser.add_argument('--n-bins', type=int, dest='n_bins',
                        help='quantile bins of a continuous response')
    parser.add_argument('--n-jobs', type=int, dest='n_jobs', help='parallel workers')
    parser.add_argument('--forbid-overlap', action='store_true', default=None,
                        dest='forbid_overlap',
                        help='draw the selection support outside of the response support')
    parser.add_argument('--out', dest='output_path', help='output CSV path')


def build_parser():
    parser = argparse.ArgumentParser(
        prog='tk', description='Tilted model-X knockoffs under selection bias')
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true', help='debug logging')
    verbosity.add_argument('-q', '--quiet', action='store_true', help='warnings only')
    sub = parser.add_subparsers(dest='command', required=True)

    run = sub.add_parser('run', help='run a replicated simulation')
    _add_experiment_arguments(run)
    run.add_argument('--methods', type=_names, help='comma separated method labels')
    run.add_argument('--q', type=_floats, dest='q_levels', help='comma separated FDR levels')

    summarize = sub.add_parser('summarize', help='summarize a results CSV')
    summarize.add_argument('path', help='results CSV written by tk run')
    summarize.add_argument('--out', dest='output_path', help='write the summary as CSV')

    crt = sub.add_parser('crt-calibration', help='null p-values of the CRT')
    _add_experiment_arguments(crt)
    crt.add_argument('--K', type=int, default=200, help='resamples per test')
    crt.add_argument('--j', type=int, default=None, help='tested column (default: a null column)')
    return parser


def configure_logging(verbose=False, quiet=False):
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT, datefmt=LOG_DATE_FORMAT)


def load_config(args):
    """ExperimentConfig from --config, overridden by explicit flags."""
    config = ExperimentConfig.from_json(args.config) if args.config else ExperimentConfig()
    changes = {
        key: getattr(args, key, None)
        for key in ('scenario', 'scale', 'replicates', 'seed', 'is_draws', 'n_bins',
                    'n_jobs', 'forbid_overlap', 'output_path', 'methods', 'q_levels')
    }
    return config.updated(**changes)


def _run(args):
    config = load_config(args)
    records = run_experiment(config)
    write_results(records, config)
    print(aggregate(records).to_string(index=False))
    return 0


def _summarize(args):
    summary = aggregate(read_results(args.path))
    if args.output_path:
        summary.to_csv(args.output_path, index=False)
    print(summary.to_string(index=False))
    return 0


def _crt_calibration(args):
    config = load_config(args)
    df = run_crt_calibration(config, K=args.K, j=args.j)
    df.to_csv(config.output_path, index=False)
    logger.info("Wrote {} p-values to {}".format(len(df), config.output_path))
    print(crt_rejection_rates(df).to_string(index=False))
    return 0


COMMANDS = {'run': _run, 'summarize': _summarize, 'crt-calibration': _crt_calibration}


def main(argv=None):
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose, args.quiet)
    try:
        return COMMANDS[args.command](args)
    except ValueError as e:
        logger.error(str(e))
        return 2


if __name__ == '__main__':
    sys.exit(main())
