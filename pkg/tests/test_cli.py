import json
import logging

import pandas as pd
import pytest

from tiltko.cli import build_parser, load_config, main
from tiltko.utils.experiments_utils import CSV_HEADER, CRT_COLUMNS

LOGGER = logging.getLogger(__name__)


def test_run_and_summarize(tmp_path, capsys):
    out = tmp_path / 'results.csv'
    code = main(['-q', 'run', '--scenario', 'a2', '--scale', '0.05', '--reps', '2',
                 '--seed', '1', '--methods', 'no_adjustment', '--q', '0.1,0.2',
                 '--out', str(out)])
    assert code == 0
    assert out.read_text().startswith(CSV_HEADER)
    assert out.with_suffix('.json').exists()
    assert 'mean_fdp' in capsys.readouterr().out

    summary = tmp_path / 'summary.csv'
    assert main(['-q', 'summarize', str(out), '--out', str(summary)]) == 0
    df = pd.read_csv(summary)
    assert list(df['q']) == [0.1, 0.2]
    assert (df['n_reps'] == 2).all()


def test_flags_override_config_file(tmp_path):
    path = tmp_path / 'config.json'
    path.write_text(json.dumps({'scenario': 'a3', 'replicates': 50, 'seed': 9,
                                'methods': ['no_adjustment']}))
    args = build_parser().parse_args(['run', '--config', str(path), '--reps', '3',
                                      '--q', '0.05'])
    config = load_config(args)
    assert config.scenario == 'a3_second_order'
    assert config.replicates == 3 and config.seed == 9
    assert config.q_levels == (0.05,)
    assert config.forbid_overlap is False


def test_forbid_overlap_flag():
    args = build_parser().parse_args(['run', '--forbid-overlap'])
    assert load_config(args).forbid_overlap is True


@pytest.mark.parametrize("argv", [
    ['run', '--scenario', 'a9'],
    ['run', '--scale', '3'],
    ['run', '--methods', 'tilted_second_order_estimated(probit)'],
])
def test_invalid_arguments_exit_code(argv):
    assert main(['-q'] + argv) == 2


def test_missing_command():
    with pytest.raises(SystemExit):
        main([])


def test_crt_calibration_command(tmp_path, capsys):
    out = tmp_path / 'crt.csv'
    code = main(['-q', 'crt-calibration', '--scenario', 'a1', '--scale', '0.02',
                 '--reps', '2', '--K', '9', '--out', str(out)])
    assert code == 0
    df = pd.read_csv(out)
    assert list(df.columns) == CRT_COLUMNS
    assert 'alpha_0.05' in capsys.readouterr().out
