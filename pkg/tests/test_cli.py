import json

import pandas as pd
import pytest

from conftest import CONFIGS
from cr_flow_check import main


def write_suite(tmp_path, suites, model='default_alpha1.json', **extra):
    doc = {'model': str(CONFIGS / model), 'suites': suites, 'n': 5, 'seed': 3,
           'out': str(tmp_path / 'report.json')}
    doc.update(extra)
    path = tmp_path / 'suite.json'
    path.write_text(json.dumps(doc))
    return path


def test_check_passes_and_writes_report(tmp_path, capsys):
    config = write_suite(tmp_path, ['invariance', 'group_law', 'vanishing'])
    assert main(['check', '--config', str(config)]) == 0
    doc = json.loads((tmp_path / 'report.json').read_text())
    assert doc['passed'] is True
    assert doc['precision_bits'] == 192
    assert [r['check_name'] for r in doc['reports']] == ['invariance', 'group_law', 'vanishing']
    assert 'CHECK SUMMARY' in capsys.readouterr().out


def test_check_output_is_deterministic(tmp_path):
    config = write_suite(tmp_path, ['invariance', 'recover'])
    first, second = tmp_path / 'a.json', tmp_path / 'b.json'
    assert main(['check', '--config', str(config), '--out', str(first)]) == 0
    assert main(['check', '--config', str(config), '--out', str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()


def test_check_flag_overrides(tmp_path):
    config = write_suite(tmp_path, ['invariance'])
    out = tmp_path / 'low.json'
    code = main(['check', '--config', str(config), '--suite', 'tangency,recover',
                 '--precision-bits', '128', '--seed', '9', '--out', str(out), '--csv'])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc['precision_bits'] == 128
    assert [r['check_name'] for r in doc['reports']] == ['tangency', 'recover']
    frame = pd.read_csv(tmp_path / 'low_tangency.csv')
    assert set(frame['check_name']) >= {'tangency', 'tangency_zero_field'}


def test_mismatched_field_fails_with_exit_one(tmp_path):
    config = write_suite(tmp_path, ['tangency'], field_alpha='0')
    assert main(['check', '--config', str(config)]) == 1
    doc = json.loads((tmp_path / 'report.json').read_text())
    assert doc['passed'] is False


def test_missing_model_exit_two(tmp_path, capsys):
    config = write_suite(tmp_path, ['invariance'], model='no_such_model.json')
    assert main(['check', '--config', str(config)]) == 2
    assert 'config file not found' in capsys.readouterr().err


def test_unknown_suite_exit_two(tmp_path):
    config = write_suite(tmp_path, ['invariance'])
    assert main(['check', '--config', str(config), '--suite', 'bogus']) == 2


def test_unparseable_config_exit_two(tmp_path):
    path = tmp_path / 'broken.json'
    path.write_text('{not json')
    assert main(['check', '--config', str(path)]) == 2


def test_radial_suite_needs_radial_model(tmp_path):
    config = write_suite(tmp_path, ['radial'])
    assert main(['check', '--config', str(config)]) == 2
    config = write_suite(tmp_path, ['radial'], radial_model=str(CONFIGS / 'radial_default.json'))
    assert main(['check', '--config', str(config)]) == 0


def test_usage_error_exit_two():
    with pytest.raises(SystemExit) as exc:
        main(['check'])
    assert exc.value.code == 2


def test_sample_writes_points(tmp_path):
    out = tmp_path / 'pts.csv'
    assert main(['sample', '--config', str(CONFIGS / 'default_alpha1.json'), '--n', '10',
                 '--seed', '4', '--out', str(out)]) == 0
    frame = pd.read_csv(out)
    assert list(frame.columns) == ['re_z1', 'im_z1', 're_z2', 'im_z2', 'rho_residual']
    assert len(frame) == 10
    assert (frame['rho_residual'].abs() <= 1e-30).all()


def test_sample_zero_points_writes_header_only(tmp_path):
    out = tmp_path / 'empty.csv'
    assert main(['sample', '--config', str(CONFIGS / 'default_alpha0.json'), '--n', '0', '--out', str(out)]) == 0
    assert out.read_text().strip() == 're_z1,im_z1,re_z2,im_z2,rho_residual'


def test_sample_rejects_origin(tmp_path):
    out = tmp_path / 'bad.csv'
    assert main(['sample', '--config', str(CONFIGS / 'default_alpha1.json'), '--annulus', '0,0.1',
                 '--out', str(out)]) == 2
    assert not out.exists()


def test_trace_single_time(tmp_path):
    out = tmp_path / 'trace.csv'
    assert main(['trace', '--config', str(CONFIGS / 'default_alpha1.json'), '--z2', '0.05+0.02i',
                 '--t0', '0.1', '--times', '0', '--out', str(out)]) == 0
    frame = pd.read_csv(out, dtype=str)
    assert len(frame) == 1
    assert frame['re_z2'][0] == '0.05'
    assert frame['im_z1'][0] == '0.1'


def test_trace_default_times(tmp_path):
    out = tmp_path / 'trace.csv'
    assert main(['trace', '--config', str(CONFIGS / 'default_alpha1.json'), '--z2', '0.05+0.02i',
                 '--out', str(out)]) == 0
    frame = pd.read_csv(out)
    assert len(frame) == 11
    assert (frame['rho_residual'] <= 1e-25).all()


def test_trace_rejects_off_surface_start(tmp_path):
    assert main(['trace', '--config', str(CONFIGS / 'default_alpha1.json'), '--z2', '0.05',
                 '--z1', '0.3', '--out', str(tmp_path / 't.csv')]) == 2


def test_trace_truncated_by_guard(tmp_path, capsys):
    model = tmp_path / 'steep.json'
    model.write_text(json.dumps({'alpha': '1', 'a': [['30', '0']], 'eps0': '0.15', 'delta0': '0.3'}))
    out = tmp_path / 'trace.csv'
    code = main(['trace', '--config', str(model), '--z2', '0-0.035i', '--t0', '1.0',
                 '--times', '0:3:0.1', '--out', str(out)])
    assert code == 1
    frame = pd.read_csv(out)
    assert 1 <= len(frame) < 31
    assert 'last good time' in capsys.readouterr().err


def test_trace_beyond_one_turn(tmp_path):
    out = tmp_path / 'long.csv'
    assert main(['trace', '--config', str(CONFIGS / 'default_alpha1.json'), '--z2', '0.05+0.02i',
                 '--times', '0:8:1', '--out', str(out)]) == 0
    frame = pd.read_csv(out)
    assert len(frame) == 9
    assert (frame['rho_residual'] <= 1e-25).all()


def test_negative_alpha_model_is_accepted(tmp_path):
    model = tmp_path / 'negative.json'
    model.write_text(json.dumps({'alpha': '-1', 'a': [['1', '0']], 'eps0': '0.15', 'delta0': '0.3'}))
    out = tmp_path / 'pts.csv'
    assert main(['sample', '--config', str(model), '--n', '5', '--out', str(out)]) == 0
    assert (pd.read_csv(out)['rho_residual'].abs() <= 1e-30).all()
    config = write_suite(tmp_path, ['invariance', 'tangency'], model=str(model))
    assert main(['check', '--config', str(config)]) == 0


def test_unwritable_output_exit_two(tmp_path, capsys):
    blocker = tmp_path / 'plain_file'
    blocker.write_text('x')
    code = main(['sample', '--config', str(CONFIGS / 'default_alpha1.json'), '--n', '2',
                 '--out', str(blocker / 'sub' / 's.csv')])
    assert code == 2
    assert 'Cannot write output' in capsys.readouterr().err
