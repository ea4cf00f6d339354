import mpmath as mp
import pytest

from errors import ConfigError
from utils import (
    atomic_write_text, format_residual, load_json_config, parse_complex, parse_pair,
    parse_times, validate_model_config,
)


def test_load_json_config(tmp_path):
    path = tmp_path / 'm.json'
    path.write_text('{"alpha": "1"}')
    assert load_json_config(path) == {'alpha': '1'}


@pytest.mark.parametrize('content', ['[1, 2]', '{oops'])
def test_load_json_config_rejects_bad_documents(tmp_path, content):
    path = tmp_path / 'm.json'
    path.write_text(content)
    with pytest.raises(ConfigError):
        load_json_config(path)


def test_load_json_config_missing(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_json_config(tmp_path / 'absent.json')


@pytest.mark.parametrize('config, ok', [
    ({'alpha': '1', 'a': [['1', '0']]}, True),
    ({}, False),
    ({'alpha': '1'}, False),
    ({'alpha': '-1', 'a': [['1', '0']]}, True),
    ({'alpha': '1', 'a': []}, False),
    ({'alpha': '1', 'a': [['1', '0']], 'eps0': '0'}, False),
    ({'alpha': 'x', 'a': [['1', '0']]}, False),
    ({'kind': 'radial', 'Q': {'poly': [[2, 0, '1']]}}, True),
    ({'kind': 'radial', 'Q': {'poly': [[2, 0]]}}, False),
])
def test_validate_model_config(config, ok):
    assert validate_model_config(config)[0] is ok


def test_parse_times_range_is_inclusive():
    times = parse_times('0:1:0.1')
    assert len(times) == 11
    assert times[0] == 0
    assert mp.almosteq(times[-1], 1)


def test_parse_times_list_and_errors():
    assert parse_times('0, 0.5,-1') == [0, mp.mpf('0.5'), -1]
    with pytest.raises(ConfigError):
        parse_times('0:1:0')
    with pytest.raises(ConfigError):
        parse_times('a,b')


def test_parse_pair_and_complex():
    assert parse_pair('0.02,0.1') == (mp.mpf('0.02'), mp.mpf('0.1'))
    with pytest.raises(ConfigError):
        parse_pair('0.1')
    assert parse_complex('0.05+0.02i') == mp.mpc('0.05', '0.02')
    assert parse_complex('0-0.035i') == mp.mpc(0, '-0.035')
    with pytest.raises(ConfigError):
        parse_complex('zz')


def test_format_residual():
    assert format_residual(mp.mpf('1.234567891e-30')) == '1.23457e-30'
    assert format_residual(3) == '3'


def test_atomic_write_text_replaces_file(tmp_path):
    target = tmp_path / 'nested' / 'out.txt'
    atomic_write_text(target, 'first')
    atomic_write_text(target, 'second')
    assert target.read_text() == 'second'
    assert [p.name for p in target.parent.iterdir()] == ['out.txt']
