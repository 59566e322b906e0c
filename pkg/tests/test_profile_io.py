"""Profile files, JSON rounding, CSV tables and profile diffs."""

import csv
import json
import math

import numpy as np
import pytest

from conftest import named, random_game, random_profile
from teamgame.errors import ConfigError, SpecViolation
from teamgame.profile_io import (
    COLUMNS,
    dump_json,
    format_profile,
    load_profile,
    parse_profile,
    profile_diff,
    round_significant,
    to_jsonable,
    write_profile,
    write_profile_csv,
)
from teamgame.scenarios import preset_profile


def test_round_trip_is_byte_identical(tmp_path):
    rng = np.random.default_rng(9)
    spec = random_game(rng)
    path = tmp_path / 'profile.json'
    write_profile(str(path), spec, random_profile(rng, spec))
    text = path.read_text()

    reloaded = load_profile(str(path), spec)
    assert format_profile(spec, reloaded) == text
    write_profile(str(path), spec, reloaded)
    assert path.read_text() == text


def test_profile_file_layout(myerson):
    document = json.loads(format_profile(myerson, named(myerson, 'match', 'C')))
    assert document['format'] == 'teamgame-profile'
    assert document['game'] == 'myerson'
    assert [team['team'] for team in document['teams']] == [1, 2]
    assert document['teams'][0]['columns'] == COLUMNS
    assert document['teams'][0]['rows'][0] == ['theta_A', 'A', 'none', 'none', 1.0]
    assert len(document['teams'][1]['rows']) == 6


def _document(spec, preset):
    return json.loads(format_profile(spec, preset_profile(spec, preset)))


def test_parse_errors_name_fields(myerson, contest):
    document = _document(myerson, 'C_C')
    with pytest.raises(ConfigError) as info:
        parse_profile(document, contest)
    assert info.value.field == 'game'

    document = _document(myerson, 'C_C')
    document['teams'][1]['rows'][2][0] = 'theta_B'
    with pytest.raises(ConfigError) as info:
        parse_profile(document, myerson, source='bad.json')
    assert info.value.field == 'teams[1].rows[2]'
    assert str(info.value).startswith('bad.json: ')

    document = _document(myerson, 'C_C')
    document['teams'][0]['rows'][0][4] = 'half'
    with pytest.raises(ConfigError):
        parse_profile(document, myerson)

    document = _document(myerson, 'C_C')
    document['version'] = 7
    with pytest.raises(ConfigError) as info:
        parse_profile(document, myerson)
    assert info.value.field == 'version'


def test_parse_rejects_invalid_mechanism(myerson):
    document = _document(myerson, 'C_C')
    document['teams'][0]['rows'][2][4] = 0.5
    with pytest.raises(SpecViolation, match="Team 1"):
        parse_profile(document, myerson)


def test_load_errors(tmp_path, myerson):
    with pytest.raises(ConfigError):
        load_profile(str(tmp_path / 'missing.json'), myerson)
    broken = tmp_path / 'broken.json'
    broken.write_text('{"format": ')
    with pytest.raises(ConfigError) as info:
        load_profile(str(broken), myerson)
    assert info.value.field == '<root>'


def test_profile_diff(myerson):
    first, second = named(myerson, 'C', 'C'), named(myerson, 'match', 'C')
    assert profile_diff(myerson, first, first, colored=False) == ""
    diff = profile_diff(myerson, first, second, colored=False, labels=("C_C", "match_C"))
    lines = diff.splitlines()
    assert lines[0] == "--- C_C"
    assert lines[1] == "+++ match_C"
    assert '-        ["theta_A", "A", "none", "none", 0.0],' in lines
    assert '+        ["theta_A", "A", "none", "none", 1.0],' in lines
    assert "\x1b[" in profile_diff(myerson, first, second)


def test_profile_csv(tmp_path, contest):
    written = write_profile_csv(str(tmp_path), contest, preset_profile(contest, 'uniform'))
    assert [p.rsplit('/', 1)[-1] for p in written] == ['profile_team1.csv', 'profile_team2.csv']
    with open(written[0], newline='') as f:
        rows = list(csv.reader(f))
    assert rows[0] == COLUMNS
    assert len(rows) == 1 + 40
    assert rows[1] == ['1', '0.5', '0', '0', '0.5']
    assert rows[2] == ['1', '0.5', '0', '0.25', '0']


def test_json_rounding():
    assert round_significant(0.1 + 0.2) == 0.3
    assert math.copysign(1.0, round_significant(-0.0)) == 1.0
    assert round_significant(123456789.123456, 6) == 123457000.0
    document = {'a': np.float64(1 / 3), 'b': (np.int64(2), np.bool_(True)), 'c': float('inf'),
                'd': np.array([0.1 + 0.2])}
    assert to_jsonable(document) == {'a': 0.333333333333, 'b': [2, True], 'c': 'inf', 'd': [0.3]}
    assert json.loads(dump_json(document, 3))['a'] == 0.333
