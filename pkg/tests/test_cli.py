"""End-to-end CLI runs through click's test runner."""

import csv
import json
from pathlib import Path

import pytest
import yaml
from click.testing import CliRunner

from conftest import explicit_document
from teamgame.cli import cli
from teamgame.settings import GENERATOR_CAP_ENV, Settings

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def runner():
    try:
        return CliRunner(mix_stderr=False)
    except TypeError:
        # click >= 8.2 always keeps stderr apart
        return CliRunner()


def invoke(runner, *args):
    result = runner.invoke(cli, list(args))
    document = json.loads(result.stdout) if result.stdout.lstrip().startswith('{') else None
    return result, document


def test_validate_bundled_scenario(runner, tmp_path):
    result, document = invoke(runner, 'validate', 'myerson', '--csv', str(tmp_path))
    assert result.exit_code == 0
    assert document['command'] == 'validate'
    assert document['status'] == 'ok'
    assert document['config'] == 'myerson'
    assert document['assumptions'] == "satisfied by finiteness"
    assert document['violations'] == []

    with open(tmp_path / "prior.csv", newline='') as f:
        rows = list(csv.reader(f))
    assert rows[0] == ['types', 'mass']
    assert rows[1] == ['theta_A,theta_A', '0.25']
    assert (tmp_path / "feasible_rewards.csv").exists()
    assert document['settings']['name'] == 'default'
    assert document['settings']['version'] == '1.0'
    assert "Settings: default v1.0" in result.stderr


def _settings_file(tmp_path, **tolerances):
    profile = Settings().profile
    profile['tolerances'].update(tolerances)
    profile['name'] = 'strict'
    path = tmp_path / "strict.yaml"
    path.write_text(yaml.safe_dump(profile))
    return str(path)


def test_settings_tolerances_reach_the_solver(runner, tmp_path):
    args = ('best-response', 'myerson', '--team', '1', '--given', 'C_C')
    result, document = invoke(runner, *args)
    assert result.exit_code == 0

    strict = _settings_file(tmp_path, pivot=100.0)
    result, document = invoke(runner, '--settings', strict, *args)
    assert result.exit_code == 3
    assert document['status'] == 'error'
    assert 'Team 1' in document['error']

    result, document = invoke(runner, '--settings', strict, 'verify', 'myerson', '--profile', 'C_C')
    assert result.exit_code == 3

    result, document = invoke(runner, '--settings', strict, 'validate', 'myerson')
    assert result.exit_code == 0
    assert document['settings']['name'] == 'strict'


def test_validate_invalid_game(runner, tmp_path):
    path = tmp_path / "bad_prior.yaml"
    path.write_text(yaml.safe_dump(explicit_document(prior={'table': [0.7, 0.7]})))
    result, document = invoke(runner, 'validate', str(path))
    assert result.exit_code == 2
    assert document['status'] == 'invalid'
    assert document['violations'][0]['assumption'] == 'Assumption 1'


def test_malformed_config(runner, tmp_path):
    path = tmp_path / "poker.yaml"
    path.write_text("model: poker\n")
    result, document = invoke(runner, 'validate', str(path))
    assert result.exit_code == 2
    assert document['status'] == 'error'
    assert 'model' in document['error']


def test_generator_cap_is_a_solver_failure(runner, monkeypatch):
    monkeypatch.setenv(GENERATOR_CAP_ENV, "1")
    result, document = invoke(runner, 'best-response', 'myerson', '--team', '1', '--given', 'C_C')
    assert result.exit_code == 3
    assert document['status'] == 'error'


def test_dynamics_matches_golden_cycle(runner):
    result, document = invoke(runner, 'dynamics', 'myerson', '--init', 'C_C')
    assert result.exit_code == 0
    expected = json.loads((GOLDEN / "myerson_cycle.json").read_text())
    assert document == expected


def test_best_response_then_verify(runner, tmp_path):
    out = tmp_path / "after.json"
    tableau = tmp_path / "lp.txt"
    result, document = invoke(runner, 'best-response', 'myerson', '--team', '1', '--given', 'C_C',
                              '--out-profile', str(out), '--tableau', str(tableau))
    assert result.exit_code == 0
    assert document['value'] == pytest.approx(6.0)
    assert document['mechanism']['name'] == 'match'
    assert tableau.read_text().strip()

    result, document = invoke(runner, 'verify', 'myerson', '--profile', str(out))
    assert result.exit_code == 0
    assert document['status'] == 'not_equilibrium'
    assert [entry['name'] for entry in document['profile']] == ['match', 'C']
    assert document['verification']['clauses']['principals_best_respond'] is False


def test_ic_slack(runner):
    result, document = invoke(runner, 'ic-slack', 'myerson', '--profile', 'match_match')
    assert result.exit_code == 0
    assert document['incentive_compatible'] is False
    assert document['min_slack'] == pytest.approx(-1.0)
    assert [agent['slack'] for agent in document['agents']] == pytest.approx([-1.0, 0.0])


def _read_csv(path):
    with open(path, newline='') as f:
        return list(csv.reader(f))


def test_ic_slack_csv(runner, tmp_path):
    result, document = invoke(runner, 'ic-slack', 'myerson', '--profile', 'match_match',
                              '--csv', str(tmp_path))
    assert result.exit_code == 0
    assert document['csv'] == [str(tmp_path / "ic_slack.csv")]
    rows = _read_csv(tmp_path / "ic_slack.csv")
    assert rows[0] == ['team', 'member', 'true_type', 'report', 'truthful', 'deviation', 'slack']
    assert len(rows) == 1 + 2 * 2
    assert rows[1][:4] == ['1', '1', 'theta_A', 'theta_B']
    assert [float(row[-1]) for row in rows[1:3]] == pytest.approx([-0.5, -0.5])


def test_verify_csv(runner, tmp_path):
    result, document = invoke(runner, 'verify', 'myerson', '--profile', 'match_C',
                              '--csv', str(tmp_path))
    assert result.exit_code == 0
    assert len(document['csv']) == 2
    teams = _read_csv(tmp_path / "verify_teams.csv")
    assert teams[0] == ['team', 'value', 'best_response_value', 'gain']
    assert [row[0] for row in teams[1:]] == ['1', '2']
    assert [float(row[3]) for row in teams[1:]] == pytest.approx([0.0, 1.0], abs=1e-9)
    agents = _read_csv(tmp_path / "verify_agents.csv")
    assert agents[0] == ['team', 'member', 'slack']
    assert [row[:2] for row in agents[1:]] == [['1', '1'], ['2', '1']]


def test_distance(runner):
    result, document = invoke(runner, 'distance', 'myerson', '--profile-a', 'C_C',
                              '--profile-b', 'C_C')
    assert result.exit_code == 0
    assert document['distance'] == 0.0


def test_distance_csv(runner, tmp_path):
    result, document = invoke(runner, 'distance', 'myerson', '--profile-a', 'C_C',
                              '--profile-b', 'C_C', '--csv', str(tmp_path))
    assert result.exit_code == 0
    rows = _read_csv(tmp_path / "distance_agents.csv")
    assert rows[0] == ['team', 'member', 'hausdorff']
    assert [row[:2] for row in rows[1:]] == [['1', '1'], ['2', '1']]
    assert all(float(row[2]) == 0.0 for row in rows[1:])
    assert document['csv'] == [str(tmp_path / "distance_agents.csv")]


def test_bad_team(runner):
    result, document = invoke(runner, 'best-response', 'myerson', '--team', '3', '--given', 'C_C')
    assert result.exit_code == 2
    assert 'team' in document['error']


def test_history_reads_the_ledger(runner, tmp_path):
    ledger = str(tmp_path / "runs.db")
    result, _ = invoke(runner, '--ledger', ledger, 'validate', 'myerson')
    assert result.exit_code == 0

    result = runner.invoke(cli, ['--ledger', ledger, 'history'])
    assert result.exit_code == 0
    assert "Command: validate | Status: ok" in result.stdout

    result = runner.invoke(cli, ['--ledger', ledger, 'history', '--stats'])
    assert "Total runs:   1" in result.stdout

    result = runner.invoke(cli, ['--ledger', ledger, 'history', '--timeframe', 'day'])
    assert result.exit_code == 0
    assert "Showing 1 runs from the last day" in result.stdout
    assert "Command: validate | Status: ok" in result.stdout

    result = runner.invoke(cli, ['--ledger', ledger, 'history', '-t', 'week', '--status', 'error'])
    assert "Showing 0 runs from the last week with status: error" in result.stdout
    assert "No runs recorded" in result.stdout

    result = runner.invoke(cli, ['--ledger', ledger, 'history', '--timeframe', 'decade'])
    assert result.exit_code == 2


def test_history_without_ledger(runner):
    result = runner.invoke(cli, ['history'])
    assert result.exit_code == 0
    assert "disabled" in result.stdout


def test_scenarios(runner):
    result = runner.invoke(cli, ['scenarios'])
    assert result.exit_code == 0
    assert {'myerson', 'tullock_contest'} <= set(result.stdout.split())


def test_unknown_command(runner):
    result = runner.invoke(cli, ['solve'])
    assert result.exit_code == 2
