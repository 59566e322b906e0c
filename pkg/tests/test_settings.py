"""Settings profiles and environment overrides."""

import pytest

from teamgame.errors import ConfigError
from teamgame.settings import (
    CELL_CAP_ENV,
    GENERATOR_CAP_ENV,
    LEDGER_ENV,
    Settings,
    cell_cap,
    generator_cap,
)


def _write(tmp_path, text):
    path = tmp_path / "settings.yaml"
    path.write_text(text)
    return str(path)


def test_default_profile():
    settings = Settings()
    assert settings.get_tolerances() == {'feasibility': 1e-9, 'ic': 1e-9, 'mass': 1e-12,
                                         'pivot': 1e-12}
    assert settings.get_dynamics() == {'schedule': 'alternating', 'damping': 1.0, 'max_iter': 200,
                                       'tol': 1e-9, 'hash_resolution': 1e-6}
    assert settings.get_limits() == {'generator_cap': 10 ** 6, 'cell_cap': 10 ** 6}
    assert settings.significant_digits() == 12
    assert settings.ledger_path() is None
    assert settings.get_settings_info()['name'] == 'default'


def test_custom_profile(tmp_path, monkeypatch):
    monkeypatch.delenv(GENERATOR_CAP_ENV)
    monkeypatch.delenv(CELL_CAP_ENV)
    path = _write(tmp_path, (
        "dynamics:\n"
        "  schedule: simultaneous\n"
        "  damping: 0.5\n"
        "limits:\n"
        "  generator_cap: 500\n"
        "ledger:\n"
        "  enabled: true\n"
        "  path: runs.db\n"
    ))
    settings = Settings(path)
    dynamics = settings.get_dynamics()
    assert dynamics['schedule'] == 'simultaneous'
    assert dynamics['damping'] == 0.5
    assert dynamics['max_iter'] == 200
    assert settings.get_limits() == {'generator_cap': 500, 'cell_cap': 10 ** 6}
    assert settings.ledger_path() == 'runs.db'
    assert settings.get_settings_info() == {'name': 'unknown', 'version': 'unknown',
                                            'description': ''}


@pytest.mark.parametrize("text, field", [
    ("tolerances:\n  ic: tiny\n", 'tolerances.ic'),
    ("dynamics:\n  damping: true\n", 'dynamics.damping'),
    ("dynamics:\n  schedule: random\n", 'dynamics.schedule'),
    ("limits: 5\n", 'limits'),
    ("- just\n- a list\n", '<root>'),
])
def test_invalid_profiles(tmp_path, text, field):
    settings_path = _write(tmp_path, text)
    with pytest.raises(ConfigError) as info:
        settings = Settings(settings_path)
        settings.get_tolerances()
        settings.get_dynamics()
        settings.get_limits()
    assert info.value.field == field


def test_missing_profile(tmp_path):
    with pytest.raises(FileNotFoundError):
        Settings(str(tmp_path / "absent.yaml"))


def test_environment_overrides(monkeypatch, tmp_path):
    monkeypatch.setenv(GENERATOR_CAP_ENV, "12")
    monkeypatch.setenv(CELL_CAP_ENV, "34")
    monkeypatch.setenv(LEDGER_ENV, str(tmp_path / "env.db"))
    settings = Settings()
    assert settings.get_limits() == {'generator_cap': 12, 'cell_cap': 34}
    assert (generator_cap(), cell_cap()) == (12, 34)
    assert settings.ledger_path() == str(tmp_path / "env.db")

    monkeypatch.setenv(GENERATOR_CAP_ENV, "")
    assert generator_cap() == 10 ** 6


@pytest.mark.parametrize("raw", ["lots", "0", "-3"])
def test_bad_environment_values(monkeypatch, raw):
    monkeypatch.setenv(CELL_CAP_ENV, raw)
    with pytest.raises(ConfigError) as info:
        cell_cap()
    assert info.value.field == CELL_CAP_ENV
    assert str(info.value).startswith("environment: ")
