"""Settings profile for tolerances, dynamics defaults and resource limits."""

import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
try:
    from importlib.resources import files
except ImportError:
    # Python < 3.9
    from importlib_resources import files

from .errors import ConfigError

MASS_TOL = 1e-12
FEASIBILITY_TOL = 1e-9
IC_TOL = 1e-9
PIVOT_TOL = 1e-12
HASH_RESOLUTION = 1e-6
DEFAULT_GENERATOR_CAP = 10 ** 6
DEFAULT_CELL_CAP = 10 ** 6
SIGNIFICANT_DIGITS = 12

CELL_CAP_ENV = "TEAMGAME_CELL_CAP"
GENERATOR_CAP_ENV = "TEAMGAME_GENERATOR_CAP"
LEDGER_ENV = "TEAMGAME_LEDGER"


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(name, f"expected an integer, got {raw!r}", source="environment")
    if value <= 0:
        raise ConfigError(name, f"must be positive, got {value}", source="environment")
    return value


def cell_cap() -> int:
    """Law-size cap, overridable with TEAMGAME_CELL_CAP."""
    return _env_int(CELL_CAP_ENV, DEFAULT_CELL_CAP)


def generator_cap() -> int:
    """Deviation-generator cap, overridable with TEAMGAME_GENERATOR_CAP."""
    return _env_int(GENERATOR_CAP_ENV, DEFAULT_GENERATOR_CAP)


class Settings:
    """Loads a YAML settings profile and exposes typed getters."""

    def __init__(self, settings_path: Optional[str] = None):
        """Initialize settings from a profile file.

        Args:
            settings_path: Path to YAML settings file. Defaults to profiles/default.yaml
        """
        if settings_path is None:
            try:
                pkg_files = files('teamgame')
                settings_path = pkg_files / 'profiles' / 'default.yaml'
            except Exception:
                # Fallback for development environment
                settings_path = Path(__file__).parent / "profiles" / "default.yaml"

        self.settings_path = Path(str(settings_path))
        self.profile = self._load_profile()

    def _load_profile(self) -> Dict:
        """Load the profile from YAML."""
        if not self.settings_path.exists():
            raise FileNotFoundError(f"Settings file not found: {self.settings_path}")

        with open(self.settings_path, 'r') as f:
            profile = yaml.safe_load(f) or {}

        if not isinstance(profile, dict):
            raise ConfigError("<root>", "settings profile must be a mapping",
                              source=str(self.settings_path))
        return profile

    def _section(self, name: str) -> Dict:
        section = self.profile.get(name, {}) or {}
        if not isinstance(section, dict):
            raise ConfigError(name, "expected a mapping", source=str(self.settings_path))
        return section

    def _number(self, section: str, key: str, default: Any) -> Any:
        value = self._section(section).get(key, default)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{section}.{key}", f"expected a number, got {value!r}",
                              source=str(self.settings_path))
        return value

    def get_tolerances(self) -> Dict[str, float]:
        """Get numerical tolerances."""
        return {
            'feasibility': float(self._number('tolerances', 'feasibility', FEASIBILITY_TOL)),
            'ic': float(self._number('tolerances', 'ic', IC_TOL)),
            'mass': float(self._number('tolerances', 'mass', MASS_TOL)),
            'pivot': float(self._number('tolerances', 'pivot', PIVOT_TOL)),
        }

    def get_dynamics(self) -> Dict[str, Any]:
        """Get best-response dynamics defaults."""
        schedule = self._section('dynamics').get('schedule', 'alternating')
        if schedule not in ('alternating', 'simultaneous'):
            raise ConfigError('dynamics.schedule', f"unknown schedule {schedule!r}",
                              source=str(self.settings_path))
        return {
            'schedule': schedule,
            'damping': float(self._number('dynamics', 'damping', 1.0)),
            'max_iter': int(self._number('dynamics', 'max_iter', 200)),
            'tol': float(self._number('dynamics', 'tol', 1e-9)),
            'hash_resolution': float(self._number('dynamics', 'hash_resolution', HASH_RESOLUTION)),
        }

    def get_limits(self) -> Dict[str, int]:
        """Get resource limits, with environment overrides applied."""
        generator_default = int(self._number('limits', 'generator_cap', DEFAULT_GENERATOR_CAP))
        cell_default = int(self._number('limits', 'cell_cap', DEFAULT_CELL_CAP))
        return {
            'generator_cap': _env_int(GENERATOR_CAP_ENV, generator_default),
            'cell_cap': _env_int(CELL_CAP_ENV, cell_default),
        }

    def significant_digits(self) -> int:
        """Number of significant digits for floating-point output."""
        return int(self._number('output', 'significant_digits', SIGNIFICANT_DIGITS))

    def ledger_path(self) -> Optional[str]:
        """Path of the run ledger, or None when the ledger is disabled."""
        env_path = os.getenv(LEDGER_ENV)
        if env_path:
            return env_path
        ledger = self._section('ledger')
        if not ledger.get('enabled', False):
            return None
        return ledger.get('path', '.teamgame-runs.db')

    def get_settings_info(self) -> Dict:
        """Get profile metadata."""
        return {
            'name': self.profile.get('name', 'unknown'),
            'version': self.profile.get('version', 'unknown'),
            'description': self.profile.get('description', ''),
        }
