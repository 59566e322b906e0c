"""Scenario configuration files.

A scenario config is a YAML mapping with a ``model`` identifier
(``myerson``, ``tullock_contest`` or ``explicit``), the sections that model
needs, and an optional ``solver`` section overriding the settings profile's
dynamics defaults. See docs/FORMATS.md for the full layout.
"""

import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import yaml
try:
    from importlib.resources import files
except ImportError:
    # Python < 3.9
    from importlib_resources import files

from .errors import ConfigError, SpecViolation
from .model import GameSpec
from .scenarios import (
    MYERSON,
    TULLOCK_CONTEST,
    ContestParams,
    MyersonParams,
    contest_scenario,
    myerson_scenario,
)
from .spaces import FiniteSpace

EXPLICIT = "explicit"
MODELS = (MYERSON, TULLOCK_CONTEST, EXPLICIT)
SOLVER_KEYS = {'schedule', 'damping', 'max_iter', 'tol'}


@dataclass
class ScenarioConfig:
    """A parsed scenario: the game plus solver overrides."""
    name: str
    model: str
    spec: GameSpec
    solver: Dict[str, Any] = field(default_factory=dict)
    source: Optional[str] = None


def bundled_configs() -> List[str]:
    """Names of the scenario configs shipped with the package."""
    try:
        directory = files('teamgame') / 'configs'
        names = [entry.name for entry in directory.iterdir()]
    except Exception:
        # Fallback for development environment
        names = [p.name for p in (Path(__file__).parent / 'configs').iterdir()]
    return sorted(name[:-5] for name in names if name.endswith('.yaml'))


def resolve_config_path(reference: str) -> Path:
    """A file path, or the bundled config of that name (with or without .yaml)."""
    path = Path(reference)
    if path.exists():
        return path
    stem = path.name[:-5] if path.name.endswith('.yaml') else path.name
    if stem in bundled_configs():
        try:
            return Path(str(files('teamgame') / 'configs' / f'{stem}.yaml'))
        except Exception:
            return Path(__file__).parent / 'configs' / f'{stem}.yaml'
    raise ConfigError('<file>', f"no such config file or bundled scenario "
                                f"(bundled: {', '.join(bundled_configs())})", source=reference)


def load_scenario(reference: str) -> ScenarioConfig:
    """Load and parse a scenario config.

    Raises:
        ConfigError: If the file is unreadable or malformed
    """
    path = resolve_config_path(reference)
    try:
        with open(path, 'r') as f:
            document = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigError('<root>', f"invalid YAML: {e}", source=str(path))
    return parse_scenario(document, source=str(path))


class _Reader:
    """Typed access to a config mapping with dotted field paths in errors."""

    def __init__(self, source: Optional[str]):
        self.source = source

    def fail(self, path: str, message: str):
        raise ConfigError(path, message, source=self.source)

    def mapping(self, value, path: str) -> Dict:
        if value is None:
            return {}
        if not isinstance(value, dict):
            self.fail(path, f"expected a mapping, got {type(value).__name__}")
        return value

    def number(self, section: Dict, key: str, path: str, default=None, integer=False):
        value = section.get(key, default)
        if value is None:
            self.fail(f"{path}.{key}", "is required")
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.fail(f"{path}.{key}", f"expected a number, got {value!r}")
        if integer:
            if int(value) != value:
                self.fail(f"{path}.{key}", f"expected an integer, got {value!r}")
            return int(value)
        return float(value)

    def table(self, value, path: str) -> np.ndarray:
        try:
            array = np.asarray(value, dtype=float)
        except (TypeError, ValueError):
            self.fail(path, "expected a (nested) list of numbers")
        if array.ndim == 0:
            self.fail(path, "expected a list of numbers")
        return array

    def space(self, section: Dict, name: str, path: str) -> FiniteSpace:
        spec = self.mapping(section.get(name), f"{path}.{name}")
        if not spec:
            self.fail(f"{path}.{name}", "is required")
        try:
            if 'labels' in spec:
                return FiniteSpace.categorical(name, [str(v) for v in spec['labels']])
            if 'grid' in spec:
                return FiniteSpace.grid(name, self.table(spec['grid'], f"{path}.{name}.grid"))
            if 'low' in spec:
                low = self.number(spec, 'low', f"{path}.{name}")
                high = self.number(spec, 'high', f"{path}.{name}")
                points = self.number(spec, 'points', f"{path}.{name}", integer=True)
                return FiniteSpace.grid(name, np.linspace(low, high, points))
        except ValueError as e:
            if isinstance(e, ConfigError):
                raise
            self.fail(f"{path}.{name}", str(e))
        self.fail(f"{path}.{name}", "expected one of 'labels', 'grid' or 'low'/'high'/'points'")


def _solver_section(reader: _Reader, document: Dict) -> Dict[str, Any]:
    solver = reader.mapping(document.get('solver'), 'solver')
    unknown = set(solver) - SOLVER_KEYS
    if unknown:
        reader.fail(f"solver.{sorted(unknown)[0]}", f"unknown key (expected {sorted(SOLVER_KEYS)})")
    result: Dict[str, Any] = {}
    if 'schedule' in solver:
        if solver['schedule'] not in ('alternating', 'simultaneous'):
            reader.fail('solver.schedule', f"unknown schedule {solver['schedule']!r}")
        result['schedule'] = solver['schedule']
    if 'damping' in solver:
        damping = reader.number(solver, 'damping', 'solver')
        if not 0.0 < damping <= 1.0:
            reader.fail('solver.damping', f"must lie in (0, 1], got {damping}")
        result['damping'] = damping
    if 'max_iter' in solver:
        result['max_iter'] = reader.number(solver, 'max_iter', 'solver', integer=True)
    if 'tol' in solver:
        result['tol'] = reader.number(solver, 'tol', 'solver')
    return result


def _myerson(reader: _Reader, document: Dict) -> GameSpec:
    payoffs = reader.mapping(document.get('payoffs'), 'payoffs')
    defaults = MyersonParams()
    unknown = set(payoffs) - set(MyersonParams.__dataclass_fields__)
    if unknown:
        reader.fail(f"payoffs.{sorted(unknown)[0]}", "unknown key")
    params = MyersonParams(**{
        key: reader.number(payoffs, key, 'payoffs', getattr(defaults, key))
        for key in MyersonParams.__dataclass_fields__
    })
    if not 0.0 < params.theta_a_probability < 1.0:
        reader.fail('payoffs.theta_a_probability', "must lie strictly between 0 and 1")
    return myerson_scenario(params)


def _contest(reader: _Reader, document: Dict) -> GameSpec:
    spaces = reader.mapping(document.get('spaces'), 'spaces')
    types = reader.mapping(spaces.get('types'), 'spaces.types')
    actions = reader.mapping(spaces.get('actions'), 'spaces.actions')
    rewards = reader.mapping(spaces.get('rewards'), 'spaces.rewards')
    utilities = reader.mapping(document.get('utilities'), 'utilities')
    defaults = ContestParams()

    step = rewards.get('step', 1.0 / defaults.reward_steps)
    if isinstance(step, bool) or not isinstance(step, (int, float)) or step <= 0 or step > 1:
        reader.fail('spaces.rewards.step', f"expected a step in (0, 1], got {step!r}")
    steps = round(1.0 / step)
    if abs(steps * step - 1.0) > 1e-9:
        reader.fail('spaces.rewards.step', f"1/step must be an integer, got step {step!r}")

    prior = document.get('prior', 'independent_uniform')
    weights = None
    if prior != 'independent_uniform':
        prior = reader.mapping(prior, 'prior')
        if 'weights' not in prior:
            reader.fail('prior', "expected 'independent_uniform' or a mapping with 'weights'")
        weights = reader.table(prior['weights'], 'prior.weights').tolist()

    winnings = reader.mapping(document.get('winnings'), 'winnings')
    if winnings.get('model', 'tullock') != 'tullock':
        reader.fail('winnings.model', f"unsupported winnings model {winnings.get('model')!r}")
    reward_rule = reader.mapping(document.get('rewards'), 'rewards')
    if reward_rule.get('rule', 'budget') != 'budget':
        reader.fail('rewards.rule', f"unsupported reward rule {reward_rule.get('rule')!r}")

    try:
        params = ContestParams(
            n_teams=reader.number(document, 'teams', '<root>', defaults.n_teams, integer=True),
            team_size=reader.number(document, 'members', '<root>', defaults.team_size, integer=True),
            type_low=reader.number(types, 'low', 'spaces.types', defaults.type_low),
            type_high=reader.number(types, 'high', 'spaces.types', defaults.type_high),
            type_points=reader.number(types, 'points', 'spaces.types', defaults.type_points, integer=True),
            action_low=reader.number(actions, 'low', 'spaces.actions', defaults.action_low),
            action_high=reader.number(actions, 'high', 'spaces.actions', defaults.action_high),
            action_points=reader.number(actions, 'points', 'spaces.actions', defaults.action_points,
                                        integer=True),
            cost=reader.number(utilities, 'cost', 'utilities', defaults.cost),
            reward_steps=steps,
            type_weights=weights,
        )
    except ValueError as e:
        if isinstance(e, ConfigError):
            raise
        reader.fail('spaces', str(e))
    return contest_scenario(params)


def _explicit(reader: _Reader, document: Dict, name: str) -> GameSpec:
    spaces = reader.mapping(document.get('spaces'), 'spaces')
    types = reader.space(spaces, 'types', 'spaces')
    actions = reader.space(spaces, 'actions', 'spaces')
    winnings = reader.space(spaces, 'winnings', 'spaces')
    rewards = reader.space(spaces, 'rewards', 'spaces')
    n_teams = reader.number(document, 'teams', '<root>', 1, integer=True)
    team_size = reader.number(document, 'members', '<root>', 1, integer=True)
    k = n_teams * team_size

    prior = document.get('prior', 'independent_uniform')
    if prior == 'independent_uniform':
        prior_table = np.full(len(types) ** k, 1.0 / len(types) ** k)
    else:
        prior = reader.mapping(prior, 'prior')
        if 'table' not in prior:
            reader.fail('prior', "expected 'independent_uniform' or a mapping with 'table'")
        prior_table = reader.table(prior['table'], 'prior.table')

    winnings_section = reader.mapping(document.get('winnings'), 'winnings')
    if 'table' not in winnings_section:
        reader.fail('winnings.table', "is required for explicit games")
    winnings_table = reader.table(winnings_section['table'], 'winnings.table')

    reward_section = reader.mapping(document.get('rewards'), 'rewards')
    reward_profiles = list(_profiles(rewards, team_size))
    rule = reward_section.get('rule', 'sets' if 'sets' in reward_section else 'all')
    if rule not in ('all', 'sets'):
        reader.fail('rewards.rule', f"expected 'all' or 'sets', got {rule!r}")
    if rule == 'all':
        feasible = np.ones((len(winnings), len(reward_profiles)), dtype=bool)
    else:
        sets = reader.mapping(reward_section.get('sets'), 'rewards.sets')
        feasible = np.zeros((len(winnings), len(reward_profiles)), dtype=bool)
        for w_label, members in sets.items():
            path = f"rewards.sets.{w_label}"
            if str(w_label) not in winnings.labels:
                reader.fail(path, f"unknown winnings label (expected one of {list(winnings.labels)})")
            for profile in members or []:
                labels = tuple(str(v) for v in (profile if isinstance(profile, list) else [profile]))
                if labels not in reward_profiles:
                    reader.fail(path, f"reward profile {list(labels)} is not on the reward grid")
                feasible[winnings.position(str(w_label)), reward_profiles.index(labels)] = True

    utilities = reader.mapping(document.get('utilities'), 'utilities')
    for key in ('member', 'principal'):
        if key not in utilities:
            reader.fail(f"utilities.{key}", "is required for explicit games")
    mode = reader.mapping(document.get('mode'), 'mode')
    obedience = mode.get('obedience_enforced', False)
    if not isinstance(obedience, bool):
        reader.fail('mode.obedience_enforced', f"expected true or false, got {obedience!r}")

    try:
        return GameSpec(
            name=name,
            n_teams=n_teams,
            team_size=team_size,
            types=types,
            actions=actions,
            winnings=winnings,
            rewards=rewards,
            prior=prior_table,
            winnings_kernel=winnings_table,
            feasible_rewards=feasible,
            member_utility=reader.table(utilities['member'], 'utilities.member'),
            principal_utility=reader.table(utilities['principal'], 'utilities.principal'),
            obedience_enforced=obedience,
            notes={'model': EXPLICIT},
        )
    except SpecViolation as e:
        reader.fail('<root>', str(e))


def _profiles(space: FiniteSpace, size: int):
    return itertools.product(space.labels, repeat=size)


def parse_scenario(document: Any, source: Optional[str] = None) -> ScenarioConfig:
    """Build a ScenarioConfig from a parsed YAML document.

    Raises:
        ConfigError: Naming the offending field and the source file
    """
    reader = _Reader(source)
    document = reader.mapping(document, '<root>')
    model = document.get('model')
    if model not in MODELS:
        reader.fail('model', f"expected one of {list(MODELS)}, got {model!r}")
    name = str(document.get('name', model))
    solver = _solver_section(reader, document)

    if model == MYERSON:
        spec = _myerson(reader, document)
    elif model == TULLOCK_CONTEST:
        spec = _contest(reader, document)
    else:
        spec = _explicit(reader, document, name)
    return ScenarioConfig(name=name, model=model, spec=spec, solver=solver, source=source)
