"""Profile files, JSON/CSV emission and profile diffs.

Profile files are JSON documents holding each team's dense z table with an
explicit column header; one table row per line keeps them diff-able. Team
numbers in files are 1-based.
"""

import csv
import difflib
import json
import math
from dataclasses import is_dataclass
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np
from colorama import Fore, Style

from .errors import ConfigError, SpecViolation
from .model import GameSpec, MechanismZ, Profile, check_profile
from .settings import FEASIBILITY_TOL, SIGNIFICANT_DIGITS
from .spaces import flat_labels

PROFILE_FORMAT = "teamgame-profile"
PROFILE_VERSION = 1
COLUMNS = ["t_report", "a_recommended", "w", "r", "z"]


def round_significant(value: float, digits: int = SIGNIFICANT_DIGITS) -> float:
    """Round to ``digits`` significant digits; -0.0 becomes 0.0."""
    if value == 0 or not math.isfinite(value):
        return 0.0 if value == 0 else value
    return float(f"{value:.{digits}g}") + 0.0


def to_jsonable(obj: Any, digits: int = SIGNIFICANT_DIGITS) -> Any:
    """Convert numpy values, tuples and report objects to JSON-ready data."""
    if hasattr(obj, 'to_dict') and callable(obj.to_dict):
        return to_jsonable(obj.to_dict(), digits)
    if isinstance(obj, dict):
        return {str(key): to_jsonable(value, digits) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(value, digits) for value in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist(), digits)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return round_significant(value, digits)
    if is_dataclass(obj):
        raise TypeError(f"{type(obj).__name__} has no to_dict()")
    return obj


def dump_json(document: Any, digits: int = SIGNIFICANT_DIGITS) -> str:
    """A JSON document with floats at ``digits`` significant digits."""
    return json.dumps(to_jsonable(document, digits), indent=2)


def mechanism_rows(spec: GameSpec, mechanism: MechanismZ,
                   digits: int = SIGNIFICANT_DIGITS) -> List[List[Any]]:
    """Dense (t', a', w, r, z) rows in lexicographic order."""
    blocks = mechanism.blocks(spec)
    rows = []
    for t, t_labels in enumerate(spec.team_type_index):
        for a, a_labels in enumerate(spec.team_action_index):
            for w, w_label in enumerate(spec.winnings.labels):
                for r, r_labels in enumerate(spec.team_reward_index):
                    rows.append([flat_labels(t_labels), flat_labels(a_labels), w_label,
                                 flat_labels(r_labels), round_significant(blocks[t, a, w, r], digits)])
    return rows


def format_profile(spec: GameSpec, profile: Profile, digits: int = SIGNIFICANT_DIGITS) -> str:
    """Serialize a profile, one table row per line."""
    check_profile(spec, profile)
    lines = [
        "{",
        f'  "format": {json.dumps(PROFILE_FORMAT)},',
        f'  "version": {PROFILE_VERSION},',
        f'  "game": {json.dumps(spec.name)},',
        '  "teams": [',
    ]
    for position, mechanism in enumerate(profile):
        rows = mechanism_rows(spec, mechanism, digits)
        lines.append("    {")
        lines.append(f'      "team": {mechanism.team + 1},')
        lines.append(f'      "columns": {json.dumps(COLUMNS)},')
        lines.append('      "rows": [')
        for k, row in enumerate(rows):
            separator = "," if k < len(rows) - 1 else ""
            lines.append(f"        {json.dumps(row)}{separator}")
        lines.append("      ]")
        lines.append("    }" + ("," if position < len(profile) - 1 else ""))
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_profile(path: str, spec: GameSpec, profile: Profile,
                  digits: int = SIGNIFICANT_DIGITS) -> str:
    """Write a profile file and return its path."""
    Path(path).write_text(format_profile(spec, profile, digits))
    return str(path)


def parse_profile(document: Any, spec: GameSpec, source: Optional[str] = None,
                  tol: float = FEASIBILITY_TOL) -> List[MechanismZ]:
    """Rebuild and validate a profile from a parsed profile document.

    Raises:
        ConfigError: If the document does not match the game's index
        SpecViolation: If a table breaks a mechanism invariant
    """
    def fail(field, message):
        raise ConfigError(field, message, source=source)

    if not isinstance(document, dict) or document.get('format') != PROFILE_FORMAT:
        fail('format', f"expected {PROFILE_FORMAT!r}")
    if document.get('version') != PROFILE_VERSION:
        fail('version', f"unsupported version {document.get('version')!r}")
    if document.get('game') != spec.name:
        fail('game', f"profile is for game {document.get('game')!r}, not {spec.name!r}")
    teams = document.get('teams')
    if not isinstance(teams, list) or len(teams) != spec.n_teams:
        fail('teams', f"expected {spec.n_teams} team tables")

    expected_keys = [row[:4] for row in mechanism_rows(spec, _zero_mechanism(spec, 0))]
    profile = []
    for position, table in enumerate(teams):
        path = f"teams[{position}]"
        if not isinstance(table, dict) or table.get('team') != position + 1:
            fail(f"{path}.team", f"expected team {position + 1}")
        if table.get('columns') != COLUMNS:
            fail(f"{path}.columns", f"expected {COLUMNS}")
        rows = table.get('rows')
        if not isinstance(rows, list) or len(rows) != len(expected_keys):
            fail(f"{path}.rows", f"expected {len(expected_keys)} rows")
        values = np.empty(len(rows))
        for k, (row, key) in enumerate(zip(rows, expected_keys)):
            if not isinstance(row, list) or len(row) != 5 or [str(v) for v in row[:4]] != key:
                fail(f"{path}.rows[{k}]", f"expected index {key}")
            if isinstance(row[4], bool) or not isinstance(row[4], (int, float)):
                fail(f"{path}.rows[{k}]", f"z must be a number, got {row[4]!r}")
            values[k] = float(row[4])
        try:
            profile.append(MechanismZ.validated(spec, position, values, tol))
        except SpecViolation as e:
            raise SpecViolation(f"{source or 'profile'}: {e}")
    return profile


def load_profile(path: str, spec: GameSpec, tol: float = FEASIBILITY_TOL) -> List[MechanismZ]:
    """Read a profile file written by write_profile."""
    try:
        with open(path, 'r') as f:
            document = json.load(f)
    except FileNotFoundError:
        raise ConfigError('<file>', "profile file not found", source=str(path))
    except json.JSONDecodeError as e:
        raise ConfigError('<root>', f"invalid JSON: {e}", source=str(path))
    return parse_profile(document, spec, source=str(path), tol=tol)


def _zero_mechanism(spec: GameSpec, team: int) -> MechanismZ:
    return MechanismZ(team=team, z=np.zeros(spec.z_shape))


def profile_diff(spec: GameSpec, first: Profile, second: Profile, colored: bool = True,
                 labels: Sequence[str] = ("a", "b"), digits: int = SIGNIFICANT_DIGITS) -> str:
    """Unified diff between two profiles' files."""
    diff = difflib.unified_diff(
        format_profile(spec, first, digits).splitlines(keepends=True),
        format_profile(spec, second, digits).splitlines(keepends=True),
        fromfile=labels[0],
        tofile=labels[1],
        lineterm='',
    )
    lines = [line.rstrip("\n") for line in diff]
    if not colored:
        return "\n".join(lines)

    colored_lines = []
    for line in lines:
        if line.startswith('+++') or line.startswith('---'):
            colored_lines.append(Fore.CYAN + Style.BRIGHT + line)
        elif line.startswith('@@'):
            colored_lines.append(Fore.MAGENTA + Style.BRIGHT + line)
        elif line.startswith('+'):
            colored_lines.append(Fore.GREEN + line)
        elif line.startswith('-'):
            colored_lines.append(Fore.RED + line)
        else:
            colored_lines.append(line)
    return "\n".join(colored_lines)


def write_csv(path: Path, columns: Sequence[str], rows: Iterable[Sequence[Any]],
              digits: int = SIGNIFICANT_DIGITS) -> str:
    """Write one CSV table."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([f"{v:.{digits}g}" if isinstance(v, float) else v for v in row])
    return str(path)


def write_profile_csv(directory: str, spec: GameSpec, profile: Profile, prefix: str = "profile",
                      digits: int = SIGNIFICANT_DIGITS) -> List[str]:
    """One CSV per team: ``<prefix>_team<j>.csv`` with the profile columns."""
    written = []
    for mechanism in profile:
        path = Path(directory) / f"{prefix}_team{mechanism.team + 1}.csv"
        written.append(write_csv(path, COLUMNS, mechanism_rows(spec, mechanism, digits), digits))
    return written
