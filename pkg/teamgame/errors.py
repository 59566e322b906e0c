"""Exception types raised across the teamgame package."""


class TeamGameError(Exception):
    """Base class for all teamgame errors."""


class ConfigError(TeamGameError, ValueError):
    """A scenario config or profile file is malformed.

    Args:
        field: Dotted path of the offending field (e.g. ``spaces.types.grid``)
        message: What is wrong with it
        source: File the field was read from, if any
    """

    def __init__(self, field: str, message: str, source: str = None):
        self.field = field
        self.source = source
        location = f"{source}: " if source else ""
        super().__init__(f"{location}{field}: {message}")


class SpecViolation(TeamGameError, ValueError):
    """An object does not satisfy the invariants of its game specification."""


class GeneratorCapExceeded(TeamGameError):
    """Enumerating pure deviations would exceed the configured cap."""

    def __init__(self, count: int, cap: int):
        self.count = count
        self.cap = cap
        super().__init__(
            f"Refusing to enumerate {count} deviation strategies (cap is {cap})"
        )


class LawTooLarge(TeamGameError):
    """A dense law would exceed the configured cell cap."""

    def __init__(self, cells: int, cap: int):
        self.cells = cells
        self.cap = cap
        super().__init__(
            f"Dense law needs {cells} cells, above the cap of {cap} "
            f"(set TEAMGAME_CELL_CAP to raise it)"
        )


class SolverError(TeamGameError):
    """The linear-programming layer could not produce an answer."""


class InfeasibleICSet(SolverError):
    """A team has no incentive-compatible mechanism against the given opponents."""

    def __init__(self, team: int):
        self.team = team
        super().__init__(
            f"Team {team + 1} has an empty incentive-compatible set against the "
            f"given mechanisms; the existence result needs the IC correspondence "
            f"to admit a selection"
        )
