"""Command-line interface for teamgame."""

import json
import os
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import click
import numpy as np
from colorama import Fore, Style, init
from dotenv import load_dotenv

from . import __version__
from .errors import (
    ConfigError,
    GeneratorCapExceeded,
    LawTooLarge,
    SolverError,
    SpecViolation,
)
from .incentives import ic_slack_detail, is_incentive_compatible
from .laws import win_probabilities
from .metrics import robust_narrow_components
from .model import GameSpec, MechanismZ, check_spec, replace_team
from .profile_io import (
    dump_json,
    load_profile,
    profile_diff,
    write_csv,
    write_profile,
    write_profile_csv,
)
from .run_ledger import TIMEFRAMES, RunLedger
from .scenario_config import ScenarioConfig, bundled_configs, load_scenario
from .scenarios import mechanism_name, preset_profile
from .settings import CELL_CAP_ENV, GENERATOR_CAP_ENV, Settings
from .solver import (
    ALTERNATING,
    SIMULTANEOUS,
    BestResponseCache,
    CycleCertificate,
    best_response_dynamics,
    verify_bnpe,
)
from .spaces import profile_labels

# Initialize colorama
init(autoreset=True)

# Environment overrides (TEAMGAME_CELL_CAP, TEAMGAME_GENERATOR_CAP,
# TEAMGAME_LEDGER) may come from a .env file in the current directory
load_dotenv()

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_SOLVER = 3

CONFIG_ERRORS = (ConfigError, SpecViolation)
SOLVER_ERRORS = (SolverError, GeneratorCapExceeded, LawTooLarge)

Action = Callable[[ScenarioConfig, Settings], Tuple[Dict[str, Any], str]]


def _say(message: str, color: str = "") -> None:
    """Human-readable status on stderr; stdout carries the JSON document."""
    click.echo(f"{color}{message}{Style.RESET_ALL}", err=True)


def _header(title: str) -> None:
    _say(f"\n{Fore.CYAN}{Style.BRIGHT}teamgame - {title}")
    _say(f"{'=' * 70}\n")


def _apply_limits(settings: Settings) -> None:
    limits = settings.get_limits()
    os.environ[GENERATOR_CAP_ENV] = str(limits['generator_cap'])
    os.environ[CELL_CAP_ENV] = str(limits['cell_cap'])


def _checked_spec(scenario: ScenarioConfig, settings: Settings) -> GameSpec:
    """The scenario's game, refused when check_spec fails."""
    report = check_spec(scenario.spec, settings.get_tolerances()['mass'])
    if not report.ok:
        problems = "; ".join(f"{v.assumption}: {v.message}" for v in report.violations)
        raise SpecViolation(f"Game {scenario.spec.name!r} fails check_spec: {problems}")
    return scenario.spec


def _cache(spec: GameSpec, settings: Settings) -> BestResponseCache:
    tolerances = settings.get_tolerances()
    return BestResponseCache(spec, feasibility_tol=tolerances['feasibility'],
                             pivot_tol=tolerances['pivot'])


def _team_index(spec: GameSpec, team: int) -> int:
    if not 1 <= team <= spec.n_teams:
        raise ConfigError('team', f"expected a team between 1 and {spec.n_teams}, got {team}")
    return team - 1


def _load_init(spec: GameSpec, reference: str, tol: float) -> List[MechanismZ]:
    """A profile file when ``reference`` names one, else a preset."""
    if Path(reference).is_file():
        return load_profile(reference, spec, tol)
    return preset_profile(spec, reference)


def mechanism_summary(spec: GameSpec, mechanism: MechanismZ) -> Dict[str, Any]:
    """Recommendation probabilities of one mechanism, keyed by labels."""
    alpha = np.round(mechanism.action_marginal(spec), 12) + 0.0
    reports = profile_labels(spec.team_type_index)
    actions = profile_labels(spec.team_action_index)
    summary: Dict[str, Any] = {'team': mechanism.team + 1}
    name = mechanism_name(spec, mechanism)
    if name is not None:
        summary['name'] = name
    summary['recommendations'] = {
        report: {action: float(alpha[t, a]) for a, action in enumerate(actions)}
        for t, report in enumerate(reports)
    }
    return summary


def profile_summary(spec: GameSpec, profile) -> List[Dict[str, Any]]:
    return [mechanism_summary(spec, mechanism) for mechanism in profile]


def _run(ctx: click.Context, command: str, config: str, action: Action) -> None:
    """Load settings and scenario, run ``action`` and emit its JSON document.

    Exit codes: 0 on success, 2 for malformed input or a game failing
    check_spec, 3 when the solver layer gives up.
    """
    settings_path = ctx.obj.get('settings_path')
    digits = 12
    exit_code = EXIT_OK
    summary = ""
    settings = None
    try:
        settings = Settings(settings_path)
        digits = settings.significant_digits()
        _apply_limits(settings)
        scenario = load_scenario(config)
        _say(f"Scenario: {scenario.name} ({scenario.model}) from {scenario.source}")
        document, summary = action(scenario, settings)
        if document.get('status') == 'invalid':
            exit_code = EXIT_INVALID
    except FileNotFoundError as e:
        exit_code = EXIT_INVALID
        document = {'status': 'error', 'error': str(e)}
    except CONFIG_ERRORS as e:
        exit_code = EXIT_INVALID
        document = {'status': 'error', 'error': str(e)}
    except SOLVER_ERRORS as e:
        exit_code = EXIT_SOLVER
        document = {'status': 'error', 'error': str(e)}

    document = {'command': command, **document}
    if exit_code == EXIT_OK:
        _say(f"{Fore.GREEN}{summary}")
    else:
        summary = summary or document.get('error', document.get('status', ''))
        _say(f"{Fore.RED}{summary}")

    click.echo(dump_json(document, digits))
    _log_run(ctx, settings, command, config, document, exit_code, summary, digits)
    ctx.exit(exit_code)


def _ledger_path(ctx: click.Context, settings: Optional[Settings]) -> Optional[str]:
    if ctx.obj.get('ledger_path'):
        return ctx.obj['ledger_path']
    return settings.ledger_path() if settings is not None else None


def _log_run(ctx, settings, command, config, document, exit_code, summary, digits) -> None:
    path = _ledger_path(ctx, settings)
    if path is None:
        return
    try:
        RunLedger(path).log_run(
            command=command,
            status=str(document.get('status')),
            config=config,
            exit_code=exit_code,
            summary=summary,
            result=json.loads(dump_json(document, digits)),
        )
    except Exception as e:
        _say(f"{Fore.YELLOW}Could not record run in ledger {path}: {e}")


@click.group()
@click.version_option(version=__version__)
@click.option(
    '--settings',
    'settings_path',
    type=click.Path(),
    help='Path to settings YAML (default: profiles/default.yaml)'
)
@click.option(
    '--ledger',
    'ledger_path',
    type=click.Path(),
    help='Record runs in this SQLite ledger (overrides the settings profile)'
)
@click.pass_context
def cli(ctx, settings_path, ledger_path):
    """teamgame - equilibria of multi-principal team mechanism games.

    Every command takes a scenario config (a YAML file or the name of a
    bundled scenario) and prints one JSON document on stdout.
    """
    ctx.ensure_object(dict)
    ctx.obj['settings_path'] = settings_path
    ctx.obj['ledger_path'] = ledger_path


@cli.command()
@click.argument('config')
@click.option(
    '--csv',
    'csv_dir',
    type=click.Path(file_okay=False),
    help='Also write the prior and feasible-reward tables as CSV into this directory'
)
@click.pass_context
def validate(ctx, config, csv_dir):
    """Check a scenario against the model assumptions.

    Examples:
        teamgame validate myerson
        teamgame validate my_contest.yaml --csv tables/
    """
    _header("Validate")

    def action(scenario, settings):
        spec = scenario.spec
        info = settings.get_settings_info()
        _say(f"Settings: {info['name']} v{info['version']}")
        report = check_spec(spec, settings.get_tolerances()['mass'])
        for violation in report.violations:
            _say(f"{Fore.RED}{violation.assumption}: {violation.message}")
        for note in report.notes:
            _say(f"{Fore.YELLOW}{note}")
        document = {
            'status': 'ok' if report.ok else 'invalid',
            'config': scenario.name,
            'game': spec.summary(),
            'solver': dict(scenario.solver),
            'settings': info,
            **report.to_dict(),
        }
        if csv_dir and report.ok:
            document['csv'] = _write_game_tables(csv_dir, spec, settings.significant_digits())
        return document, f"assumptions: {report.assumptions}"

    _run(ctx, 'validate', config, action)


def _write_game_tables(directory: str, spec: GameSpec, digits: int) -> List[str]:
    prior = spec.prior_distribution()
    mass = prior.mass.reshape(-1)
    prior_rows = [[",".join(labels), float(mass[k])] for k, labels in enumerate(prior.index)]
    feasible_rows = [
        [w_label, ",".join(r_labels), bool(spec.feasible_rewards[w, r])]
        for w, w_label in enumerate(spec.winnings.labels)
        for r, r_labels in enumerate(spec.team_reward_index)
    ]
    return [
        write_csv(Path(directory) / "prior.csv", ["types", "mass"], prior_rows, digits),
        write_csv(Path(directory) / "feasible_rewards.csv", ["w", "r", "feasible"],
                  feasible_rows, digits),
    ]


@cli.command('best-response')
@click.argument('config')
@click.option(
    '--team',
    '-j',
    type=int,
    required=True,
    help='Team whose principal responds (1-based)'
)
@click.option(
    '--given',
    required=True,
    help='Profile file or preset supplying the opponents\' mechanisms'
)
@click.option(
    '--out-profile',
    type=click.Path(dir_okay=False),
    help='Write the profile with the best response substituted'
)
@click.option(
    '--tableau',
    type=click.Path(dir_okay=False),
    help='Write the team\'s IC constraint system as a plain-text tableau'
)
@click.option(
    '--csv',
    'csv_dir',
    type=click.Path(file_okay=False),
    help='Also write the best-response table as CSV into this directory'
)
@click.pass_context
def best_response(ctx, config, team, given, out_profile, tableau, csv_dir):
    """Solve one principal's best response against the given opponents.

    Examples:
        teamgame best-response myerson --team 1 --given C_C
        teamgame best-response contest.yaml -j 2 --given profile.json --tableau lp.txt
    """
    _header("Best Response")

    def action(scenario, settings):
        spec = _checked_spec(scenario, settings)
        tol = settings.get_tolerances()
        j = _team_index(spec, team)
        profile = _load_init(spec, given, tol['feasibility'])
        cache = _cache(spec, settings)
        if tableau:
            system = cache.system(profile, j)
            Path(tableau).write_text(system.to_tableau(settings.significant_digits()))
            _say(f"Tableau written to {tableau}")
        response = cache.best_response(profile, j)
        updated = replace_team(profile, response.mechanism)
        document = {
            'status': 'ok',
            'config': scenario.name,
            'team': team,
            'value': response.value,
            'lp_iterations': response.iterations,
            'mechanism': mechanism_summary(spec, response.mechanism),
        }
        if out_profile:
            document['profile_file'] = write_profile(out_profile, spec, updated,
                                                     settings.significant_digits())
        if csv_dir:
            document['csv'] = write_profile_csv(csv_dir, spec, [response.mechanism],
                                                prefix="best_response",
                                                digits=settings.significant_digits())
        return document, f"Principal {team} best-response value {response.value:.6g}"

    _run(ctx, 'best-response', config, action)


@cli.command()
@click.argument('config')
@click.option(
    '--init',
    'init_ref',
    default='uniform',
    show_default=True,
    help='Starting profile: a profile file or a preset such as C_C or uniform'
)
@click.option(
    '--schedule',
    type=click.Choice([ALTERNATING, SIMULTANEOUS]),
    help='Update schedule (overrides config and settings)'
)
@click.option('--damping', type=float, help='Weight on the new best response, in (0, 1]')
@click.option('--max-iter', type=int, help='Iteration budget')
@click.option('--tol', type=float, help='Convergence tolerance')
@click.option(
    '--out-profile',
    type=click.Path(dir_okay=False),
    help='Write the final profile (or the first profile of a cycle)'
)
@click.option(
    '--csv',
    'csv_dir',
    type=click.Path(file_okay=False),
    help='Also write the final profile and per-step values as CSV into this directory'
)
@click.pass_context
def dynamics(ctx, config, init_ref, schedule, damping, max_iter, tol, out_profile, csv_dir):
    """Run best-response dynamics to an equilibrium, a cycle or the budget.

    Examples:
        teamgame dynamics myerson --init C_C
        teamgame dynamics tullock_contest --schedule simultaneous --damping 0.5
    """
    _header("Best-Response Dynamics")

    def action(scenario, settings):
        spec = _checked_spec(scenario, settings)
        options = settings.get_dynamics()
        options.update(scenario.solver)
        overrides = {'schedule': schedule, 'damping': damping, 'max_iter': max_iter, 'tol': tol}
        options.update({key: value for key, value in overrides.items() if value is not None})
        if options['schedule'] not in (ALTERNATING, SIMULTANEOUS):
            raise ConfigError('solver.schedule', f"unknown schedule {options['schedule']!r}")
        if not 0.0 < options['damping'] <= 1.0:
            raise ConfigError('solver.damping', f"must lie in (0, 1], got {options['damping']}")
        if options['max_iter'] < 1:
            raise ConfigError('solver.max_iter', "must be at least 1")

        digits = settings.significant_digits()
        tolerances = settings.get_tolerances()
        init_profile = _load_init(spec, init_ref, tolerances['feasibility'])
        cache = _cache(spec, settings)
        _say(f"Schedule: {options['schedule']}, damping {options['damping']}, "
             f"max_iter {options['max_iter']}")
        result = best_response_dynamics(
            spec, init_profile,
            schedule=options['schedule'],
            damping=options['damping'],
            max_iter=options['max_iter'],
            tol=options['tol'],
            hash_resolution=options['hash_resolution'],
            verify_tol=max(options['tol'], tolerances['ic']),
            cache=cache,
        )

        if isinstance(result, CycleCertificate):
            document = {
                'status': 'cycle',
                'config': scenario.name,
                'result': _cycle_document(spec, result, cache),
            }
            final_profile = result.profiles[0]
            summary = f"Cycle of period {result.period} after {result.iterations} iterations"
        else:
            document = {
                'status': result.status,
                'config': scenario.name,
                'result': _equilibrium_document(spec, result),
            }
            final_profile = result.profile
            summary = f"{result.status} after {result.iterations} iterations"

        if out_profile:
            document['profile_file'] = write_profile(out_profile, spec, final_profile, digits)
        if csv_dir:
            written = write_profile_csv(csv_dir, spec, final_profile, digits=digits)
            if isinstance(result, CycleCertificate):
                rows = [[k, " ".join(str(t + 1) for t in step.teams),
                         " ".join(f"{v:.{digits}g}" for v in step.values)]
                        for k, step in enumerate(result.steps)]
                written.append(write_csv(Path(csv_dir) / "cycle.csv",
                                         ["step", "teams", "best_response_values"], rows, digits))
            document['csv'] = written
        return document, summary

    _run(ctx, 'dynamics', config, action)


def _cycle_document(spec: GameSpec, certificate: CycleCertificate,
                    cache: BestResponseCache) -> Dict[str, Any]:
    return {
        'kind': 'cycle_certificate',
        'period': certificate.period,
        'iterations': certificate.iterations,
        'damping': certificate.damping,
        'tol': certificate.tol,
        'verified': certificate.verify(spec, cache),
        'steps': [
            {
                'step': k,
                'profile': profile_summary(spec, step.profile),
                'moving_teams': [team + 1 for team in step.teams],
                'best_response_values': list(step.values),
            }
            for k, step in enumerate(certificate.steps)
        ],
    }


def _equilibrium_document(spec: GameSpec, report) -> Dict[str, Any]:
    document = {
        'kind': 'equilibrium_report',
        'iterations': report.iterations,
        'values': list(report.values),
        'slacks': [
            {'agent': [agent.team + 1, agent.member + 1], 'slack': slack}
            for agent, slack in report.slacks.items()
        ],
        'profile': profile_summary(spec, report.profile),
        'verification': report.verification.to_dict() if report.verification else None,
    }
    if spec.winnings.values is not None:
        document['win_probabilities'] = win_probabilities(spec, report.profile)
    return document


@cli.command()
@click.argument('config')
@click.option(
    '--profile',
    'profile_ref',
    required=True,
    help='Profile file or preset to verify'
)
@click.option('--tol', type=float, help='Tolerance for every equilibrium clause')
@click.option(
    '--csv',
    'csv_dir',
    type=click.Path(file_okay=False),
    help='Also write per-team values and per-agent slacks as CSV into this directory'
)
@click.pass_context
def verify(ctx, config, profile_ref, tol, csv_dir):
    """Check whether a profile is an equilibrium, clause by clause.

    Examples:
        teamgame verify myerson --profile match_C
        teamgame verify contest.yaml --profile final.json --tol 1e-7 --csv tables/
    """
    _header("Verify Equilibrium")

    def action(scenario, settings):
        spec = _checked_spec(scenario, settings)
        tolerances = settings.get_tolerances()
        profile = _load_init(spec, profile_ref, tolerances['feasibility'])
        report = verify_bnpe(spec, profile, tol if tol is not None else tolerances['ic'],
                             cache=_cache(spec, settings))
        for problem in report.problems:
            _say(f"{Fore.YELLOW}{problem}")
        document = {
            'status': 'verified_bnpe' if report.ok else 'not_equilibrium',
            'config': scenario.name,
            'profile': profile_summary(spec, profile),
            'verification': report.to_dict(),
        }
        if csv_dir:
            digits = settings.significant_digits()
            team_rows = [[team + 1, value, br_value, br_value - value]
                         for team, (value, br_value)
                         in enumerate(zip(report.values, report.best_response_values))]
            agent_rows = [[agent.team + 1, agent.member + 1, float(slack)]
                          for agent, slack in report.slacks.items()]
            document['csv'] = [
                write_csv(Path(csv_dir) / "verify_teams.csv",
                          ["team", "value", "best_response_value", "gain"], team_rows, digits),
                write_csv(Path(csv_dir) / "verify_agents.csv",
                          ["team", "member", "slack"], agent_rows, digits),
            ]
        return document, f"{document['status']} (margin {report.margin:.6g})"

    _run(ctx, 'verify', config, action)


@cli.command('ic-slack')
@click.argument('config')
@click.option(
    '--profile',
    'profile_ref',
    required=True,
    help='Profile file or preset'
)
@click.option(
    '--csv',
    'csv_dir',
    type=click.Path(file_okay=False),
    help='Also write the per-type slacks as CSV into this directory'
)
@click.pass_context
def ic_slack(ctx, config, profile_ref, csv_dir):
    """Per-agent incentive-compatibility slack with the binding deviations.

    Examples:
        teamgame ic-slack myerson --profile match_match
        teamgame ic-slack myerson --profile C_C --csv tables/
    """
    _header("IC Slack")

    def action(scenario, settings):
        spec = _checked_spec(scenario, settings)
        tolerances = settings.get_tolerances()
        profile = _load_init(spec, profile_ref, tolerances['feasibility'])
        details = [ic_slack_detail(spec, profile, agent) for agent in spec.agents]
        report = is_incentive_compatible(spec, profile, tolerances['ic'])
        for detail in details:
            color = Fore.GREEN if detail.slack >= -tolerances['ic'] else Fore.RED
            _say(f"{color}{detail.agent.label()}: slack {detail.slack:.6g}")
        document = {
            'status': 'ok',
            'config': scenario.name,
            'incentive_compatible': report.ok,
            'min_slack': report.min_slack,
            'agents': [detail.to_dict(spec) for detail in details],
            'worst': report.to_dict(),
        }
        if csv_dir:
            rows = [
                [detail.agent.team + 1, detail.agent.member + 1,
                 spec.types.labels[item.true_type], spec.types.labels[item.report],
                 float(item.truthful), float(item.deviation), float(item.slack)]
                for detail in details for item in detail.per_type
            ]
            document['csv'] = [write_csv(
                Path(csv_dir) / "ic_slack.csv",
                ["team", "member", "true_type", "report", "truthful", "deviation", "slack"],
                rows, settings.significant_digits(),
            )]
        verdict = "incentive compatible" if report.ok else "not incentive compatible"
        return document, f"Profile is {verdict} (min slack {report.min_slack:.6g})"

    _run(ctx, 'ic-slack', config, action)


@cli.command()
@click.argument('config')
@click.option('--profile-a', required=True, help='First profile file or preset')
@click.option('--profile-b', required=True, help='Second profile file or preset')
@click.option(
    '--show-diff',
    is_flag=True,
    help='Print a colored diff of the two profile files on stderr'
)
@click.option(
    '--csv',
    'csv_dir',
    type=click.Path(file_okay=False),
    help='Also write the per-agent Hausdorff distances as CSV into this directory'
)
@click.pass_context
def distance(ctx, config, profile_a, profile_b, show_diff, csv_dir):
    """Robust narrow distance between two profiles, with both components.

    Example:
        teamgame distance myerson --profile-a C_C --profile-b match_C
    """
    _header("Distance")

    def action(scenario, settings):
        spec = _checked_spec(scenario, settings)
        tol = settings.get_tolerances()['feasibility']
        first = _load_init(spec, profile_a, tol)
        second = _load_init(spec, profile_b, tol)
        if show_diff:
            _say(profile_diff(spec, first, second, labels=(profile_a, profile_b),
                              digits=settings.significant_digits()))
        components = robust_narrow_components(spec, first, second)
        document = {'status': 'ok', 'config': scenario.name, **components.to_dict()}
        if csv_dir:
            rows = [[agent.team + 1, agent.member + 1, float(value)]
                    for agent, value in components.per_agent.items()]
            document['csv'] = [write_csv(Path(csv_dir) / "distance_agents.csv",
                                         ["team", "member", "hausdorff"], rows,
                                         settings.significant_digits())]
        return document, f"d* = {components.value:.6g}"

    _run(ctx, 'distance', config, action)


@cli.command()
@click.option(
    '--limit',
    '-l',
    default=20,
    help='Number of runs to show (default: 20)'
)
@click.option(
    '--status',
    '-s',
    help='Filter by status (ok, cycle, verified_bnpe, error, ...)'
)
@click.option(
    '--timeframe',
    '-t',
    type=click.Choice(list(TIMEFRAMES)),
    help='Only runs from the last day, week or month'
)
@click.option(
    '--stats',
    is_flag=True,
    help='Show statistics instead of individual runs'
)
@click.pass_context
def history(ctx, limit, status, timeframe, stats):
    """View the run ledger.

    Examples:
        teamgame --ledger runs.db history
        teamgame history --status error
        teamgame history --timeframe week --status cycle
        teamgame history --stats
    """
    click.echo(f"\n{Fore.CYAN}{Style.BRIGHT}teamgame - Run History{Style.RESET_ALL}")
    click.echo(f"{'=' * 70}\n")

    try:
        path = ctx.obj.get('ledger_path') or Settings(ctx.obj.get('settings_path')).ledger_path()
        if path is None:
            click.echo(f"{Fore.YELLOW}Run ledger is disabled; pass --ledger PATH or enable "
                       f"ledger.enabled in the settings profile{Style.RESET_ALL}")
            return
        ledger = RunLedger(path)

        if stats:
            statistics = ledger.get_statistics()
            click.echo(f"{Fore.YELLOW}{Style.BRIGHT}Run Statistics:{Style.RESET_ALL}\n")
            click.echo(f"Total runs:   {statistics['total_runs']}")
            click.echo(f"Recent (24h): {statistics['recent_24h']}\n")
            click.echo(f"{Fore.YELLOW}Status Breakdown:{Style.RESET_ALL}")
            for status_name, count in statistics['status_counts'].items():
                click.echo(f"  {status_name}: {count}")
            click.echo(f"{Fore.YELLOW}Command Breakdown:{Style.RESET_ALL}")
            for command, count in statistics['command_counts'].items():
                click.echo(f"  {command}: {count}")
            return

        if timeframe:
            runs = ledger.get_runs_by_timeframe(timeframe, limit, status=status)
            scope = f" with status: {status}" if status else ""
            click.echo(f"{Fore.YELLOW}Showing {len(runs)} runs from the last {timeframe}"
                       f"{scope}{Style.RESET_ALL}")
        elif status:
            runs = ledger.get_runs_by_status(status, limit)
            click.echo(f"{Fore.YELLOW}Showing {len(runs)} runs with status: {status}{Style.RESET_ALL}")
        else:
            runs = ledger.get_recent_runs(limit)
            click.echo(f"{Fore.YELLOW}Showing {len(runs)} most recent runs{Style.RESET_ALL}")

        for entry in runs:
            click.echo(ledger.format_run_entry(entry))

        if not runs:
            click.echo(f"\n{Fore.YELLOW}No runs recorded{Style.RESET_ALL}")

    except Exception as e:
        click.echo(f"{Fore.RED}Error reading run ledger: {e}{Style.RESET_ALL}")
        ctx.exit(EXIT_INVALID)


@cli.command()
def scenarios():
    """List the bundled scenario configs."""
    for name in bundled_configs():
        click.echo(name)


if __name__ == '__main__':
    cli()
