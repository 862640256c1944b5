"""Command-line front end.

Exit codes: 0 on success, 2 for configuration or validation errors
(including a missing scenario file), 3 for I/O failures.
"""

from __future__ import annotations

import functools
import sys

import click

from . import incentives, ledger
from .econ import break_even
from .errors import CapabilityError, DomainError, FormatError, LedgerError, UndefinedRatioError
from .oracle import OracleConfig, analytic_winnings, estimate
from .report import fmt_money, write_gain_figure
from .scenario import ScenarioError, load_scenario

EXIT_CONFIG = 2
EXIT_IO = 3


class ConfigFailure(click.ClickException):
    exit_code = EXIT_CONFIG


class IOFailure(click.ClickException):
    exit_code = EXIT_IO


def _guarded(func):
    """Translate library exceptions into the CLI exit-code contract."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except click.ClickException:
            raise
        except (ScenarioError, DomainError, FormatError, LedgerError, CapabilityError) as exc:
            raise ConfigFailure(str(exc)) from exc
        except OSError as exc:
            raise IOFailure(str(exc)) from exc

    return wrapper


def _profiles(scenario, profile):
    frictions = scenario.frictions
    if not frictions:
        raise ConfigFailure("scenario has no [friction] profiles")
    if profile is None:
        return frictions
    if profile not in frictions:
        raise ConfigFailure(f"no friction profile named {profile!r}; have {', '.join(frictions)}")
    return {profile: frictions[profile]}


def _emit(lines):
    click.echo("\n".join(lines))


scenario_option = click.option(
    "--scenario", "scenario_path", required=True, type=click.Path(dir_okay=False), help="TOML scenario file."
)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(package_name="artifact", prog_name="dlfriction")
def main():
    """Trump-Ticket economics, attack-incentive bounds and ledger cascades."""


@main.command("gain-curve")
@scenario_option
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False), help="Output directory.")
@_guarded
def gain_curve_cmd(scenario_path, out_dir):
    """Tabulate expected gain per friction profile and plot the curves."""
    scenario = load_scenario(scenario_path)
    _profiles(scenario, None)
    artifact = write_gain_figure(scenario, out_dir)
    lines = [f"csv: {artifact.csv_path}", f"svg: {artifact.svg_path}", f"rows: {artifact.rows}"]
    for name, color in artifact.labels.items():
        first = artifact.crossings.get(name)
        lines.append(f"{name}: colour={color} first_positive={'none' if first is None else first}")
    _emit(lines)


@main.command("break-even")
@scenario_option
@_guarded
def break_even_cmd(scenario_path):
    """Print the smallest profitable ticket count per friction profile, or `none`."""
    scenario = load_scenario(scenario_path)
    if not scenario.lottery.is_parimutuel:
        raise ConfigFailure("break-even applies to parimutuel lotteries only")
    lines = []
    for name, friction in _profiles(scenario, None).items():
        n = break_even(scenario.lottery, friction)
        lines.append(f"{name}: {'none' if n is None else n}")
    _emit(lines)


@main.command("oracle")
@scenario_option
@click.option("--n", "n", required=True, type=int, help="Tickets bought by the player.")
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=None, help="Overrides oracle.seed.")
@click.option("--profile", default=None, help="Only this friction profile.")
@click.option("--workers", type=click.IntRange(1), default=1, show_default=True, help="Worker threads.")
@_guarded
def oracle_cmd(scenario_path, n, seed, profile, workers):
    """Monte Carlo estimate of winnings next to the closed form."""
    scenario = load_scenario(scenario_path)
    section = scenario.require("oracle")
    if not scenario.lottery.is_parimutuel:
        raise ConfigFailure("the oracle applies to parimutuel lotteries only")
    seed = section.seed if seed is None else seed
    lines = []
    for name, friction in _profiles(scenario, profile).items():
        config = OracleConfig(scenario.lottery, friction, n, section.trials, seed)
        result = estimate(config, workers=workers)
        analytic = analytic_winnings(config)
        lines += [
            f"profile: {name}",
            f"n: {n}",
            f"trials: {result.trials}",
            f"seed: {result.seed}",
            f"mean_winnings: {fmt_money(result.mean_winnings)}",
            f"mean_gain: {fmt_money(result.mean_gain)}",
            f"std_error: {fmt_money(result.std_error)}",
            f"win_rate: {result.win_rate:.6f}",
            f"analytic_winnings: {fmt_money(analytic)}",
            f"z_score: {result.z_score(analytic):.4f}",
        ]
    _emit(lines)


@main.command("incentive")
@scenario_option
@_guarded
def incentive_cmd(scenario_path):
    """Compare isolated and mixed-economy attack-incentive bounds."""
    section = load_scenario(scenario_path).require("incentive")
    surface = section.surface
    try:
        ratio = f"{incentives.amplification(surface):.4f}"
    except UndefinedRatioError:
        ratio = "undefined"
    verdict = incentives.appraise(surface, section.attack_cost)
    _emit([
        f"isolated_bound: {fmt_money(incentives.isolated_bound(surface.isolated))}",
        f"mixed_bound: {fmt_money(incentives.mixed_bound(surface))}",
        f"amplification: {ratio}",
        f"attack_cost: {fmt_money(verdict.attack_cost)}",
        f"net_margin: {fmt_money(verdict.net_margin)}",
        f"verdict: {'profitable' if verdict.profitable else 'unprofitable'}",
    ])


@main.command("cascade-demo")
@scenario_option
@click.option("--topology", required=True, type=click.Choice(ledger.TOPOLOGIES))
@click.option("--count", required=True, type=int, help="Transactions in the cascade.")
@_guarded
def cascade_demo_cmd(scenario_path, topology, count):
    """Settle a cascade of dependent transactions and count the blocks used."""
    if count < 1:
        raise ConfigFailure(f"--count must be >= 1, got {count}")
    section = load_scenario(scenario_path).require("ledger")
    outcome = ledger.run_cascade(topology, count, section.block_capacity, section.gas_per_tx)
    _emit([
        f"topology: {topology}",
        f"count: {count}",
        f"block_capacity: {section.block_capacity}",
        f"blocks_to_complete: {outcome.blocks_to_complete}",
        f"total_gas: {fmt_money(outcome.total_gas)}",
    ])


@main.command("ledger-lottery")
@scenario_option
@click.option("--n", "n", required=True, type=int, help="Tickets bought by the player.")
@click.option("--draws", type=click.IntRange(1), default=10_000, show_default=True, help="Independent lotteries to run.")
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=None, help="Overrides oracle.seed.")
@_guarded
def ledger_lottery_cmd(scenario_path, n, draws, seed):
    """Play the Trump Ticket on a simulated ledger and compare with the closed form."""
    scenario = load_scenario(scenario_path)
    section = scenario.require("ledger")
    if seed is None:
        seed = scenario.oracle.seed if scenario.oracle else 0
    if not scenario.lottery.is_parimutuel:
        raise ConfigFailure("ledger lotteries are parimutuel")
    if not 0 <= n <= scenario.lottery.combinations:
        raise ConfigFailure(f"--n must lie in [0, {scenario.lottery.combinations}]")
    result = ledger.play_ledger_lottery(
        scenario.lottery, n, draws, seed, section.block_capacity, section.gas_per_tx
    )
    _emit([
        f"n: {n}",
        f"draws: {result.draws}",
        f"seed: {seed}",
        f"mean_winnings: {fmt_money(result.mean_winnings)}",
        f"std_error: {fmt_money(result.std_error)}",
        f"analytic_winnings: {fmt_money(result.analytic_winnings)}",
        f"z_score: {result.z_score():.4f}",
        f"ticket_cost: {fmt_money(result.ticket_cost)}",
        f"friction_cost: {fmt_money(result.friction_cost)}",
        f"mean_gain: {fmt_money(result.mean_gain)}",
        f"analytic_gain: {fmt_money(result.analytic_gain)}",
        f"conservation: {'ok' if result.conserved else 'violated'}",
    ])


if __name__ == "__main__":
    sys.exit(main())
