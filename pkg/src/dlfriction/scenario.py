"""Scenario files: TOML documents describing a lottery and what to run on it.

Example::

    [lottery]
    combinations = 1000
    crowd_tickets = 1000
    ticket_price = 1.0
    format = "parimutuel"          # or "fixed_odds" together with fixed_prize

    [friction.dl]
    invalid_at_full_coverage = 0.0
    logistics_cost = 0.0

    [friction.bricks_and_mortar]
    invalid_at_full_coverage = 0.1
    logistics_cost = 150.0

    [oracle]
    trials = 1000000
    seed = 20170901

    [sweep]
    n_min = 0
    n_max = 1000
    step = 1

    [incentive]
    block_rewards = 12.5
    reversible_transactions = [100.0, 50.0]
    cds_payoffs = [1000.0, 2000.0]
    attack_cost = 2500.0

    [ledger]
    block_capacity = 500
    gas_per_tx = 0.0

Only ``[lottery]`` is mandatory. Unknown keys anywhere are rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .econ import PARIMUTUEL, FixedOdds, FrictionModel, LotterySpec
from .errors import DomainError
from .incentives import MixedEconomySurface


class ScenarioError(ValueError):
    """The scenario file is missing, unparsable or fails validation."""


@dataclass(frozen=True)
class OracleSection:
    trials: int
    seed: int


@dataclass(frozen=True)
class SweepSection:
    n_min: int
    n_max: int
    step: int = 1


@dataclass(frozen=True)
class IncentiveSection:
    surface: MixedEconomySurface
    attack_cost: float


@dataclass(frozen=True)
class LedgerSection:
    block_capacity: int
    gas_per_tx: float = 0.0


@dataclass(frozen=True)
class Scenario:
    lottery: LotterySpec
    frictions: Dict[str, FrictionModel] = field(default_factory=dict)
    oracle: Optional[OracleSection] = None
    sweep: Optional[SweepSection] = None
    incentive: Optional[IncentiveSection] = None
    ledger: Optional[LedgerSection] = None

    def sweep_range(self) -> Tuple[int, int, int]:
        if self.sweep is None:
            return 0, self.lottery.combinations, 1
        return self.sweep.n_min, self.sweep.n_max, self.sweep.step

    def require(self, section: str):
        value = getattr(self, section)
        if value is None or value == {}:
            raise ScenarioError(f"scenario has no [{section}] section")
        return value


_SECTIONS = {"lottery", "friction", "oracle", "sweep", "incentive", "ledger"}


def _keys(table: Dict[str, Any], where: str, required: set, optional: set = frozenset()) -> None:
    if not isinstance(table, dict):
        raise ScenarioError(f"[{where}] must be a table")
    unknown = set(table) - required - optional
    if unknown:
        raise ScenarioError(f"unknown key(s) in [{where}]: {', '.join(sorted(unknown))}")
    missing = required - set(table)
    if missing:
        raise ScenarioError(f"missing key(s) in [{where}]: {', '.join(sorted(missing))}")


def _int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(f"{where} must be an integer, got {value!r}")
    return value


def _num(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ScenarioError(f"{where} must be a finite number, got {value!r}")
    return float(value)


def _num_list(value: Any, where: str) -> Tuple[float, ...]:
    if not isinstance(value, list):
        raise ScenarioError(f"{where} must be a list of numbers")
    return tuple(_num(v, f"{where}[{i}]") for i, v in enumerate(value))


def _lottery(table: Dict[str, Any]) -> LotterySpec:
    _keys(table, "lottery", {"combinations", "crowd_tickets"}, {"ticket_price", "format", "fixed_prize"})
    fmt = table.get("format", "parimutuel")
    if fmt == "parimutuel":
        if "fixed_prize" in table:
            raise ScenarioError("fixed_prize is only meaningful with format = \"fixed_odds\"")
        payout = PARIMUTUEL
    elif fmt == "fixed_odds":
        if "fixed_prize" not in table:
            raise ScenarioError("format = \"fixed_odds\" requires fixed_prize")
        payout = FixedOdds(_num(table["fixed_prize"], "lottery.fixed_prize"))
    else:
        raise ScenarioError(f"lottery.format must be \"parimutuel\" or \"fixed_odds\", got {fmt!r}")
    return LotterySpec(
        combinations=_int(table["combinations"], "lottery.combinations"),
        crowd_tickets=_int(table["crowd_tickets"], "lottery.crowd_tickets"),
        ticket_price=_num(table.get("ticket_price", 1.0), "lottery.ticket_price"),
        payout_format=payout,
    )


def _frictions(table: Dict[str, Any]) -> Dict[str, FrictionModel]:
    if not isinstance(table, dict) or not table:
        raise ScenarioError("[friction] must contain at least one named profile")
    profiles = {}
    for name, body in table.items():
        where = f"friction.{name}"
        _keys(body, where, {"invalid_at_full_coverage", "logistics_cost"})
        profiles[name] = FrictionModel(
            _num(body["invalid_at_full_coverage"], f"{where}.invalid_at_full_coverage"),
            _num(body["logistics_cost"], f"{where}.logistics_cost"),
        )
    return profiles


def parse_scenario(doc: Dict[str, Any]) -> Scenario:
    unknown = set(doc) - _SECTIONS
    if unknown:
        raise ScenarioError(f"unknown section(s): {', '.join(sorted(unknown))}")
    if "lottery" not in doc:
        raise ScenarioError("scenario has no [lottery] section")
    try:
        lottery = _lottery(doc["lottery"])
        frictions = _frictions(doc["friction"]) if "friction" in doc else {}

        oracle = None
        if "oracle" in doc:
            _keys(doc["oracle"], "oracle", {"trials", "seed"})
            oracle = OracleSection(_int(doc["oracle"]["trials"], "oracle.trials"), _int(doc["oracle"]["seed"], "oracle.seed"))
            if oracle.trials < 1:
                raise ScenarioError("oracle.trials must be >= 1")
            if not 0 <= oracle.seed < 2**64:
                raise ScenarioError("oracle.seed must be an unsigned 64-bit integer")

        sweep = None
        if "sweep" in doc:
            body = doc["sweep"]
            _keys(body, "sweep", {"n_min", "n_max"}, {"step"})
            sweep = SweepSection(
                _int(body["n_min"], "sweep.n_min"),
                _int(body["n_max"], "sweep.n_max"),
                _int(body.get("step", 1), "sweep.step"),
            )
            if sweep.step < 1:
                raise ScenarioError("sweep.step must be >= 1")
            if not 0 <= sweep.n_min <= sweep.n_max <= lottery.combinations:
                raise ScenarioError(f"sweep must satisfy 0 <= n_min <= n_max <= {lottery.combinations}")

        incentive = None
        if "incentive" in doc:
            body = doc["incentive"]
            _keys(body, "incentive", set(), {"block_rewards", "reversible_transactions", "cds_payoffs", "attack_cost"})
            surface = MixedEconomySurface.from_amounts(
                _num(body.get("block_rewards", 0.0), "incentive.block_rewards"),
                _num_list(body.get("reversible_transactions", []), "incentive.reversible_transactions"),
                _num_list(body.get("cds_payoffs", []), "incentive.cds_payoffs"),
            )
            cost = _num(body.get("attack_cost", 0.0), "incentive.attack_cost")
            if cost < 0:
                raise ScenarioError("incentive.attack_cost must be >= 0")
            incentive = IncentiveSection(surface, cost)

        ledger = None
        if "ledger" in doc:
            body = doc["ledger"]
            _keys(body, "ledger", {"block_capacity"}, {"gas_per_tx"})
            ledger = LedgerSection(
                _int(body["block_capacity"], "ledger.block_capacity"),
                _num(body.get("gas_per_tx", 0.0), "ledger.gas_per_tx"),
            )
            if ledger.block_capacity < 1:
                raise ScenarioError("ledger.block_capacity must be >= 1")
            if ledger.gas_per_tx < 0:
                raise ScenarioError("ledger.gas_per_tx must be >= 0")
    except DomainError as exc:
        raise ScenarioError(str(exc)) from exc
    return Scenario(lottery, frictions, oracle, sweep, incentive, ledger)


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        with path.open("rb") as fh:
            doc = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ScenarioError(f"scenario file not found: {path}") from exc
    except IsADirectoryError as exc:
        raise ScenarioError(f"scenario path is a directory: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"cannot parse {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise ScenarioError(f"{path} is not UTF-8 text") from exc
    return parse_scenario(doc)
