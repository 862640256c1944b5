"""Upper bounds on the money an attacker can make by subverting a ledger.

A ledger that exists in isolation only offers block rewards and the
transactions an attacker could reverse, so its attack incentive is a finite
sum. Once a smart contract supplies a necessary input to some off-chain
outcome, every credit-default swap written on that outcome adds its net
payoff to the incentive. Nothing limits how many such contracts exist.

This is a deliberately plain formalization: every quantity is a scalar
amount of money, the bounds are additive, and the attack cost is a single
number supplied by the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

from .errors import DomainError, UndefinedRatioError


def _check_amount(name: str, value: float) -> None:
    if not value >= 0 or math.isinf(value):
        raise DomainError(f"{name} must be a finite non-negative amount, got {value}")


@dataclass(frozen=True)
class IsolatedAttackSurface:
    block_rewards: float = 0.0
    reversible_transactions: tuple = field(default_factory=tuple)

    def __post_init__(self):
        _check_amount("block_rewards", self.block_rewards)
        object.__setattr__(self, "reversible_transactions", tuple(self.reversible_transactions))
        for amount in self.reversible_transactions:
            _check_amount("reversible transaction", amount)

    def with_transaction(self, amount: float) -> "IsolatedAttackSurface":
        return IsolatedAttackSurface(self.block_rewards, self.reversible_transactions + (amount,))


@dataclass(frozen=True)
class CdsContract:
    """A swap paying its holder when the smart contract fails to deliver.

    ``net_payoff_on_bad_state`` is already net of premium and funding cost.
    """

    id: str
    net_payoff_on_bad_state: float
    holder: str = ""

    def __post_init__(self):
        _check_amount("net_payoff_on_bad_state", self.net_payoff_on_bad_state)


@dataclass(frozen=True)
class MixedEconomySurface:
    isolated: IsolatedAttackSurface = field(default_factory=IsolatedAttackSurface)
    cds_stack: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "cds_stack", tuple(self.cds_stack))
        for contract in self.cds_stack:
            if not isinstance(contract, CdsContract):
                raise DomainError(f"cds_stack entries must be CdsContract, got {contract!r}")

    def with_contract(self, contract: CdsContract) -> "MixedEconomySurface":
        return MixedEconomySurface(self.isolated, self.cds_stack + (contract,))

    @classmethod
    def from_amounts(
        cls,
        block_rewards: float = 0.0,
        reversible_transactions: Iterable[float] = (),
        cds_payoffs: Iterable[float] = (),
    ) -> "MixedEconomySurface":
        stack = tuple(CdsContract(f"cds-{i}", payoff) for i, payoff in enumerate(cds_payoffs))
        return cls(IsolatedAttackSurface(block_rewards, tuple(reversible_transactions)), stack)


@dataclass(frozen=True)
class AttackAppraisal:
    incentive_bound: float
    attack_cost: float
    net_margin: float
    profitable: bool


def isolated_bound(surface: IsolatedAttackSurface) -> float:
    """Block rewards plus everything the attacker could double spend."""
    return surface.block_rewards + math.fsum(surface.reversible_transactions)


def cds_total(surface: MixedEconomySurface) -> float:
    return math.fsum(c.net_payoff_on_bad_state for c in surface.cds_stack)


def mixed_bound(surface: MixedEconomySurface) -> float:
    return isolated_bound(surface.isolated) + cds_total(surface)


def amplification(surface: MixedEconomySurface) -> float:
    """How many times larger the mixed-economy bound is than the isolated one."""
    base = isolated_bound(surface.isolated)
    if base == 0:
        raise UndefinedRatioError("amplification is undefined when the isolated bound is zero")
    return mixed_bound(surface) / base


def appraise(surface: MixedEconomySurface, attack_cost: float) -> AttackAppraisal:
    _check_amount("attack_cost", attack_cost)
    bound = mixed_bound(surface)
    margin = bound - attack_cost
    return AttackAppraisal(bound, attack_cost, margin, margin > 0)


def stack_exceeding(surface: MixedEconomySurface, threshold: float, payoff: float) -> MixedEconomySurface:
    """Append identical contracts of ``payoff`` until the mixed bound exceeds ``threshold``."""
    if not payoff > 0:
        raise DomainError(f"payoff must be positive to grow the bound, got {payoff}")
    shortfall = threshold - mixed_bound(surface)
    count = max(0, math.floor(shortfall / payoff) + 1)
    stack = surface.cds_stack + tuple(
        CdsContract(f"cds-extra-{i}", payoff) for i in range(count)
    )
    grown = MixedEconomySurface(surface.isolated, stack)
    while mixed_bound(grown) <= threshold:
        grown = grown.with_contract(CdsContract(f"cds-extra-{len(grown.cds_stack)}", payoff))
    return grown
