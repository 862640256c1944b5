"""Closed-form economics of Trump-Ticket strategies.

A player buys ``n`` distinct combinations out of ``N`` in a lottery where a
crowd has already bought ``m`` tickets, each uniformly at random and with
replacement. In the parimutuel format the jackpot ``p * (n + m)`` is split
equally among all holders of the winning combination, so the player's
expected winnings are::

    v(n) * (n / N) * p * (n + m) * E[1 / (1 + K)],   K ~ Binomial(m, 1/N)

with ``v(n) = 1 - b_total * n / N`` the probability that a purchased ticket
survives printing, transport and storage. For ``N = m = 1000`` and ``p = 1``
this is the textbook Trump-Ticket formula with ``b = b_total / N``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .errors import DomainError, FormatError

#: Largest value :func:`combinations` will return (signed 64-bit range).
MAX_COMBINATIONS = 2**63 - 1

_SCAN_CHUNK = 1 << 16


@dataclass(frozen=True)
class FixedOdds:
    """Every winning ticket pays ``prize`` regardless of how many tickets win."""

    prize: float

    def __post_init__(self):
        if not self.prize >= 0:
            raise DomainError(f"fixed-odds prize must be >= 0, got {self.prize}")


class _Parimutuel:
    __slots__ = ()

    def __repr__(self):
        return "PARIMUTUEL"

    def __reduce__(self):
        return "PARIMUTUEL"


PARIMUTUEL = _Parimutuel()

PayoutFormat = Union[_Parimutuel, FixedOdds]


@dataclass(frozen=True)
class LotterySpec:
    combinations: int
    crowd_tickets: int
    ticket_price: float = 1.0
    payout_format: PayoutFormat = PARIMUTUEL

    def __post_init__(self):
        if int(self.combinations) != self.combinations or self.combinations < 1:
            raise DomainError(f"combinations must be a positive integer, got {self.combinations}")
        if int(self.crowd_tickets) != self.crowd_tickets or self.crowd_tickets < 0:
            raise DomainError(f"crowd_tickets must be a non-negative integer, got {self.crowd_tickets}")
        if not self.ticket_price > 0 or math.isinf(self.ticket_price):
            raise DomainError(f"ticket_price must be positive and finite, got {self.ticket_price}")
        if not isinstance(self.payout_format, (_Parimutuel, FixedOdds)):
            raise DomainError(f"unknown payout format {self.payout_format!r}")

    @property
    def is_parimutuel(self) -> bool:
        return isinstance(self.payout_format, _Parimutuel)

    @classmethod
    def reference_instance(cls) -> "LotterySpec":
        """N = 1000 combinations, 1000 crowd tickets at 1 monetary unit each."""
        return cls(combinations=1000, crowd_tickets=1000, ticket_price=1.0)


@dataclass(frozen=True)
class FrictionModel:
    """Ticket spoilage and fixed logistics cost of a purchasing exercise.

    ``invalid_at_full_coverage`` is the share of tickets lost when the
    player buys every combination; the loss rate scales linearly with ``n``.
    """

    invalid_at_full_coverage: float = 0.0
    logistics_cost: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.invalid_at_full_coverage <= 1.0:
            raise DomainError(
                f"invalid_at_full_coverage must lie in [0, 1], got {self.invalid_at_full_coverage}"
            )
        if not self.logistics_cost >= 0 or math.isinf(self.logistics_cost):
            raise DomainError(f"logistics_cost must be >= 0 and finite, got {self.logistics_cost}")

    @property
    def is_frictionless(self) -> bool:
        return self.invalid_at_full_coverage == 0 and self.logistics_cost == 0

    @classmethod
    def distributed_ledger(cls) -> "FrictionModel":
        return cls(0.0, 0.0)

    @classmethod
    def bricks_and_mortar(cls) -> "FrictionModel":
        return cls(0.1, 150.0)


@dataclass(frozen=True)
class GainPoint:
    n: int
    valid_rate: float
    expected_winnings: float
    expected_gain: float


@dataclass(frozen=True)
class GainCurve:
    spec: LotterySpec
    friction: FrictionModel
    points: tuple = field(default_factory=tuple)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    @property
    def ns(self) -> list:
        return [pt.n for pt in self.points]

    @property
    def gains(self) -> list:
        return [pt.expected_gain for pt in self.points]

    def sign_changes(self) -> int:
        """Number of times consecutive points switch between <= 0 and > 0."""
        signs = [g > 0 for g in self.gains]
        return sum(a != b for a, b in zip(signs, signs[1:]))


def combinations(pool: int, picks: int) -> int:
    """Binomial coefficient C(pool, picks), computed exactly.

    Raises OverflowError when the result does not fit in a signed 64-bit
    integer and DomainError when ``picks > pool``.
    """
    if pool < 1 or picks < 0:
        raise DomainError(f"need pool >= 1 and picks >= 0, got ({pool}, {picks})")
    if picks > pool:
        raise DomainError(f"cannot pick {picks} from a pool of {pool}")
    result = math.comb(pool, picks)
    if result > MAX_COMBINATIONS:
        raise OverflowError(f"C({pool}, {picks}) exceeds the 64-bit range")
    return result


def _check_n(n: int, spec: LotterySpec) -> None:
    if int(n) != n or not 0 <= n <= spec.combinations:
        raise DomainError(f"n must be an integer in [0, {spec.combinations}], got {n}")


def valid_ticket_rate(n: int, spec: LotterySpec, friction: FrictionModel) -> float:
    _check_n(n, spec)
    return 1.0 - friction.invalid_at_full_coverage * n / spec.combinations


def expected_reciprocal_winners(m: int, N: int) -> float:
    """E[1/(1+K)] for K ~ Binomial(m, 1/N).

    Uses the identity ``N/(m+1) * (1 - (1 - 1/N)**(m+1))``; the power is
    evaluated through log1p/expm1 so that large ``N`` keeps full precision.
    """
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    if m < 0:
        raise DomainError(f"m must be >= 0, got {m}")
    if m == 0:
        return 1.0
    if N == 1:
        return 1.0 / (m + 1)
    miss_all = (m + 1) * math.log1p(-1.0 / N)
    return N / (m + 1) * -math.expm1(miss_all)


def win_probability(n: int, spec: LotterySpec, friction: FrictionModel) -> float:
    """Probability that the player holds a valid ticket on the winning combination."""
    return valid_ticket_rate(n, spec, friction) * n / spec.combinations


def _require_parimutuel(spec: LotterySpec) -> None:
    if not spec.is_parimutuel:
        raise FormatError("operation applies to parimutuel lotteries only; use fixed_odds_expected_gain")


def expected_winnings(n: int, spec: LotterySpec, friction: FrictionModel) -> float:
    _require_parimutuel(spec)
    jackpot = spec.ticket_price * (n + spec.crowd_tickets)
    share = expected_reciprocal_winners(spec.crowd_tickets, spec.combinations)
    return win_probability(n, spec, friction) * jackpot * share


def expected_gain(n: int, spec: LotterySpec, friction: FrictionModel) -> float:
    return expected_winnings(n, spec, friction) - n * spec.ticket_price - friction.logistics_cost


def _fixed_odds_winnings(n: int, spec: LotterySpec, friction: FrictionModel) -> float:
    return win_probability(n, spec, friction) * spec.payout_format.prize


def fixed_odds_expected_gain(n: int, spec: LotterySpec, friction: FrictionModel) -> float:
    """Expected gain when each valid winning ticket pays the fixed prize.

    The crowd size does not enter: other winners never dilute the prize.
    """
    if spec.is_parimutuel:
        raise FormatError("fixed_odds_expected_gain requires a FixedOdds lottery")
    return _fixed_odds_winnings(n, spec, friction) - n * spec.ticket_price - friction.logistics_cost


def gain_point(n: int, spec: LotterySpec, friction: FrictionModel) -> GainPoint:
    if spec.is_parimutuel:
        winnings = expected_winnings(n, spec, friction)
    else:
        winnings = _fixed_odds_winnings(n, spec, friction)
    gain = winnings - n * spec.ticket_price - friction.logistics_cost
    return GainPoint(n, valid_ticket_rate(n, spec, friction), winnings, gain)


def gain_curve(
    spec: LotterySpec,
    friction: FrictionModel,
    n_min: int = 0,
    n_max: Optional[int] = None,
    step: int = 1,
) -> GainCurve:
    """Sample expected winnings and gain for n = n_min, n_min + step, ..., <= n_max.

    Works for both payout formats.
    """
    if n_max is None:
        n_max = spec.combinations
    if step < 1:
        raise DomainError(f"step must be a positive integer, got {step}")
    if not 0 <= n_min <= n_max <= spec.combinations:
        raise DomainError(f"need 0 <= n_min <= n_max <= {spec.combinations}, got [{n_min}, {n_max}]")
    points = tuple(gain_point(n, spec, friction) for n in range(n_min, n_max + 1, step))
    return GainCurve(spec, friction, points)


def break_even(spec: LotterySpec, friction: FrictionModel) -> Optional[int]:
    """Smallest n whose expected gain is strictly positive, or None."""
    _require_parimutuel(spec)
    N, m, p = spec.combinations, spec.crowd_tickets, spec.ticket_price
    share = expected_reciprocal_winners(m, N)
    for start in range(0, N + 1, _SCAN_CHUNK):
        n = np.arange(start, min(start + _SCAN_CHUNK, N + 1), dtype=np.float64)
        # same operation order as expected_gain, so signs agree bit for bit
        v = 1.0 - friction.invalid_at_full_coverage * n / N
        gains = v * n / N * (p * (n + m)) * share - n * p - friction.logistics_cost
        hits = np.flatnonzero(gains > 0)
        if hits.size:
            first = start + int(hits[0])
            if expected_gain(first, spec, friction) > 0:
                return first
            break
    # fall back to the scalar scan if the vector pass disagreed
    for n in range(spec.combinations + 1):
        if expected_gain(n, spec, friction) > 0:
            return n
    return None
