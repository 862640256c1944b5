"""Lottery economics, attack-incentive bounds and a toy ledger for DL fintech frictions."""

from .econ import (
    FixedOdds,
    FrictionModel,
    GainCurve,
    GainPoint,
    LotterySpec,
    PARIMUTUEL,
    break_even,
    combinations,
    expected_gain,
    expected_reciprocal_winners,
    expected_winnings,
    fixed_odds_expected_gain,
    gain_curve,
    valid_ticket_rate,
    win_probability,
)

__version__ = "0.1.0"

__all__ = [
    "FixedOdds",
    "FrictionModel",
    "GainCurve",
    "GainPoint",
    "LotterySpec",
    "PARIMUTUEL",
    "break_even",
    "combinations",
    "expected_gain",
    "expected_reciprocal_winners",
    "expected_winnings",
    "fixed_odds_expected_gain",
    "gain_curve",
    "valid_ticket_rate",
    "win_probability",
]
