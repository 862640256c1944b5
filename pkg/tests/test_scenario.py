import pytest

from dlfriction.econ import FixedOdds
from dlfriction.scenario import ScenarioError, load_scenario, parse_scenario

BASE = {"lottery": {"combinations": 1000, "crowd_tickets": 1000}}


def doc(**sections):
    out = {k: dict(v) for k, v in BASE.items()}
    out.update(sections)
    return out


def test_reference_file(reference_scenario):
    sc = load_scenario(reference_scenario)
    assert sc.lottery.combinations == 1000
    assert sc.lottery.is_parimutuel
    assert list(sc.frictions) == ["dl", "bricks_and_mortar"]
    assert sc.frictions["bricks_and_mortar"].logistics_cost == 150.0
    assert sc.oracle.trials == 1_000_000
    assert sc.sweep_range() == (0, 1000, 1)
    assert sc.ledger.block_capacity == 500
    assert sc.incentive.attack_cost == 2500.0


def test_fixed_odds_file(fixed_odds_scenario):
    sc = load_scenario(fixed_odds_scenario)
    assert sc.lottery.payout_format == FixedOdds(900.0)


def test_minimal():
    sc = parse_scenario(doc())
    assert sc.frictions == {}
    assert sc.oracle is None
    assert sc.sweep_range() == (0, 1000, 1)
    with pytest.raises(ScenarioError):
        sc.require("ledger")


@pytest.mark.parametrize(
    "bad",
    [
        {"lottery": {"combinations": 10}},
        {"lottery": {"combinations": 10, "crowd_tickets": 0, "colour": "red"}},
        {"lottery": {"combinations": 10, "crowd_tickets": 0}, "extras": {}},
        {"lottery": {"combinations": 0, "crowd_tickets": 0}},
        {"lottery": {"combinations": 10.5, "crowd_tickets": 0}},
        {"lottery": {"combinations": 10, "crowd_tickets": 0, "format": "fixed_odds"}},
        {"lottery": {"combinations": 10, "crowd_tickets": 0, "fixed_prize": 3.0}},
        {"lottery": {"combinations": 10, "crowd_tickets": 0, "format": "pools"}},
        doc(friction={}),
        doc(friction={"dl": {"invalid_at_full_coverage": 0.0}}),
        doc(friction={"dl": {"invalid_at_full_coverage": 1.5, "logistics_cost": 0.0}}),
        doc(friction={"dl": {"invalid_at_full_coverage": 0.0, "logistics_cost": -1.0}}),
        doc(oracle={"trials": 0, "seed": 1}),
        doc(oracle={"trials": 10, "seed": -1}),
        doc(oracle={"trials": 10, "seed": 2**64}),
        doc(oracle={"trials": 10, "seed": 1, "workers": 4}),
        doc(sweep={"n_min": 5, "n_max": 4}),
        doc(sweep={"n_min": 0, "n_max": 1001}),
        doc(sweep={"n_min": 0, "n_max": 10, "step": 0}),
        doc(incentive={"block_rewards": -1.0}),
        doc(incentive={"cds_payoffs": [1.0, -2.0]}),
        doc(incentive={"cds_payoffs": "lots"}),
        doc(incentive={"attack_cost": -5.0}),
        doc(ledger={"gas_per_tx": 0.1}),
        doc(ledger={"block_capacity": 0}),
        doc(ledger={"block_capacity": 10, "gas_per_tx": -0.1}),
        doc(ledger={"block_capacity": True}),
    ],
)
def test_rejected(bad):
    with pytest.raises(ScenarioError):
        parse_scenario(bad)


def test_missing_file(tmp_path):
    with pytest.raises(ScenarioError):
        load_scenario(tmp_path / "absent.toml")


def test_unparsable(tmp_path):
    path = tmp_path / "broken.toml"
    path.write_text("[lottery\ncombinations = ")
    with pytest.raises(ScenarioError):
        load_scenario(path)
