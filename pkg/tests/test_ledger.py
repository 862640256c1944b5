import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dlfriction.econ import LotterySpec
from dlfriction.errors import DomainError, LedgerError
from dlfriction.ledger import (
    CascadeSpec,
    LedgerState,
    ScTrigger,
    TicketPurchase,
    Transaction,
    Transfer,
    build_cascade,
    play_ledger_lottery,
    run_cascade,
)


def transfer(tx_id, deps=(), gas=0.0):
    return Transaction(tx_id, Transfer(1.0), gas, frozenset(deps))


class TestSubmit:
    def test_submit_then_form_block(self):
        state = LedgerState(10)
        state.submit(transfer("a"))
        block = state.form_block()
        assert block.height == 0
        assert block.tx_ids == ["a"]
        assert not state.pending

    def test_duplicate_rejected(self):
        state = LedgerState(10)
        state.submit(transfer("a"))
        before = state.snapshot()
        with pytest.raises(LedgerError):
            state.submit(transfer("a"))
        assert state.snapshot() == before

    def test_unknown_dependency(self):
        state = LedgerState(10)
        with pytest.raises(LedgerError):
            state.submit(transfer("b", deps={"a"}))
        assert not state.pending

    def test_self_dependency(self):
        with pytest.raises(LedgerError):
            transfer("a", deps={"a"})

    def test_negative_gas(self):
        with pytest.raises(LedgerError):
            transfer("a", gas=-0.01)

    def test_trigger_is_ordinary_transaction(self):
        state = LedgerState(1)
        state.submit(Transaction("t", ScTrigger("escrow"), 0.5))
        assert state.form_block().tx_ids == ["t"]


class TestFormBlock:
    def test_independent_capacity(self):
        state = LedgerState(500)
        for i in range(1000):
            state.submit(transfer(f"t{i}"))
        assert state.drain() == 2
        assert [len(b.transactions) for b in state.chain] == [500, 500]

    def test_dependent_chain_in_one_block(self):
        state = LedgerState(500)
        state.submit(transfer("t0"))
        for i in range(1, 1000):
            state.submit(transfer(f"t{i}", deps={f"t{i - 1}"}))
        assert state.drain() == 2

    def test_empty_pool(self):
        state = LedgerState(5)
        block = state.form_block()
        assert block.transactions == ()
        assert len(state.chain) == 1

    def test_heights_consecutive(self):
        state = LedgerState(3)
        for i in range(10):
            state.submit(transfer(f"t{i}"))
        state.drain()
        assert [b.height for b in state.chain] == list(range(4))

    def test_ineligible_keeps_position(self):
        state = LedgerState(2)
        state.submit(transfer("a"))
        state.submit(transfer("b", deps={"a"}))
        state.submit(transfer("c"))
        state.submit(transfer("d"))
        first = state.form_block()
        assert first.tx_ids == ["a", "b"]
        assert [tx.id for tx in state.pending] == ["c", "d"]

    def test_skips_over_blocked_transaction(self):
        state = LedgerState(2)
        state.submit(transfer("a"))
        state.submit(transfer("x"))
        state.form_block()  # a, x on chain
        state.submit(transfer("b", deps={"a"}))
        state.submit(transfer("c", deps={"b"}))
        state.submit(transfer("d"))
        state.submit(transfer("e"))
        block = state.form_block()
        # b is eligible, c rides behind it, d and e wait
        assert block.tx_ids == ["b", "c"]
        assert [tx.id for tx in state.pending] == ["d", "e"]

    def test_each_transaction_in_one_place(self):
        state = LedgerState(4)
        for i in range(11):
            state.submit(transfer(f"t{i}"))
        state.form_block()
        on_chain = {tx_id for b in state.chain for tx_id in b.tx_ids}
        pending = {tx.id for tx in state.pending}
        assert on_chain.isdisjoint(pending)
        assert on_chain | pending == {f"t{i}" for i in range(11)}

    def test_dependencies_precede(self):
        state = LedgerState(3)
        cascade = build_cascade("star", 20)
        state.execute_cascade(cascade)
        seen = set()
        for block in state.chain:
            for tx in block.transactions:
                assert tx.depends_on <= seen
                seen.add(tx.id)


class TestCascade:
    def test_chain(self):
        assert run_cascade("chain", 1000, 500).blocks_to_complete == 2

    def test_star(self):
        assert run_cascade("star", 1000, 1000).blocks_to_complete == 1

    def test_one_per_block(self):
        assert run_cascade("chain", 37, 1).blocks_to_complete == 37

    def test_gas_total(self):
        outcome = run_cascade("independent", 1000, 250, 0.01)
        assert outcome.blocks_to_complete == 4
        assert outcome.total_gas == math.fsum([0.01] * 1000)

    def test_cycle_rejected(self):
        a = transfer("a", deps={"b"})
        b = transfer("b", deps={"a"})
        with pytest.raises(LedgerError):
            CascadeSpec((a, b))

    def test_reorders_to_dependency_order(self):
        late = transfer("late", deps={"early"})
        early = transfer("early")
        spec = CascadeSpec((late, early, transfer("other")))
        assert [tx.id for tx in spec.transactions] == ["early", "late", "other"]
        assert LedgerState(1).execute_cascade(spec).blocks_to_complete == 3

    def test_bad_topology(self):
        with pytest.raises(DomainError):
            build_cascade("ring", 5)
        with pytest.raises(DomainError):
            build_cascade("chain", 0)

    @settings(max_examples=60, deadline=None)
    @given(st.sampled_from(["chain", "star", "independent"]), st.integers(1, 10_000), st.integers(1, 2_000))
    def test_blocks_bound(self, topology, count, capacity):
        assert run_cascade(topology, count, capacity).blocks_to_complete == math.ceil(count / capacity)

    @settings(max_examples=40, deadline=None)
    @given(st.data())
    def test_random_dag_bound(self, data):
        count = data.draw(st.integers(1, 300))
        capacity = data.draw(st.integers(1, 50))
        txs = []
        for i in range(count):
            deps = data.draw(st.sets(st.integers(0, i - 1), max_size=3)) if i else set()
            txs.append(transfer(f"d{i}", deps={f"d{j}" for j in deps}))
        order = data.draw(st.permutations(txs))
        outcome = LedgerState(capacity).execute_cascade(CascadeSpec(tuple(order)))
        assert outcome.blocks_to_complete == math.ceil(count / capacity)


def lottery_state(N=10, m=0, capacity=100):
    state = LedgerState(capacity)
    state.open_lottery("lot", LotterySpec(N, m))
    return state


class TestTrumpTicket:
    def test_break_even_purchase(self):
        state = LedgerState(1000)
        state.open_lottery("lot", LotterySpec.reference_instance())
        txs = state.buy_trump_ticket("lot", "me", 583, 0.0)
        state.drain()
        holdings = state.contracts["lot"].holdings("me")
        assert holdings == list(range(1, 584))
        assert len(txs) * 1.0 == 583.0
        assert math.fsum(tx.gas_fee for tx in txs) == 0

    def test_zero_is_noop(self):
        state = lottery_state()
        assert state.buy_trump_ticket("lot", "me", 0) == []
        assert not state.pending

    def test_gas_is_linear(self):
        state = lottery_state()
        txs = state.buy_trump_ticket("lot", "me", 10, 0.01)
        assert math.fsum(tx.gas_fee for tx in txs) == pytest.approx(0.10, abs=1e-15)

    def test_tops_up_missing_combinations(self):
        state = lottery_state(N=6)
        state.buy_trump_ticket("lot", "me", 2)
        state.buy_trump_ticket("lot", "me", 3)
        state.drain()
        assert state.contracts["lot"].holdings("me") == [1, 2, 3, 4, 5]

    def test_not_enough_combinations(self):
        state = lottery_state(N=5)
        state.buy_trump_ticket("lot", "me", 4)
        with pytest.raises(LedgerError):
            state.buy_trump_ticket("lot", "me", 2)
        assert len(state.pending) == 4

    def test_duplicate_ticket_rejected(self):
        state = lottery_state()
        state.submit(Transaction("x", TicketPurchase("lot", "me", 3)))
        with pytest.raises(LedgerError):
            state.submit(Transaction("y", TicketPurchase("lot", "me", 3)))

    def test_closed_contract(self):
        state = lottery_state()
        state.run_draw("lot", 1)
        with pytest.raises(LedgerError):
            state.buy_trump_ticket("lot", "me", 1)


class TestDraw:
    def test_full_coverage_takes_jackpot(self):
        state = lottery_state(N=8)
        state.buy_trump_ticket("lot", "me", 8)
        state.drain()
        drawn = state.run_draw("lot", 5)
        assert drawn.payouts == {"me": Fraction(8)}

    def test_no_holder(self):
        state = lottery_state(N=8)
        drawn = state.run_draw("lot", 5)
        assert drawn.payouts == {}

    def test_deterministic(self):
        picks = set()
        for _ in range(3):
            state = lottery_state(N=1000)
            picks.add(state.run_draw("lot", 42).winning_combination)
        assert len(picks) == 1

    def test_pending_purchases_block_draw(self):
        state = lottery_state()
        state.buy_trump_ticket("lot", "me", 3)
        with pytest.raises(LedgerError):
            state.run_draw("lot", 1)

    def test_double_draw(self):
        state = lottery_state()
        state.run_draw("lot", 1)
        with pytest.raises(LedgerError):
            state.run_draw("lot", 1)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(1, 30), st.integers(0, 60), st.data(), st.integers(0, 2**32))
    def test_conservation(self, N, m, data, seed):
        n = data.draw(st.integers(0, N))
        price = data.draw(st.sampled_from([1.0, 0.1, 2.5, 3.0]))
        state = LedgerState(7)
        state.open_lottery("lot", LotterySpec(N, m, price))
        state.buy_trump_ticket("lot", "me", n)
        state.seed_crowd("lot", m, np.random.default_rng(seed))
        state.drain()
        drawn = state.run_draw("lot", seed)
        if drawn.payouts:
            assert sum(drawn.payouts.values()) == Fraction(price) * (n + m)
        else:
            assert not state.contracts["lot"].tickets.get(drawn.winning_combination)


class TestReplay:
    def build(self, seed=3):
        state = LedgerState(16)
        spec = LotterySpec(40, 25, 2.0)
        state.open_lottery("lot", spec)
        state.buy_trump_ticket("lot", "me", 30, 0.02)
        state.seed_crowd("lot", 25, np.random.default_rng(seed))
        state.execute_cascade(build_cascade("chain", 9, 0.01))
        state.drain()
        return state, {"lot": spec}

    def test_replay_reproduces_state(self):
        state, lotteries = self.build()
        again = LedgerState.replay(state.chain, state.block_capacity, lotteries)
        assert again.snapshot() == state.snapshot()
        assert again.run_draw("lot", 9) == state.run_draw("lot", 9)

    def test_rejects_out_of_order_dependency(self):
        state, lotteries = self.build()
        blocks = list(state.chain)
        target = next(b for b in blocks if any(tx.depends_on for tx in b.transactions))
        blocks[target.height] = type(target)(target.height, tuple(reversed(target.transactions)))
        with pytest.raises(LedgerError):
            LedgerState.replay(blocks, state.block_capacity, lotteries)

    def test_rejects_height_gap(self):
        state, lotteries = self.build()
        with pytest.raises(LedgerError):
            LedgerState.replay(state.chain[1:], state.block_capacity, lotteries)

    def test_dump_format(self):
        state = LedgerState(2)
        for tx_id in ("a", "b", "c"):
            state.submit(transfer(tx_id))
        state.drain()
        assert state.dump() == "0 2 a b\n1 1 c\n"

    def test_same_seed_same_dump(self):
        assert self.build(5)[0].dump() == self.build(5)[0].dump()
        assert self.build(5)[0].snapshot() != self.build(6)[0].snapshot()


class TestLedgerLottery:
    def test_matches_closed_form(self):
        spec = LotterySpec(10, 10)
        result = play_ledger_lottery(spec, 5, 20_000, seed=8, block_capacity=64, gas_per_tx=0.01)
        assert result.conserved
        assert abs(result.z_score()) <= 3
        assert result.friction_cost == 5 * 0.01
        assert result.ticket_cost == 5.0

    def test_reproducible(self):
        spec = LotterySpec(6, 4)
        a = play_ledger_lottery(spec, 3, 500, seed=1)
        b = play_ledger_lottery(spec, 3, 500, seed=1)
        assert a == b

    def test_full_coverage_no_crowd(self):
        result = play_ledger_lottery(LotterySpec(5, 0, 2.0), 5, 50, seed=0)
        assert result.mean_winnings == 10.0
        assert result.std_error == 0
