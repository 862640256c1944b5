"""A single-sequencer ledger hosting smart-contract lotteries and transaction cascades.

There is no consensus, hashing or networking. Transactions wait in a FIFO
pool and :meth:`LedgerState.form_block` packs up to ``block_capacity`` of
them into the next block. A transaction may be packed once every
dependency is on-chain or already placed earlier in the same block, so a
whole chain of dependent contract calls can settle in one block.

Payouts are kept as :class:`fractions.Fraction` so that a split jackpot
adds back up to the ticket revenue exactly.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Union

import numpy as np

from .econ import FrictionModel, LotterySpec, expected_winnings
from .errors import DomainError, LedgerError


@dataclass(frozen=True)
class TicketPurchase:
    contract_id: str
    owner: str
    combination: int


@dataclass(frozen=True)
class ScTrigger:
    contract_id: str


@dataclass(frozen=True)
class Transfer:
    amount: float


TxKind = Union[TicketPurchase, ScTrigger, Transfer]


@dataclass(frozen=True)
class Transaction:
    id: str
    kind: TxKind
    gas_fee: float = 0.0
    depends_on: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "depends_on", frozenset(self.depends_on))
        if self.id in self.depends_on:
            raise LedgerError(f"transaction {self.id} depends on itself")
        if not self.gas_fee >= 0 or math.isinf(self.gas_fee):
            raise LedgerError(f"gas_fee must be a finite non-negative amount, got {self.gas_fee}")


@dataclass(frozen=True)
class Block:
    height: int
    transactions: tuple

    @property
    def tx_ids(self) -> List[str]:
        return [tx.id for tx in self.transactions]


@dataclass
class Drawn:
    winning_combination: int
    payouts: Dict[str, Fraction]


OPEN = "open"


@dataclass
class SmartContractLottery:
    spec: LotterySpec
    tickets: Dict[int, List[str]] = field(default_factory=dict)
    phase: Union[str, Drawn] = OPEN

    @property
    def is_open(self) -> bool:
        return self.phase == OPEN

    @property
    def tickets_sold(self) -> int:
        return sum(len(owners) for owners in self.tickets.values())

    def holdings(self, owner: str) -> List[int]:
        return sorted(c for c, owners in self.tickets.items() if owner in owners)


@dataclass(frozen=True)
class CascadeSpec:
    """Transactions whose dependencies form a DAG.

    Construction rejects cycles and stores the transactions in a
    dependency-respecting order that keeps the given order wherever it can.
    """

    transactions: tuple

    def __post_init__(self):
        txs = tuple(self.transactions)
        ids = [tx.id for tx in txs]
        if len(set(ids)) != len(ids):
            raise LedgerError("cascade contains duplicate transaction ids")
        object.__setattr__(self, "transactions", _stable_topological_order(txs))

    def __len__(self):
        return len(self.transactions)


def _stable_topological_order(txs: tuple) -> tuple:
    index = {tx.id: i for i, tx in enumerate(txs)}
    waiting = [0] * len(txs)
    dependents: Dict[int, List[int]] = {i: [] for i in range(len(txs))}
    for i, tx in enumerate(txs):
        for dep in tx.depends_on:
            if dep in index:
                waiting[i] += 1
                dependents[index[dep]].append(i)
    ready = [i for i, w in enumerate(waiting) if w == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        i = heapq.heappop(ready)
        order.append(txs[i])
        for j in dependents[i]:
            waiting[j] -= 1
            if waiting[j] == 0:
                heapq.heappush(ready, j)
    if len(order) != len(txs):
        raise LedgerError("cascade dependency graph contains a cycle")
    return tuple(order)


@dataclass(frozen=True)
class CascadeOutcome:
    blocks_to_complete: int
    total_gas: float


class LedgerState:
    def __init__(self, block_capacity: int):
        if int(block_capacity) != block_capacity or block_capacity < 1:
            raise LedgerError(f"block_capacity must be a positive integer, got {block_capacity}")
        self.block_capacity = int(block_capacity)
        self.chain: List[Block] = []
        self.pending: deque = deque()
        self.contracts: Dict[str, SmartContractLottery] = {}
        self._known: Dict[str, Transaction] = {}
        self._on_chain: set = set()
        self._claims: set = set()  # (contract, owner, combination), pending or on-chain
        self._counter = 0

    # -- transactions ------------------------------------------------------

    def new_id(self, prefix: str = "tx") -> str:
        while True:
            tx_id = f"{prefix}{self._counter}"
            self._counter += 1
            if tx_id not in self._known:
                return tx_id

    def submit(self, tx: Transaction) -> None:
        if tx.id in self._known:
            raise LedgerError(f"duplicate transaction id {tx.id!r}")
        missing = [d for d in tx.depends_on if d not in self._known]
        if missing:
            raise LedgerError(f"transaction {tx.id!r} depends on unknown ids {sorted(missing)}")
        claim = None
        if isinstance(tx.kind, TicketPurchase):
            claim = self._check_purchase(tx.kind)
        self._known[tx.id] = tx
        self.pending.append(tx)
        if claim:
            self._claims.add(claim)

    def _check_purchase(self, purchase: TicketPurchase) -> tuple:
        contract = self.contracts.get(purchase.contract_id)
        if contract is None:
            raise LedgerError(f"unknown contract {purchase.contract_id!r}")
        if not contract.is_open:
            raise LedgerError(f"contract {purchase.contract_id!r} is not open")
        if not 1 <= purchase.combination <= contract.spec.combinations:
            raise LedgerError(f"combination {purchase.combination} out of range")
        claim = (purchase.contract_id, purchase.owner, purchase.combination)
        if claim in self._claims:
            raise LedgerError(f"{purchase.owner!r} already holds combination {purchase.combination}")
        return claim

    def form_block(self) -> Block:
        """Pack the next block from the pool, FIFO among eligible transactions."""
        selected: List[Transaction] = []
        scheduled: set = set()
        skipped: deque = deque()
        while self.pending and len(selected) < self.block_capacity:
            tx = self.pending.popleft()
            if all(d in self._on_chain or d in scheduled for d in tx.depends_on):
                selected.append(tx)
                scheduled.add(tx.id)
            else:
                skipped.append(tx)
        self.pending.extendleft(reversed(skipped))
        block = Block(len(self.chain), tuple(selected))
        self._append(block)
        return block

    def _append(self, block: Block) -> None:
        for tx in block.transactions:
            self._on_chain.add(tx.id)
            if isinstance(tx.kind, TicketPurchase):
                owners = self.contracts[tx.kind.contract_id].tickets.setdefault(tx.kind.combination, [])
                owners.append(tx.kind.owner)
        self.chain.append(block)

    def drain(self) -> int:
        """Form blocks until the pool is empty; return how many were formed."""
        formed = 0
        while self.pending:
            block = self.form_block()
            formed += 1
            if not block.transactions:
                raise LedgerError("pool contains transactions that can never become eligible")
        return formed

    # -- lotteries ---------------------------------------------------------

    def open_lottery(self, contract_id: str, spec: LotterySpec) -> SmartContractLottery:
        if contract_id in self.contracts:
            raise LedgerError(f"contract {contract_id!r} already exists")
        if not spec.is_parimutuel:
            raise LedgerError("ledger lotteries are parimutuel")
        contract = SmartContractLottery(spec)
        self.contracts[contract_id] = contract
        return contract

    def _open_contract(self, contract_id: str) -> SmartContractLottery:
        contract = self.contracts.get(contract_id)
        if contract is None:
            raise LedgerError(f"unknown contract {contract_id!r}")
        if not contract.is_open:
            raise LedgerError(f"contract {contract_id!r} is not open")
        return contract

    def buy_trump_ticket(self, contract_id: str, owner: str, n: int, gas_per_tx: float = 0.0) -> List[Transaction]:
        """Queue purchases of the ``n`` lowest combinations ``owner`` does not yet hold.

        There is no spoilage on a ledger: every purchase that lands on-chain
        is a valid ticket.
        """
        contract = self._open_contract(contract_id)
        if n < 0:
            raise LedgerError(f"n must be >= 0, got {n}")
        free = (
            c for c in range(1, contract.spec.combinations + 1)
            if (contract_id, owner, c) not in self._claims
        )
        picks = []
        for c in free:
            if len(picks) == n:
                break
            picks.append(c)
        if len(picks) < n:
            raise LedgerError(f"only {len(picks)} uncovered combinations left for {owner!r}, asked for {n}")
        txs = [
            Transaction(self.new_id(), TicketPurchase(contract_id, owner, c), gas_per_tx)
            for c in picks
        ]
        for tx in txs:
            self.submit(tx)
        return txs

    def seed_crowd(self, contract_id: str, m: int, rng: np.random.Generator, gas_per_tx: float = 0.0) -> List[Transaction]:
        """Queue ``m`` crowd tickets drawn uniformly with replacement, one owner per ticket."""
        contract = self._open_contract(contract_id)
        combos = rng.integers(1, contract.spec.combinations + 1, size=m)
        txs = []
        for i, c in enumerate(combos.tolist()):
            tx = Transaction(self.new_id(), TicketPurchase(contract_id, f"crowd-{i}", c), gas_per_tx)
            self.submit(tx)
            txs.append(tx)
        return txs

    def run_draw(self, contract_id: str, seed: int) -> Drawn:
        """Draw the winning combination and split the jackpot among its holders.

        When nobody holds the winning combination the payouts are empty.
        """
        contract = self._open_contract(contract_id)
        if any(isinstance(tx.kind, TicketPurchase) and tx.kind.contract_id == contract_id for tx in self.pending):
            raise LedgerError(f"contract {contract_id!r} still has ticket purchases in the pool")
        rng = np.random.default_rng(seed)
        winning = int(rng.integers(1, contract.spec.combinations + 1))
        holders = contract.tickets.get(winning, [])
        payouts: Dict[str, Fraction] = {}
        if holders:
            jackpot = Fraction(contract.spec.ticket_price) * contract.tickets_sold
            share = jackpot / len(holders)
            for owner in holders:
                payouts[owner] = payouts.get(owner, Fraction(0)) + share
        contract.phase = Drawn(winning, payouts)
        return contract.phase

    # -- cascades ----------------------------------------------------------

    def execute_cascade(self, cascade: CascadeSpec) -> CascadeOutcome:
        for tx in cascade.transactions:
            self.submit(tx)
        blocks = self.drain()
        return CascadeOutcome(blocks, math.fsum(tx.gas_fee for tx in cascade.transactions))

    # -- inspection --------------------------------------------------------

    def dump(self) -> str:
        """One line per block: height, transaction count, transaction ids."""
        lines = []
        for block in self.chain:
            lines.append(" ".join([str(block.height), str(len(block.transactions))] + block.tx_ids))
        return "".join(line + "\n" for line in lines)

    def snapshot(self) -> tuple:
        tickets = {
            cid: (c.phase if not c.is_open else OPEN, {k: tuple(v) for k, v in sorted(c.tickets.items())})
            for cid, c in sorted(self.contracts.items())
        }
        return (self.dump(), tuple(tx.id for tx in self.pending), tickets)

    @classmethod
    def replay(cls, chain: List[Block], block_capacity: int, lotteries: Optional[Dict[str, LotterySpec]] = None) -> "LedgerState":
        """Rebuild a state from genesis, validating every block on the way."""
        state = cls(block_capacity)
        for cid, spec in (lotteries or {}).items():
            state.open_lottery(cid, spec)
        for expected_height, block in enumerate(chain):
            if block.height != expected_height:
                raise LedgerError(f"block height {block.height} where {expected_height} was expected")
            if len(block.transactions) > block_capacity:
                raise LedgerError(f"block {block.height} exceeds capacity {block_capacity}")
            seen: set = set()
            for tx in block.transactions:
                if not all(d in state._on_chain or d in seen for d in tx.depends_on):
                    raise LedgerError(f"transaction {tx.id!r} precedes one of its dependencies")
                state.submit(tx)
                seen.add(tx.id)
            state.pending.clear()
            state._append(block)
        return state


# -- cascade topologies -----------------------------------------------------

TOPOLOGIES = ("chain", "star", "independent")


def build_cascade(topology: str, count: int, gas_per_tx: float = 0.0, prefix: str = "c") -> CascadeSpec:
    """A trigger transaction plus ``count - 1`` others wired as a chain, a star or not at all."""
    if topology not in TOPOLOGIES:
        raise DomainError(f"unknown topology {topology!r}; expected one of {', '.join(TOPOLOGIES)}")
    if int(count) != count or count < 1:
        raise DomainError(f"count must be a positive integer, got {count}")
    ids = [f"{prefix}{i}" for i in range(count)]
    txs = []
    for i, tx_id in enumerate(ids):
        if topology == "chain" and i > 0:
            deps = {ids[i - 1]}
        elif topology == "star" and i > 0:
            deps = {ids[0]}
        else:
            deps = set()
        kind = ScTrigger("cascade") if i == 0 and topology != "independent" else Transfer(0.0)
        txs.append(Transaction(tx_id, kind, gas_per_tx, frozenset(deps)))
    return CascadeSpec(tuple(txs))


def run_cascade(topology: str, count: int, block_capacity: int, gas_per_tx: float = 0.0) -> CascadeOutcome:
    return LedgerState(block_capacity).execute_cascade(build_cascade(topology, count, gas_per_tx))


# -- repeated ledger lotteries ------------------------------------------------


@dataclass(frozen=True)
class LedgerLotteryResult:
    draws: int
    n: int
    mean_winnings: float
    std_error: float
    ticket_cost: float
    friction_cost: float
    analytic_winnings: float
    conserved: bool

    @property
    def mean_gain(self) -> float:
        return self.mean_winnings - self.ticket_cost - self.friction_cost

    @property
    def analytic_gain(self) -> float:
        return self.analytic_winnings - self.ticket_cost - self.friction_cost

    def z_score(self) -> float:
        if self.std_error == 0:
            return 0.0
        return (self.mean_winnings - self.analytic_winnings) / self.std_error


PLAYER = "player"


def play_ledger_lottery(
    spec: LotterySpec,
    n: int,
    draws: int,
    seed: int,
    block_capacity: int = 500,
    gas_per_tx: float = 0.0,
) -> LedgerLotteryResult:
    """Run ``draws`` independent on-ledger lotteries with a Trump-Ticket player.

    Each round opens a fresh contract, queues the player's ``n`` purchases
    and ``m`` random crowd tickets, settles them in blocks and draws. Round
    ``i`` takes its randomness from ``SeedSequence(seed, spawn_key=(i,))``.
    """
    if draws < 1:
        raise DomainError(f"draws must be >= 1, got {draws}")
    winnings = np.empty(draws)
    friction = None
    conserved = True
    for i in range(draws):
        seq = np.random.SeedSequence(seed, spawn_key=(i,))
        crowd_seq, draw_seq = seq.spawn(2)
        state = LedgerState(block_capacity)
        state.open_lottery("lottery", spec)
        mine = state.buy_trump_ticket("lottery", PLAYER, n, gas_per_tx)
        state.seed_crowd("lottery", spec.crowd_tickets, np.random.default_rng(crowd_seq))
        state.drain()
        outcome = state.run_draw("lottery", int(draw_seq.generate_state(1, np.uint64)[0]))
        contract = state.contracts["lottery"]
        if outcome.payouts and sum(outcome.payouts.values()) != Fraction(spec.ticket_price) * contract.tickets_sold:
            conserved = False
        winnings[i] = float(outcome.payouts.get(PLAYER, 0))
        cost = math.fsum(tx.gas_fee for tx in mine)
        if friction is None:
            friction = cost
        elif cost != friction:
            raise AssertionError("player friction differs between identical rounds")
    std_error = float(winnings.std(ddof=1) / math.sqrt(draws)) if draws > 1 else 0.0
    return LedgerLotteryResult(
        draws=draws,
        n=n,
        mean_winnings=float(winnings.mean()),
        std_error=std_error,
        friction_cost=friction if friction is not None else 0.0,
        analytic_winnings=expected_winnings(n, spec, FrictionModel()),
        ticket_cost=n * spec.ticket_price,
        conserved=conserved,
    )
