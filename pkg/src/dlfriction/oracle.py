"""Independent checks of the closed-form lottery economics.

Two routes that share nothing with :mod:`dlfriction.econ` beyond the
model definition:

* :func:`exact_expected_winnings` sums the crowd-winner distribution term
  by term instead of using the closed-form reciprocal moment.
* :func:`estimate` draws lotteries at random.

Random streams come from NumPy's PCG64 generator. Trials are cut into
fixed-size chunks; chunk ``i`` is seeded with ``SeedSequence(seed,
spawn_key=(i,))`` and chunk statistics are merged in chunk order, so the
result depends only on ``(seed, trials, chunk_size)`` and not on how many
worker threads ran the chunks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import binom

from .econ import FrictionModel, LotterySpec, expected_winnings, valid_ticket_rate
from .errors import CapabilityError, DomainError, FormatError

CHUNK_SIZE = 1 << 16
MAX_EXACT_CROWD = 10_000
_SEED_LIMIT = 2**64


@dataclass(frozen=True)
class OracleConfig:
    spec: LotterySpec
    friction: FrictionModel
    n: int
    trials: int
    seed: int

    def __post_init__(self):
        if self.trials < 1:
            raise DomainError(f"trials must be >= 1, got {self.trials}")
        if not 0 <= self.n <= self.spec.combinations:
            raise DomainError(f"n must lie in [0, {self.spec.combinations}], got {self.n}")
        if not 0 <= self.seed < _SEED_LIMIT:
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if not self.spec.is_parimutuel:
            raise FormatError("the Monte Carlo oracle models parimutuel lotteries only")


@dataclass(frozen=True)
class OracleResult:
    mean_winnings: float
    mean_gain: float
    std_error: float
    win_rate: float
    trials: int
    seed: int

    def z_score(self, analytic: float) -> float:
        """(mean - analytic) / std_error, defined as 0 for a degenerate sample."""
        if self.std_error == 0:
            return 0.0
        return (self.mean_winnings - analytic) / self.std_error


def simulate_draw(rng: np.random.Generator, n: int, spec: LotterySpec, friction: FrictionModel) -> float:
    """One sample of the player's winnings, simulating every ticket.

    The player holds combinations ``0..n-1``. Which combinations she holds
    does not matter because the winning draw is uniform.
    """
    N, m = spec.combinations, spec.crowd_tickets
    v = valid_ticket_rate(n, spec, friction)
    valid = rng.random(n) < v
    crowd = rng.integers(0, N, size=m)
    winning = int(rng.integers(0, N))
    if winning >= n or not valid[winning]:
        return 0.0
    others = int(np.count_nonzero(crowd == winning))
    return spec.ticket_price * (n + m) / (1 + others)


@dataclass(frozen=True)
class _ChunkStats:
    count: int
    mean: float
    m2: float
    wins: int


def _chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def _run_chunk(config: OracleConfig, index: int, size: int) -> _ChunkStats:
    spec = config.spec
    N, m, n = spec.combinations, spec.crowd_tickets, config.n
    rng = _chunk_rng(config.seed, index)
    # Only the winning combination matters, so the crowd enters through the
    # number of crowd tickets on it, which is Binomial(m, 1/N).
    winning = rng.integers(0, N, size=size)
    valid = rng.random(size) < valid_ticket_rate(n, spec, config.friction)
    others = rng.binomial(m, 1.0 / N, size=size)
    hit = (winning < n) & valid
    winnings = np.where(hit, spec.ticket_price * (n + m) / (1.0 + others), 0.0)
    mean = float(winnings.mean())
    m2 = float(np.square(winnings - mean).sum())
    return _ChunkStats(size, mean, m2, int(np.count_nonzero(hit)))


def _merge(a: _ChunkStats, b: _ChunkStats) -> _ChunkStats:
    count = a.count + b.count
    delta = b.mean - a.mean
    mean = a.mean + delta * b.count / count
    m2 = a.m2 + b.m2 + delta * delta * a.count * b.count / count
    return _ChunkStats(count, mean, m2, a.wins + b.wins)


def estimate(config: OracleConfig, workers: int = 1, chunk_size: int = CHUNK_SIZE) -> OracleResult:
    """Monte Carlo estimate of the player's winnings and gain."""
    sizes = [chunk_size] * (config.trials // chunk_size)
    if config.trials % chunk_size:
        sizes.append(config.trials % chunk_size)
    jobs = list(enumerate(sizes))
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda job: _run_chunk(config, *job), jobs))
    else:
        chunks = [_run_chunk(config, i, size) for i, size in jobs]

    total = chunks[0]
    for chunk in chunks[1:]:
        total = _merge(total, chunk)

    if total.count > 1:
        std_error = math.sqrt(total.m2 / (total.count - 1)) / math.sqrt(total.count)
    else:
        std_error = 0.0
    cost = config.n * config.spec.ticket_price + config.friction.logistics_cost
    return OracleResult(
        mean_winnings=total.mean,
        mean_gain=total.mean - cost,
        std_error=std_error,
        win_rate=total.wins / total.count,
        trials=config.trials,
        seed=config.seed,
    )


def exact_expected_winnings(n: int, spec: LotterySpec, friction: FrictionModel) -> float:
    """Expected winnings by summing over every possible crowd-winner count."""
    if not spec.is_parimutuel:
        raise FormatError("exact_expected_winnings applies to parimutuel lotteries only")
    m, N = spec.crowd_tickets, spec.combinations
    if m > MAX_EXACT_CROWD:
        raise CapabilityError(
            f"crowd of {m} exceeds {MAX_EXACT_CROWD} for term-by-term summation; "
            "use econ.expected_winnings"
        )
    k = np.arange(m + 1)
    share = math.fsum(binom.pmf(k, m, 1.0 / N) / (1.0 + k))
    return valid_ticket_rate(n, spec, friction) * n / N * spec.ticket_price * (n + m) * share


def analytic_winnings(config: OracleConfig) -> float:
    return expected_winnings(config.n, config.spec, config.friction)
