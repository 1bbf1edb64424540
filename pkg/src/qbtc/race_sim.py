"""Monte Carlo race between a quantum miner and a Poisson classical network.

Each attempt: the quantum miner starts a Grover run of length t*. A
network block arrives after an exponential delay; if it lands before t*,
the miner aborts and restarts (paying for the interrupted run). If not,
the miner measures and wins with probability sin^2(a*t*). The empirical
win rate per attempt must agree with exp(-lambda*t*)*sin^2(a*t*).

PRNG contract: numpy PCG64 seeded through SeedSequence; replica i uses
SeedSequence(master_seed, spawn_key=(i,)), so results are bit-identical
for a given (config, master_seed) no matter how replicas are scheduled.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from qbtc.econ import EconParams
from qbtc.grover_math import make_target_ratio


@dataclass(frozen=True)
class RaceConfig:
    econ: EconParams
    measure_at: float
    horizon_blocks: int = 1000
    replicas: int = 1
    master_seed: int = 0
    retarget: bool = False
    retarget_interval_blocks: int = 2016
    # Strategy flag: on interruption, measure at the truncated phase
    # instead of discarding the run.
    measure_on_interrupt: bool = False

    def __post_init__(self):
        if self.measure_at <= 0:
            raise ValueError("measure_at must be positive")
        if self.horizon_blocks < 1:
            raise ValueError("horizon_blocks must be >= 1")
        if self.replicas < 1:
            raise ValueError("replicas must be >= 1")
        if self.retarget_interval_blocks < 1:
            raise ValueError("retarget_interval_blocks must be >= 1")


@dataclass
class RaceStats:
    quantum_blocks_won: int
    network_blocks: int
    attempts: int
    quantum_win_rate: float
    win_rate_stderr: float
    revenue: float
    quantum_runtime_cost: float
    total_time_s: float
    mean_interval_s: float
    replica_seeds: list = field(default_factory=list)

    @property
    def total_blocks(self) -> int:
        return self.quantum_blocks_won + self.network_blocks

    def to_dict(self) -> dict:
        return {
            "quantum_blocks_won": self.quantum_blocks_won,
            "network_blocks": self.network_blocks,
            "attempts": self.attempts,
            "quantum_win_rate": self.quantum_win_rate,
            "win_rate_stderr": self.win_rate_stderr,
            "revenue_fiat": self.revenue,
            "quantum_runtime_cost_fiat": self.quantum_runtime_cost,
            "total_time_s": self.total_time_s,
            "mean_interval_s": self.mean_interval_s,
            "replica_seeds": self.replica_seeds,
        }


def analytic_win_rate(econ: EconParams, t_star: float) -> float:
    """Per-attempt probability the quantum miner banks a block first."""
    if t_star <= 0:
        raise ValueError("t_star must be positive")
    phase = econ.phase_rate * t_star
    return math.exp(-econ.block_rate * t_star) * math.sin(phase) ** 2


def retarget_step(target: int, observed_mean_interval: float,
                  desired: float = 600.0) -> int:
    """Bitcoin-style difficulty adjustment with the 4x clamp, in exact arithmetic."""
    if observed_mean_interval <= 0:
        raise ValueError("observed_mean_interval must be positive")
    scaled = int(target * Fraction(observed_mean_interval) / Fraction(desired))
    clamped = min(max(scaled, target // 4), target * 4)
    return max(1, clamped)


def _replica_seed(master_seed: int, replica_index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(master_seed, spawn_key=(replica_index,))


def _network_rate(config: RaceConfig, target: int) -> float:
    if not config.retarget:
        return config.econ.block_rate
    ratio = make_target_ratio(target, config.econ.space_bits)
    return config.econ.classical_rate * ratio.ratio


def _run_replica(config: RaceConfig, replica_index: int, trace: list | None = None):
    econ = config.econ
    rng = np.random.Generator(np.random.PCG64(
        _replica_seed(config.master_seed, replica_index)))
    t_star = config.measure_at
    target = econ.target

    def phase_rate_for(tgt: int) -> float:
        return 2.0 * econ.quantum_rate * make_target_ratio(tgt, econ.space_bits).sqrt_ratio

    a = phase_rate_for(target)
    lam = _network_rate(config, target)
    if lam <= 0:
        raise ValueError("network block rate must be positive")

    q_wins = 0
    net_wins = 0
    attempts = 0
    cost = 0.0
    total_time = 0.0
    period_time = 0.0
    period_blocks = 0

    for block_index in range(config.horizon_blocks):
        interval = 0.0
        while True:
            attempts += 1
            delta = rng.exponential(1.0 / lam)
            if delta < t_star:
                cost += econ.cost_rate * delta
                interval += delta
                if (config.measure_on_interrupt
                        and rng.random() < math.sin(a * delta) ** 2):
                    q_wins += 1
                    winner = "quantum"
                else:
                    net_wins += 1
                    winner = "network"
                break
            cost += econ.cost_rate * t_star
            interval += t_star
            if rng.random() < math.sin(a * t_star) ** 2:
                q_wins += 1
                winner = "quantum"
                break
        total_time += interval
        period_time += interval
        period_blocks += 1
        if trace is not None:
            trace.append((block_index, winner, interval, math.log2(target)))
        if config.retarget and period_blocks == config.retarget_interval_blocks:
            target = retarget_step(target, period_time / period_blocks)
            a = phase_rate_for(target)
            lam = _network_rate(config, target)
            period_time = 0.0
            period_blocks = 0

    return q_wins, net_wins, attempts, cost, total_time


def run_race(config: RaceConfig, workers: int = 1,
             trace_path: str | None = None) -> RaceStats:
    """Simulate the race; deterministic for a given (config, master_seed).

    Replicas are independent streams; with workers > 1 they run in a
    process pool, and aggregation in replica order keeps the result
    bit-identical to a serial run.
    """
    trace: list | None = [] if trace_path else None
    if workers > 1 and trace is None:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_replica, [config] * config.replicas,
                                    range(config.replicas)))
    else:
        results = [_run_replica(config, i, trace) for i in range(config.replicas)]

    q_wins = sum(r[0] for r in results)
    net_wins = sum(r[1] for r in results)
    attempts = sum(r[2] for r in results)
    cost = sum(r[3] for r in results)
    total_time = sum(r[4] for r in results)
    blocks = q_wins + net_wins

    p_hat = q_wins / attempts if attempts else 0.0
    stderr = math.sqrt(p_hat * (1.0 - p_hat) / attempts) if attempts else 0.0
    # SeedSequence(master_seed, spawn_key=(i,)) — recorded as (entropy, spawn_key).
    seeds = [[config.master_seed, i] for i in range(config.replicas)]

    if trace_path and trace is not None:
        with open(trace_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["block_index", "winner", "interval_s", "target_log2"])
            for row in trace:
                writer.writerow([row[0], row[1], f"{row[2]:.6f}", f"{row[3]:.6f}"])

    return RaceStats(
        quantum_blocks_won=q_wins,
        network_blocks=net_wins,
        attempts=attempts,
        quantum_win_rate=p_hat,
        win_rate_stderr=stderr,
        revenue=q_wins * config.econ.reward,
        quantum_runtime_cost=cost,
        total_time_s=total_time,
        mean_interval_s=total_time / blocks if blocks else 0.0,
        replica_seeds=seeds,
    )
