"""Mining economics: success probabilities, profit, break-even, fleets.

The objective is the damped, costed Grover success curve

    profit(t) = R * exp(-lambda*t) * sin^2(2*r_q*t*sqrt(T/2^n)) - C*t

which is multimodal in t (decaying sin^2 lobes), so the optimizer grids
each lobe coarsely and refines every local maximum by golden section.
All money is in abstract fiat units; the CLI layer converts BTC rewards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Tuple

import numpy as np

from qbtc.grover_math import TargetRatio, make_target_ratio

LINEAR = "linear"
EXACT = "exact"

_GRID_POINTS_PER_LOBE = 64
_MAX_LOBES = 64
_SURVIVAL_CUTOFF = 20.0  # e^-20 ~ 2e-9: later lobes never pay
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class NeverProfitableError(RuntimeError):
    """No quantum rate below the search ceiling yields nonnegative profit."""


@dataclass(frozen=True)
class EconParams:
    """All symbols of the profitability model.

    target / space_bits: the mining target T inside 2^n
    classical_rate: classical hashes per second (r)
    quantum_rate: Grover iterations per second (r_q)
    reward: block reward in fiat units (R)
    cost_rate: quantum machine cost in fiat units per second (C)
    block_rate: network block arrival rate in 1/s (lambda, default 1/600)
    """

    target: int
    space_bits: int = 256
    classical_rate: float = 0.0
    quantum_rate: float = 0.0
    reward: float = 0.0
    cost_rate: float = 0.0
    block_rate: float = 1.0 / 600.0

    def __post_init__(self):
        # Validates target bounds as a side effect.
        make_target_ratio(self.target, self.space_bits)
        for name in ("classical_rate", "quantum_rate", "reward", "cost_rate"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.block_rate <= 0:
            raise ValueError("block_rate must be positive")

    @property
    def ratio(self) -> TargetRatio:
        return make_target_ratio(self.target, self.space_bits)

    @property
    def phase_rate(self) -> float:
        """a = 2 * r_q * sqrt(T/2^n): radians of Grover phase per second."""
        return 2.0 * self.quantum_rate * self.ratio.sqrt_ratio


def classical_success_prob(params: EconParams, t: float, mode: str = LINEAR) -> float:
    """Probability a classical miner at rate r finds a block within t seconds.

    LINEAR is the textbook T*r*t/2^n clamped to 1; EXACT is
    1 - (1 - T/2^n)^(r*t) evaluated stably. LINEAR >= EXACT always.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    p_hash = params.ratio.ratio
    guesses = params.classical_rate * t
    if mode == LINEAR:
        return min(1.0, p_hash * guesses)
    if mode == EXACT:
        if p_hash >= 1.0:
            return 1.0 if guesses > 0 else 0.0
        return -math.expm1(guesses * math.log1p(-p_hash))
    raise ValueError(f"unknown mode {mode!r}")


def survival_prob(t: float, block_rate: float) -> float:
    """exp(-lambda*t): chance no network block lands during a run of length t."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    return math.exp(-block_rate * t)


def quantum_profit(params: EconParams, t: float) -> float:
    """R * exp(-lambda*t) * sin^2(a*t) - C*t for a single measurement at time t."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0.0:
        return 0.0
    phase = params.phase_rate * t
    return (
        params.reward * math.exp(-params.block_rate * t) * math.sin(phase) ** 2
        - params.cost_rate * t
    )


def _profit_vec(params: EconParams, ts: np.ndarray) -> np.ndarray:
    return (
        params.reward
        * np.exp(-params.block_rate * ts)
        * np.sin(params.phase_rate * ts) ** 2
        - params.cost_rate * ts
    )


def _horizon(params: EconParams) -> float:
    a = params.phase_rate
    return min(_MAX_LOBES * math.pi / a, _SURVIVAL_CUTOFF / params.block_rate)


def _golden_refine(params: EconParams, lo: np.ndarray, hi: np.ndarray,
                   rel_width: float = 1e-12) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorized golden-section maximization on a batch of brackets."""
    a = lo.astype(float).copy()
    b = hi.astype(float).copy()
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc = _profit_vec(params, c)
    fd = _profit_vec(params, d)
    scale = np.maximum(1.0, np.abs(b))
    while np.any(b - a > rel_width * scale):
        left = fc >= fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        c_new = b - _GOLDEN * (b - a)
        d_new = a + _GOLDEN * (b - a)
        fc_new = np.where(left, _profit_vec(params, c_new), fd)
        fd_new = np.where(left, fc, _profit_vec(params, d_new))
        # Recompute both where widths collapsed to avoid stale pairings.
        c, d, fc, fd = c_new, d_new, fc_new, fd_new
    mid = 0.5 * (a + b)
    return mid, _profit_vec(params, mid)


def max_profit(params: EconParams) -> Tuple[float, float]:
    """(t_best, profit_best) over t in (0, horizon]; profit may be negative.

    Coarse grid of 64 points per sin^2 lobe, then golden-section
    refinement of every local grid maximum to relative width 1e-12.
    """
    if params.quantum_rate <= 0 or params.phase_rate <= 0:
        return 0.0, 0.0
    t_max = _horizon(params)
    # 64 points per lobe, but never fewer than 2048 over the horizon: when
    # 20/lambda is far shorter than a lobe, the damping scale still needs
    # resolving.
    step = min((math.pi / params.phase_rate) / _GRID_POINTS_PER_LOBE,
               t_max / 2048.0)
    n = max(2, int(math.ceil(t_max / step)))
    ts = np.linspace(0.0, t_max, n + 1)[1:]  # exclude t = 0
    vals = _profit_vec(params, ts)
    interior = np.zeros(ts.size, dtype=bool)
    interior[1:-1] = (vals[1:-1] >= vals[:-2]) & (vals[1:-1] >= vals[2:])
    idx = np.flatnonzero(interior)
    # Always refine around the best sample, and keep the raw endpoints.
    best = int(np.argmax(vals))
    idx = np.unique(np.append(idx, best))
    lo = ts[np.maximum(idx - 1, 0)]
    hi = ts[np.minimum(idx + 1, ts.size - 1)]
    lo = np.where(idx == 0, max(ts[0] * 0.5, 0.0), lo)
    t_ref, p_ref = _golden_refine(params, lo, hi)
    cand_t = np.append(t_ref, ts[[0, -1, best]])
    cand_p = np.append(p_ref, vals[[0, -1, best]])
    j = int(np.argmax(cand_p))
    return float(cand_t[j]), float(cand_p[j])


def optimal_measurement_time(params: EconParams) -> Tuple[float, float]:
    """(t*, profit*) maximizing quantum_profit; (0, 0) when never profitable."""
    t_best, p_best = max_profit(params)
    if p_best <= 0.0:
        return 0.0, 0.0
    return t_best, p_best


def breakeven_quantum_rate(params: EconParams, ceiling: float = 1e18,
                           rel_tol: float = 1e-6) -> float:
    """Smallest r_q with nonnegative optimally-timed profit, by bisection.

    Optimized profit is nondecreasing in r_q (a faster machine can always
    replay a slower machine's phase at smaller t, gaining survival and
    saving cost), which justifies the sign bisection.
    """
    if params.reward <= 0:
        raise ValueError("breakeven requires a positive reward")
    if params.cost_rate < 0:
        raise ValueError("cost_rate must be nonnegative")
    if params.cost_rate == 0:
        return 0.0

    def profit_at(rq: float) -> float:
        return max_profit(replace(params, quantum_rate=rq))[1]

    hi = 1.0
    while profit_at(hi) < 0:
        hi *= 2.0
        if hi > ceiling:
            raise NeverProfitableError(
                f"no profitable quantum rate found below {ceiling:g} iterations/s"
            )
    lo = hi / 2.0
    while lo > 1e-300 and profit_at(lo) >= 0:
        lo /= 2.0
    if profit_at(lo) >= 0:
        return lo
    # Tighter than rel_tol so that profit just below the returned rate is
    # reliably negative.
    width_goal = 0.1 * rel_tol
    for _ in range(300):
        if hi - lo <= width_goal * hi and profit_at(hi) <= 1e-3 * params.reward:
            break
        mid = 0.5 * (lo + hi)
        if profit_at(mid) >= 0:
            hi = mid
        else:
            lo = mid
    return hi


def fleet_success(p_single: float, machines: int) -> float:
    """1 - (1 - p)^k for k independent machines, stable for tiny p."""
    if not 0.0 <= p_single <= 1.0:
        raise ValueError("p_single must be a probability")
    if machines < 0:
        raise ValueError("machines must be nonnegative")
    if machines == 0:
        return 0.0
    if p_single == 1.0:
        return 1.0
    return -math.expm1(machines * math.log1p(-p_single))


def machines_to_match(params: EconParams, r_q_per_machine: float,
                      reference_quantum_rate: float | None = None,
                      reference_classical_rate: float | None = None) -> int:
    """Smallest fleet size matching a reference miner's success probability.

    Both sides are evaluated over the same window: the fleet machine's
    own optimal measurement time t*. The reference is either a single
    quantum machine at reference_quantum_rate or a classical miner at
    reference_classical_rate (linear model). Exactly one must be given.
    """
    if r_q_per_machine <= 0:
        raise ValueError("r_q_per_machine must be positive")
    if (reference_quantum_rate is None) == (reference_classical_rate is None):
        raise ValueError("give exactly one of the two reference rates")

    machine = replace(params, quantum_rate=r_q_per_machine)
    t_star, _ = optimal_measurement_time(machine)
    if t_star == 0.0:
        # Unprofitable at this cost: time the run as if machine time were free.
        t_star, _ = optimal_measurement_time(replace(machine, cost_rate=0.0))
    if t_star == 0.0:
        t_star = (math.pi / 2.0) / machine.phase_rate
    sqrt_ratio = params.ratio.sqrt_ratio
    p_single = math.sin(2.0 * r_q_per_machine * t_star * sqrt_ratio) ** 2

    if reference_quantum_rate is not None:
        p_ref = math.sin(2.0 * reference_quantum_rate * t_star * sqrt_ratio) ** 2
    else:
        p_ref = min(1.0, params.ratio.ratio * reference_classical_rate * t_star)

    if p_ref <= 0.0:
        return 0
    if p_single >= p_ref:
        return 1
    if p_single <= 0.0 or p_single >= 1.0:
        raise ValueError("degenerate per-machine success probability")
    k = math.ceil(math.log1p(-p_ref) / math.log1p(-p_single))
    while fleet_success(p_single, k) < p_ref:
        k += 1
    return k


def advantage_cap(ratio: TargetRatio) -> float:
    """sqrt(2^n / T): the hard ceiling on Grover's speedup over guessing."""
    return math.pow(2.0, -0.5 * ratio.log2_ratio)
