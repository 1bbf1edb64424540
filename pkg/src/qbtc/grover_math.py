"""Closed-form Grover success probabilities and target-ratio arithmetic.

Two formulas live here: the exact amplitude-amplification success
probability sin^2((2k+1)*theta) with theta = asin(sqrt(M/N)) (Boyer,
Brassard, Hoyer, Tapp 1998), and the small-angle mining approximation
sin^2(2*r_q*t*sqrt(T/2^n)) used throughout the profitability model.
Target ratios T/2^n are carried in log2 space so that 256-bit targets
never go through a big-integer-to-float division.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Below this marked fraction, asin(sqrt(M/N)) is replaced by the series
# sqrt(M/N)*(1 + M/(6N)); the two agree to well past double precision
# at the switch point.
_ANGLE_SERIES_CUTOFF = 1e-12


@dataclass(frozen=True)
class GroverInstance:
    """A Grover search problem: N = 2^space_bits states, M marked, k iterations."""

    space_bits: int
    marked_count: int
    iterations: int

    def __post_init__(self):
        if not 1 <= self.space_bits <= 256:
            raise ValueError(f"space_bits must be in [1, 256], got {self.space_bits}")
        if self.marked_count < 0:
            raise ValueError("marked_count must be nonnegative")
        if self.marked_count > (1 << self.space_bits):
            raise ValueError(
                f"marked_count {self.marked_count} exceeds space size 2^{self.space_bits}"
            )
        if self.iterations < 0:
            raise ValueError("iterations must be nonnegative")

    @property
    def space_size(self) -> int:
        return 1 << self.space_bits


@dataclass(frozen=True)
class TargetRatio:
    """A mining target T inside a 2^space_bits search space, with log2(T/2^n).

    The ratio itself (T/2^256 ~ 7.7e-66 at real difficulty) is only ever
    materialized through exp2(log2_ratio), never by dividing floats.
    """

    target: int
    space_bits: int
    log2_ratio: float

    @property
    def ratio(self) -> float:
        return math.pow(2.0, self.log2_ratio)

    @property
    def sqrt_ratio(self) -> float:
        return math.pow(2.0, 0.5 * self.log2_ratio)


def make_target_ratio(target: int, space_bits: int) -> TargetRatio:
    """Build a TargetRatio from a big-integer target, validating 0 < T <= 2^n."""
    if space_bits < 1:
        raise ValueError(f"space_bits must be positive, got {space_bits}")
    if target <= 0:
        raise ValueError("target must be a positive integer")
    if target > (1 << space_bits):
        raise ValueError(f"target exceeds 2^{space_bits}")
    # math.log2 handles arbitrary-size ints exactly up to float rounding.
    log2_ratio = math.log2(target) - space_bits
    return TargetRatio(target=target, space_bits=space_bits, log2_ratio=log2_ratio)


def grover_angle(marked_count: int, space_size: int) -> float:
    """theta = asin(sqrt(M/N)), with a series fallback at extreme ratios."""
    if marked_count < 0 or marked_count > space_size:
        raise ValueError("marked_count must lie in [0, space_size]")
    if marked_count == 0:
        return 0.0
    frac = marked_count / space_size
    if frac < _ANGLE_SERIES_CUTOFF:
        root = math.sqrt(frac)
        return root * (1.0 + frac / 6.0)
    return math.asin(math.sqrt(frac))


def exact_success_prob(inst: GroverInstance) -> float:
    """sin^2((2k+1)*theta): probability of measuring a marked state after k iterations."""
    n = inst.space_size
    m = inst.marked_count
    if m == 0:
        return 0.0
    if m == n:
        return 1.0
    theta = grover_angle(m, n)
    return math.sin((2 * inst.iterations + 1) * theta) ** 2


def paper_success_prob(r_q: float, t: float, ratio: TargetRatio) -> float:
    """Small-angle mining success sin^2(2*r_q*t*sqrt(T/2^n)) after time t seconds."""
    if r_q < 0:
        raise ValueError("r_q must be nonnegative")
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0.0 or r_q == 0.0:
        return 0.0
    phase = 2.0 * r_q * t * ratio.sqrt_ratio
    return math.sin(phase) ** 2


def optimal_iterations(space_bits: int, marked_count: int) -> int:
    """k* = floor(pi / (4*theta)), the cheapest near-optimal iteration count."""
    if marked_count == 0:
        raise ValueError("optimal_iterations undefined for marked_count = 0")
    n = 1 << space_bits
    if marked_count > n:
        raise ValueError(f"marked_count {marked_count} exceeds 2^{space_bits}")
    if marked_count == n:
        return 0
    theta = grover_angle(marked_count, n)
    return math.floor(math.pi / (4.0 * theta))
