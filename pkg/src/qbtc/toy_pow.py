"""Desk-scale proof-of-work stand-in and dense statevector Grover oracle.

A 16-bit mixing hash plays the role of SHA-256: the puzzle is to find an
input whose hash falls below a threshold tau. The marked set can be
brute-forced exactly, and a dense statevector simulation of Grover's
algorithm over at most 2^16 amplitudes provides an independent check of
every closed-form probability in grover_math.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from qbtc.grover_math import grover_angle

_MASK16 = 0xFFFF

# Odd 16-bit multipliers; every pipeline stage is invertible mod 2^16,
# so the hash is a bijection and h(0) = 0 exactly (no additive constants).
_MUL_A = 0x2545
_MUL_B = 0x9E35

MAX_SPACE_BITS = 16


def toy_hash16(x: int) -> int:
    """16-bit xorshift-multiply mixer; all arithmetic mod 2^16."""
    x &= _MASK16
    x ^= x >> 7
    x = (x * _MUL_A) & _MASK16
    x ^= x >> 9
    x = (x * _MUL_B) & _MASK16
    x ^= x >> 8
    return x


@dataclass(frozen=True)
class ToyPuzzle:
    """Find x in [0, 2^space_bits) with toy_hash16(x) < tau."""

    space_bits: int
    tau: int

    def __post_init__(self):
        if not 1 <= self.space_bits <= MAX_SPACE_BITS:
            raise ValueError(
                f"space_bits must be in [1, {MAX_SPACE_BITS}], got {self.space_bits}"
            )
        if not 0 <= self.tau <= (1 << 16):
            raise ValueError(f"tau must be in [0, 2^16], got {self.tau}")

    @property
    def space_size(self) -> int:
        return 1 << self.space_bits


def _hash_table(space_bits: int) -> np.ndarray:
    xs = np.arange(1 << space_bits, dtype=np.uint32)
    h = xs.copy()
    h ^= h >> 7
    h = (h * _MUL_A) & _MASK16
    h ^= h >> 9
    h = (h * _MUL_B) & _MASK16
    h ^= h >> 8
    return h


def marked_mask(puzzle: ToyPuzzle) -> np.ndarray:
    """Boolean mask over [0, 2^n): True where the hash clears the threshold."""
    return _hash_table(puzzle.space_bits) < puzzle.tau


def marked_count(puzzle: ToyPuzzle) -> int:
    """Exact brute-force count of inputs hashing below tau."""
    return int(marked_mask(puzzle).sum())


def tau_for_marked_count(space_bits: int, m: int) -> int:
    """Smallest tau whose puzzle has exactly m marked inputs.

    Well-defined because the hash is a bijection (no tied hash values).
    """
    if not 0 <= m <= (1 << space_bits):
        raise ValueError("m out of range")
    if m == 0:
        return 0
    hashes = np.sort(_hash_table(space_bits))
    return int(hashes[m - 1]) + 1


def uniform_state(space_bits: int) -> np.ndarray:
    n = 1 << space_bits
    return np.full(n, 1.0 / math.sqrt(n), dtype=np.complex128)


def diffusion(amps: np.ndarray) -> np.ndarray:
    """Inversion about the mean: a -> 2*mean - a. An involution."""
    return 2.0 * amps.mean() - amps


def grover_step(amps: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """One Grover iteration: phase-flip marked states, then invert about the mean."""
    flipped = np.where(mask, -amps, amps)
    return diffusion(flipped)


def grover_probabilities(puzzle: ToyPuzzle, k_max: int) -> np.ndarray:
    """Marked-set probability mass after 0..k_max iterations (length k_max+1)."""
    if puzzle.space_bits > MAX_SPACE_BITS:
        raise ValueError("statevector simulation limited to 16 bits")
    if k_max > 10**4:
        raise ValueError("iteration count limited to 1e4")
    mask = marked_mask(puzzle)
    amps = uniform_state(puzzle.space_bits)
    probs = np.empty(k_max + 1)
    probs[0] = float((np.abs(amps[mask]) ** 2).sum())
    for k in range(1, k_max + 1):
        amps = grover_step(amps, mask)
        probs[k] = float((np.abs(amps[mask]) ** 2).sum())
    return probs


def grover_simulate(puzzle: ToyPuzzle, k: int) -> float:
    """Success probability of k-iteration Grover on the puzzle's marked set."""
    return float(grover_probabilities(puzzle, k)[k])


def final_distribution(puzzle: ToyPuzzle, k: int) -> np.ndarray:
    """Measurement distribution over basis states after k iterations."""
    mask = marked_mask(puzzle)
    amps = uniform_state(puzzle.space_bits)
    for _ in range(k):
        amps = grover_step(amps, mask)
    probs = np.abs(amps) ** 2
    return probs / probs.sum()


def sample_measurement(puzzle: ToyPuzzle, k: int, seed: int) -> int:
    """Draw one basis state from the post-Grover distribution, deterministically.

    Uses the same PCG64/SeedSequence contract as race_sim, so identical
    seeds always reproduce identical outcomes.
    """
    probs = final_distribution(puzzle, k)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    return int(rng.choice(probs.size, p=probs))


def expected_success_prob(puzzle: ToyPuzzle, k: int) -> float:
    """Closed-form sin^2((2k+1)*theta) for this puzzle's exact marked count."""
    m = marked_count(puzzle)
    if m == 0:
        return 0.0
    theta = grover_angle(m, puzzle.space_size)
    return math.sin((2 * k + 1) * theta) ** 2
