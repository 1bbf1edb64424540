import math

import numpy as np
import pytest

from qbtc.grover_math import GroverInstance, exact_success_prob, optimal_iterations
from qbtc.toy_pow import (
    ToyPuzzle,
    diffusion,
    grover_probabilities,
    grover_simulate,
    grover_step,
    marked_count,
    marked_mask,
    sample_measurement,
    tau_for_marked_count,
    toy_hash16,
    uniform_state,
)

# straight-line evaluation of the five pipeline stages on x = 1
GOLDEN_HASH_OF_ONE = 0x6D6E


def test_hash_of_zero_is_zero():
    assert toy_hash16(0) == 0


def test_hash_of_one_golden():
    assert toy_hash16(1) == GOLDEN_HASH_OF_ONE


def test_hash_matches_vectorized_table():
    mask = marked_mask(ToyPuzzle(space_bits=16, tau=1 << 16))
    assert mask.all()
    scalar = [toy_hash16(x) for x in range(0, 65536, 997)]
    from qbtc.toy_pow import _hash_table

    table = _hash_table(16)
    assert scalar == [int(table[x]) for x in range(0, 65536, 997)]


def test_hash_histogram_near_uniform():
    # |{x : h(x) < 256}| over the full 16-bit domain; bounds are +/-100
    # around the uniform expectation of 256 (deliberately loose)
    count = marked_count(ToyPuzzle(space_bits=16, tau=256))
    assert 156 <= count <= 356


def test_marked_count_trivial():
    assert marked_count(ToyPuzzle(16, 0)) == 0
    assert marked_count(ToyPuzzle(16, 1 << 16)) == 65536


def test_marked_count_golden_tau256():
    # the hash is a bijection on 16 bits, so exactly 256 inputs land below 256
    assert marked_count(ToyPuzzle(16, 256)) == 256


def test_tau_for_marked_count_inverts_marked_count():
    for n in (8, 10, 12):
        for m in (1, 2, 4, 8):
            tau = tau_for_marked_count(n, m)
            assert marked_count(ToyPuzzle(n, tau)) == m


def test_simulate_no_marked_states():
    assert grover_simulate(ToyPuzzle(8, 0), 17) == 0.0


def test_simulate_n2_m1_one_iteration_certain():
    # h is a bijection with h(0)=0, so tau=1 marks exactly {0}
    puzzle = ToyPuzzle(space_bits=2, tau=1)
    assert marked_count(puzzle) == 1
    assert grover_simulate(puzzle, 1) == pytest.approx(1.0, abs=1e-12)


def test_simulate_matches_formula_at_optimal_k():
    puzzle = ToyPuzzle(16, 256)
    m = marked_count(puzzle)
    k = optimal_iterations(16, m)
    sim = grover_simulate(puzzle, k)
    formula = exact_success_prob(GroverInstance(16, m, k))
    assert sim == pytest.approx(formula, abs=1e-9)


def test_simulate_rejects_oversized_iterations():
    with pytest.raises(ValueError):
        grover_simulate(ToyPuzzle(8, 10), 10**4 + 1)


def test_puzzle_rejects_bad_sizes():
    with pytest.raises(ValueError):
        ToyPuzzle(space_bits=17, tau=1)
    with pytest.raises(ValueError):
        ToyPuzzle(space_bits=8, tau=(1 << 16) + 1)


def test_norm_preserved_each_iteration():
    puzzle = ToyPuzzle(10, 16)
    mask = marked_mask(puzzle)
    amps = uniform_state(10)
    for _ in range(100):
        amps = grover_step(amps, mask)
        assert abs(np.linalg.norm(amps) - 1.0) <= 1e-12


def test_diffusion_is_an_involution():
    rng = np.random.default_rng(1234)
    amps = rng.normal(size=256) + 1j * rng.normal(size=256)
    amps /= np.linalg.norm(amps)
    twice = diffusion(diffusion(amps))
    assert np.abs(twice - amps).max() <= 1e-12


@pytest.mark.parametrize("n", [8, 10, 12])
@pytest.mark.parametrize("m", [1, 2, 4, 8])
def test_oracle_equivalence_sweep(n, m):
    tau = tau_for_marked_count(n, m)
    puzzle = ToyPuzzle(n, tau)
    assert marked_count(puzzle) == m
    probs = grover_probabilities(puzzle, 200)
    for k in range(201):
        formula = exact_success_prob(GroverInstance(n, m, k))
        assert abs(probs[k] - formula) <= 1e-9


def test_sample_measurement_deterministic():
    puzzle = ToyPuzzle(8, 16)
    k = 3
    assert sample_measurement(puzzle, k, 42) == sample_measurement(puzzle, k, 42)


def test_sample_measurement_all_marked():
    puzzle = ToyPuzzle(4, 1 << 16)  # every input is marked
    for seed in range(20):
        outcome = sample_measurement(puzzle, 2, seed)
        assert 0 <= outcome < 16


def test_sample_measurement_binomial_bound():
    puzzle = ToyPuzzle(8, 1)  # M = 1 (only x = 0 hashes to 0)
    assert marked_count(puzzle) == 1
    k = optimal_iterations(8, 1)
    p = exact_success_prob(GroverInstance(8, 1, k))
    trials = 1000
    hits = sum(1 for seed in range(trials)
               if sample_measurement(puzzle, k, seed) == 0)
    assert hits / trials >= p - 5 * math.sqrt(p * (1 - p) / trials)
