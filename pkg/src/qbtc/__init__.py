"""Quantum Bitcoin analysis toolkit.

Closed-form Grover mining probabilities, a desk-scale statevector oracle,
mining profitability economics, Monte Carlo block races, and resource
arithmetic for the quantum ECDSA key-recovery attack.
"""

from qbtc.grover_math import (
    GroverInstance,
    TargetRatio,
    exact_success_prob,
    make_target_ratio,
    optimal_iterations,
    paper_success_prob,
)
from qbtc.econ import EconParams

__all__ = [
    "GroverInstance",
    "TargetRatio",
    "EconParams",
    "exact_success_prob",
    "paper_success_prob",
    "optimal_iterations",
    "make_target_ratio",
]
