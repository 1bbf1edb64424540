"""Audit-grade arithmetic for the quantum ECDSA key-recovery attack.

Gate totals are exact integers, clock rates and windows exact rationals;
floats appear only when a probability is computed. The two published
resource estimates for 256-bit ECDLP ship as built-in profiles, and
their claimed clock rates are audited against their own gate counts.
The Proos-Zalka "660 MHz for one hour" pairing does not follow from its
stated counts (5.4e10 gates / 3600 s = 15 MHz; at 660 MHz the window is
~81.8 s), so the audit carries a mandatory mismatch annotation rather
than silently correcting either number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class AttackProfile:
    """A quantum ECDLP resource estimate: qubits, serial gates, claimed speed."""

    name: str
    qubits: int
    serial_gates: int
    source_label: str
    claimed_clock_hz: int | None = None
    claimed_window_s: int | None = None

    def __post_init__(self):
        if self.qubits <= 0:
            raise ValueError("qubits must be positive")
        if self.serial_gates < 1:
            raise ValueError("serial_gates must be >= 1")


def total_gates(additions: int, gates_per_addition: int) -> int:
    """Exact product of addition count and gates per addition."""
    if additions <= 0 or gates_per_addition <= 0:
        raise ValueError("both counts must be positive")
    return additions * gates_per_addition


# Proos & Zalka (2003): ~1500 qubits, 6e9 one-qubit additions at 9 gates each.
PROOS_ZALKA = AttackProfile(
    name="proos-zalka",
    qubits=1500,
    serial_gates=total_gates(6 * 10**9, 9),
    source_label="Proos-Zalka 2003 (256-bit ECDSA)",
    claimed_clock_hz=660_000_000,
    claimed_window_s=3600,
)

# Roetteler, Naehrig, Svore, Lauter (2017): 2330 qubits, 1.26e11 Toffoli
# gates; non-Toffoli gates counted as taking negligible time.
ROETTELER = AttackProfile(
    name="roetteler",
    qubits=2330,
    serial_gates=126 * 10**9,
    source_label="Roetteler et al. 2017 (Toffoli count)",
    claimed_clock_hz=350_000_000,
    claimed_window_s=3600,
)

PROFILES = {p.name: p for p in (PROOS_ZALKA, ROETTELER)}


def required_clock(gates: int, window_s) -> Fraction:
    """Exact gates/window in Hz; render with round_sig for display."""
    window = Fraction(window_s)
    if window <= 0:
        raise ValueError("window must be positive")
    return Fraction(gates) / window


def implied_window(gates: int, clock_hz) -> Fraction:
    """Exact gates/clock in seconds; inverse of required_clock."""
    clock = Fraction(clock_hz)
    if clock <= 0:
        raise ValueError("clock must be positive")
    return Fraction(gates) / clock


def round_sig(x, digits: int = 6) -> float:
    """Round a number (Fraction or float) to the given significant digits."""
    xf = float(x)
    if xf == 0.0:
        return 0.0
    exponent = math.floor(math.log10(abs(xf)))
    return round(xf, digits - 1 - exponent)


def attack_survival(break_time_s: float, block_rate: float = 1.0 / 600.0,
                    fixed_deadline_s: float | None = None) -> float:
    """Probability the target transaction is still pending when the key falls.

    Default model: exponential confirmation at rate block_rate, giving
    exp(-lambda * break_time). With fixed_deadline_s set, the race is a
    hard cutoff instead: 1 if the break finishes inside the deadline, else 0.
    """
    if break_time_s < 0:
        raise ValueError("break_time_s must be nonnegative")
    if fixed_deadline_s is not None:
        return 1.0 if break_time_s < fixed_deadline_s else 0.0
    return math.exp(-block_rate * break_time_s)


def audit_profile(profile: AttackProfile) -> dict:
    """Cross-check a profile's claimed clock against its own gate count.

    Returns the derived clock for the claimed window, the window implied
    by the claimed clock, and an annotation whenever the claims disagree
    with the arithmetic by more than rounding to 3 significant digits.
    """
    out: dict = {
        "profile": profile.name,
        "qubits": profile.qubits,
        "gates": profile.serial_gates,
        "source": profile.source_label,
        "claimed_clock_hz": profile.claimed_clock_hz,
        "claimed_window_s": profile.claimed_window_s,
    }
    notes = []
    mismatch = False
    if profile.claimed_window_s is not None:
        derived = required_clock(profile.serial_gates, profile.claimed_window_s)
        out["derived_clock_hz_for_claimed_window"] = round_sig(derived)
        if profile.claimed_clock_hz is not None:
            rel = abs(float(derived) - profile.claimed_clock_hz) / profile.claimed_clock_hz
            if rel > 5e-3:
                mismatch = True
                notes.append(
                    f"claimed {round_sig(profile.claimed_clock_hz):g} Hz does not "
                    f"follow from {profile.serial_gates} gates in "
                    f"{profile.claimed_window_s} s (= {round_sig(derived):g} Hz)"
                )
    if profile.claimed_clock_hz is not None:
        window = implied_window(profile.serial_gates, profile.claimed_clock_hz)
        out["implied_window_s_for_claimed_clock"] = round_sig(window)
        if profile.claimed_window_s is not None:
            rel = abs(float(window) - profile.claimed_window_s) / profile.claimed_window_s
            if rel > 5e-3 and not any("does not follow" in n for n in notes):
                mismatch = True
                notes.append(
                    f"claimed window {profile.claimed_window_s} s is inconsistent "
                    f"with the implied {round_sig(window):g} s"
                )
            elif mismatch:
                notes.append(
                    f"at the claimed clock the window would be {round_sig(window):g} s, "
                    f"not {profile.claimed_window_s} s"
                )
    out["mismatch"] = mismatch
    out["annotation"] = "; ".join(notes) if notes else None
    return out
