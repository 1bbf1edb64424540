"""Command-line front end: config handling, target parsing, JSON/CSV output.

One JSON document goes to stdout (or CSV rows with --format csv);
diagnostics go to stderr. Exit codes: 0 success, 1 internal error,
2 validation error. Targets are accepted as decimal literals, 0x-hex
literals, or Bitcoin compact nBits, and normalized to a big integer.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

import numpy as np

from qbtc import econ as econ_mod
from qbtc import race_sim, toy_pow
from qbtc.attack_calc import PROFILES, attack_survival, audit_profile, required_clock, round_sig
from qbtc.econ import EconParams, NeverProfitableError
from qbtc.grover_math import make_target_ratio

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_VALIDATION = 2

_SIGN_BIT = 0x00800000

PAPER_REFERENCE_TAG = "paper reference — inputs under-determined"

# Published 2017 headline figures reported alongside computed values.
PAPER_BREAKEVEN_RQ_HZ = 48_000.0
PAPER_FLEET_MACHINES = 1300
PAPER_FLEET_RQ_HZ = 3_000.0
PAPER_CLASSICAL_RQ_HZ = 125_000.0

# The "paper-2017" preset: target 8.9e11 in a 2^256 space, 12.5 BTC
# reward, 600 s blocks, 125 kH/s reference classical hardware. Price and
# cost are explicit stand-ins; the source analysis never states its own.
PRESETS = {
    "paper-2017": {
        "target": 890_000_000_000,
        "space_bits": 256,
        "classical_rate_hz": 125_000.0,
        "quantum_rate_hz": 3_000.0,
        "reward_btc": 12.5,
        "btc_price_fiat": 15_000.0,
        "cost_rate_fiat_per_s": 1.0 / 3600.0,
        "block_interval_s": 600.0,
        "seed": 0,
    }
}

_CONFIG_DEFAULTS = {
    "target": 890_000_000_000,
    "space_bits": 256,
    "classical_rate_hz": 0.0,
    "quantum_rate_hz": 0.0,
    "reward_btc": 12.5,
    "btc_price_fiat": 1.0,
    "cost_rate_fiat_per_s": 0.0,
    "block_interval_s": 600.0,
    "seed": 0,
}


class ValidationError(ValueError):
    """Bad user input: maps to exit code 2."""


# ---------------------------------------------------------------------------
# Compact-target codec


def parse_compact_target(nbits: int) -> int:
    """Decode Bitcoin compact nBits: mantissa * 256^(exponent-3)."""
    if not 0 <= nbits <= 0xFFFFFFFF:
        raise ValidationError("nbits must be a 32-bit unsigned integer")
    if nbits & _SIGN_BIT:
        raise ValidationError("compact target has the sign bit set")
    exponent = nbits >> 24
    mantissa = nbits & 0x00FFFFFF
    if exponent >= 3:
        target = mantissa << (8 * (exponent - 3))
    else:
        target = mantissa >> (8 * (3 - exponent))
    if target > (1 << 256):
        raise ValidationError("compact target exceeds 2^256")
    return target


def encode_compact_target(target: int) -> int:
    """Canonical compact encoding of a nonnegative target."""
    if target < 0:
        raise ValidationError("target must be nonnegative")
    if target == 0:
        return 0
    size = (target.bit_length() + 7) // 8
    if size <= 3:
        # right-aligned mantissa with exponent 3, so encode(1) = 0x03000001
        size = 3
        mantissa = target
    else:
        mantissa = target >> (8 * (size - 3))
    if mantissa & _SIGN_BIT:
        mantissa >>= 8
        size += 1
    return (size << 24) | mantissa


def parse_target_literal(text: str) -> int:
    """Accept a decimal or 0x-hex target literal."""
    text = text.strip()
    try:
        if text.lower().startswith("0x"):
            return int(text, 16)
        return int(text, 10)
    except ValueError as exc:
        raise ValidationError(f"cannot parse target {text!r}") from exc


# ---------------------------------------------------------------------------
# Configuration


def normalize_config(raw: dict) -> dict:
    """Fill defaults, coerce types, and validate; idempotent on its output."""
    unknown = set(raw) - set(_CONFIG_DEFAULTS) - {"nbits"}
    if unknown:
        raise ValidationError(f"unknown config fields: {sorted(unknown)}")
    cfg = dict(_CONFIG_DEFAULTS)
    cfg.update({k: v for k, v in raw.items() if v is not None})

    nbits = cfg.pop("nbits", None)
    if nbits is not None:
        value = int(nbits, 0) if isinstance(nbits, str) else int(nbits)
        cfg["target"] = parse_compact_target(value)
    elif isinstance(cfg["target"], str):
        cfg["target"] = parse_target_literal(cfg["target"])

    cfg["target"] = int(cfg["target"])
    cfg["space_bits"] = int(cfg["space_bits"])
    cfg["seed"] = int(cfg["seed"])
    for key in ("classical_rate_hz", "quantum_rate_hz", "reward_btc",
                "btc_price_fiat", "cost_rate_fiat_per_s", "block_interval_s"):
        cfg[key] = float(cfg[key])

    if cfg["block_interval_s"] <= 0:
        raise ValidationError("block_interval_s must be positive")
    try:
        make_target_ratio(cfg["target"], cfg["space_bits"])
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc
    for key in ("classical_rate_hz", "quantum_rate_hz", "reward_btc",
                "btc_price_fiat", "cost_rate_fiat_per_s"):
        if cfg[key] < 0:
            raise ValidationError(f"{key} must be nonnegative")
    return cfg


def econ_from_config(cfg: dict) -> EconParams:
    return EconParams(
        target=cfg["target"],
        space_bits=cfg["space_bits"],
        classical_rate=cfg["classical_rate_hz"],
        quantum_rate=cfg["quantum_rate_hz"],
        reward=cfg["reward_btc"] * cfg["btc_price_fiat"],
        cost_rate=cfg["cost_rate_fiat_per_s"],
        block_rate=1.0 / cfg["block_interval_s"],
    )


def build_config(args: argparse.Namespace) -> dict:
    """Merge preset < config file < command-line flags."""
    raw: dict = {}
    preset = getattr(args, "preset", None)
    if preset:
        if preset not in PRESETS:
            raise ValidationError(f"unknown preset {preset!r}")
        raw.update(PRESETS[preset])
    config_path = getattr(args, "config", None)
    if config_path:
        try:
            with open(config_path, encoding="utf-8") as fh:
                file_cfg = json.load(fh)
        except OSError as exc:
            raise ValidationError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(file_cfg, dict):
            raise ValidationError("config file must hold a JSON object")
        raw.update(file_cfg)
        raw = normalize_config(raw)  # surface file errors before flag overrides

    flag_map = {
        "target": "target",
        "nbits": "nbits",
        "space_bits": "space_bits",
        "classical_rate": "classical_rate_hz",
        "quantum_rate": "quantum_rate_hz",
        "reward_btc": "reward_btc",
        "btc_price": "btc_price_fiat",
        "cost_rate": "cost_rate_fiat_per_s",
        "block_interval": "block_interval_s",
        "seed": "seed",
    }
    for attr, key in flag_map.items():
        value = getattr(args, attr, None)
        if value is not None:
            raw[key] = value
    if "nbits" in raw and any(getattr(args, a, None) is not None
                              for a in ("target",)):
        raw.pop("nbits")  # an explicit --target flag beats a config nbits
    return normalize_config(raw)


# ---------------------------------------------------------------------------
# Output helpers


def emit_json(doc: dict) -> None:
    json.dump(doc, sys.stdout, indent=2, default=_json_default)
    sys.stdout.write("\n")


def _json_default(value):
    if isinstance(value, Fraction):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    raise TypeError(f"not JSON-serializable: {type(value)}")


def emit_csv(header: list[str], rows) -> None:
    import csv

    writer = csv.writer(sys.stdout)
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)


# ---------------------------------------------------------------------------
# Subcommands


def cmd_profit(args) -> int:
    cfg = build_config(args)
    params = econ_from_config(cfg)
    if args.t is not None:
        t = args.t
        doc = {
            "t_s": t,
            "success_prob": _success(params, t),
            "survival_prob": econ_mod.survival_prob(t, params.block_rate),
            "profit_fiat": econ_mod.quantum_profit(params, t),
        }
        if args.format == "csv":
            emit_csv(["t_s", "success_prob", "survival_prob", "profit_fiat"],
                     [[doc["t_s"], doc["success_prob"], doc["survival_prob"],
                       doc["profit_fiat"]]])
        else:
            emit_json(doc)
        return EXIT_OK

    t_max = args.t_max if args.t_max is not None else 5.0 / params.block_rate
    samples = args.samples
    ts = [t_max * i / (samples - 1) for i in range(samples)]
    rows = [[t, _success(params, t),
             econ_mod.survival_prob(t, params.block_rate),
             econ_mod.quantum_profit(params, t)] for t in ts]
    if args.format == "csv":
        emit_csv(["t_s", "success_prob", "survival_prob", "profit_fiat"], rows)
    else:
        emit_json({"samples": [
            {"t_s": r[0], "success_prob": r[1], "survival_prob": r[2],
             "profit_fiat": r[3]} for r in rows]})
    return EXIT_OK


def _success(params: EconParams, t: float) -> float:
    from qbtc.grover_math import paper_success_prob

    return paper_success_prob(params.quantum_rate, t, params.ratio)


def cmd_optimal_t(args) -> int:
    cfg = build_config(args)
    params = econ_from_config(cfg)
    if params.quantum_rate <= 0:
        raise ValidationError("optimal-t requires a positive quantum_rate_hz")
    t_star, profit_star = econ_mod.optimal_measurement_time(params)
    emit_json({
        "t_star_s": t_star,
        "profit_star_fiat": profit_star,
        "phase_rate_rad_per_s": params.phase_rate,
    })
    return EXIT_OK


def cmd_breakeven(args) -> int:
    cfg = build_config(args)
    params = econ_from_config(cfg)
    if params.reward <= 0:
        raise ValidationError("breakeven requires a positive reward")
    doc: dict = {}
    if params.cost_rate == 0:
        doc["rq_breakeven_hz"] = 0.0
        doc["note"] = "trivially profitable: zero running cost"
    else:
        try:
            doc["rq_breakeven_hz"] = econ_mod.breakeven_quantum_rate(params)
        except NeverProfitableError as exc:
            doc["rq_breakeven_hz"] = None
            doc["note"] = f"never profitable: {exc}"
    if getattr(args, "preset", None) == "paper-2017":
        doc["paper_reference"] = {
            "paper_rq_breakeven_hz": PAPER_BREAKEVEN_RQ_HZ,
            "tag": PAPER_REFERENCE_TAG,
        }
    emit_json(doc)
    return EXIT_OK


def cmd_fleet(args) -> int:
    cfg = build_config(args)
    params = econ_from_config(cfg)
    rq_machine = args.rq_per_machine
    if rq_machine is None:
        rq_machine = params.quantum_rate
    if rq_machine <= 0:
        raise ValidationError("fleet requires a positive per-machine quantum rate")
    if args.reference_rq is not None:
        machines = econ_mod.machines_to_match(
            params, rq_machine, reference_quantum_rate=args.reference_rq)
        reference = {"reference_rq_hz": args.reference_rq}
    else:
        ref_classical = args.reference_classical
        if ref_classical is None:
            ref_classical = params.classical_rate
        if ref_classical <= 0:
            raise ValidationError("fleet needs a reference rate "
                                  "(--reference-rq or --reference-classical)")
        machines = econ_mod.machines_to_match(
            params, rq_machine, reference_classical_rate=ref_classical)
        reference = {"reference_classical_hz": ref_classical}
    doc = {
        "machines": machines,
        "rq_per_machine_hz": rq_machine,
        **reference,
    }
    if getattr(args, "preset", None) == "paper-2017":
        doc["paper_reference"] = {
            "paper_machines": PAPER_FLEET_MACHINES,
            "paper_rq_per_machine_hz": PAPER_FLEET_RQ_HZ,
            "paper_classical_reference_hz": PAPER_CLASSICAL_RQ_HZ,
            "tag": PAPER_REFERENCE_TAG,
        }
    emit_json(doc)
    return EXIT_OK


def cmd_race(args) -> int:
    cfg = build_config(args)
    params = econ_from_config(cfg)
    try:
        config = race_sim.RaceConfig(
            econ=params,
            measure_at=args.measure_at,
            horizon_blocks=args.blocks,
            replicas=args.replicas,
            master_seed=cfg["seed"],
            retarget=args.retarget,
            retarget_interval_blocks=args.retarget_interval,
            measure_on_interrupt=args.measure_on_interrupt,
        )
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc
    stats = race_sim.run_race(config, workers=args.workers,
                              trace_path=args.trace_csv)
    doc = stats.to_dict()
    doc["analytic_win_rate"] = race_sim.analytic_win_rate(params, args.measure_at)
    emit_json(doc)
    return EXIT_OK


def cmd_attack(args) -> int:
    profile = PROFILES.get(args.profile)
    if profile is None:
        raise ValidationError(
            f"unknown profile {args.profile!r}; choose from {sorted(PROFILES)}")
    audit = audit_profile(profile)
    window = args.window
    if window is None:
        window = profile.claimed_window_s
    clock = required_clock(profile.serial_gates, window)
    if args.clock is not None:
        break_time = profile.serial_gates / args.clock
    else:
        break_time = float(window)
    lam = 1.0 / args.block_interval if args.block_interval else 1.0 / 600.0
    deadline = args.deadline if args.fixed_deadline else None
    doc = {
        "profile": profile.name,
        "qubits": profile.qubits,
        "gates": profile.serial_gates,
        "window_s": float(window),
        "required_hz": round_sig(clock),
        "break_time_s": break_time,
        "survival": attack_survival(break_time, lam, fixed_deadline_s=deadline),
        "claimed_clock_hz": profile.claimed_clock_hz,
        "mismatch": audit["mismatch"],
        "annotation": audit["annotation"],
    }
    emit_json(doc)
    return EXIT_OK


def cmd_grover_verify(args) -> int:
    try:
        puzzle = toy_pow.ToyPuzzle(space_bits=args.n, tau=args.tau)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc
    if args.k < 0 or args.k > 10**4:
        raise ValidationError("k must be in [0, 1e4]")
    formula_p = toy_pow.expected_success_prob(puzzle, args.k)
    simulated_p = toy_pow.grover_simulate(puzzle, args.k)
    emit_json({
        "n": args.n,
        "tau": args.tau,
        "k": args.k,
        "marked_count": toy_pow.marked_count(puzzle),
        "formula_p": formula_p,
        "simulated_p": simulated_p,
        "abs_diff": abs(formula_p - simulated_p),
    })
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--preset", help="named parameter preset (paper-2017)")
    parser.add_argument("--target", type=parse_target_literal,
                        help="mining target, decimal or 0x-hex")
    parser.add_argument("--nbits", type=lambda s: int(s, 0),
                        help="mining target in Bitcoin compact encoding")
    parser.add_argument("--space-bits", dest="space_bits", type=int)
    parser.add_argument("--classical-rate", dest="classical_rate", type=float,
                        help="classical hash rate, hashes/s")
    parser.add_argument("--quantum-rate", dest="quantum_rate", type=float,
                        help="quantum hash rate, Grover iterations/s")
    parser.add_argument("--reward-btc", dest="reward_btc", type=float)
    parser.add_argument("--btc-price", dest="btc_price", type=float,
                        help="fiat per BTC")
    parser.add_argument("--cost-rate", dest="cost_rate", type=float,
                        help="quantum machine cost, fiat/s")
    parser.add_argument("--block-interval", dest="block_interval", type=float,
                        help="mean network block interval, seconds")
    parser.add_argument("--seed", type=int)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qbtc",
        description="Quantum Bitcoin mining economics and attack arithmetic")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profit", help="profit at a time t, or a profit curve")
    _add_common(p)
    p.add_argument("--t", type=float, help="single measurement time, seconds")
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_profit)

    p = sub.add_parser("optimal-t", help="optimal measurement time and profit")
    _add_common(p)
    p.set_defaults(func=cmd_optimal_t)

    p = sub.add_parser("breakeven", help="break-even quantum hash rate")
    _add_common(p)
    p.set_defaults(func=cmd_breakeven)

    p = sub.add_parser("fleet", help="machines needed to match a reference miner")
    _add_common(p)
    p.add_argument("--rq-per-machine", dest="rq_per_machine", type=float)
    p.add_argument("--reference-rq", dest="reference_rq", type=float,
                   help="reference single quantum machine rate")
    p.add_argument("--reference-classical", dest="reference_classical",
                   type=float, help="reference classical hash rate")
    p.set_defaults(func=cmd_fleet)

    p = sub.add_parser("race", help="Monte Carlo race against the network")
    _add_common(p)
    p.add_argument("--measure-at", dest="measure_at", type=float, required=True)
    p.add_argument("--blocks", type=int, default=1000)
    p.add_argument("--replicas", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--retarget", action="store_true")
    p.add_argument("--retarget-interval", dest="retarget_interval",
                   type=int, default=2016)
    p.add_argument("--measure-on-interrupt", dest="measure_on_interrupt",
                   action="store_true")
    p.add_argument("--trace-csv", dest="trace_csv",
                   help="write a per-block CSV trace to this path")
    p.set_defaults(func=cmd_race)

    p = sub.add_parser("attack", help="ECDSA key-recovery resource arithmetic")
    p.add_argument("--profile", required=True,
                   help="resource estimate: proos-zalka or roetteler")
    p.add_argument("--window", type=float, help="attack window, seconds")
    p.add_argument("--clock", type=float, help="achievable gate clock, Hz")
    p.add_argument("--block-interval", dest="block_interval", type=float)
    p.add_argument("--fixed-deadline", dest="fixed_deadline",
                   action="store_true")
    p.add_argument("--deadline", type=float, default=600.0)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("grover-verify",
                       help="statevector oracle vs closed-form probability")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--tau", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_grover_verify)

    return parser


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags; preserve that contract
        return EXIT_VALIDATION if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
