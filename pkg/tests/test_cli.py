import json

import pytest

from qbtc.cli import (
    EXIT_OK,
    EXIT_VALIDATION,
    PAPER_REFERENCE_TAG,
    build_config,
    encode_compact_target,
    main,
    make_parser,
    normalize_config,
    parse_compact_target,
    parse_target_literal,
)

MAX_TARGET = 0xFFFF * 256**26


def run_cli(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, argv):
    code, out, err = run_cli(capsys, argv)
    assert code == EXIT_OK, err
    return json.loads(out)


# --- compact target codec ----------------------------------------------------

def test_parse_compact_known_values():
    assert parse_compact_target(0x03000001) == 1
    assert parse_compact_target(0x1D00FFFF) == MAX_TARGET
    assert parse_compact_target(0x04000002) == 512


def test_parse_compact_rejects_sign_bit():
    with pytest.raises(ValueError):
        parse_compact_target(0x03800001)


def test_parse_compact_rejects_oversized():
    with pytest.raises(ValueError):
        parse_compact_target(0x24010000)


def test_compact_round_trip_canonical():
    for nbits in (0x03000001, 0x1D00FFFF, 0x181BC330, 0x170BEF15):
        assert encode_compact_target(parse_compact_target(nbits)) == nbits


def test_encode_then_parse_identity():
    for target in (1, 512, 255, 256, MAX_TARGET, 0x80, 0x8000, 0x800000):
        assert parse_compact_target(encode_compact_target(target)) == target


def test_parse_target_literal_forms():
    assert parse_target_literal("890000000000") == 890_000_000_000
    assert parse_target_literal("0xFFFF") == 0xFFFF
    with pytest.raises(ValueError):
        parse_target_literal("12abc")


# --- config handling ---------------------------------------------------------

def test_normalize_is_idempotent():
    raw = {"target": "0x100", "quantum_rate_hz": 5, "space_bits": 16}
    once = normalize_config(raw)
    twice = normalize_config(once)
    assert once == twice
    assert json.loads(json.dumps(once)) == once


def test_normalize_rejects_unknown_fields():
    with pytest.raises(ValueError):
        normalize_config({"quantum_hash_rate": 1.0})


def test_normalize_accepts_nbits():
    cfg = normalize_config({"nbits": "0x1d00ffff"})
    assert cfg["target"] == MAX_TARGET


def test_flag_overrides_config_file(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({
        "target": 1000, "space_bits": 16, "quantum_rate_hz": 2.0,
        "reward_btc": 1.0, "btc_price_fiat": 10.0,
        "cost_rate_fiat_per_s": 0.5, "block_interval_s": 300.0, "seed": 4,
    }))
    parser = make_parser()
    args = parser.parse_args([
        "profit", "--config", str(path), "--quantum-rate", "7",
        "--block-interval", "600", "--seed", "9", "--t", "1"])
    cfg = build_config(args)
    assert cfg["quantum_rate_hz"] == 7.0    # flag wins
    assert cfg["block_interval_s"] == 600.0  # flag wins
    assert cfg["seed"] == 9                  # flag wins
    assert cfg["target"] == 1000             # file survives
    assert cfg["cost_rate_fiat_per_s"] == 0.5


def test_preset_then_file_then_flag(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"btc_price_fiat": 100.0}))
    parser = make_parser()
    args = parser.parse_args([
        "profit", "--preset", "paper-2017", "--config", str(path),
        "--reward-btc", "6.25", "--t", "0"])
    cfg = build_config(args)
    assert cfg["target"] == 890_000_000_000  # preset
    assert cfg["btc_price_fiat"] == 100.0    # file beats preset
    assert cfg["reward_btc"] == 6.25         # flag beats both


# --- subcommand behaviour ----------------------------------------------------

def test_unknown_flag_exits_2(capsys):
    code, out, err = run_cli(capsys, ["profit", "--bogus"])
    assert code == EXIT_VALIDATION
    assert out == ""  # no partial output


def test_bad_nbits_exits_2(capsys):
    code, out, err = run_cli(
        capsys, ["profit", "--nbits", "0x03800001", "--t", "1"])
    assert code == EXIT_VALIDATION
    assert "sign bit" in err
    assert out == ""


def test_profit_single_value(capsys):
    doc = run_json(capsys, [
        "profit", "--target", "256", "--space-bits", "16",
        "--quantum-rate", "0.01", "--reward-btc", "1", "--btc-price", "1",
        "--t", "100"])
    assert set(doc) == {"t_s", "success_prob", "survival_prob", "profit_fiat"}
    assert doc["t_s"] == 100.0


def test_profit_curve_csv(capsys):
    code, out, err = run_cli(capsys, [
        "profit", "--target", "256", "--space-bits", "16",
        "--quantum-rate", "0.01", "--samples", "5", "--t-max", "100",
        "--format", "csv"])
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[0] == "t_s,success_prob,survival_prob,profit_fiat"
    assert len(lines) == 6


def test_optimal_t_fields(capsys):
    doc = run_json(capsys, [
        "optimal-t", "--target", "256", "--space-bits", "16",
        "--quantum-rate", "0.01", "--reward-btc", "1", "--btc-price", "1"])
    assert set(doc) == {"t_star_s", "profit_star_fiat", "phase_rate_rad_per_s"}
    assert doc["profit_star_fiat"] > 0


def test_breakeven_zero_cost_note(capsys):
    doc = run_json(capsys, [
        "breakeven", "--target", "256", "--space-bits", "16",
        "--quantum-rate", "1", "--reward-btc", "1", "--btc-price", "1",
        "--cost-rate", "0"])
    assert doc["rq_breakeven_hz"] == 0.0
    assert "trivially profitable" in doc["note"]


def test_breakeven_paper_preset_reports_reference(capsys):
    doc = run_json(capsys, ["breakeven", "--preset", "paper-2017"])
    assert "rq_breakeven_hz" in doc
    ref = doc["paper_reference"]
    assert ref["paper_rq_breakeven_hz"] == 48000.0
    assert ref["tag"] == PAPER_REFERENCE_TAG


def test_fleet_paper_preset_reports_reference(capsys):
    doc = run_json(capsys, ["fleet", "--preset", "paper-2017"])
    assert doc["machines"] >= 1
    ref = doc["paper_reference"]
    assert ref["paper_machines"] == 1300
    assert ref["paper_rq_per_machine_hz"] == 3000.0
    assert ref["tag"] == PAPER_REFERENCE_TAG


def test_fleet_requires_reference(capsys):
    code, out, err = run_cli(capsys, [
        "fleet", "--target", "256", "--space-bits", "16",
        "--rq-per-machine", "1"])
    assert code == EXIT_VALIDATION
    assert out == ""


def test_attack_roetteler_360s(capsys):
    doc = run_json(capsys, ["attack", "--profile", "roetteler",
                            "--window", "360"])
    assert doc["required_hz"] == 3.5e8
    assert doc["qubits"] == 2330
    assert doc["gates"] == 126_000_000_000
    assert doc["mismatch"] is True
    assert doc["annotation"]


def test_attack_unknown_profile_exits_2(capsys):
    code, out, err = run_cli(capsys, ["attack", "--profile", "shor9000"])
    assert code == EXIT_VALIDATION
    assert out == ""


def test_attack_schema(capsys):
    doc = run_json(capsys, ["attack", "--profile", "proos-zalka"])
    expected = {"profile", "qubits", "gates", "window_s", "required_hz",
                "break_time_s", "survival", "claimed_clock_hz", "mismatch",
                "annotation"}
    assert set(doc) == expected


def test_grover_verify(capsys):
    doc = run_json(capsys, ["grover-verify", "--n", "10", "--tau", "16",
                            "--k", "25"])
    assert set(doc) == {"n", "tau", "k", "marked_count", "formula_p",
                        "simulated_p", "abs_diff"}
    assert doc["abs_diff"] <= 1e-9


def test_grover_verify_bad_n_exits_2(capsys):
    code, out, err = run_cli(capsys, ["grover-verify", "--n", "20",
                                      "--tau", "1", "--k", "1"])
    assert code == EXIT_VALIDATION
    assert out == ""


def test_race_json_schema(capsys):
    doc = run_json(capsys, [
        "race", "--target", "256", "--space-bits", "16",
        "--quantum-rate", "0.0065", "--reward-btc", "1", "--btc-price", "1",
        "--measure-at", "600", "--blocks", "50", "--replicas", "2",
        "--seed", "13"])
    expected = {"quantum_blocks_won", "network_blocks", "attempts",
                "quantum_win_rate", "win_rate_stderr", "revenue_fiat",
                "quantum_runtime_cost_fiat", "total_time_s",
                "mean_interval_s", "replica_seeds", "analytic_win_rate"}
    assert set(doc) == expected
    assert doc["quantum_blocks_won"] + doc["network_blocks"] == 100


def test_race_trace_csv(capsys, tmp_path):
    path = tmp_path / "trace.csv"
    run_json(capsys, [
        "race", "--target", "256", "--space-bits", "16",
        "--quantum-rate", "0.0065", "--reward-btc", "1", "--btc-price", "1",
        "--measure-at", "600", "--blocks", "10", "--trace-csv", str(path)])
    header = path.read_text().splitlines()[0]
    assert header == "block_index,winner,interval_s,target_log2"
