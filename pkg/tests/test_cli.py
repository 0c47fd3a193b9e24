import json
import subprocess
import sys
from pathlib import Path

import pytest

from tepsim.cli import main

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_balance(capsys):
    code, out, _ = run(capsys, "balance", "1000")
    assert code == 0 and out.splitlines()[0] == "01101001"


@pytest.mark.parametrize("argv", [("balance", "101"), ("balance", "10x0"), ("unbalance", "0000"), ("bogus",)])
def test_bad_input_exit_code(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_unbalance_round_trip(capsys):
    assert run(capsys, "unbalance", "01101001")[1].strip() == "1000"


def test_encode_tea_layout(capsys):
    code, out, _ = run(capsys, "encode-tea", "--payload", "1" * 16)
    fields = dict(line.split(" ", 1) for line in out.splitlines())
    assert code == 0
    assert fields["num_slots"] == "144" and fields["slot_phase_us"] == "5760"


def test_encode_tea_wrong_length(capsys):
    assert run(capsys, "encode-tea", "--payload", "101")[0] == 2


def test_simulate_off_slot(capsys):
    code, out, _ = run(capsys, "simulate-tea", "--config", str(CONFIGS / "offslot_tea.json"))
    assert code == 0 and "verdict tampered(balance)" in out


def test_explore_mismatch_and_safe_grid(capsys):
    assert run(capsys, "explore", "--grid", "m=1..3,threshold=1..3,skew=1..3,hash_lengths=2")[0] == 3
    code, out, _ = run(capsys, "explore", "--config", str(CONFIGS / "grid_safe.json"))
    assert code == 0 and len(out.splitlines()) == 1 + 5 * 6


def test_explore_fixed_parity_control(capsys):
    grid = str(CONFIGS / "grid_safe.json")
    assert run(capsys, "explore", "--config", grid, "--grid", "parity_rule=even")[0] == 3


def test_explore_empty_grid(capsys):
    assert run(capsys, "explore", "--grid", "m=2..2,threshold=3..3,skew=1..1")[0] == 2


def test_missing_config(capsys, tmp_path):
    assert run(capsys, "pair", "--config", str(tmp_path / "nope.json"))[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"receiver": {"colour": 1}}')
    assert run(capsys, "pair", "--config", str(bad))[0] == 2


def test_outputs_are_reproducible(capsys, tmp_path):
    for d in ("a", "b"):
        assert run(capsys, "explore", "--config", str(CONFIGS / "grid_safe.json"), "--grid", "m=3..3",
                   "--out", str(tmp_path / d))[0] in (0, 3)
        assert run(capsys, "pair", "--config", str(CONFIGS / "honest_tep.json"), "--out", str(tmp_path / d / "p"))[0] == 0
    for f in sorted((tmp_path / "a").rglob("*")):
        if f.is_file():
            assert f.read_bytes() == (tmp_path / "b" / f.relative_to(tmp_path / "a")).read_bytes(), f


def test_pair_trace(capsys, tmp_path):
    code, out, _ = run(capsys, "pair", "--config", str(CONFIGS / "honest_tep.json"), "--out", str(tmp_path))
    assert code == 0 and out.count("Paired") == 2
    events = [json.loads(line) for line in (tmp_path / "trace.jsonl").read_text().splitlines()]
    kinds = {e["kind"] for e in events}
    assert {"keys", "press", "sync", "payload", "slot", "verdict", "decision"} <= kinds
    assert all("tick" in e for e in events if e["kind"] not in ("keys", "press", "decision"))
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["command"] == "pair" and manifest["seed"] == 1


def test_attack_matrix(capsys):
    code, out, _ = run(capsys, "attack-matrix", "--config", str(CONFIGS / "attack_matrix.json"))
    lines = out.splitlines()
    assert code == 0 and lines[0] == "protocol,attack,outcome,enrollee,registrar" and len(lines) == 7


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "tepsim", "balance", "10"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.splitlines()[0] == "0110"
