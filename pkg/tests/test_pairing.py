from dataclasses import replace
from pathlib import Path

import pytest

from tepsim import config
from tepsim.adversary import Capture, Collide, Composite, Hog, OffSlotEnergy, PayloadEdit
from tepsim.pairing import (
    AdversarySpec,
    NodeSpec,
    PairingConfig,
    Scenario,
    default_nodes,
    run_attack_matrix,
    run_pbc,
    run_tep,
)

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def honest(**kw):
    return Scenario(default_nodes(), seed=1, **kw)


def results(res):
    return {name: o.result for name, o in res.outcomes.items()}


@pytest.mark.parametrize("runner", [run_pbc, run_tep])
def test_honest_pairing(runner):
    res = runner(honest())
    assert res.summary == "Paired"
    e, r = res.outcomes["enrollee"], res.outcomes["registrar"]
    assert e.peer_public == res.keys["registrar"].public
    assert r.peer_public == res.keys["enrollee"].public
    assert e.shared == r.shared is not None


def test_pbc_two_enrollees_is_an_error():
    nodes = default_nodes() + [NodeSpec("second", "enrollee", (1000,), channel=3)]
    assert run_pbc(Scenario(nodes, seed=1)).outcomes["registrar"].result == "ErrorMultipleDevices"


def test_no_registrar_press_times_out():
    nodes = [NodeSpec("enrollee", "enrollee", (0,)), NodeSpec("registrar", "registrar", (), channel=6)]
    res = run_tep(Scenario(nodes, seed=1))
    assert results(res) == {"enrollee": "Timeout", "registrar": "Timeout"}


def test_press_after_walk_time_times_out():
    nodes = [NodeSpec("enrollee", "enrollee", (0,)), NodeSpec("registrar", "registrar", (125_000,), channel=6)]
    assert run_tep(Scenario(nodes, seed=1)).outcomes["enrollee"].result == "Timeout"


@pytest.mark.parametrize("strategy", [Collide(), Capture(), Hog()])
def test_pbc_falls_to_attacks(strategy):
    res = run_pbc(honest(adversary=AdversarySpec(strategy)))
    assert res.summary == "AdversaryPaired"


@pytest.mark.parametrize("strategy", [
    Collide(), Capture(), Hog(), PayloadEdit(), OffSlotEnergy(),
    Composite((PayloadEdit(), OffSlotEnergy(parts=((5, "whole"),)))),
])
def test_tep_detects_attacks(strategy):
    res = run_tep(honest(adversary=AdversarySpec(strategy)))
    assert res.summary == "TamperDetected"
    assert all(o.peer_public not in res.adversary_publics for o in res.outcomes.values())


def test_skew_shift_needs_receiver_skew():
    scn = config.scenario(config.load(CONFIGS / "skew_shift_tep.json"))
    assert run_tep(scn).summary == "AdversaryPaired"
    aligned = replace(scn, receiver=replace(scn.receiver, skew_ticks=0))
    assert run_tep(aligned).summary == "Paired"


def test_three_push_shortens_the_run():
    nodes = [NodeSpec("enrollee", "enrollee", (0, 8000)), NodeSpec("registrar", "registrar", (5000,), channel=6)]
    plain = run_tep(Scenario(nodes, seed=1))
    fast = run_tep(Scenario(nodes, pairing=PairingConfig(three_push=True), seed=1))
    assert plain.summary == fast.summary == "Paired"
    pc = PairingConfig()
    assert fast.outcomes["registrar"].decided_ms == 5000 + pc.cycle_ms
    assert fast.outcomes["enrollee"].decided_ms == 8000 + pc.cycle_ms
    assert plain.outcomes["enrollee"].decided_ms == pc.walk_time_ms


def test_cycle_must_be_short():
    with pytest.raises(ValueError):
        PairingConfig(dwell_ms=1200)


def test_runs_are_deterministic():
    scn = honest(adversary=AdversarySpec(Capture()))
    a, b = run_tep(scn), run_tep(scn)
    assert a.trace == b.trace and results(a) == results(b)


def test_attack_matrix_rows():
    rows = run_attack_matrix(honest())
    table = {(r.protocol, r.attack): r.outcome for r in rows}
    assert len(rows) == 6
    assert all(table["pbc", a] == "AdversaryPaired" for a in ("collision", "capture", "timing-control"))
    assert all(table["tep", a] == "TamperDetected" for a in ("collision", "capture", "timing-control"))
