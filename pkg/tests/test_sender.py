import numpy as np

from tepsim.frame import Direction, TeaConfig, build_tea
from tepsim.medium import Kind, Medium, SimConfig
from tepsim.sender import SenderConfig, self_monitor, send_tea

SIM = SimConfig()
PAYLOAD = np.array([1, 0] * 8, dtype=np.uint8)


def medium(horizon=250_000):
    return Medium(SIM, horizon, ["s", "r", "x"])


def test_idle_medium_waits_difs():
    m = medium(10_000)
    tx = send_tea(m, "s", build_tea(PAYLOAD, Direction.REQUEST))
    assert tx.start == SIM.difs_ticks and not tx.overridden


def test_override_after_deadline():
    m = medium()
    m.transmit("x", 0, 240_000, kind=Kind.ENERGY, honest=False)
    cfg = SenderConfig()
    tx = send_tea(m, "s", build_tea(PAYLOAD, Direction.REQUEST), cfg, from_tick=100)
    assert tx.overridden and tx.start == 100 + cfg.override_deadline_ticks


def test_slot_energy_matches_frame():
    m = medium(10_000)
    f = build_tea(PAYLOAD, Direction.REPLY)
    tx = send_tea(m, "s", f)
    occ = m.view("r").occupancy
    phase = occ[tx.slot_phase_start : tx.slot_phase_start + f.slots.size * f.slot_ticks]
    assert phase.size == 144 * SIM.slot_ticks
    per_slot = phase.reshape(f.slots.size, f.slot_ticks)
    assert np.array_equal(per_slot.all(axis=1), f.slots.astype(bool))
    assert np.array_equal(per_slot.any(axis=1), f.slots.astype(bool))
    slots = [r for r in tx.records if r.kind is Kind.SLOT]
    assert len(slots) == int(f.slots.sum())


def test_gaps_within_sifs():
    m = medium(10_000)
    tx = send_tea(m, "s", build_tea(PAYLOAD, Direction.REQUEST))
    sync, payload, cts = tx.records[:3]
    assert 0 <= payload.start - sync.end <= SIM.sifs_ticks
    assert 0 <= cts.start - payload.end <= SIM.sifs_ticks
    assert tx.slot_phase_start - cts.end <= SIM.sifs_ticks


def test_deterministic_timing():
    starts = []
    for _ in range(3):
        m = medium(10_000)
        tx = send_tea(m, "s", build_tea(PAYLOAD, Direction.REQUEST), backoff_slots=3)
        starts.append([(r.start, r.end) for r in tx.records])
    assert starts[0] == starts[1] == starts[2]


def test_self_monitor_lone_sender():
    m = medium(10_000)
    tx = send_tea(m, "s", build_tea(PAYLOAD, Direction.REQUEST))
    assert not self_monitor(tx, m.view("s")).suspected


def test_self_monitor_synchronised_opposite_direction():
    m = medium(10_000)
    a = send_tea(m, "s", build_tea(PAYLOAD, Direction.REQUEST), at=50)
    send_tea(m, "x", build_tea(PAYLOAD, Direction.REPLY), at=50)
    ov = self_monitor(a, m.view("s"))
    assert ov.suspected and ov.where == ("direction-off-slot",)


def test_self_monitor_partial_sync_overlap():
    m = medium(20_000)
    a = send_tea(m, "s", build_tea(PAYLOAD, Direction.REQUEST), at=50)
    send_tea(m, "x", build_tea(PAYLOAD, Direction.REQUEST), at=150)
    ov = self_monitor(a, m.view("s"))
    assert ov.suspected and "after-sync" in ov.where
