import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tepsim.medium import (
    EnergyTimeline,
    Kind,
    Medium,
    NeverIdle,
    SimConfig,
    TxRecord,
    carrier_sense_wait,
    decode_frame,
    transmit,
)


def test_transmit_marks_interval():
    tl = EnergyTimeline(20)
    transmit(tl, "a", (0, 10))
    assert tl.occupancy[:10].all() and not tl.occupancy[10:].any()


def test_union_of_overlaps():
    tl = EnergyTimeline(20)
    transmit(tl, "a", (2, 8))
    transmit(tl, "b", (5, 12))
    assert np.array_equal(np.flatnonzero(tl.occupancy), np.arange(2, 12))
    assert sorted(tl.contributions(6)) == [("a", 1.0), ("b", 1.0)]


def test_occupancy_is_read_only():
    tl = EnergyTimeline(5)
    with pytest.raises(ValueError):
        tl.occupancy[0] = True


def test_empty_interval_rejected():
    with pytest.raises(ValueError):
        TxRecord("a", 3, 3)


def test_adversary_on_off_slot_keeps_on_slots():
    tl = EnergyTimeline(32)
    transmit(tl, "s", (0, 8), kind=Kind.SLOT)
    before = tl.occupancy.copy()
    transmit(tl, "x", (8, 16), kind=Kind.ENERGY, honest=False)
    assert tl.occupancy[8:16].all()
    assert np.array_equal(tl.occupancy[:8], before[:8])


def test_carrier_sense_examples():
    idle = np.zeros(1000, dtype=bool)
    assert carrier_sense_wait(idle, 0, 6, 0, 4) == 6
    busy = idle.copy()
    busy[:100] = True
    assert carrier_sense_wait(busy, 0, 6, 3, 4) == 100 + 6 + 3 * 4
    with pytest.raises(NeverIdle):
        carrier_sense_wait(np.ones(1000, dtype=bool), 0, 6, 0, 4)


def test_backoff_freezes_while_busy():
    occ = np.zeros(200, dtype=bool)
    occ[20:50] = True
    # DIFS 6 then 3 of 5 slots fit before tick 20; 2 remain after the next DIFS.
    assert carrier_sense_wait(occ, 0, 6, 5, 4) == 50 + 6 + 2 * 4


def test_decode_frame_examples():
    a = TxRecord("e", 0, 10, 1.0, Kind.PROBE)
    b = TxRecord("x", 0, 10, 1.0, Kind.PROBE)
    c = TxRecord("x", 0, 10, 10.0, Kind.PROBE)
    assert decode_frame([a], (0, 10)) is a
    assert decode_frame([a, b], (0, 10), 2.0) is None
    assert decode_frame([a, c], (0, 10), 2.0) is c


def test_honest_packet_bound():
    m = Medium(SimConfig(), 5000, ["a"])
    with pytest.raises(ValueError):
        m.transmit("a", 0, 2401, kind=Kind.DATA)
    m.transmit("a", 0, 2400, kind=Kind.DATA)
    m.transmit("x", 0, 4000, kind=Kind.ENERGY, honest=False)


def test_visibility():
    m = Medium(SimConfig(), 100, ["a", "b", "c"])
    m.transmit("a", 0, 10, visible_to={"b"})
    assert m.view("b").occupancy[0] and m.view("a").occupancy[0]
    assert not m.view("c").occupancy.any()


def test_config_invariants():
    with pytest.raises(ValueError):
        SimConfig(window_ticks=4, slot_ticks=9)
    sim = SimConfig.from_microseconds(difs_us=28)
    assert sim.difs_ticks == 6  # 5.6 rounds up
    assert SimConfig.from_microseconds(difs_us=34).difs_ticks == 7
    assert sim.max_packet_ticks == 2400
    assert sim.contention_window(1) == 15 and sim.contention_window(10) == 255


ops = st.lists(st.tuples(st.integers(0, 63), st.integers(1, 16), st.sampled_from(["a", "b"])), max_size=20)


@given(ops)
def test_add_only_property(seq):
    tl = EnergyTimeline(80)
    prev = tl.occupancy.copy()
    for start, length, src in seq:
        transmit(tl, src, (start, start + length), honest=src == "a")
        cur = tl.occupancy.copy()
        assert not (prev & ~cur).any()
        prev = cur
    for t in range(80):
        assert bool(tl.occupancy[t]) == bool(tl.contributions(t))
