import itertools
import json

import numpy as np
import pytest

from tepsim.bits import bitstr
from tepsim.frame import (
    DigestConfig,
    Direction,
    PayloadLengthMismatch,
    TeaConfig,
    build_tea,
    digest,
    verify_slots,
)

from conftest import GOLDEN


def test_identity_digest():
    cfg = DigestConfig("identity", 4, test_mode=True)
    assert bitstr(digest("1000", cfg)) == "1000"
    with pytest.raises(PayloadLengthMismatch):
        digest("10", cfg)


def test_digest_deterministic_and_golden():
    golden = json.loads((GOLDEN / "digest.json").read_text())
    a = digest(golden["payload"])
    assert np.array_equal(a, digest(golden["payload"]))
    assert a.size == 128
    assert bitstr(a) == golden["digest_bits"]


def test_odd_digest_length_rejected():
    with pytest.raises(ValueError):
        DigestConfig(output_bits=7)


def test_request_direction_bits():
    f = build_tea(np.zeros(16, dtype=np.uint8), Direction.REQUEST)
    assert bitstr(f.slots[:2]) == "10"


def test_default_frame_shape():
    f = build_tea(np.ones(16, dtype=np.uint8), Direction.REPLY)
    assert f.slots.size == 144
    assert int(f.hash_slots.sum()) == 71
    assert f.slot_phase_ticks == 1152
    assert f.slot_phase_ticks <= f.cts_reservation_ticks <= 6400
    assert max(f.gaps) <= 2


def test_reply_composition():
    f = build_tea("1000", Direction.REPLY, TeaConfig.test_scale(4))
    assert bitstr(f.slots) == "01" + "01101001"


def test_payload_length_checked():
    with pytest.raises(PayloadLengthMismatch):
        build_tea("101", Direction.REQUEST, TeaConfig.test_scale(4))


def test_verify_examples():
    cfg = TeaConfig.test_scale(4)
    f = build_tea("1000", Direction.REQUEST, cfg)
    assert verify_slots(f.slots, "1000", cfg).clean
    bad = f.slots.copy()
    bad[:2] = 1
    assert verify_slots(bad, "1000", cfg).reason == "direction"
    off = int(np.flatnonzero(f.slots[2:] == 0)[0]) + 2
    bad = f.slots.copy()
    bad[off] = 1
    assert verify_slots(bad, "1000", cfg).reason == "balance"
    assert verify_slots(f.slots, "0001", cfg).reason == "hash-mismatch"


def test_production_off_slot_breaks_balance():
    f = build_tea(np.zeros(16, dtype=np.uint8), Direction.REQUEST)
    bad = f.slots.copy()
    bad[2 + int(np.flatnonzero(f.hash_slots == 0)[0])] = 1
    assert verify_slots(bad, f.payload).reason == "balance"


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_round_trip_and_single_flips_exhaustive(n):
    cfg = TeaConfig.test_scale(n)
    for tup in itertools.product([0, 1], repeat=n):
        for d in Direction:
            f = build_tea(tup, d, cfg)
            assert verify_slots(f.slots, tup, cfg).clean
            for k in range(f.slots.size):
                bad = f.slots.copy()
                bad[k] ^= 1
                assert not verify_slots(bad, tup, cfg).clean


@pytest.mark.parametrize("n", [2, 4])
def test_add_only_changes_never_verify(n):
    # Any nonempty set of 0 -> 1 changes breaks the frame.
    cfg = TeaConfig.test_scale(n)
    for tup in itertools.product([0, 1], repeat=n):
        f = build_tea(tup, Direction.REQUEST, cfg)
        zeros = np.flatnonzero(f.slots == 0)
        for r in range(1, zeros.size + 1):
            for pick in itertools.combinations(zeros, r):
                bad = f.slots.copy()
                bad[list(pick)] = 1
                assert not verify_slots(bad, tup, cfg).clean
