"""Tamper-evident announcement frames.

A frame is a synchronization burst, a fixed-length payload, a CTS-to-Self and
an on/off-slot phase. The slot phase carries two direction bits followed by
the bit-balanced digest of the payload.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .bitbalance import BalanceError, balance, code_length, unbalance
from .bits import BitsLike, as_bits, is_balanced
from .medium import SimConfig


class Direction(Enum):
    REQUEST = (1, 0)
    REPLY = (0, 1)

    @property
    def bits(self) -> np.ndarray:
        return np.array(self.value, dtype=np.uint8)

    @property
    def off_slot(self) -> int:
        """Index of the direction slot that is silent."""
        return self.value.index(0)

    @classmethod
    def from_bits(cls, bits: BitsLike) -> Optional["Direction"]:
        key = tuple(int(b) for b in as_bits(bits))
        for d in cls:
            if d.value == key:
                return d
        return None


@dataclass(frozen=True)
class Verdict:
    status: str  # "clean", "tampered" or "missed"
    reason: Optional[str] = None

    @property
    def clean(self) -> bool:
        return self.status == "clean"

    def __str__(self) -> str:
        return self.status if self.reason is None else f"{self.status}({self.reason})"


CLEAN = Verdict("clean")
MISSED = Verdict("missed", "no-payload")


def tampered(reason: str) -> Verdict:
    return Verdict("tampered", reason)


class PayloadLengthMismatch(ValueError):
    pass


@dataclass(frozen=True)
class DigestConfig:
    algorithm: str = "blake2b"
    output_bits: int = 128
    test_mode: bool = False

    def __post_init__(self):
        if self.output_bits < 2 or self.output_bits % 2:
            raise ValueError("output_bits must be even and >= 2")
        if not self.test_mode and self.output_bits > 512:
            raise ValueError("output_bits too large for the digest")


def digest(payload: BitsLike, cfg: DigestConfig = DigestConfig()) -> np.ndarray:
    bits = as_bits(payload)
    if cfg.test_mode:
        if bits.size != cfg.output_bits:
            raise PayloadLengthMismatch(
                f"test digest needs a {cfg.output_bits}-bit payload, got {bits.size}"
            )
        return bits.copy()
    data = np.packbits(bits).tobytes()
    nbytes = (cfg.output_bits + 7) // 8
    if cfg.algorithm == "blake2b":
        raw = hashlib.blake2b(data, digest_size=nbytes).digest()
    else:
        raw = hashlib.new(cfg.algorithm, data).digest()
        if len(raw) < nbytes:
            raise ValueError(f"{cfg.algorithm} yields only {8 * len(raw)} bits")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8))[: cfg.output_bits]


@dataclass(frozen=True)
class TeaConfig:
    sim: SimConfig = field(default_factory=SimConfig)
    digest: DigestConfig = field(default_factory=DigestConfig)
    payload_bits: int = 16

    @property
    def payload_ticks(self) -> int:
        # Payload goes out at 1 Mbps.
        return max(1, self.sim.ticks(self.payload_bits))

    @property
    def num_slots(self) -> int:
        return 2 + code_length(self.digest.output_bits)

    @classmethod
    def test_scale(cls, payload_bits: int, sim: Optional[SimConfig] = None) -> "TeaConfig":
        """Identity digest on short payloads, for exhaustive runs."""
        return cls(sim or SimConfig(), DigestConfig("identity", payload_bits, True), payload_bits)


@dataclass(frozen=True)
class TeaFrame:
    direction: Direction
    payload: np.ndarray
    slots: np.ndarray
    sync_len_ticks: int
    payload_len_ticks: int
    cts_len_ticks: int
    cts_reservation_ticks: int
    slot_ticks: int
    gaps: tuple[int, int, int]

    @property
    def payload_offset(self) -> int:
        return self.sync_len_ticks + self.gaps[0]

    @property
    def cts_offset(self) -> int:
        return self.payload_offset + self.payload_len_ticks + self.gaps[1]

    @property
    def slot_offset(self) -> int:
        return self.cts_offset + self.cts_len_ticks + self.gaps[2]

    @property
    def slot_phase_ticks(self) -> int:
        return self.slots.size * self.slot_ticks

    @property
    def total_ticks(self) -> int:
        return self.slot_offset + self.slot_phase_ticks

    @property
    def hash_slots(self) -> np.ndarray:
        return self.slots[2:]


def build_tea(
    payload: BitsLike,
    direction: Direction,
    cfg: TeaConfig = TeaConfig(),
    reserve_extra_difs: bool = True,
) -> TeaFrame:
    p = as_bits(payload)
    if p.size != cfg.payload_bits:
        raise PayloadLengthMismatch(f"payload must be {cfg.payload_bits} bits, got {p.size}")
    sim = cfg.sim
    code = balance(digest(p, cfg.digest)).output
    slots = np.concatenate([direction.bits, code])
    gap = sim.sifs_ticks
    reservation = gap + slots.size * sim.slot_ticks
    if direction is Direction.REQUEST and reserve_extra_difs:
        reservation += sim.difs_ticks
    if reservation > sim.cts_max_ticks:
        raise ValueError(f"slot phase needs {reservation} ticks, CTS can reserve {sim.cts_max_ticks}")
    return TeaFrame(
        direction=direction,
        payload=p,
        slots=slots,
        sync_len_ticks=sim.sync_tx_ticks,
        payload_len_ticks=cfg.payload_ticks,
        cts_len_ticks=sim.cts_frame_ticks,
        cts_reservation_ticks=reservation,
        slot_ticks=sim.slot_ticks,
        gaps=(gap, gap, gap),
    )


def verify_slots(slots: BitsLike, payload: BitsLike, cfg: TeaConfig = TeaConfig()) -> Verdict:
    s = as_bits(slots)
    if s.size < 2 or Direction.from_bits(s[:2]) is None:
        return tampered("direction")
    code = s[2:]
    if not is_balanced(code):
        return tampered("balance")
    try:
        decoded = unbalance(code)
    except BalanceError:
        return tampered("decode")
    try:
        expected = digest(payload, cfg.digest)
    except PayloadLengthMismatch:
        return tampered("payload-length")
    if not np.array_equal(decoded, expected):
        return tampered("hash-mismatch")
    return CLEAN
