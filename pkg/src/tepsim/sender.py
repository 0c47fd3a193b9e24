"""TEA sender: carrier sense with an override deadline, then the fixed frame layout."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .frame import TeaFrame
from .medium import Kind, Medium, NeverIdle, TxRecord, carrier_sense_wait


@dataclass(frozen=True)
class SenderConfig:
    override_deadline_ticks: int = 200_000  # 1 s at 5 us/tick
    power: float = 1.0
    reserve_extra_difs: bool = True
    guard_ticks: int = 1

    def __post_init__(self):
        if self.override_deadline_ticks <= 0:
            raise ValueError("override_deadline_ticks must be positive")


@dataclass
class TeaTransmission:
    node: str
    frame: TeaFrame
    start: int
    records: list[TxRecord]
    overridden: bool

    @property
    def sync(self) -> tuple[int, int]:
        return self.start, self.start + self.frame.sync_len_ticks

    @property
    def payload(self) -> tuple[int, int]:
        a = self.start + self.frame.payload_offset
        return a, a + self.frame.payload_len_ticks

    @property
    def slot_phase_start(self) -> int:
        return self.start + self.frame.slot_offset

    @property
    def end(self) -> int:
        return self.start + self.frame.total_ticks

    def slot_interval(self, k: int) -> tuple[int, int]:
        a = self.slot_phase_start + k * self.frame.slot_ticks
        return a, a + self.frame.slot_ticks


def send_tea(
    medium: Medium,
    node: str,
    frame: TeaFrame,
    cfg: SenderConfig = SenderConfig(),
    from_tick: int = 0,
    backoff_slots: int = 0,
    visible_to: Optional[Iterable[str]] = None,
    at: Optional[int] = None,
    honest: bool = True,
) -> TeaTransmission:
    """Put ``frame`` on the medium.

    ``at`` pins the start tick and skips carrier sense; a registrar uses it to
    answer inside the window its peer's CTS-to-Self reserved.
    """
    sim = medium.cfg
    deadline = from_tick + cfg.override_deadline_ticks
    overridden = False
    if at is not None:
        start = at
    else:
        try:
            start = carrier_sense_wait(
                medium.view(node), from_tick, sim.difs_ticks, backoff_slots, sim.backoff_slot_ticks, limit=deadline
            )
        except NeverIdle:
            start, overridden = deadline, True

    def tx(a, b, kind, content=None):
        return medium.transmit(node, start + a, start + b, cfg.power, kind, content, honest, visible_to)

    recs = [tx(0, frame.sync_len_ticks, Kind.SYNC)]
    a = frame.payload_offset
    recs.append(tx(a, a + frame.payload_len_ticks, Kind.PAYLOAD, frame.payload.copy()))
    a = frame.cts_offset
    recs.append(tx(a, a + frame.cts_len_ticks, Kind.CTS, {"reserve": frame.cts_reservation_ticks}))
    # Contention window pinned to one: slots sit on exact boundaries.
    base = frame.slot_offset
    for k, bit in enumerate(frame.slots):
        if bit:
            lo = base + k * frame.slot_ticks
            recs.append(tx(lo, lo + frame.slot_ticks, Kind.SLOT, k))
    return TeaTransmission(node, frame, start, recs, overridden)


@dataclass(frozen=True)
class Overlap:
    suspected: bool
    where: tuple[str, ...] = ()


def self_monitor(tx: TeaTransmission, timeline, guard_ticks: int = 1) -> Overlap:
    """Look for foreign energy where a lone sender expects silence.

    Samples ``guard_ticks`` before and after the sync burst, right after the
    last slot, and the whole silent direction slot.
    """
    probes = {
        "before-sync": (tx.sync[0] - guard_ticks, tx.sync[0]),
        "after-sync": (tx.sync[1], tx.sync[1] + guard_ticks),
        "after-slots": (tx.end, tx.end + guard_ticks),
        "direction-off-slot": tx.slot_interval(tx.frame.direction.off_slot),
    }
    hits = []
    for name, (a, b) in probes.items():
        a, b = max(a, 0), min(b, timeline.horizon)
        if a < b and timeline.energy_from_others(tx.node, a, b):
            hits.append(name)
    return Overlap(bool(hits), tuple(hits))
