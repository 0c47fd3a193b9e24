"""Discrete-time shared wireless medium.

Time is a global integer tick clock. Each listener has its own add-only
:class:`EnergyTimeline`; a transmission is appended to the timelines of the
nodes that can hear it (all of them unless a visibility set is given, which
is how directional antennas are modelled). Nothing ever clears energy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterable, Optional, Sequence

import numpy as np


class Kind(str, Enum):
    SYNC = "sync"
    PAYLOAD = "payload"
    CTS = "cts"
    SLOT = "slot"
    PROBE = "probe"
    DATA = "data"
    ENERGY = "energy"  # undecodable noise / jamming


class NeverIdle(RuntimeError):
    """The medium never stayed idle long enough before the horizon."""


def us_to_ticks(us: float, tick_us: float) -> int:
    # Round up: a node must never under-wait.
    return max(0, math.ceil(round(us / tick_us, 9)))


@dataclass(frozen=True)
class SimConfig:
    tick_us: float = 5.0
    difs_ticks: int = 10
    sifs_ticks: int = 2
    window_ticks: int = 4
    slot_ticks: int = 8
    backoff_slot_ticks: int = 4
    sync_tx_ticks: int = 3840
    sync_detect_ticks: int = 3400
    long_window_ticks: int = 400
    cw_exponent_c: int = 4
    max_packet_ticks: int = 2400
    cts_frame_ticks: int = 23
    cts_max_ticks: int = 6400
    probe_ticks: int = 160
    capture_factor: float = 2.0

    def __post_init__(self):
        if self.slot_ticks != 2 * self.window_ticks:
            raise ValueError("slot_ticks must be twice window_ticks")
        if self.sync_detect_ticks > self.sync_tx_ticks:
            raise ValueError("sync_detect_ticks must not exceed sync_tx_ticks")
        if self.sifs_ticks < 1:
            raise ValueError("sifs_ticks must be at least one tick")

    @classmethod
    def from_microseconds(
        cls,
        tick_us: float = 5.0,
        difs_us: float = 50.0,
        sifs_us: float = 10.0,
        window_us: float = 20.0,
        backoff_slot_us: float = 20.0,
        sync_tx_us: float = 19_200.0,
        sync_detect_us: float = 17_000.0,
        long_window_us: float = 2_000.0,
        max_packet_us: float = 12_000.0,
        cts_frame_us: float = 112.0,
        cts_max_us: float = 32_000.0,
        probe_us: float = 800.0,
        cw_exponent_c: int = 4,
        capture_factor: float = 2.0,
    ) -> "SimConfig":
        t = lambda us: us_to_ticks(us, tick_us)  # noqa: E731
        window = t(window_us)
        return cls(
            tick_us=tick_us,
            difs_ticks=t(difs_us),
            sifs_ticks=t(sifs_us),
            window_ticks=window,
            slot_ticks=2 * window,
            backoff_slot_ticks=t(backoff_slot_us),
            sync_tx_ticks=t(sync_tx_us),
            sync_detect_ticks=t(sync_detect_us),
            long_window_ticks=t(long_window_us),
            cw_exponent_c=cw_exponent_c,
            max_packet_ticks=t(max_packet_us),
            cts_frame_ticks=t(cts_frame_us),
            cts_max_ticks=t(cts_max_us),
            probe_ticks=t(probe_us),
            capture_factor=capture_factor,
        )

    def ticks(self, us: float) -> int:
        return us_to_ticks(us, self.tick_us)

    def us(self, ticks: int) -> float:
        return ticks * self.tick_us

    def contention_window(self, attempts: int) -> int:
        """Largest backoff draw after ``attempts`` failed tries."""
        return min(2 ** (self.cw_exponent_c + attempts - 1) - 1, 255)


@dataclass(frozen=True)
class TxRecord:
    source: str
    start: int
    end: int
    power: float = 1.0
    kind: Kind = Kind.DATA
    content: Any = None
    honest: bool = True
    visible_to: Optional[frozenset] = None

    def __post_init__(self):
        if not self.start < self.end:
            raise ValueError(f"empty transmission interval [{self.start}, {self.end})")

    @property
    def duration(self) -> int:
        return self.end - self.start

    def overlaps(self, start: int, end: int) -> bool:
        return self.start < end and start < self.end


class EnergyTimeline:
    """Per-tick occupancy as heard by one listener. Add-only."""

    def __init__(self, horizon: int):
        self.horizon = int(horizon)
        self._occ = np.zeros(self.horizon, dtype=bool)
        self.records: list[TxRecord] = []

    @property
    def occupancy(self) -> np.ndarray:
        view = self._occ.view()
        view.flags.writeable = False
        return view

    def add(self, rec: TxRecord) -> TxRecord:
        if rec.start < 0 or rec.end > self.horizon:
            raise ValueError(f"transmission [{rec.start}, {rec.end}) outside horizon {self.horizon}")
        self._occ[rec.start : rec.end] = True
        self.records.append(rec)
        return rec

    def contributions(self, tick: int) -> list[tuple[str, float]]:
        return [(r.source, r.power) for r in self.records if r.start <= tick < r.end]

    def occupancy_excluding(self, source: str) -> np.ndarray:
        occ = np.zeros(self.horizon, dtype=bool)
        for r in self.records:
            if r.source != source:
                occ[r.start : r.end] = True
        return occ

    def energy_from_others(self, source: str, start: int, end: int) -> bool:
        return any(r.source != source and r.overlaps(start, end) for r in self.records)


def transmit(
    timeline: EnergyTimeline,
    source: str,
    interval: tuple[int, int],
    power: float = 1.0,
    kind: Kind = Kind.DATA,
    content: Any = None,
    honest: bool = True,
) -> TxRecord:
    return timeline.add(TxRecord(source, int(interval[0]), int(interval[1]), power, kind, content, honest))


class Medium:
    """A set of listener timelines sharing one tick clock."""

    def __init__(self, cfg: SimConfig, horizon: int, listeners: Iterable[str]):
        self.cfg = cfg
        self.horizon = int(horizon)
        self.views = {name: EnergyTimeline(self.horizon) for name in listeners}
        self.ether = EnergyTimeline(self.horizon)

    @property
    def records(self) -> list[TxRecord]:
        return self.ether.records

    def view(self, node: str) -> EnergyTimeline:
        return self.views[node]

    def transmit(
        self,
        source: str,
        start: int,
        end: int,
        power: float = 1.0,
        kind: Kind = Kind.DATA,
        content: Any = None,
        honest: bool = True,
        visible_to: Optional[Iterable[str]] = None,
    ) -> TxRecord:
        vis = None if visible_to is None else frozenset(visible_to) | {source}
        rec = TxRecord(source, int(start), int(end), float(power), Kind(kind), content, honest, vis)
        if honest and rec.kind in (Kind.PROBE, Kind.DATA) and rec.duration > self.cfg.max_packet_ticks:
            raise ValueError(f"honest {rec.kind.value} frame of {rec.duration} ticks exceeds max packet time")
        self.ether.add(rec)
        for name, tl in self.views.items():
            if vis is None or name in vis:
                tl.add(rec)
        return rec


def _idle_runs(occ: np.ndarray, start: int) -> Iterable[tuple[int, int]]:
    seg = ~np.asarray(occ[start:], dtype=bool)
    if seg.size == 0:
        return []
    edges = np.flatnonzero(np.diff(np.concatenate([[False], seg, [False]]).astype(np.int8)))
    return [(start + int(a), start + int(b)) for a, b in zip(edges[0::2], edges[1::2])]


def carrier_sense_wait(
    timeline,
    from_tick: int,
    difs_ticks: int,
    backoff_slots: int,
    slot_ticks: int,
    limit: Optional[int] = None,
) -> int:
    """First tick a DCF station may start transmitting.

    The station needs ``difs_ticks`` idle ticks, then counts down
    ``backoff_slots`` idle slots; busy medium freezes the countdown and a new
    DIFS is required before it resumes. ``limit`` caps the returned tick.
    """
    occ = timeline.occupancy if isinstance(timeline, EnergyTimeline) else np.asarray(timeline)
    remaining = int(backoff_slots)
    for a, b in _idle_runs(occ, int(from_tick)):
        usable = b - a - difs_ticks
        if usable < 0:
            continue
        if remaining * slot_ticks <= usable:
            t = a + difs_ticks + remaining * slot_ticks
            if limit is not None and t > limit:
                break
            return t
        remaining -= usable // slot_ticks
        if limit is not None and b > limit:
            break
    raise NeverIdle(f"medium never idle for DIFS+{backoff_slots} slots after tick {from_tick}")


def decode_frame(
    records: Sequence[TxRecord],
    interval: tuple[int, int],
    capture_factor: float = 2.0,
    kinds: Optional[Iterable[Kind]] = None,
) -> Optional[TxRecord]:
    """Frame a power-based receiver would decode over ``interval``.

    Every overlapping transmission interferes; the strongest candidate wins
    only if its power is at least ``capture_factor`` times the rest combined.
    """
    start, end = interval
    hits = [r for r in records if r.overlaps(start, end)]
    if not hits:
        return None
    wanted = None if kinds is None else {Kind(k) for k in kinds}
    best = max(hits, key=lambda r: r.power)
    if best.kind is Kind.ENERGY or (wanted is not None and best.kind not in wanted):
        return None
    if len(hits) == 1:
        return best
    rest = sum(r.power for r in hits) - best.power
    return best if best.power >= capture_factor * rest else None
