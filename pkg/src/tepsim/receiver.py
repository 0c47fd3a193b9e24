"""TEA receiver: sync detection, half-slot sensing windows and decoding."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Union

import numpy as np

from . import _kernels
from .bitbalance import BalanceError, unbalance
from .bits import as_bits, is_balanced
from .frame import CLEAN, MISSED, Direction, TeaConfig, Verdict, tampered, verify_slots
from .medium import EnergyTimeline, Kind, decode_frame

PARITY_RULES = ("variance", "even", "odd")


@dataclass(frozen=True)
class ReceiverConfig:
    window_ticks: int = 4
    threshold: int = 2
    skew_ticks: int = 0
    sync_detect_ticks: int = 3400
    long_window_ticks: int = 400
    # "even"/"odd" pin the parity instead of comparing variances. Only useful
    # as a naive-receiver baseline.
    parity_rule: str = "variance"

    def __post_init__(self):
        if not 0 <= self.threshold <= self.window_ticks:
            raise ValueError(f"threshold must lie in 0..{self.window_ticks}")
        if self.skew_ticks < 0:
            raise ValueError("skew_ticks must be non-negative")
        if self.parity_rule not in PARITY_RULES:
            raise ValueError(f"parity_rule must be one of {PARITY_RULES}")

    @classmethod
    def for_sim(cls, sim, **overrides) -> "ReceiverConfig":
        base = cls(
            window_ticks=sim.window_ticks,
            threshold=sim.window_ticks // 2,
            sync_detect_ticks=sim.sync_detect_ticks,
            long_window_ticks=sim.long_window_ticks,
        )
        return replace(base, **overrides)

    @property
    def m(self) -> int:
        return self.window_ticks


@dataclass(frozen=True)
class SensingWindow:
    index: int
    m: int
    e: int

    @property
    def occupancy(self) -> float:
        return self.e / self.m


@dataclass
class SensingReport:
    counts: np.ndarray
    m: int
    threshold: int
    chosen_parity: Optional[str]  # "even", "odd", "tie" or None when ambiguous
    window_bits: np.ndarray
    decoded_slots: Optional[np.ndarray]
    verdict: Verdict
    decoded_direction: Optional[Direction] = None
    decoded_hash: Optional[np.ndarray] = None
    payload: Optional[np.ndarray] = None
    sync_end: Optional[int] = None
    slot_phase_start: Optional[int] = None
    end_tick: Optional[int] = None
    extra: dict = field(default_factory=dict)

    @property
    def windows(self) -> list[SensingWindow]:
        return [SensingWindow(i, self.m, int(e)) for i, e in enumerate(self.counts)]

    @property
    def occupancies(self) -> np.ndarray:
        return self.counts / self.m


def _occupancy(timeline, listener: Optional[str] = None) -> np.ndarray:
    if isinstance(timeline, EnergyTimeline):
        return timeline.occupancy_excluding(listener) if listener else np.asarray(timeline.occupancy)
    return np.asarray(timeline, dtype=bool)


def detect_sync(timeline, cfg: ReceiverConfig, start: int = 0, listener: Optional[str] = None) -> Optional[int]:
    """End tick of the first continuous burst of at least sync_detect_ticks."""
    occ = _occupancy(timeline, listener)[start:]
    if occ.size == 0:
        return None
    edges = np.flatnonzero(np.diff(np.concatenate([[0], occ.astype(np.int8), [0]])))
    for a, b in zip(edges[0::2], edges[1::2]):
        if b - a >= cfg.sync_detect_ticks:
            return start + int(b)
    return None


def measure_slots(timeline, slot_phase_start: int, num_slots: int, cfg: ReceiverConfig,
                  listener: Optional[str] = None) -> list[SensingWindow]:
    occ = _occupancy(timeline, listener)
    counts = _kernels.window_counts(
        np.ascontiguousarray(occ, dtype=np.bool_), slot_phase_start + cfg.skew_ticks, 2 * num_slots, cfg.m
    )
    return [SensingWindow(i, cfg.m, int(e)) for i, e in enumerate(counts)]


def _score(values: np.ndarray) -> int:
    # n * sum(e^2) - (sum e)^2 == n^2 * variance; exact integer comparison.
    v = values.astype(np.int64)
    return int(v.size * (v * v).sum() - v.sum() ** 2)


def choose_parity(counts: np.ndarray, threshold: int, rule: str = "variance"):
    """Pick the sensing-window parity to decode.

    Returns ``(parity, bits)``; parity is "even", "odd", "tie" (both parities
    decode identically) or None when a tie decodes two different ways.
    """
    counts = np.asarray(counts)
    even, odd = counts[0::2], counts[1::2]
    bits_even = (even > threshold).astype(np.uint8)
    bits_odd = (odd > threshold).astype(np.uint8)
    if rule == "even":
        return "even", bits_even
    if rule == "odd":
        return "odd", bits_odd
    s_even, s_odd = _score(even), _score(odd)
    if s_even > s_odd:
        return "even", bits_even
    if s_odd > s_even:
        return "odd", bits_odd
    if np.array_equal(bits_even, bits_odd):
        return "tie", bits_even
    return None, None


def select_parity_and_decode(windows: Union[Sequence[SensingWindow], np.ndarray], cfg: ReceiverConfig,
                             direction_bits: int = 2) -> SensingReport:
    if len(windows) and isinstance(windows[0], SensingWindow):
        counts = np.array([w.e for w in windows], dtype=np.int64)
    else:
        counts = np.asarray(windows, dtype=np.int64)
    if counts.size % 2:
        raise ValueError("need an even number of sensing windows")
    window_bits = (counts > cfg.threshold).astype(np.uint8)
    parity, slots = choose_parity(counts, cfg.threshold, cfg.parity_rule)
    report = SensingReport(counts, cfg.m, cfg.threshold, parity, window_bits, slots, CLEAN)
    if slots is None:
        report.verdict = tampered("ambiguous")
        return report
    if direction_bits:
        report.decoded_direction = Direction.from_bits(slots[:direction_bits])
        if report.decoded_direction is None:
            report.verdict = tampered("direction")
            return report
    report.decoded_hash = slots[direction_bits:]
    if not is_balanced(report.decoded_hash):
        report.verdict = tampered("balance")
    elif direction_bits:
        try:
            unbalance(report.decoded_hash)
        except BalanceError:
            report.verdict = tampered("decode")
    return report


def receive_tea(timeline: EnergyTimeline, cfg: ReceiverConfig, tea: TeaConfig = TeaConfig(),
                listener: Optional[str] = None, start: int = 0) -> Optional[SensingReport]:
    """Receive the first TEA at or after ``start``; None when no sync is heard."""
    if cfg.m != tea.sim.window_ticks:
        raise ValueError("receiver window does not match the simulation profile")
    occ = _occupancy(timeline, listener)
    sync_end = detect_sync(occ, cfg, start)
    if sync_end is None:
        return None
    sim = tea.sim
    gap = sim.sifs_ticks
    pay_start = sync_end + gap
    pay_end = pay_start + tea.payload_ticks
    slot_start = pay_end + gap + sim.cts_frame_ticks + gap
    num_slots = tea.num_slots
    end_tick = slot_start + num_slots * sim.slot_ticks + cfg.skew_ticks

    others = [r for r in timeline.records if r.source != listener]
    candidates = [r for r in others if r.kind is Kind.PAYLOAD and r.overlaps(pay_start, pay_end)]
    windows = measure_slots(occ, slot_start, num_slots, cfg)
    counts = np.array([w.e for w in windows], dtype=np.int64)

    def bare(verdict: Verdict) -> SensingReport:
        return SensingReport(counts, cfg.m, cfg.threshold, None, (counts > cfg.threshold).astype(np.uint8),
                             None, verdict, sync_end=sync_end, slot_phase_start=slot_start, end_tick=end_tick)

    if not candidates or not counts.any():
        return bare(MISSED if not candidates else Verdict("missed", "no-slots"))
    frame = decode_frame(others, (pay_start, pay_end), sim.capture_factor, kinds=[Kind.PAYLOAD])
    if frame is None:
        return bare(tampered("payload-decode"))
    payload = as_bits(frame.content)

    report = select_parity_and_decode(windows, cfg)
    report.payload = payload
    report.sync_end = sync_end
    report.slot_phase_start = slot_start
    report.end_tick = end_tick
    if report.verdict.clean:
        report.verdict = verify_slots(report.decoded_slots, payload, tea)
    return report


def receive_all(timeline: EnergyTimeline, cfg: ReceiverConfig, tea: TeaConfig = TeaConfig(),
                listener: Optional[str] = None, start: int = 0) -> list[SensingReport]:
    reports = []
    while True:
        rep = receive_tea(timeline, cfg, tea, listener, start)
        if rep is None:
            return reports
        reports.append(rep)
        start = max(rep.end_tick, rep.sync_end + 1)
