"""Attacker strategies.

The attacker may add energy anywhere and overpower frames, but can never
remove energy. During a slot phase its action is canonicalised to a count of
extra energized ticks per sensing window: the receiver only looks at those
counts, so nothing is lost by the reduction.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import numpy as np

from .bits import BitsLike, as_bits
from .medium import EnergyTimeline, Kind, Medium, TxRecord
from .receiver import choose_parity


class NoScheduleExists(ValueError):
    """No slot-phase schedule yields an accepted, altered hash."""


def slot_base_counts(slots: BitsLike, m: int, skew: int) -> np.ndarray:
    """Per-window energized counts the sender alone produces at the receiver.

    The sender energizes ``2*m`` ticks per on-slot; the receiver starts
    ``skew`` ticks late and takes one measurement per tick.
    """
    s = as_bits(slots)
    n = s.size
    tl = EnergyTimeline(skew + 2 * n * m)
    for k in np.flatnonzero(s):
        tl.add(TxRecord("sender", 2 * int(k) * m, 2 * (int(k) + 1) * m, kind=Kind.SLOT))
    occ = tl.occupancy
    return occ[skew : skew + 2 * n * m].reshape(2 * n, m).sum(axis=1).astype(np.int64)


@dataclass(frozen=True)
class AdversarySchedule:
    """Extra energized ticks per sensing window, plus raw tick injections."""

    counts: tuple[int, ...]
    m: int
    ticks: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if any(c < 0 or c > self.m for c in self.counts):
            raise ValueError("window counts must lie in 0..m")

    @classmethod
    def passive(cls, n_windows: int, m: int) -> "AdversarySchedule":
        return cls((0,) * n_windows, m)

    def check(self, base: Sequence[int]) -> None:
        for w, (a, b) in enumerate(zip(self.counts, base)):
            if a > self.m - b:
                raise ValueError(f"window {w}: {a} extra ticks but only {self.m - b} silent")

    def windows(self, base: Sequence[int]) -> np.ndarray:
        return np.asarray(base, dtype=np.int64) + np.asarray(self.counts, dtype=np.int64)


def _zero_set(sent: np.ndarray, allowed: np.ndarray, target: Optional[np.ndarray]):
    n = sent.size
    if target is not None:
        zeros = np.flatnonzero(target == 0)
        return zeros if np.all(allowed[zeros]) else None
    zero_ok = np.flatnonzero(allowed)
    if zero_ok.size < n // 2:
        return None
    keep = [k for k in zero_ok if sent[k] == 0]
    fresh = [k for k in zero_ok if sent[k] == 1]
    if not fresh:
        return None
    # Keep as many of the sender's zeros as possible, but move at least one.
    keep = keep[: n // 2 - 1]
    pool = fresh + [k for k in zero_ok if sent[k] == 0 and k not in keep]
    return np.array(sorted(keep + pool[: n // 2 - len(keep)]), dtype=np.int64)


def skew_shift_schedule(sent_hash: BitsLike, params, target: Optional[BitsLike] = None) -> AdversarySchedule:
    """Schedule that makes the receiver accept a different balanced hash.

    ``params`` needs ``m``, ``threshold`` and ``skew``. Windows of the parity
    to be decoded are filled where the target has a 1 and left alone where it
    has a 0; every window of the other parity is filled completely so its
    variance drops to zero.
    """
    sent = as_bits(sent_hash)
    n = sent.size
    m, thr, skew = params.m, params.threshold, params.skew
    tgt = None if target is None else as_bits(target)
    if tgt is not None and (tgt.size != n or 2 * int(tgt.sum()) != n or np.array_equal(tgt, sent)):
        raise NoScheduleExists("target must be a different balanced string of the same length")
    if m <= thr or n < 2:
        raise NoScheduleExists("no window can ever read as occupied")
    base = slot_base_counts(sent, m, skew)
    for parity in (1, 0):
        own = base[parity::2]
        zeros = _zero_set(sent, own <= thr, tgt)
        if zeros is None:
            continue
        d = np.ones(n, dtype=np.uint8)
        d[zeros] = 0
        extra = (m - base).copy()
        idx = 2 * np.flatnonzero(d == 0) + parity
        extra[idx] = 0
        sched = AdversarySchedule(tuple(int(x) for x in extra), m)
        label, bits = choose_parity(sched.windows(base), thr)
        if bits is not None and label in ("odd" if parity else "even", "tie") and np.array_equal(bits, d):
            return sched
    raise NoScheduleExists(
        f"skew {skew} < m - threshold = {m - thr}" if skew < m - thr else "no reachable balanced hash"
    )


def inject_schedule(
    medium: Medium,
    source: str,
    schedule: AdversarySchedule,
    slot_phase_start: int,
    skew: int,
    listener: str,
    visible_to=None,
) -> list[TxRecord]:
    """Realise per-window counts as energy on the listener's silent ticks."""
    occ = medium.view(listener).occupancy
    m = schedule.m
    recs = []
    for w, a in enumerate(schedule.counts):
        if not a:
            continue
        lo = slot_phase_start + skew + w * m
        silent = [t for t in range(lo, lo + m) if t < occ.size and not occ[t]][:a]
        if len(silent) < a:
            raise ValueError(f"window {w} has only {len(silent)} silent ticks")
        run_start = prev = silent[0]
        for t in silent[1:] + [None]:
            if t is not None and t == prev + 1:
                prev = t
                continue
            recs.append(medium.transmit(source, run_start, prev + 1, 1.0, Kind.ENERGY, honest=False,
                                        visible_to=visible_to))
            if t is not None:
                run_start = prev = t
    for a, b in schedule.ticks:
        recs.append(medium.transmit(source, a, b, 1.0, Kind.ENERGY, honest=False, visible_to=visible_to))
    return recs


# ---------------------------------------------------------------------------
# Strategies
# ---------------------------------------------------------------------------


@dataclass
class AttackContext:
    """What an attacker can see and use during one exchange."""

    medium: Medium
    phase: str  # "pre", "tea" or "frame"
    protocol: str  # "tep" or "pbc"
    adversary: str
    payload: np.ndarray  # attacker's own key, already encoded
    target: Any = None  # TeaTransmission or TxRecord being attacked
    listener: Optional[str] = None  # node the target is meant for
    tea: Any = None
    receiver: Any = None
    from_tick: int = 0
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class FollowUp:
    """A frame the attacker sends on its own once the medium is free."""

    role: str  # "enrollee" or "registrar"
    payload: Optional[np.ndarray] = None
    visible_to: Optional[frozenset] = None
    start: Optional[int] = None  # fixed start tick, bypassing carrier sense
    power: float = 1.0


@dataclass(frozen=True)
class Strategy:
    # Nodes that hear the attacker; None means everyone.
    visible_to: Optional[frozenset] = field(default=None, kw_only=True)

    name = "strategy"

    def pre(self, ctx: AttackContext) -> list[FollowUp]:
        return []

    def on_tea(self, ctx: AttackContext) -> list[FollowUp]:
        return []

    def on_frame(self, ctx: AttackContext) -> list[FollowUp]:
        return []

    def _vis(self, ctx):
        return self.visible_to


def _role_of(direction_or_kind) -> str:
    name = getattr(direction_or_kind, "name", str(direction_or_kind))
    return "enrollee" if name in ("REQUEST", "PROBE", "probe") else "registrar"


def _target_role(ctx) -> str:
    t = ctx.target
    if hasattr(t, "frame"):
        return _role_of(t.frame.direction)
    return _role_of(t.kind.value)


@dataclass(frozen=True)
class Passive(Strategy):
    name = "passive"


@dataclass(frozen=True)
class PayloadEdit(Strategy):
    """Overpower the payload packet with a fixed replacement."""

    payload: Optional[tuple[int, ...]] = None
    power: float = 10.0
    name = "payload-edit"

    def on_tea(self, ctx):
        a, b = ctx.target.payload
        content = ctx.payload if self.payload is None else as_bits(self.payload)
        ctx.medium.transmit(ctx.adversary, a, b, self.power, Kind.PAYLOAD, content.copy(), honest=False,
                            visible_to=self._vis(ctx))
        return []


@dataclass(frozen=True)
class OffSlotEnergy(Strategy):
    """Transmit during chosen slots of the slot phase.

    ``parts`` maps a slot index to "whole", "first" or "second" (half).
    When None, every off-slot is energized whole.
    """

    parts: Optional[tuple[tuple[int, str], ...]] = None
    name = "off-slot-energy"

    def on_tea(self, ctx):
        tx = ctx.target
        plan = self.parts
        if plan is None:
            plan = tuple((int(k), "whole") for k in np.flatnonzero(tx.frame.slots == 0))
        half = tx.frame.slot_ticks // 2
        for k, part in plan:
            a, b = tx.slot_interval(k)
            if part == "first":
                b = a + half
            elif part == "second":
                a = a + half
            elif part != "whole":
                raise ValueError(f"unknown slot part {part!r}")
            ctx.medium.transmit(ctx.adversary, a, b, 1.0, Kind.ENERGY, honest=False, visible_to=self._vis(ctx))
        return []


@dataclass(frozen=True)
class Collide(Strategy):
    """Jam the victim's frame at equal power, then send an impersonation."""

    power: float = 1.0
    name = "collision"

    def on_tea(self, ctx):
        a, b = ctx.target.payload
        ctx.medium.transmit(ctx.adversary, a, b, self.power, Kind.ENERGY, honest=False, visible_to=self._vis(ctx))
        return [FollowUp(_target_role(ctx), ctx.payload, self.visible_to)]

    def on_frame(self, ctx):
        rec = ctx.target
        ctx.medium.transmit(ctx.adversary, rec.start, rec.end, self.power, Kind.ENERGY, honest=False,
                            visible_to=self._vis(ctx))
        return [FollowUp(_target_role(ctx), ctx.payload, self.visible_to)]


@dataclass(frozen=True)
class Capture(Strategy):
    """Send the attacker's own frame on top of the victim's at high power."""

    power: float = 10.0
    name = "capture"

    def on_tea(self, ctx):
        return [FollowUp(_target_role(ctx), ctx.payload, self.visible_to, ctx.target.start, self.power)]

    def on_frame(self, ctx):
        return [FollowUp(_target_role(ctx), ctx.payload, self.visible_to, ctx.target.start, self.power)]


@dataclass(frozen=True)
class Hog(Strategy):
    """Announce the attacker's own key, then keep the medium busy."""

    duration_ticks: int = 210_000
    announce: bool = True
    name = "timing-control"

    def pre(self, ctx):
        ctx.extra["hog"] = self
        return [FollowUp("enrollee", ctx.payload, self.visible_to, start=ctx.from_tick)] if self.announce else []


@dataclass(frozen=True)
class Impersonate(Strategy):
    """Send a protocol-conformant frame as ``role`` with the attacker's key."""

    role: str = "enrollee"
    name = "impersonate"

    def pre(self, ctx):
        return [FollowUp("enrollee", ctx.payload, self.visible_to)] if self.role == "enrollee" else []

    def on_tea(self, ctx):
        if self.role == "registrar" and _target_role(ctx) == "enrollee":
            return [FollowUp("registrar", ctx.payload, self.visible_to)]
        return []

    def on_frame(self, ctx):
        return self.on_tea(ctx)


@dataclass(frozen=True)
class SkewShift(Strategy):
    """Edit the payload and reshape slot energy so the new hash is accepted.

    Only works while the receiver's skew satisfies skew >= m - threshold. The
    attacker searches its own key space for a key whose slot encoding is
    reachable; ``candidates`` lists encoded payloads to try in order.
    """

    candidates: tuple[tuple[int, ...], ...] = ()
    power: float = 10.0
    name = "skew-shift"

    def on_tea(self, ctx):
        from .bitbalance import balance
        from .frame import digest

        tx = ctx.target
        rx = ctx.receiver
        sent = tx.frame.slots
        cands = self.candidates or ctx.extra.get("candidates") or (tuple(int(b) for b in ctx.payload),)
        for cand in cands:
            p = as_bits(cand)
            if np.array_equal(p, tx.frame.payload):
                continue
            target = np.concatenate([tx.frame.direction.bits, balance(digest(p, ctx.tea.digest)).output])
            try:
                sched = _slot_schedule(sent, target, rx)
            except NoScheduleExists:
                continue
            vis = self.visible_to if self.visible_to is not None else frozenset({ctx.listener})
            a, b = tx.payload
            ctx.medium.transmit(ctx.adversary, a, b, self.power, Kind.PAYLOAD, p.copy(), honest=False,
                                visible_to=vis)
            inject_schedule(ctx.medium, ctx.adversary, sched, tx.slot_phase_start, rx.skew_ticks, ctx.listener, vis)
            ctx.extra.setdefault("skew_shift", []).append(p)
            return []
        return []


@dataclass(frozen=True)
class Composite(Strategy):
    """Several strategies acting together, in order."""

    strategies: tuple = ()
    name = "composite"

    def pre(self, ctx):
        return [f for s in self.strategies for f in s.pre(ctx)]

    def on_tea(self, ctx):
        return [f for s in self.strategies for f in s.on_tea(ctx)]

    def on_frame(self, ctx):
        return [f for s in self.strategies for f in s.on_frame(ctx)]


def _slot_schedule(sent_slots, target_slots, rx) -> AdversarySchedule:
    """Like :func:`skew_shift_schedule` but over a full slot string with fixed target."""
    sent = as_bits(sent_slots)
    target = as_bits(target_slots)
    m, thr, skew = rx.window_ticks, rx.threshold, rx.skew_ticks
    if m <= thr:
        raise NoScheduleExists("no window can ever read as occupied")
    base = slot_base_counts(sent, m, skew)
    for parity in (1, 0):
        own = base[parity::2]
        if np.any((target == 0) & (own > thr)):
            continue
        extra = (m - base).copy()
        extra[2 * np.flatnonzero(target == 0) + parity] = 0
        sched = AdversarySchedule(tuple(int(x) for x in extra), m)
        _, bits = choose_parity(sched.windows(base), thr, rx.parity_rule)
        if bits is not None and np.array_equal(bits, target):
            return sched
    raise NoScheduleExists("target slots unreachable")


STRATEGIES = {
    cls.name: cls
    for cls in (Passive, PayloadEdit, OffSlotEnergy, Collide, Capture, Hog, Impersonate, SkewShift, Composite)
}


def make_strategy(spec: Optional[dict]) -> Strategy:
    """Build a strategy from a config block like ``{"kind": "capture", "power": 10}``."""
    if not spec:
        return Passive()
    spec = dict(spec)
    kind = spec.pop("kind")
    if kind not in STRATEGIES:
        raise ValueError(f"unknown strategy {kind!r}; choose from {sorted(STRATEGIES)}")
    if spec.get("visible_to") is not None:
        spec["visible_to"] = frozenset(spec["visible_to"])
    if "parts" in spec and spec["parts"] is not None:
        spec["parts"] = tuple((int(k), str(p)) for k, p in spec["parts"])
    if "payload" in spec and spec["payload"] is not None:
        spec["payload"] = tuple(int(b) for b in as_bits(spec["payload"]))
    if "strategies" in spec:
        spec["strategies"] = tuple(make_strategy(s) for s in spec["strategies"])
    if "candidates" in spec:
        spec["candidates"] = tuple(tuple(int(b) for b in as_bits(c)) for c in spec["candidates"])
    return STRATEGIES[kind](**spec)


def apply(strategy: Strategy, ctx: AttackContext) -> list[FollowUp]:
    """Run the hook matching ``ctx.phase``; mutations go to ``ctx.medium``."""
    hook = {"pre": strategy.pre, "tea": strategy.on_tea, "frame": strategy.on_frame}[ctx.phase]
    return hook(ctx)
