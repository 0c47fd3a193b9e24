"""Exhaustive search for integrity violations in the slot phase.

For every balanced hash and every canonical attacker schedule (extra
energized ticks per sensing window) the receiver's decision is evaluated; any
balanced decoding that differs from the sent hash is a counterexample.

Two search spaces are available:

``full``
    every window ranges over ``base..m``.
``reduced``
    for each parity, the windows of that parity range over ``base..m`` while
    the other parity is filled to ``m``. Filling the unused parity only lowers
    its variance and never changes the decoded bits of the used one, so both
    spaces yield the same set of (sent, accepted) pairs. Hit counts differ.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Optional, Sequence

import numpy as np

from . import _kernels
from .adversary import AdversarySchedule, inject_schedule, slot_base_counts
from .bits import BitsLike, as_bits, bits_to_int, bitstr, int_to_bits
from .medium import Kind, Medium, SimConfig
from .receiver import ReceiverConfig, choose_parity, measure_slots, select_parity_and_decode


@dataclass(frozen=True)
class ExplorerParams:
    hash_length: int
    m: int
    threshold: int
    skew: int

    def __post_init__(self):
        if self.hash_length < 2 or self.hash_length % 2:
            raise ValueError("hash_length must be even and >= 2")
        if self.m < 1:
            raise ValueError("m must be positive")
        if not 0 <= self.threshold <= self.m:
            raise ValueError("threshold must lie in 0..m")
        if self.skew < 0:
            raise ValueError("skew must be non-negative")

    @property
    def predicted(self) -> bool:
        return self.skew >= self.m - self.threshold


@dataclass(frozen=True)
class Counterexample:
    sent_hash: str
    schedule: AdversarySchedule
    accepted_hash: str
    chosen_parity: str
    counts: tuple[int, ...]  # per-window energized ticks seen by the receiver
    n_schedules: int = 1  # schedules in the searched space that give this pair

    def to_record(self) -> dict:
        return {
            "sent": self.sent_hash,
            "accepted": self.accepted_hash,
            "parity": self.chosen_parity,
            "schedule": list(self.schedule.counts),
            "windows": list(self.counts),
            "n_schedules": self.n_schedules,
        }


@dataclass
class ExploreResult:
    params: ExplorerParams
    method: str
    counterexamples: list[Counterexample]
    n_violations: int
    n_schedules: int

    @property
    def found(self) -> bool:
        return bool(self.counterexamples)


def enumerate_balanced(hash_length: int) -> list[str]:
    """All bit strings with equal ones and zeros, in lexicographic order."""
    n = hash_length
    if n < 0 or n % 2:
        raise ValueError("hash_length must be even")
    out = []
    for ones in combinations(range(n), n // 2):
        s = ["0"] * n
        for k in ones:
            s[k] = "1"
        out.append("".join(s))
    return sorted(out)


def sender_base_counts(sent_hash: BitsLike, m: int, skew: int) -> np.ndarray:
    return slot_base_counts(sent_hash, m, skew)


def _boxes(base: np.ndarray, m: int, method: str):
    full = np.full_like(base, m)
    if method == "full":
        return [(base.copy(), full)]
    if method != "reduced":
        raise ValueError(f"unknown method {method!r}")
    boxes = []
    for parity in (0, 1):
        lo = full.copy()
        lo[parity::2] = base[parity::2]
        boxes.append((lo, full.copy()))
    return boxes


def explore(params: ExplorerParams, method: str = "reduced", hashes: Optional[Iterable[str]] = None,
            parity_rule: str = "variance") -> ExploreResult:
    """Every (sent, accepted) pair an attacker can force, one witness each.

    Output is ordered by sent hash, then accepted hash. The witness is the
    first schedule in odometer order (window 0 most significant), even-parity
    box first for the reduced search.
    """
    n, m = params.hash_length, params.m
    rule = _kernels.RULES[parity_rule]
    found: list[Counterexample] = []
    n_viol = n_sched = 0
    for sent in hashes if hashes is not None else enumerate_balanced(n):
        base = sender_base_counts(sent, m, params.skew)
        sent_code = bits_to_int(sent)
        hits_total = np.zeros(1 << n, dtype=np.int64)
        witness: dict[int, np.ndarray] = {}
        for lo, hi in _boxes(base, m, method):
            n_sched += int(np.prod(hi - lo + 1))
            hits, wit = _kernels.enumerate_schedules(lo, hi, params.threshold, sent_code, rule)
            hits_total += hits
            for code in np.flatnonzero(wit >= 0):
                if int(code) not in witness:
                    witness[int(code)] = _kernels.decode_index_numpy(wit[code], lo, hi)
        n_viol += int(hits_total.sum())
        for code in sorted(witness):
            e = witness[code]
            parity, _ = choose_parity(e, params.threshold, parity_rule)
            sched = AdversarySchedule(tuple(int(x) for x in e - base), m)
            found.append(
                Counterexample(sent, sched, bitstr(int_to_bits(code, n)), parity, tuple(int(x) for x in e),
                               int(hits_total[code]))
            )
    return ExploreResult(params, method, found, n_viol, n_sched)


def replay(cex: Counterexample, params: ExplorerParams, parity_rule: str = "variance"):
    """Run a counterexample through the tick-level medium and receiver."""
    m, skew = params.m, params.skew
    n = len(cex.sent_hash)
    sim = SimConfig(window_ticks=m, slot_ticks=2 * m)
    medium = Medium(sim, skew + 2 * n * m + 1, ["sender", "receiver"])
    for k, bit in enumerate(as_bits(cex.sent_hash)):
        if bit:
            medium.transmit("sender", 2 * k * m, 2 * (k + 1) * m, kind=Kind.SLOT, content=k)
    inject_schedule(medium, "adversary", cex.schedule, 0, skew, "receiver", visible_to={"receiver"})
    rx = ReceiverConfig(window_ticks=m, threshold=params.threshold, skew_ticks=skew, parity_rule=parity_rule)
    windows = measure_slots(medium.view("receiver"), 0, n, rx, listener="receiver")
    return select_parity_and_decode(windows, rx, direction_bits=0)


# ---------------------------------------------------------------------------
# Predicate grid
# ---------------------------------------------------------------------------

CSV_COLUMNS = ("hash_length", "m", "threshold", "skew", "predicted", "found", "n_counterexamples")


@dataclass(frozen=True)
class PredicateRow:
    hash_length: int
    m: int
    threshold: int
    skew: int
    predicted: bool
    found: bool
    n_counterexamples: int

    @property
    def mismatch(self) -> bool:
        return self.predicted != self.found


@dataclass
class PredicateTable:
    rows: list[PredicateRow] = field(default_factory=list)
    counterexamples: dict = field(default_factory=dict)

    @property
    def mismatches(self) -> list[PredicateRow]:
        return [r for r in self.rows if r.mismatch]

    def found_flags(self, hash_length: int) -> dict:
        return {(r.m, r.threshold, r.skew): r.found for r in self.rows if r.hash_length == hash_length}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow([r.hash_length, r.m, r.threshold, r.skew, str(r.predicted).lower(),
                        str(r.found).lower(), r.n_counterexamples])
        return buf.getvalue()


@dataclass(frozen=True)
class Grid:
    hash_lengths: Sequence[int] = (4,)
    m: Sequence[int] = tuple(range(1, 7))
    threshold: Sequence[int] = tuple(range(1, 7))
    skew: Sequence[int] = tuple(range(1, 7))

    def cells(self) -> list[ExplorerParams]:
        out = []
        for n in sorted(set(self.hash_lengths)):
            for m in sorted(set(self.m)):
                for thr in sorted(set(self.threshold)):
                    if thr > m:
                        continue
                    for skew in sorted(set(self.skew)):
                        out.append(ExplorerParams(n, m, thr, skew))
        return out


def _cell(params: ExplorerParams, method: str, parity_rule: str = "variance"):
    return params, explore(params, method, parity_rule=parity_rule)


def check_predicate(grid: Grid, method: str = "reduced", keep_counterexamples: bool = False,
                    workers: int = 1, parity_rule: str = "variance") -> PredicateTable:
    """Compare exhaustive search results with skew >= m - threshold, per cell."""
    cells = grid.cells()
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_cell, cells, [method] * len(cells), [parity_rule] * len(cells)))
    else:
        results = [_cell(c, method, parity_rule) for c in cells]
    table = PredicateTable()
    for p, res in results:
        table.rows.append(PredicateRow(p.hash_length, p.m, p.threshold, p.skew, p.predicted, res.found,
                                       len(res.counterexamples)))
        if keep_counterexamples and res.counterexamples:
            table.counterexamples[p] = res.counterexamples
    return table


# ---------------------------------------------------------------------------
# Flip characterization
# ---------------------------------------------------------------------------


def exploitable_positions(sent_hash: BitsLike) -> list[int]:
    """Positions holding a 1 immediately followed by a 0.

    The position after the last slot is silence, so a trailing 1 counts.
    """
    s = as_bits(sent_hash)
    nxt = np.append(s[1:], 0)
    return [int(k) for k in np.flatnonzero((s == 1) & (nxt == 0))]


@dataclass
class FlipReport:
    n_counterexamples: int
    exploited: dict  # sent hash -> sorted positions turned from 1 to 0
    admissible: dict  # sent hash -> positions with a 1 followed by a 0
    violations: list  # (sent, accepted, position) where the 1 is followed by a 1
    replay_failures: list  # counterexamples that did not replay to a clean, altered decode
    accepted: set

    @property
    def ok(self) -> bool:
        return not self.violations and not self.replay_failures


def characterize_flips(counterexamples: Sequence[Counterexample], params: Optional[ExplorerParams] = None) -> FlipReport:
    """Check which 1 bits the counterexamples turn into 0 bits.

    When ``params`` is given, each counterexample is also replayed through the
    tick-level receiver.
    """
    if not counterexamples:
        raise ValueError("need at least one counterexample")
    exploited: dict = {}
    admissible: dict = {}
    violations = []
    failures = []
    for cex in counterexamples:
        sent, acc = as_bits(cex.sent_hash), as_bits(cex.accepted_hash)
        ok_pos = set(exploitable_positions(sent))
        admissible[cex.sent_hash] = sorted(ok_pos)
        flipped = [int(k) for k in np.flatnonzero((sent == 1) & (acc == 0))]
        exploited.setdefault(cex.sent_hash, set()).update(flipped)
        violations += [(cex.sent_hash, cex.accepted_hash, k) for k in flipped if k not in ok_pos]
        if params is not None:
            rep = replay(cex, params)
            if not rep.verdict.clean or bitstr(rep.decoded_hash) != cex.accepted_hash:
                failures.append(cex)
    return FlipReport(
        n_counterexamples=len(counterexamples),
        exploited={k: sorted(v) for k, v in exploited.items()},
        admissible=admissible,
        violations=violations,
        replay_failures=failures,
        accepted={c.accepted_hash for c in counterexamples},
    )
