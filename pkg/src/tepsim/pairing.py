"""Push-button pairing (PBC) and tamper-evident pairing (TEP) over the simulator.

Button presses, walk time and channel hopping run on a millisecond clock.
Every time an enrollee dwells on a channel where a registrar or the attacker
sits, one exchange is simulated tick by tick on a fresh medium and summarised
as trace events.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .adversary import AttackContext, Capture, Collide, FollowUp, Hog, Passive, Strategy, apply
from .bits import as_bits, bits_to_int, bitstr, int_to_bits
from .dh import DhKeyPair, DhParams
from .frame import Direction, TeaConfig, build_tea
from .medium import Kind, Medium, NeverIdle, TxRecord, carrier_sense_wait, decode_frame
from .receiver import ReceiverConfig, receive_all
from .sender import SenderConfig, TeaTransmission, self_monitor, send_tea

RESULTS = ("Paired", "ErrorMultipleDevices", "TamperDetected", "Timeout", "AdversaryPaired")
ADVERSARY = "adversary"


@dataclass(frozen=True)
class PairingConfig:
    walk_time_ms: int = 120_000
    monitor_time_ms: int = 120_000
    channels: int = 11
    dwell_ms: int = 1050
    enrollee_override_ms: int = 1000
    three_push: bool = False
    dh: DhParams = field(default_factory=DhParams)

    def __post_init__(self):
        if self.cycle_ms >= 12_000:
            raise ValueError("a full channel cycle must take less than 12 s")
        if self.channels < 1 or self.dwell_ms <= 0:
            raise ValueError("need at least one channel and a positive dwell")

    @property
    def cycle_ms(self) -> int:
        return self.channels * self.dwell_ms


@dataclass(frozen=True)
class NodeSpec:
    name: str
    role: str  # "enrollee" or "registrar"
    presses_ms: tuple[int, ...] = ()
    channel: int = 0  # registrar: operating channel; enrollee: first channel scanned
    secret: Optional[int] = None

    def __post_init__(self):
        if self.role not in ("enrollee", "registrar"):
            raise ValueError(f"unknown role {self.role!r}")


@dataclass(frozen=True)
class AdversarySpec:
    strategy: Strategy = field(default_factory=Passive)
    channel: Optional[int] = None  # None: every registrar's channel
    secret: Optional[int] = None


@dataclass
class Scenario:
    nodes: list[NodeSpec]
    pairing: PairingConfig = field(default_factory=PairingConfig)
    tea: TeaConfig = field(default_factory=TeaConfig)
    receiver: ReceiverConfig = field(default_factory=ReceiverConfig)
    sender: SenderConfig = field(default_factory=SenderConfig)
    adversary: Optional[AdversarySpec] = None
    seed: int = 0
    name: str = "scenario"


@dataclass
class PairingOutcome:
    node: str
    role: str
    result: str
    peer_public: Optional[int] = None
    shared: Optional[int] = None
    decided_ms: Optional[int] = None
    transcript: list = field(default_factory=list)


@dataclass
class RunResult:
    protocol: str
    outcomes: dict
    trace: list
    keys: dict
    adversary_publics: set

    @property
    def summary(self) -> str:
        """One word for the whole run, worst first."""
        results = [o.result for o in self.outcomes.values()]
        for r in ("AdversaryPaired", "TamperDetected", "ErrorMultipleDevices", "Timeout"):
            if r in results:
                return r
        return "Paired"

    def rows(self) -> list[dict]:
        return [
            {"protocol": self.protocol, "node": o.node, "role": o.role, "result": o.result,
             "peer_public": "" if o.peer_public is None else o.peer_public,
             "shared": "" if o.shared is None else o.shared,
             "decided_ms": "" if o.decided_ms is None else o.decided_ms}
            for o in self.outcomes.values()
        ]


# ---------------------------------------------------------------------------
# Bookkeeping shared by both protocols
# ---------------------------------------------------------------------------


@dataclass
class _State:
    spec: NodeSpec
    keys: DhKeyPair
    start_ms: Optional[int] = None
    end_ms: Optional[int] = None
    heard: list = field(default_factory=list)  # (ms, peer public)
    tamper: list = field(default_factory=list)  # (ms, reason)

    def active(self, ms: int) -> bool:
        return self.start_ms is not None and self.start_ms <= ms <= self.end_ms


def _ticks_per_ms(tea: TeaConfig) -> int:
    return int(round(1000 / tea.sim.tick_us))


def _draw_keys(scn: Scenario, rng: np.random.Generator):
    dh = scn.pairing.dh
    if dh.p >= 1 << scn.tea.payload_bits:
        raise ValueError(f"public keys mod {dh.p} do not fit in {scn.tea.payload_bits} payload bits")
    used = set()
    keys = {}
    specs = [(n.name, n.secret) for n in scn.nodes]
    if scn.adversary is not None:
        specs.append((ADVERSARY, scn.adversary.secret))
    for name, secret in specs:
        if secret is None:
            while True:
                secret = int(rng.integers(1, dh.p))
                if DhKeyPair.from_secret(dh, secret).public not in used:
                    break
        kp = DhKeyPair.from_secret(dh, secret)
        used.add(kp.public)
        keys[name] = kp
    return keys


def _schedule(scn: Scenario, keys):
    """Activity windows for every node, in ms."""
    pc = scn.pairing
    states = {n.name: _State(n, keys[n.name]) for n in scn.nodes}
    reg_presses = [n.presses_ms[0] for n in scn.nodes if n.role == "registrar" and n.presses_ms]
    enr_first = [n.presses_ms[0] for n in scn.nodes if n.role == "enrollee" and n.presses_ms]
    for st in states.values():
        n = st.spec
        if not n.presses_ms:
            continue
        st.start_ms = n.presses_ms[0]
        st.end_ms = st.start_ms + pc.walk_time_ms
        if not pc.three_push:
            continue
        if n.role == "registrar" and any(t < st.start_ms for t in enr_first):
            # Enrollee already scanning: one channel cycle is enough.
            st.end_ms = st.start_ms + pc.cycle_ms
        if n.role == "enrollee" and len(n.presses_ms) > 1:
            again = n.presses_ms[1]
            if any(st.start_ms < r < again for r in reg_presses) and again <= st.end_ms:
                st.end_ms = again + pc.cycle_ms
    return states


def _visits(scn: Scenario, states):
    """(ms, enrollee, channel) for every dwell on a channel with something on it."""
    pc = scn.pairing
    busy = {n.channel for n in scn.nodes if n.role == "registrar"}
    if scn.adversary is not None and scn.adversary.channel is not None:
        busy.add(scn.adversary.channel)
    out = []
    for st in states.values():
        n = st.spec
        if n.role != "enrollee" or st.start_ms is None:
            continue
        j = 0
        while st.start_ms + j * pc.dwell_ms < st.end_ms:
            ch = (n.channel + j) % pc.channels
            if ch in busy:
                out.append((st.start_ms + j * pc.dwell_ms, n.name, ch))
            j += 1
    return sorted(out)


def _adversary_here(scn: Scenario, channel: int) -> bool:
    adv = scn.adversary
    if adv is None or isinstance(adv.strategy, Passive):
        return False
    if adv.channel is None:
        return any(n.role == "registrar" and n.channel == channel for n in scn.nodes)
    return adv.channel == channel


def _record_event(trace, t_ms, tpm, rec: TxRecord):
    content = rec.content
    if isinstance(content, np.ndarray):
        content = bitstr(content)
    elif isinstance(content, dict):
        content = {k: (bitstr(v) if isinstance(v, np.ndarray) else v) for k, v in content.items()}
    ev = {"ms": t_ms, "tick": t_ms * tpm + rec.start, "end": t_ms * tpm + rec.end, "node": rec.source,
          "kind": rec.kind.value, "power": rec.power, "honest": rec.honest,
          "visible_to": None if rec.visible_to is None else sorted(rec.visible_to)}
    if content is not None:
        ev["content"] = content
    trace.append(ev)


def _decide(states, scn: Scenario, adv_publics: set, protocol: str, trace: list):
    pc = scn.pairing
    out = {}
    for name, st in states.items():
        n = st.spec
        if st.start_ms is None:
            out[name] = PairingOutcome(name, n.role, "Timeout")
            continue
        lo = st.start_ms
        if protocol == "pbc" and n.role == "registrar":
            lo = st.start_ms - pc.monitor_time_ms
            early = {k for t, k in st.heard if lo <= t < st.start_ms}
            if len(early) > 1:
                out[name] = PairingOutcome(name, n.role, "ErrorMultipleDevices", decided_ms=st.start_ms)
                continue
        peers = sorted({k for t, k in st.heard if lo <= t <= st.end_ms})
        tamper = [r for t, r in st.tamper if st.start_ms <= t <= st.end_ms]
        if tamper:
            res, peer = "TamperDetected", None
        elif len(peers) == 1:
            peer = peers[0]
            res = "AdversaryPaired" if peer in adv_publics else "Paired"
        else:
            res, peer = ("Timeout" if not peers else "ErrorMultipleDevices"), None
        shared = st.keys.shared(peer) if peer is not None else None
        out[name] = PairingOutcome(name, n.role, res, peer, shared, st.end_ms,
                                   [e for e in trace if e.get("node") == name or e.get("observer") == name])
    for o in out.values():
        trace.append({"ms": o.decided_ms, "kind": "decision", "node": o.node, "result": o.result,
                      "peer_public": o.peer_public})
    return out


# ---------------------------------------------------------------------------
# One exchange on one channel
# ---------------------------------------------------------------------------


class _Episode:
    def __init__(self, scn: Scenario, protocol: str, t_ms: int, enrollee: str, channel: int, states, keys,
                 rng: np.random.Generator, horizon: int):
        self.scn, self.protocol, self.t_ms = scn, protocol, t_ms
        self.enrollee = enrollee
        self.registrars = [n.name for n in scn.nodes if n.role == "registrar" and n.channel == channel]
        self.attacker = _adversary_here(scn, channel)
        names = [enrollee] + self.registrars + ([ADVERSARY] if self.attacker else [])
        self.medium = Medium(scn.tea.sim, horizon, names)
        self.states, self.keys, self.rng = states, keys, rng
        self.cursor = {r: 0 for r in self.registrars}
        self.handled: set = set()
        self.queue: list[FollowUp] = []
        self.extra: dict = {}
        self.events: list = []
        if self.attacker:
            self.extra["candidates"] = _candidate_payloads(scn, keys)

    @property
    def frontier(self) -> int:
        return max((r.end for r in self.medium.records), default=0)

    def key_bits(self, name) -> np.ndarray:
        return int_to_bits(self.keys[name].public, self.scn.tea.payload_bits)

    def backoff(self) -> int:
        return int(self.rng.integers(0, self.scn.tea.sim.contention_window(1) + 1))

    def ctx(self, phase, target=None, listener=None, from_tick=0) -> AttackContext:
        return AttackContext(self.medium, phase, self.protocol, ADVERSARY, self.key_bits(ADVERSARY), target,
                             listener, self.scn.tea, self.scn.receiver, from_tick, self.extra)

    def hook(self, phase, target, listener):
        if not self.attacker:
            return
        for fu in apply(self.scn.adversary.strategy, self.ctx(phase, target, listener)):
            if fu.start is not None:
                self.send_followup(fu)
            else:
                self.queue.append(fu)

    def note(self, observer, tick, **fields):
        self.events.append({"ms": self.t_ms, "tick": tick, "kind": "verdict", "observer": observer, **fields})

    def hog(self):
        strat = self.extra.get("hog")
        if strat is None:
            return
        a = self.frontier + 1
        b = min(a + strat.duration_ticks, self.medium.horizon)
        self.medium.transmit(ADVERSARY, a, b, 1.0, Kind.ENERGY, honest=False, visible_to=strat.visible_to)

    def run(self):
        if self.attacker:
            self.queue += apply(self.scn.adversary.strategy, self.ctx("pre"))
        sent = hogged = False
        while True:
            if self.registrar_pass():
                continue
            if self.queue:
                todo, self.queue = self.queue, []
                for fu in todo:
                    self.send_followup(fu)
                continue
            if not hogged:
                self.hog()
                hogged = True
                continue
            if not sent:
                self.send_enrollee()
                sent = True
                continue
            break
        self.enrollee_pass()


class _TepEpisode(_Episode):
    def __init__(self, *a, **k):
        super().__init__(*a, **k)
        self.my_tx: Optional[TeaTransmission] = None
        self.reply_tx: dict = {}

    def send_tea(self, node, direction, payload, at=None, power=1.0, visible_to=None, honest=True,
                 from_tick=0) -> TeaTransmission:
        frame = build_tea(payload, direction, self.scn.tea, self.scn.sender.reserve_extra_difs)
        cfg = replace(self.scn.sender, power=power)
        tx = send_tea(self.medium, node, frame, cfg, from_tick, self.backoff() if at is None else 0,
                      visible_to, at=at, honest=honest)
        if honest:
            listener = self.registrars[0] if direction is Direction.REQUEST and self.registrars else self.enrollee
            self.hook("tea", tx, listener)
        return tx

    def send_followup(self, fu: FollowUp):
        direction = Direction.REQUEST if fu.role == "enrollee" else Direction.REPLY
        frm = self.frontier if fu.start is None else 0
        self.send_tea(ADVERSARY, direction, fu.payload, fu.start, fu.power, fu.visible_to, False, frm)

    def send_enrollee(self):
        self.my_tx = self.send_tea(self.enrollee, Direction.REQUEST, self.key_bits(self.enrollee))

    def registrar_pass(self) -> bool:
        replied = False
        sifs = self.scn.tea.sim.sifs_ticks
        for r in self.registrars:
            st = self.states[r]
            for rep in receive_all(self.medium.view(r), self.scn.receiver, self.scn.tea, r, self.cursor[r]):
                self.cursor[r] = rep.end_tick
                self.note(r, rep.sync_end, verdict=str(rep.verdict),
                          direction=None if rep.decoded_direction is None else rep.decoded_direction.name,
                          payload=None if rep.payload is None else bitstr(rep.payload))
                if not st.active(self.t_ms):
                    continue
                if not rep.verdict.clean:
                    st.tamper.append((self.t_ms, str(rep.verdict)))
                    continue
                if rep.decoded_direction is not Direction.REQUEST:
                    continue
                st.heard.append((self.t_ms, bits_to_int(rep.payload)))
                tx = self.send_tea(r, Direction.REPLY, self.key_bits(r), at=rep.end_tick + sifs)
                self.reply_tx.setdefault(r, []).append(tx)
                replied = True
        return replied

    def enrollee_pass(self):
        e = self.enrollee
        st = self.states[e]
        view = self.medium.view(e)
        if self.my_tx is not None:
            ov = self_monitor(self.my_tx, view, self.scn.sender.guard_ticks)
            if ov.suspected:
                st.tamper.append((self.t_ms, "overlap:" + ",".join(ov.where)))
                self.note(e, self.my_tx.start, verdict="overlap", where=list(ov.where))
        for r, txs in self.reply_tx.items():
            for tx in txs:
                ov = self_monitor(tx, self.medium.view(r), self.scn.sender.guard_ticks)
                if ov.suspected and self.states[r].active(self.t_ms):
                    self.states[r].tamper.append((self.t_ms, "overlap:" + ",".join(ov.where)))
                    self.note(r, tx.start, verdict="overlap", where=list(ov.where))
        start = self.my_tx.start if self.my_tx is not None else 0
        for rep in receive_all(view, self.scn.receiver, self.scn.tea, e, start):
            self.note(e, rep.sync_end, verdict=str(rep.verdict),
                      direction=None if rep.decoded_direction is None else rep.decoded_direction.name,
                      payload=None if rep.payload is None else bitstr(rep.payload))
            if not rep.verdict.clean:
                st.tamper.append((self.t_ms, str(rep.verdict)))
            elif rep.decoded_direction is Direction.REPLY:
                st.heard.append((self.t_ms, bits_to_int(rep.payload)))


class _PbcEpisode(_Episode):
    def __init__(self, *a, **k):
        super().__init__(*a, **k)
        self.probes: list[TxRecord] = []

    def frame(self, node, kind, content, at=None, power=1.0, visible_to=None, honest=True,
              from_tick=0) -> Optional[TxRecord]:
        sim = self.scn.tea.sim
        if at is None:
            limit = from_tick + self.scn.pairing.dwell_ms * _ticks_per_ms(self.scn.tea)
            try:
                at = carrier_sense_wait(self.medium.view(node), from_tick, sim.difs_ticks, self.backoff(),
                                        sim.backoff_slot_ticks, limit=limit)
            except NeverIdle:
                self.note(node, from_tick, verdict="never-idle")
                return None
        rec = self.medium.transmit(node, at, at + sim.probe_ticks, power, kind, content, honest, visible_to)
        if honest:
            listener = self.registrars[0] if kind is Kind.PROBE and self.registrars else self.enrollee
            self.hook("frame", rec, listener)
        return rec

    def send_followup(self, fu: FollowUp):
        key = bits_to_int(fu.payload)
        if fu.role == "enrollee":
            kind, content = Kind.PROBE, {"from": self.enrollee, "key": key}
        else:
            kind, content = Kind.DATA, {"from": ADVERSARY, "to": self.enrollee, "key": key}
        frm = self.frontier if fu.start is None else 0
        self.frame(ADVERSARY, kind, content, fu.start, fu.power, fu.visible_to, False, frm)

    def send_enrollee(self):
        self.frame(self.enrollee, Kind.PROBE, {"from": self.enrollee, "key": self.keys[self.enrollee].public})

    def registrar_pass(self) -> bool:
        replied = False
        sim = self.scn.tea.sim
        for r in self.registrars:
            st = self.states[r]
            view = self.medium.view(r)
            others = [x for x in view.records if x.source != r]
            for p in sorted((x for x in others if x.kind is Kind.PROBE), key=lambda x: x.start):
                if (r, id(p)) in self.handled:
                    continue
                group = [x for x in others if x.kind is Kind.PROBE and x.overlaps(p.start, p.end)]
                for g in group:
                    self.handled.add((r, id(g)))
                won = decode_frame(others, (p.start, p.end), sim.capture_factor, kinds=[Kind.PROBE])
                self.note(r, p.start, verdict="decoded" if won else "collision",
                          payload=None if won is None else won.content["key"])
                if won is None:
                    continue
                st.heard.append((self.t_ms, won.content["key"]))
                if st.active(self.t_ms):
                    end = max(g.end for g in group)
                    self.frame(r, Kind.DATA, {"from": r, "to": won.content["from"], "key": self.keys[r].public},
                               at=end + sim.sifs_ticks)
                    replied = True
        return replied

    def enrollee_pass(self):
        e = self.enrollee
        view = self.medium.view(e)
        others = [x for x in view.records if x.source != e]
        sim = self.scn.tea.sim
        for d in sorted((x for x in others if x.kind is Kind.DATA), key=lambda x: x.start):
            won = decode_frame(others, (d.start, d.end), sim.capture_factor, kinds=[Kind.DATA])
            if won is d and won.content.get("to") == e:
                self.note(e, d.start, verdict="decoded", payload=won.content["key"])
                self.states[e].heard.append((self.t_ms, won.content["key"]))


def _candidate_payloads(scn: Scenario, keys) -> tuple:
    """Every public key the attacker could claim, ascending by secret."""
    dh = scn.pairing.dh
    honest = {kp.public for name, kp in keys.items() if name != ADVERSARY}
    seen = []
    for secret in range(1, dh.p):
        pub = pow(dh.g, secret, dh.p)
        if pub not in honest and pub not in seen:
            seen.append(pub)
    return tuple(tuple(int(b) for b in int_to_bits(pub, scn.tea.payload_bits)) for pub in seen)


def _horizon(scn: Scenario) -> int:
    frame = build_tea(np.zeros(scn.tea.payload_bits, dtype=np.uint8), Direction.REQUEST, scn.tea)
    extra = 0
    adv = scn.adversary
    if adv is not None:
        for s in _flatten(adv.strategy):
            if isinstance(s, Hog):
                extra = max(extra, s.duration_ticks)
    dwell = scn.pairing.dwell_ms * _ticks_per_ms(scn.tea)
    return max(scn.sender.override_deadline_ticks, dwell) + extra + 8 * frame.total_ticks + 1000


def _flatten(strategy):
    yield strategy
    for s in getattr(strategy, "strategies", ()):
        yield from _flatten(s)


def _run(scn: Scenario, protocol: str) -> RunResult:
    rng = np.random.default_rng(scn.seed)
    keys = _draw_keys(scn, rng)
    states = _schedule(scn, keys)
    tpm = _ticks_per_ms(scn.tea)
    horizon = _horizon(scn)
    cls = _TepEpisode if protocol == "tep" else _PbcEpisode
    trace: list = []
    for name, kp in sorted(keys.items()):
        trace.append({"ms": 0, "kind": "keys", "node": name, "public": kp.public})
    for n in scn.nodes:
        for t in n.presses_ms:
            trace.append({"ms": t, "kind": "press", "node": n.name})
    adv_publics = {keys[ADVERSARY].public} if ADVERSARY in keys else set()
    for t_ms, enrollee, ch in _visits(scn, states):
        ep = cls(scn, protocol, t_ms, enrollee, ch, states, keys, rng, horizon)
        ep.run()
        for p in ep.extra.get("skew_shift", []):
            adv_publics.add(bits_to_int(p))
        merged = []
        for rec in ep.medium.records:
            _record_event(merged, t_ms, tpm, rec)
        for ev in ep.events:
            ev = dict(ev)
            ev["tick"] = t_ms * tpm + ev["tick"]
            merged.append(ev)
        merged.sort(key=lambda e: e["tick"])
        trace.extend({"channel": ch, **e} for e in merged)
    outcomes = _decide(states, scn, adv_publics, protocol, trace)
    return RunResult(protocol, outcomes, trace, keys, adv_publics)


def run_pbc(scn: Scenario) -> RunResult:
    return _run(scn, "pbc")


def run_tep(scn: Scenario) -> RunResult:
    return _run(scn, "tep")


def simulate_tea(payload, direction: Direction = Direction.REQUEST, tea: TeaConfig = TeaConfig(),
                 receiver: ReceiverConfig = ReceiverConfig(), strategy: Strategy = Passive(),
                 sender: SenderConfig = SenderConfig(), lead_ticks: int = 20):
    """One announcement from "sender" to "receiver" with an attacker present.

    Returns ``(transmission, report, medium)``; ``report`` is None when the
    receiver heard no sync burst.
    """
    frame = build_tea(as_bits(payload), direction, tea, sender.reserve_extra_difs)
    hog = max((s.duration_ticks for s in _flatten(strategy) if isinstance(s, Hog)), default=0)
    wait = hog + sender.override_deadline_ticks if hog else 0
    medium = Medium(tea.sim, lead_ticks + wait + 3 * frame.total_ticks + 4 * receiver.skew_ticks + 100,
                    ["sender", "receiver", ADVERSARY])
    ctx = AttackContext(medium, "pre", "tep", ADVERSARY, np.zeros(tea.payload_bits, dtype=np.uint8), None,
                        "receiver", tea, receiver, lead_ticks)
    # Frames the attacker would send on its own need a protocol run; only
    # hogging has a direct effect on a lone announcement.
    apply(strategy, ctx)
    if hog:
        medium.transmit(ADVERSARY, 0, hog, 1.0, Kind.ENERGY, honest=False, visible_to=ctx.extra["hog"].visible_to)
        tx = send_tea(medium, "sender", frame, sender, from_tick=lead_ticks)
    else:
        tx = send_tea(medium, "sender", frame, sender, at=lead_ticks)
    ctx.phase, ctx.target = "tea", tx
    apply(strategy, ctx)
    reports = receive_all(medium.view("receiver"), receiver, tea, "receiver", 0)
    return tx, (reports[0] if reports else None), medium


# ---------------------------------------------------------------------------
# Attack matrix
# ---------------------------------------------------------------------------

ATTACKS = {
    "collision": lambda: Collide(),
    "capture": lambda: Capture(power=10.0),
    "timing-control": lambda: Hog(duration_ticks=210_000),
}


@dataclass(frozen=True)
class MatrixRow:
    protocol: str
    attack: str
    outcome: str
    enrollee: str
    registrar: str


def default_nodes() -> list[NodeSpec]:
    return [NodeSpec("enrollee", "enrollee", (0,), channel=0), NodeSpec("registrar", "registrar", (5000,), channel=6)]


def run_attack_matrix(base: Optional[Scenario] = None, attacks: Sequence[str] = tuple(ATTACKS)) -> list[MatrixRow]:
    """Every named attack against both protocols, PBC rows first."""
    base = base or Scenario(default_nodes())
    rows = []
    for protocol, runner in (("pbc", run_pbc), ("tep", run_tep)):
        for name in attacks:
            scn = replace(base, adversary=AdversarySpec(ATTACKS[name]()), name=f"{protocol}-{name}")
            res = runner(scn)
            by_role = {o.role: o.result for o in res.outcomes.values()}
            rows.append(MatrixRow(protocol, name, res.summary, by_role.get("enrollee", ""),
                                  by_role.get("registrar", "")))
    return rows
