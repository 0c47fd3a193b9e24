"""Command-line entry point.

Exit codes: 0 success, 2 bad input or config, 3 predicate mismatch in
``explore``.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from . import config as cfgmod
from .bitbalance import BalanceError, balance, unbalance
from .bits import bitstr, int_to_bits
from .explorer import CSV_COLUMNS, check_predicate
from .frame import Direction, PayloadLengthMismatch, build_tea
from .pairing import MatrixRow, run_attack_matrix, run_pbc, run_tep, simulate_tea
from .trace import csv_text, write_jsonl, write_manifest, write_text

EXIT_OK, EXIT_BAD_INPUT, EXIT_MISMATCH = 0, 2, 3


class UsageError(Exception):
    pass


def _bits_arg(text: str) -> str:
    if not text or any(c not in "01" for c in text):
        raise UsageError(f"not a bit string: {text!r}")
    return text


def _load(args) -> dict:
    return cfgmod.load(args.config) if args.config else {}


def _seed(args, data: dict) -> int:
    return int(args.seed if args.seed is not None else data.get("seed", 0))


def cmd_balance(args) -> int:
    bits = _bits_arg(args.bits)
    if len(bits) % 2:
        raise UsageError("length must be even")
    tr = balance(bits)
    print(bitstr(tr.output))
    print(f"flip_count {tr.flip_count}")
    print(f"flipped {bitstr(tr.prefix)}")
    print(f"manchester_tail {bitstr(tr.manchester_tail)}")
    print("diffs " + " ".join(str(d) for d in tr.diffs))
    return EXIT_OK


def cmd_unbalance(args) -> int:
    try:
        print(bitstr(unbalance(_bits_arg(args.code))))
    except BalanceError as exc:
        raise UsageError(str(exc)) from exc
    return EXIT_OK


def _direction(name: str) -> Direction:
    try:
        return Direction[name.upper()]
    except KeyError:
        raise UsageError(f"direction must be request or reply, got {name!r}") from None


def _payload(args, scn, seed: int) -> np.ndarray:
    if args.payload:
        return np.frombuffer(_bits_arg(args.payload).encode(), dtype=np.uint8) - ord("0")
    rng = np.random.default_rng(seed)
    return rng.integers(0, 2, scn.tea.payload_bits).astype(np.uint8)


def cmd_encode_tea(args) -> int:
    data = _load(args)
    scn = cfgmod.scenario(data, args.seed)
    payload = _payload(args, scn, _seed(args, data))
    try:
        frame = build_tea(payload, _direction(args.direction), scn.tea, scn.sender.reserve_extra_difs)
    except PayloadLengthMismatch as exc:
        raise UsageError(str(exc)) from exc
    sim = scn.tea.sim
    print(f"payload {bitstr(frame.payload)}")
    print(f"slots {bitstr(frame.slots)}")
    print(f"num_slots {frame.slots.size}")
    print(f"slot_phase_ticks {frame.slot_phase_ticks}")
    print(f"slot_phase_us {sim.us(frame.slot_phase_ticks):g}")
    print(f"cts_reservation_ticks {frame.cts_reservation_ticks}")
    print(f"cts_reservation_us {sim.us(frame.cts_reservation_ticks):g}")
    print(f"total_ticks {frame.total_ticks}")
    return EXIT_OK


def cmd_simulate_tea(args) -> int:
    data = _load(args)
    scn = cfgmod.scenario(data, args.seed)
    seed = _seed(args, data)
    payload = _payload(args, scn, seed)
    strategy = scn.adversary.strategy if scn.adversary else None
    kwargs = {} if strategy is None else {"strategy": strategy}
    try:
        tx, rep, medium = simulate_tea(payload, _direction(args.direction), scn.tea, scn.receiver,
                                       sender=scn.sender, **kwargs)
    except PayloadLengthMismatch as exc:
        raise UsageError(str(exc)) from exc
    print(f"sent {bitstr(tx.frame.slots)}")
    print(f"start_tick {tx.start} overridden {str(tx.overridden).lower()}")
    if rep is None:
        print("verdict silent")
    else:
        print(f"verdict {rep.verdict}")
        print(f"parity {rep.chosen_parity}")
        if rep.decoded_slots is not None:
            print(f"decoded {bitstr(rep.decoded_slots)}")
        if rep.payload is not None:
            print(f"payload {bitstr(rep.payload)}")
    if args.out:
        recs = [{"tick": r.start, "end": r.end, "node": r.source, "kind": r.kind.value, "power": r.power,
                 "honest": r.honest} for r in medium.records]
        if rep is not None:
            recs.append({"tick": rep.sync_end, "kind": "verdict", "node": "receiver", "verdict": str(rep.verdict),
                         "windows": rep.counts.tolist(), "parity": rep.chosen_parity})
        _outputs(args, "simulate-tea", seed, {"payload": bitstr(payload), "direction": args.direction})
        write_jsonl(Path(args.out) / "trace.jsonl", recs)
    return EXIT_OK


def cmd_explore(args) -> int:
    data = _load(args)
    block = dict(data.get("grid") or {})
    if args.grid:
        block.update(cfgmod.parse_grid_spec(args.grid))
    grid, opts = cfgmod.grid(block)
    table = check_predicate(grid, method=opts.get("method", "reduced"), keep_counterexamples=bool(args.out),
                            workers=int(opts.get("workers", 1)), parity_rule=opts.get("parity_rule", "variance"))
    text = table.to_csv()
    sys.stdout.write(text)
    if args.out:
        _outputs(args, "explore", None, {"grid": asdict(grid), **opts})
        write_text(Path(args.out) / "predicate.csv", text)
        recs = []
        for p, cexs in table.counterexamples.items():
            for c in cexs:
                recs.append({"hash_length": p.hash_length, "m": p.m, "threshold": p.threshold, "skew": p.skew,
                             **c.to_record()})
        write_jsonl(Path(args.out) / "counterexamples.jsonl", recs)
    bad = table.mismatches
    if bad:
        print(f"{len(bad)} cell(s) disagree with skew >= m - threshold", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


OUTCOME_COLUMNS = ("protocol", "node", "role", "result", "peer_public", "shared", "decided_ms")


def cmd_pair(args) -> int:
    data = _load(args)
    scn = cfgmod.scenario(data, args.seed)
    protocol = (args.protocol or data.get("protocol", "tep")).lower()
    if protocol not in ("tep", "pbc"):
        raise UsageError(f"protocol must be tep or pbc, got {protocol!r}")
    res = (run_tep if protocol == "tep" else run_pbc)(scn)
    text = csv_text(res.rows(), OUTCOME_COLUMNS)
    sys.stdout.write(text)
    if args.out:
        _outputs(args, "pair", scn.seed, {"protocol": protocol, "scenario": scn.name})
        write_text(Path(args.out) / "outcomes.csv", text)
        write_jsonl(Path(args.out) / "trace.jsonl", res.trace)
    return EXIT_OK


MATRIX_COLUMNS = ("protocol", "attack", "outcome", "enrollee", "registrar")


def cmd_attack_matrix(args) -> int:
    data = _load(args)
    scn = cfgmod.scenario(data, args.seed)
    attacks = data.get("attacks", ["collision", "capture", "timing-control"])
    try:
        rows = run_attack_matrix(scn, attacks)
    except KeyError as exc:
        raise UsageError(f"unknown attack {exc}") from exc
    text = csv_text([asdict(r) for r in rows], MATRIX_COLUMNS)
    sys.stdout.write(text)
    if args.out:
        _outputs(args, "attack-matrix", scn.seed, {"attacks": list(attacks)})
        write_text(Path(args.out) / "matrix.csv", text)
    return EXIT_OK


def _outputs(args, command: str, seed: Optional[int], params: dict) -> None:
    write_manifest(args.out, command, args.config, seed, params)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tepsim", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, grid=False):
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--seed", type=int, help="overrides the config seed")
        sp.add_argument("--out", help="directory for manifest, traces and tables")
        if grid:
            sp.add_argument("--grid", help='e.g. "m=1..6,threshold=1..6,skew=1..6,hash_lengths=2|4|6"')

    sp = sub.add_parser("balance", help="bit-balance a string")
    sp.add_argument("bits")
    sp.set_defaults(func=cmd_balance)

    sp = sub.add_parser("unbalance", help="decode a balanced code word")
    sp.add_argument("code")
    sp.set_defaults(func=cmd_unbalance)

    for name, func, help_ in (("encode-tea", cmd_encode_tea, "build an announcement and print its layout"),
                              ("simulate-tea", cmd_simulate_tea, "send one announcement past an attacker")):
        sp = sub.add_parser(name, help=help_)
        common(sp)
        sp.add_argument("--payload", help="payload bits (default: random from the seed)")
        sp.add_argument("--direction", default="request", help="request or reply")
        sp.set_defaults(func=func)

    sp = sub.add_parser("explore", help="exhaustive search over a parameter grid")
    common(sp, grid=True)
    sp.set_defaults(func=cmd_explore)

    sp = sub.add_parser("pair", help="run one pairing scenario")
    common(sp)
    sp.add_argument("--protocol", help="tep or pbc (default from config, else tep)")
    sp.set_defaults(func=cmd_pair)

    sp = sub.add_parser("attack-matrix", help="collision, capture and timing control against PBC and TEP")
    common(sp)
    sp.set_defaults(func=cmd_attack_matrix)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_BAD_INPUT
    try:
        return args.func(args)
    except (UsageError, cfgmod.ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
