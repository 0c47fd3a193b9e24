"""JSON configuration files.

Every section is optional. Example::

    {
      "seed": 7,
      "sim": {"tick_us": 5, "difs_us": 50},
      "receiver": {"threshold": 2, "skew_ticks": 0},
      "sender": {"override_deadline_ticks": 200000},
      "tea": {"payload_bits": 16,
              "digest": {"algorithm": "blake2b", "output_bits": 128}},
      "pairing": {"walk_time_ms": 120000, "three_push": false,
                  "dh": {"p": 2003, "g": 5}},
      "nodes": [{"name": "enrollee", "role": "enrollee", "presses_ms": [0]},
                {"name": "registrar", "role": "registrar",
                 "presses_ms": [5000], "channel": 6}],
      "adversary": {"strategy": {"kind": "capture", "power": 10}},
      "attacks": ["collision", "capture", "timing-control"],
      "grid": {"hash_lengths": [4], "m": [1, 6], "threshold": [1, 6],
               "skew": [1, 6], "method": "reduced"}
    }

``sim`` values ending in ``_us`` are converted to ticks (rounded up); keys
ending in ``_ticks`` are taken as they are. Grid axes are ``[lo, hi]``
inclusive ranges or explicit lists under ``"values"``.
"""
from __future__ import annotations

import json
from dataclasses import fields, replace
from pathlib import Path
from typing import Any, Optional

from .adversary import make_strategy
from .dh import DhParams
from .explorer import Grid
from .frame import DigestConfig, TeaConfig
from .medium import SimConfig
from .pairing import AdversarySpec, NodeSpec, PairingConfig, Scenario, default_nodes
from .receiver import ReceiverConfig
from .sender import SenderConfig


class ConfigError(ValueError):
    pass


def _only(cls, block: dict, where: str, skip=()) -> dict:
    known = {f.name for f in fields(cls)} - set(skip)
    extra = set(block) - known
    if extra:
        raise ConfigError(f"{where}: unknown keys {sorted(extra)}")
    return dict(block)


def load(path: str | Path) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return data


def sim_config(block: Optional[dict]) -> SimConfig:
    block = dict(block or {})
    us = {k: v for k, v in block.items() if k.endswith("_us") or k in ("cw_exponent_c", "capture_factor")}
    ticks = {k: v for k, v in block.items() if k not in us}
    try:
        sim = SimConfig.from_microseconds(**us)
        if ticks:
            if "window_ticks" in ticks and "slot_ticks" not in ticks:
                ticks["slot_ticks"] = 2 * ticks["window_ticks"]
            sim = replace(sim, **_only(SimConfig, ticks, "sim"))
    except TypeError as exc:
        raise ConfigError(f"sim: {exc}") from exc
    return sim


def tea_config(block: Optional[dict], sim: SimConfig) -> TeaConfig:
    block = dict(block or {})
    dig = DigestConfig(**_only(DigestConfig, block.pop("digest", {}), "tea.digest"))
    _only(TeaConfig, block, "tea", skip=("sim", "digest"))
    return TeaConfig(sim, dig, **block)


def receiver_config(block: Optional[dict], sim: SimConfig) -> ReceiverConfig:
    return ReceiverConfig.for_sim(sim, **_only(ReceiverConfig, block or {}, "receiver"))


def sender_config(block: Optional[dict]) -> SenderConfig:
    return SenderConfig(**_only(SenderConfig, block or {}, "sender"))


def pairing_config(block: Optional[dict]) -> PairingConfig:
    block = dict(block or {})
    dh = DhParams(**_only(DhParams, block.pop("dh", {}), "pairing.dh"))
    return PairingConfig(dh=dh, **_only(PairingConfig, block, "pairing", skip=("dh",)))


def scenario(data: dict, seed: Optional[int] = None) -> Scenario:
    try:
        sim = sim_config(data.get("sim"))
        nodes = [
            NodeSpec(n["name"], n["role"], tuple(n.get("presses_ms", ())), n.get("channel", 0), n.get("secret"))
            for n in data.get("nodes", [])
        ] or default_nodes()
        adv = data.get("adversary")
        adversary = None
        if adv:
            adv = dict(adv)
            adversary = AdversarySpec(make_strategy(adv.pop("strategy", None)), **adv)
        return Scenario(
            nodes=nodes,
            pairing=pairing_config(data.get("pairing")),
            tea=tea_config(data.get("tea"), sim),
            receiver=receiver_config(data.get("receiver"), sim),
            sender=sender_config(data.get("sender")),
            adversary=adversary,
            seed=int(data.get("seed", 0) if seed is None else seed),
            name=str(data.get("name", "scenario")),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad scenario: {exc}") from exc


def _axis(value: Any, name: str) -> tuple[int, ...]:
    if isinstance(value, dict):
        value = value.get("values", [])
        return tuple(int(v) for v in value)
    if isinstance(value, int):
        return (value,)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        lo, hi = int(value[0]), int(value[1])
        return tuple(range(lo, hi + 1))
    raise ConfigError(f"grid.{name}: expected [lo, hi], an int or {{\"values\": [...]}}")


def grid(block: Optional[dict]) -> tuple[Grid, dict]:
    """Grid plus search options (``method``, ``parity_rule``, ``workers``)."""
    if not block:
        raise ConfigError("no grid given")
    block = dict(block)
    opts = {k: block.pop(k) for k in ("method", "parity_rule", "workers") if k in block}
    extra = set(block) - {"hash_lengths", "m", "threshold", "skew"}
    if extra:
        raise ConfigError(f"grid: unknown keys {sorted(extra)}")
    hl = block.get("hash_lengths", [4])
    hash_lengths = tuple(int(v) for v in (hl if isinstance(hl, list) else [hl]))
    g = Grid(
        hash_lengths=hash_lengths,
        m=_axis(block.get("m", [1, 6]), "m"),
        threshold=_axis(block.get("threshold", [1, 6]), "threshold"),
        skew=_axis(block.get("skew", [1, 6]), "skew"),
    )
    if any(n < 2 or n % 2 for n in g.hash_lengths):
        raise ConfigError("grid.hash_lengths must be even and >= 2")
    if not g.cells():
        raise ConfigError("grid is empty")
    return g, opts


def parse_grid_spec(spec: str) -> dict:
    """``"m=1..6,threshold=1..6,skew=1..6,hash_lengths=2|4|6"`` to a grid block."""
    out: dict = {}
    for part in filter(None, (p.strip() for p in spec.split(","))):
        if "=" not in part:
            raise ConfigError(f"bad grid term {part!r}")
        key, val = part.split("=", 1)
        key = key.strip()
        if ".." in val:
            lo, hi = val.split("..", 1)
            out[key] = [int(lo), int(hi)]
        elif "|" in val:
            out[key] = {"values": [int(v) for v in val.split("|")]}
        elif key in ("method", "parity_rule"):
            out[key] = val
        else:
            out[key] = {"values": [int(val)]}
    if "hash_lengths" in out:
        v = out["hash_lengths"]
        out["hash_lengths"] = v["values"] if isinstance(v, dict) else list(range(v[0], v[1] + 1, 2))
    return out
