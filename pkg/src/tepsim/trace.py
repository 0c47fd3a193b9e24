"""Run outputs: JSON-lines traces, CSV tables and the run manifest.

Everything is written with sorted keys and no timestamps so that a rerun
with the same manifest reproduces the files byte for byte.
"""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np


def _default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(record) -> str:
    return json.dumps(record, sort_keys=True, default=_default, separators=(",", ":"))


def write_jsonl(path: str | Path, records: Iterable[dict]) -> int:
    n = 0
    with open(path, "w", newline="\n") as fh:
        for rec in records:
            fh.write(dumps(rec) + "\n")
            n += 1
    return n


def read_jsonl(path: str | Path) -> list[dict]:
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]


def csv_text(rows: Sequence[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def write_text(path: str | Path, text: str) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def write_manifest(out_dir: str | Path, command: str, config_path: Optional[str], seed: Optional[int],
                   params: dict) -> Path:
    from . import __version__

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = {
        "command": command,
        "config": None if config_path is None else str(config_path),
        "seed": seed,
        "version": __version__,
        "params": params,
    }
    path = out / "manifest.json"
    write_text(path, json.dumps(manifest, sort_keys=True, indent=2, default=_default) + "\n")
    return path
