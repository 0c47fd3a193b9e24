"""Bit-string helpers.

Bit strings are carried as 1-D ``numpy.uint8`` arrays holding only 0 and 1.
Every public function accepts anything :func:`as_bits` understands: a string
of ``'0'``/``'1'`` characters, an iterable of ints, or an array.
"""
from __future__ import annotations

from typing import Iterable, Union

import numpy as np

BitsLike = Union[str, Iterable[int], np.ndarray]


def as_bits(value: BitsLike) -> np.ndarray:
    if isinstance(value, str):
        if any(c not in "01" for c in value):
            raise ValueError(f"not a bit string: {value!r}")
        return np.frombuffer(value.encode("ascii"), dtype=np.uint8) - ord("0")
    arr = np.asarray(list(value) if not isinstance(value, np.ndarray) else value)
    if arr.ndim != 1 and arr.size:
        raise ValueError("bit strings are one-dimensional")
    arr = arr.astype(np.uint8).reshape(-1)
    if arr.size and arr.max() > 1:
        raise ValueError("bit values must be 0 or 1")
    return arr


def bitstr(value: BitsLike) -> str:
    return "".join("1" if b else "0" for b in as_bits(value))


def int_to_bits(value: int, width: int) -> np.ndarray:
    """Big-endian, zero-padded binary representation of ``value``."""
    if value < 0 or value >= 1 << width:
        raise ValueError(f"{value} does not fit in {width} bits")
    return np.array([(value >> (width - 1 - k)) & 1 for k in range(width)], dtype=np.uint8)


def bits_to_int(value: BitsLike) -> int:
    out = 0
    for b in as_bits(value):
        out = (out << 1) | int(b)
    return out


def is_balanced(value: BitsLike) -> bool:
    arr = as_bits(value)
    return arr.size % 2 == 0 and 2 * int(arr.sum()) == arr.size
