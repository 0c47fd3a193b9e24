"""Bit-balancing codec.

``balance`` turns an even-length bit string into one with equally many ones
and zeros by flipping a prefix of the input and appending the Manchester code
of (prefix length - 1). ``unbalance`` inverts it in linear time.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bits import BitsLike, as_bits, bits_to_int, int_to_bits


class BalanceError(ValueError):
    """A code word is not the output of :func:`balance`."""


class InvalidManchester(BalanceError):
    pass


class FlipCountOutOfRange(BalanceError):
    pass


def count_width(n: int) -> int:
    """Width of the flip-count field, ceil(log2 n), for n >= 2."""
    return (n - 1).bit_length()


def code_length(n: int) -> int:
    return n + 2 * count_width(n)


@dataclass(frozen=True)
class BalanceTrace:
    input: np.ndarray
    flip_count: int
    diffs: tuple[int, ...]
    output: np.ndarray

    @property
    def prefix(self) -> np.ndarray:
        return self.output[: self.input.size]

    @property
    def manchester_tail(self) -> np.ndarray:
        return self.output[self.input.size :]


def manchester_encode(value: BitsLike) -> np.ndarray:
    """1 -> 10, 0 -> 01."""
    v = as_bits(value)
    out = np.empty(2 * v.size, dtype=np.uint8)
    out[0::2] = v
    out[1::2] = 1 - v
    return out


def manchester_decode(code: BitsLike) -> np.ndarray:
    c = as_bits(code)
    if c.size % 2:
        raise InvalidManchester("odd-length Manchester code")
    first, second = c[0::2], c[1::2]
    bad = np.flatnonzero(first == second)
    if bad.size:
        raise InvalidManchester(f"pair {int(bad[0])} is {first[bad[0]]}{second[bad[0]]}")
    return first.copy()


def balance(data: BitsLike) -> BalanceTrace:
    x = as_bits(data)
    n = x.size
    if n == 0 or n % 2:
        raise ValueError(f"length must be even and non-zero, got {n}")
    s = x.copy()
    d = 2 * int(s.sum()) - n
    diffs = [d]
    i = 0
    # An already balanced input still flips at least once so that i - 1 >= 0.
    while i == 0 or d != 0:
        s[i] ^= 1
        d += 2 if s[i] else -2
        i += 1
        diffs.append(d)
    tail = manchester_encode(int_to_bits(i - 1, count_width(n)))
    return BalanceTrace(x, i, tuple(diffs), np.concatenate([s, tail]))


def payload_length(total: int) -> int:
    """Recover N from a code length N + 2*ceil(log2 N)."""
    n = 2
    while code_length(n) < total:
        n += 2
    if code_length(n) != total:
        raise BalanceError(f"no even N has code length {total}")
    return n


def unbalance(code: BitsLike) -> np.ndarray:
    c = as_bits(code)
    n = payload_length(c.size)
    i = bits_to_int(manchester_decode(c[n:])) + 1
    if i > n:
        raise FlipCountOutOfRange(f"flip count {i} exceeds payload length {n}")
    out = c[:n].copy()
    out[:i] ^= 1
    # Reject words outside the image (e.g. i is not the first return to zero).
    if not np.array_equal(balance(out).output, c):
        raise BalanceError("code word is not in the image of balance()")
    return out
