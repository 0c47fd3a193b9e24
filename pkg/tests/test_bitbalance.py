import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tepsim.bitbalance import (
    BalanceError,
    FlipCountOutOfRange,
    InvalidManchester,
    balance,
    code_length,
    manchester_decode,
    manchester_encode,
    unbalance,
)
from tepsim.bits import as_bits, bitstr, is_balanced


def reference_balance(bits: str) -> str:
    """Straight transcription on Python strings, used as an oracle."""
    n = len(bits)
    width = math.ceil(math.log2(n))
    s = list(bits)
    i = 0
    while True:
        d = s.count("1") - s.count("0")
        if d == 0 and i > 0:
            break
        s[i] = "1" if s[i] == "0" else "0"
        i += 1
    tail = "".join("10" if c == "1" else "01" for c in format(i - 1, f"0{width}b"))
    return "".join(s) + tail


@pytest.mark.parametrize(
    "data, code",
    [("1000", "01101001"), ("1110", "01100101"), ("10", "0110")],
)
def test_known_vectors(data, code):
    assert bitstr(balance(data).output) == code
    assert bitstr(unbalance(code)) == data


def test_table_trace():
    tr = balance("1000")
    assert tr.flip_count == 3
    assert bitstr(tr.prefix) == "0110"
    assert bitstr(tr.manchester_tail) == "1001"
    assert tr.diffs == (-2, -4, -2, 0)


@pytest.mark.parametrize("value, code", [("10", "1001"), ("00", "0101"), ("11", "1010")])
def test_manchester(value, code):
    assert bitstr(manchester_encode(value)) == code
    assert bitstr(manchester_decode(code)) == value


@pytest.mark.parametrize("bad", ["", "1", "101"])
def test_rejects_odd_or_empty(bad):
    with pytest.raises(ValueError):
        balance(bad)


def test_unbalance_errors():
    with pytest.raises(InvalidManchester):
        unbalance("01100011")  # tail pair 11
    with pytest.raises(FlipCountOutOfRange):
        unbalance("000111" + "101010")  # N = 6 but the tail says i = 8
    with pytest.raises(BalanceError):
        unbalance("11110101")  # flip count 1 but prefix is not balanced after one flip


@pytest.mark.parametrize("n", range(2, 13, 2))
def test_exhaustive_round_trip(n):
    codes = set()
    for tup in itertools.product("01", repeat=n):
        x = "".join(tup)
        tr = balance(x)
        out = bitstr(tr.output)
        assert out == reference_balance(x)
        assert len(out) == code_length(n) == n + 2 * math.ceil(math.log2(n))
        assert is_balanced(out)
        assert 1 <= tr.flip_count <= n and tr.diffs[tr.flip_count] == 0
        assert all(abs(b - a) == 2 for a, b in zip(tr.diffs, tr.diffs[1:]))
        assert bitstr(unbalance(out)) == x
        codes.add(out)
    assert len(codes) == 2**n


@given(st.integers(1, 40).flatmap(lambda k: st.lists(st.integers(0, 1), min_size=2 * k, max_size=2 * k)))
def test_round_trip_property(bits):
    out = balance(bits).output
    assert 2 * int(out.sum()) == out.size
    assert np.array_equal(unbalance(out), as_bits(bits))


@given(st.lists(st.integers(0, 1), max_size=64))
def test_manchester_property(bits):
    code = manchester_encode(bits)
    assert is_balanced(code)
    assert np.array_equal(manchester_decode(code), as_bits(bits))
