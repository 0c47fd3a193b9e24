import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tepsim import _kernels as K
from tepsim.bits import bits_to_int
from tepsim.receiver import choose_parity

needs_numba = pytest.mark.skipif(not K.HAVE_NUMBA, reason="numba not installed")
RULE_NAMES = list(K.RULES)


@st.composite
def count_rows(draw):
    m = draw(st.integers(1, 6))
    n = draw(st.sampled_from([1, 2, 3]))
    e = draw(st.lists(st.integers(0, m), min_size=2 * n, max_size=2 * n))
    return m, np.array(e, dtype=np.int64)


@given(count_rows(), st.data(), st.sampled_from(RULE_NAMES))
def test_batch_decision_matches_receiver(row, data, rule):
    m, e = row
    thr = data.draw(st.integers(0, m))
    parity, code = K.decide_batch_numpy(e[None, :], thr, K.RULES[rule])
    label, bits = choose_parity(e, thr, rule)
    balanced = bits is not None and 2 * int(bits.sum()) == bits.size
    if not balanced:
        assert code[0] == K.REJECT
    else:
        assert code[0] == bits_to_int(bits)
        assert {"even": K.EVEN, "odd": K.ODD, "tie": K.TIE}[label] == parity[0]


@needs_numba
@given(count_rows(), st.data(), st.sampled_from(RULE_NAMES))
def test_single_decision_numba_matches_numpy(row, data, rule):
    m, e = row
    thr = data.draw(st.integers(0, m))
    _, code = K.decide_batch_numpy(e[None, :], thr, K.RULES[rule])
    assert K._decide_one(e, thr, e.size // 2, K.RULES[rule]) == code[0]


@st.composite
def boxes(draw):
    m = draw(st.integers(1, 4))
    n = draw(st.sampled_from([1, 2]))
    lo = np.array(draw(st.lists(st.integers(0, m), min_size=2 * n, max_size=2 * n)), dtype=np.int64)
    hi = np.array([draw(st.integers(int(a), m)) for a in lo], dtype=np.int64)
    thr = draw(st.integers(0, m))
    sent = draw(st.integers(0, (1 << n) - 1))
    return lo, hi, thr, sent


@needs_numba
@given(boxes(), st.sampled_from(RULE_NAMES))
def test_enumerate_numba_matches_numpy(box, rule):
    lo, hi, thr, sent = box
    a = K.enumerate_numpy(lo, hi, thr, sent, K.RULES[rule], chunk=7)
    b = K.enumerate_numba(lo, hi, thr, sent, K.RULES[rule])
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


@given(boxes())
def test_enumerate_against_loop(box):
    lo, hi, thr, sent = box
    import itertools

    hits = np.zeros(1 << (lo.size // 2), dtype=np.int64)
    for e in itertools.product(*[range(a, b + 1) for a, b in zip(lo, hi)]):
        _, bits = choose_parity(np.array(e), thr)
        if bits is not None and 2 * int(bits.sum()) == bits.size and bits_to_int(bits) != sent:
            hits[bits_to_int(bits)] += 1
    got, wit = K.enumerate_numpy(lo, hi, thr, sent)
    assert np.array_equal(got, hits)
    for code in np.flatnonzero(wit >= 0):
        e = K.decode_index_numpy(wit[code], lo, hi)
        _, bits = choose_parity(e, thr)
        assert bits_to_int(bits) == code


@needs_numba
@given(st.lists(st.integers(0, 1), min_size=1, max_size=80), st.integers(1, 6), st.integers(0, 10),
       st.integers(1, 12))
def test_window_counts_numba_matches_numpy(occ, m, start, n_windows):
    occ = np.array(occ, dtype=np.int64)
    assert np.array_equal(K.window_counts_numpy(occ, start, n_windows, m),
                          K.window_counts_numba(occ, start, n_windows, m))


def test_backend_flag(monkeypatch):
    import importlib

    monkeypatch.setenv("TEPSIM_NO_NUMBA", "1")
    mod = importlib.reload(K)
    try:
        assert mod.backend() == "numpy" and mod.enumerate_schedules is mod.enumerate_numpy
    finally:
        monkeypatch.delenv("TEPSIM_NO_NUMBA")
        importlib.reload(K)
