"""Hot numeric loops, in numba and plain numpy.

Both implementations are always importable (``*_numpy`` and, when numba is
installed, ``*_numba``). The unsuffixed names point at numba unless the
environment variable ``TEPSIM_NO_NUMBA`` is set to a non-empty value other
than ``0``, or numba is missing.

Decision rule shared by every kernel here (hash-level receiver):

* window bit = count > threshold;
* parity score = n * sum(e^2) - (sum e)^2 (n times the variance, exact ints);
* the higher-scoring parity is decoded; on a tie both are decoded and must
  agree;
* the decoding is accepted iff it is bit-balanced.
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("TEPSIM_NO_NUMBA", "") in ("", "0")

EVEN, ODD, TIE, AMBIGUOUS = 0, 1, 2, -1
REJECT = -1
# Parity rules: compare variances, or always decode one parity.
RULE_VARIANCE, RULE_EVEN, RULE_ODD = 0, 1, 2
RULES = {"variance": RULE_VARIANCE, "even": RULE_EVEN, "odd": RULE_ODD}


def window_counts_numpy(occ, start, n_windows, m):
    occ = np.asarray(occ, dtype=np.int64)
    need = start + n_windows * m
    seg = occ[start:need]
    if seg.size < n_windows * m:
        seg = np.concatenate([seg, np.zeros(n_windows * m - seg.size, dtype=np.int64)])
    return seg.reshape(n_windows, m).sum(axis=1)


def _parity_bits_numpy(e, threshold):
    """e: (batch, 2n) counts -> (scores_even, scores_odd, bits_even, bits_odd)."""
    ev = e[:, 0::2]
    od = e[:, 1::2]
    n = ev.shape[1]
    s_ev = n * (ev * ev).sum(axis=1) - ev.sum(axis=1) ** 2
    s_od = n * (od * od).sum(axis=1) - od.sum(axis=1) ** 2
    return s_ev, s_od, (ev > threshold), (od > threshold)


def decide_batch_numpy(e, threshold, rule=RULE_VARIANCE):
    """Vectorised decision over a (batch, 2n) count matrix.

    Returns (parity, accepted_code) arrays; accepted_code is REJECT when the
    receiver would flag tampering.
    """
    e = np.asarray(e, dtype=np.int64)
    s_ev, s_od, b_ev, b_od = _parity_bits_numpy(e, threshold)
    n = b_ev.shape[1]
    weights = (1 << np.arange(n - 1, -1, -1)).astype(np.int64)
    c_ev = b_ev.astype(np.int64) @ weights
    c_od = b_od.astype(np.int64) @ weights
    if rule == RULE_EVEN:
        parity = np.full(e.shape[0], EVEN)
    elif rule == RULE_ODD:
        parity = np.full(e.shape[0], ODD)
    else:
        parity = np.where(s_ev > s_od, EVEN, np.where(s_od > s_ev, ODD, TIE))
    code = np.where(parity == ODD, c_od, c_ev)
    ones = np.where(parity == ODD, b_od.sum(axis=1), b_ev.sum(axis=1))
    ambiguous = (parity == TIE) & (c_ev != c_od)
    parity = np.where(ambiguous, AMBIGUOUS, parity)
    ok = (~ambiguous) & (2 * ones == n)
    return parity, np.where(ok, code, REJECT)


def enumerate_numpy(lo, hi, threshold, sent_code, rule=RULE_VARIANCE, chunk=1 << 16):
    """Count accepted-but-wrong decodings over the box lo <= e <= hi.

    Returns ``(hits, witness)`` indexed by accepted code: ``hits[c]`` is the
    number of count vectors decoding to ``c != sent_code``, ``witness[c]`` the
    first such vector's index in mixed-radix order (window 0 most
    significant), or -1.
    """
    lo = np.asarray(lo, dtype=np.int64)
    hi = np.asarray(hi, dtype=np.int64)
    radix = hi - lo + 1
    n = lo.size // 2
    total = int(np.prod(radix))
    hits = np.zeros(1 << n, dtype=np.int64)
    witness = np.full(1 << n, -1, dtype=np.int64)
    for begin in range(0, total, chunk):
        idx = np.arange(begin, min(total, begin + chunk), dtype=np.int64)
        e = np.empty((idx.size, lo.size), dtype=np.int64)
        rem = idx.copy()
        for w in range(lo.size - 1, -1, -1):
            e[:, w] = lo[w] + rem % radix[w]
            rem //= radix[w]
        _, code = decide_batch_numpy(e, threshold, rule)
        bad = (code != REJECT) & (code != sent_code)
        if not bad.any():
            continue
        codes = code[bad]
        hits += np.bincount(codes, minlength=1 << n)
        uniq, first = np.unique(codes, return_index=True)
        fresh = witness[uniq] < 0
        witness[uniq[fresh]] = idx[bad][first[fresh]]
    return hits, witness


def decode_index_numpy(index, lo, hi):
    lo = np.asarray(lo, dtype=np.int64)
    radix = np.asarray(hi, dtype=np.int64) - lo + 1
    e = np.empty(lo.size, dtype=np.int64)
    rem = int(index)
    for w in range(lo.size - 1, -1, -1):
        e[w] = lo[w] + rem % radix[w]
        rem //= int(radix[w])
    return e


if HAVE_NUMBA:

    @numba.njit(cache=True)
    def window_counts_numba(occ, start, n_windows, m):
        out = np.zeros(n_windows, dtype=np.int64)
        size = occ.shape[0]
        for w in range(n_windows):
            base = start + w * m
            acc = 0
            for t in range(base, base + m):
                if t < size and occ[t]:
                    acc += 1
            out[w] = acc
        return out

    @numba.njit(cache=True)
    def _decide_one(e, threshold, n, rule):
        sum_e = 0
        sq_e = 0
        sum_o = 0
        sq_o = 0
        code_e = 0
        code_o = 0
        ones_e = 0
        ones_o = 0
        for k in range(n):
            a = e[2 * k]
            b = e[2 * k + 1]
            sum_e += a
            sq_e += a * a
            sum_o += b
            sq_o += b * b
            code_e <<= 1
            code_o <<= 1
            if a > threshold:
                code_e |= 1
                ones_e += 1
            if b > threshold:
                code_o |= 1
                ones_o += 1
        if rule == 1:
            return code_e if 2 * ones_e == n else -1
        if rule == 2:
            return code_o if 2 * ones_o == n else -1
        s_e = n * sq_e - sum_e * sum_e
        s_o = n * sq_o - sum_o * sum_o
        if s_e > s_o:
            return code_e if 2 * ones_e == n else -1
        if s_o > s_e:
            return code_o if 2 * ones_o == n else -1
        if code_e != code_o:
            return -1
        return code_e if 2 * ones_e == n else -1

    @numba.njit(cache=True)
    def enumerate_numba(lo, hi, threshold, sent_code, rule=0):
        width = lo.shape[0]
        n = width // 2
        hits = np.zeros(1 << n, dtype=np.int64)
        witness = np.full(1 << n, -1, dtype=np.int64)
        e = lo.copy()
        idx = 0
        while True:
            code = _decide_one(e, threshold, n, rule)
            if code >= 0 and code != sent_code:
                hits[code] += 1
                if witness[code] < 0:
                    witness[code] = idx
            idx += 1
            # Odometer step, last window fastest.
            w = width - 1
            while w >= 0:
                if e[w] < hi[w]:
                    e[w] += 1
                    break
                e[w] = lo[w]
                w -= 1
            if w < 0:
                break
        return hits, witness


if USE_NUMBA:
    window_counts = window_counts_numba
    enumerate_schedules = enumerate_numba
else:
    window_counts = window_counts_numpy
    enumerate_schedules = enumerate_numpy


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
