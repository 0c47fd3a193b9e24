"""Time the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Both backends are imported directly, so the TEPSIM_NO_NUMBA flag does not
matter here. Results are checked for equality before timing is reported.
"""
import argparse
import time

import numpy as np

from tepsim import _kernels as K
from tepsim.bits import bits_to_int


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--m", type=int, default=6)
    ap.add_argument("--threshold", type=int, default=3)
    args = ap.parse_args()
    if not K.HAVE_NUMBA:
        raise SystemExit("numba not installed")

    sent = "1100"
    # Whole box from silence up: every window ranges over 0..m.
    lo = np.zeros(2 * len(sent), dtype=np.int64)
    hi = np.full_like(lo, args.m)
    code = bits_to_int(sent)
    K.enumerate_numba(lo, hi, args.threshold, code)  # compile outside the timing

    size = int(np.prod(hi - lo + 1))
    t_nb, (h_nb, w_nb) = best_of(lambda: K.enumerate_numba(lo, hi, args.threshold, code), args.repeat)
    t_np, (h_np, w_np) = best_of(lambda: K.enumerate_numpy(lo, hi, args.threshold, code), args.repeat)
    assert np.array_equal(h_nb, h_np) and np.array_equal(w_nb, w_np)
    print(f"enumerate  {size:>9} schedules  numba {t_nb * 1e3:8.2f} ms  numpy {t_np * 1e3:8.2f} ms"
          f"  speedup {t_np / t_nb:6.1f}x")

    rng = np.random.default_rng(0)
    occ = rng.random(2_000_000) < 0.5
    K.window_counts_numba(occ, 3, 1000, 4)
    n_win = (occ.size - 8) // 4
    t_nb, a = best_of(lambda: K.window_counts_numba(occ, 3, n_win, 4), args.repeat)
    t_np, b = best_of(lambda: K.window_counts_numpy(occ, 3, n_win, 4), args.repeat)
    assert np.array_equal(a, b)
    print(f"windows    {n_win:>9} windows    numba {t_nb * 1e3:8.2f} ms  numpy {t_np * 1e3:8.2f} ms"
          f"  speedup {t_np / t_nb:6.1f}x")


if __name__ == "__main__":
    main()
