"""Benchmark the numba kernels against their pure-numpy twins.

Run as:  python -m sturmlab.bench [--sizes 10000,100000,1000000] [--repeat 5]

The same inputs go through both backends; results are checked for equality
before timings are reported, so the table doubles as an equivalence test.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import kernels
from .quadirr import make_quad
from .words import SturmianWord


def _median_time(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def _orbit_case(n):
    # forbidden-arc membership along the phi-orbit, phi = 3 - sqrt(5)
    args = (-2, 1, 3, -1, 1, 5, -2, 1, 3, -1, True, True, False, n)
    return (lambda: kernels._orbit_membership_njit(*args),
            lambda: kernels._orbit_membership_numpy(*args))


def _bits(n):
    return SturmianWord(make_quad(3, -1, 1, 5)).window(0, n - 1).bits


def _spectrum_case(n):
    bits = _bits(n)
    ones = np.flatnonzero(bits).astype(np.int64)
    return (lambda: kernels._spectrum_direct_njit(ones, n),
            lambda: kernels._spectrum_direct_numpy(ones, n))


def _witness_case(n):
    bits = _bits(n)
    ks = np.arange(1, 301, dtype=np.int64)
    return (lambda: kernels._pair_witness_njit(bits, ks),
            lambda: kernels._pair_witness_numpy(bits, ks))


def _zero_run_case(n):
    bits = _bits(n)
    return (lambda: kernels._zero_run_occ_njit(bits, 5),
            lambda: kernels._zero_run_occ_numpy(bits, 5))


def _stream_case(n):
    bits = _bits(n)
    k = 16
    m_max = (n // 2 - 2) // k
    fw = np.zeros(301)
    fw[2:] = np.arange(2, 301, dtype=float) ** -1.5
    center = n // 2
    return (lambda: kernels._window_pair_energies_njit(bits, center, k, m_max, fw),
            lambda: kernels._window_pair_energies_numpy(bits, center, k, m_max, fw))


def _residue_case(n):
    t = np.arange(n, dtype=np.float64)
    t[0] = 1.0
    fw = t**-1.2
    fw[0] = 0.0
    pc = np.arange(37, dtype=np.int64) % 5
    return (lambda: kernels._residue_dot_njit(fw, pc),
            lambda: kernels._residue_dot_numpy(fw, pc))


CASES = {
    "orbit_membership": (_orbit_case, (10**4, 10**5, 10**6)),
    "pair_spectrum_direct": (_spectrum_case, (10**3, 10**4)),
    "pair_witness_300": (_witness_case, (10**5, 10**6)),
    "zero_run_occurrences": (_zero_run_case, (10**5, 10**6)),
    "window_pair_energies": (_stream_case, (10**4, 10**5)),
    "residue_dot": (_residue_case, (10**5, 10**6)),
}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", help="override sizes, comma separated")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--cases", help="subset of case names, comma separated")
    args = ap.parse_args(argv)

    if not kernels.HAVE_NUMBA:
        print("numba unavailable: nothing to compare", file=sys.stderr)
        return 1
    kernels.warmup()

    names = args.cases.split(",") if args.cases else list(CASES)
    print(f"{'case':28s} {'size':>9s} {'njit_ms':>10s} {'numpy_ms':>10s} {'speedup':>8s}")
    for name in names:
        build, default_sizes = CASES[name]
        sizes = ([int(s) for s in args.sizes.split(",")]
                 if args.sizes else default_sizes)
        for n in sizes:
            njit_fn, numpy_fn = build(n)
            a, b = njit_fn(), numpy_fn()
            eq = np.array_equal(np.asarray(a), np.asarray(b)) or np.allclose(
                np.asarray(a, dtype=float), np.asarray(b, dtype=float),
                rtol=1e-9, atol=1e-12)
            if not eq:
                print(f"{name:28s} {n:9d}  BACKEND MISMATCH", file=sys.stderr)
                return 1
            njit_fn()  # make sure compilation is amortised
            t_nb = _median_time(njit_fn, args.repeat)
            t_np = _median_time(numpy_fn, args.repeat)
            print(f"{name:28s} {n:9d} {t_nb * 1e3:10.3f} {t_np * 1e3:10.3f} "
                  f"{t_np / max(t_nb, 1e-12):8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
