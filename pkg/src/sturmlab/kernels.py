"""Hot kernels: exact integer orbit walks, pair spectra, window energies.

Every kernel has a numba @njit implementation and a pure-numpy twin with
identical semantics; STURMLAB_BACKEND=numpy selects the twin (numba is the
default when importable).  Both paths work on int64 and are exact; a
precomputed overflow guard decides whether int64 is safe for a given orbit,
otherwise callers fall back to the arbitrary-precision Python walk.

Orbit state: a circle point is (a + b*sqrt(d))/R with 0 <= value < 1.
Adding a step (sa + sb*sqrt(d))/R and conditionally subtracting R keeps the
point reduced; membership tests reduce to signs of u + v*sqrt(d), resolved
by integer squaring.
"""

from __future__ import annotations

import math
import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


def use_numba() -> bool:
    env = os.environ.get("STURMLAB_BACKEND", "").strip().lower()
    if env in ("numpy", "python"):
        return False
    return HAVE_NUMBA


# ---------------------------------------------------------------------------
# exact sign of u + v*sqrt(d) (scalar helpers for both backends)
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True, inline="always")
def _sgn(u, v, d):
    if v == 0:
        return (u > 0) - (u < 0)
    if u == 0:
        return (v > 0) - (v < 0)
    if u > 0 and v > 0:
        return 1
    if u < 0 and v < 0:
        return -1
    uu = u * u
    vv = d * v * v
    if uu == vv:
        return 0
    if uu > vv:
        return 1 if u > 0 else -1
    return 1 if v > 0 else -1


def _sgn_vec(u, v, d):
    """Vectorised exact sign of u + v*sqrt(d) for int64 arrays."""
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    uu = u * u
    vv = d * v * v
    su = np.sign(u)
    sv = np.sign(v)
    dom = np.where(uu > vv, su, np.where(uu < vv, sv, 0)).astype(np.int64)
    same = su == sv
    return np.where(same, np.where(su != 0, su, sv), dom)


# ---------------------------------------------------------------------------
# orbit membership: y_i = {y0 + i*step}, flags for arc closure / wrap
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def _orbit_membership_njit(a0, b0, sa, sb, R, d, la, lb, ha, hb,
                           lo_closed, hi_closed, wrap, n):
    out = np.empty(n, dtype=np.uint8)
    a = a0
    b = b0
    for i in range(n):
        cl = _sgn(a - la, b - lb, d)
        ch = _sgn(a - ha, b - hb, d)
        if wrap:
            m = (cl > 0) or (ch < 0) or (cl == 0 and lo_closed) or (ch == 0 and hi_closed)
        else:
            m = (cl > 0 and ch < 0) or (cl == 0 and lo_closed) or (ch == 0 and hi_closed)
        out[i] = 1 if m else 0
        a += sa
        b += sb
        if _sgn(a - R, b, d) >= 0:
            a -= R
    return out


def _orbit_membership_numpy(a0, b0, sa, sb, R, d, la, lb, ha, hb,
                            lo_closed, hi_closed, wrap, n):
    i = np.arange(n, dtype=np.int64)
    araw = a0 + i * sa
    b = b0 + i * sb
    sq = math.sqrt(d)
    e = np.floor((araw + b * sq) / R).astype(np.int64)
    a = araw - e * R
    # exact correction of the float floor estimate
    for _ in range(4):
        low = _sgn_vec(a, b, d) < 0          # y < 0: e too big
        high = _sgn_vec(a - R, b, d) >= 0    # y >= 1: e too small
        if not (low.any() or high.any()):
            break
        e = e - low.astype(np.int64) + high.astype(np.int64)
        a = araw - e * R
    else:
        raise ArithmeticError("floor correction did not converge")
    cl = _sgn_vec(a - la, b - lb, d)
    ch = _sgn_vec(a - ha, b - hb, d)
    at_lo = (cl == 0) & lo_closed
    at_hi = (ch == 0) & hi_closed
    if wrap:
        m = (cl > 0) | (ch < 0) | at_lo | at_hi
    else:
        m = ((cl > 0) & (ch < 0)) | at_lo | at_hi
    return m.astype(np.uint8)


def _orbit_membership_python(a0, b0, sa, sb, R, d, la, lb, ha, hb,
                             lo_closed, hi_closed, wrap, n):
    """Arbitrary-precision reference walk (guard fallback and test oracle)."""

    def sgn(u, v):
        if v == 0:
            return (u > 0) - (u < 0)
        if u == 0:
            return (v > 0) - (v < 0)
        if u > 0 and v > 0:
            return 1
        if u < 0 and v < 0:
            return -1
        uu, vv = u * u, d * v * v
        if uu == vv:
            return 0
        if uu > vv:
            return 1 if u > 0 else -1
        return 1 if v > 0 else -1

    out = np.empty(n, dtype=np.uint8)
    a, b = a0, b0
    for i in range(n):
        cl = sgn(a - la, b - lb)
        ch = sgn(a - ha, b - hb)
        if wrap:
            m = cl > 0 or ch < 0 or (cl == 0 and lo_closed) or (ch == 0 and hi_closed)
        else:
            m = (cl > 0 and ch < 0) or (cl == 0 and lo_closed) or (ch == 0 and hi_closed)
        out[i] = 1 if m else 0
        a += sa
        b += sb
        if sgn(a - R, b) >= 0:
            a -= R
    return out


def orbit_guard_ok(a0, b0, sa, sb, R, d, extra_a, extra_b, n) -> bool:
    """True when the int64 paths cannot overflow for this orbit.

    extra_a/extra_b bound the arc-endpoint numerators entering sign tests.
    """
    b_max = abs(b0) + n * abs(sb) + extra_b
    sqd = math.isqrt(d) + 1
    a_red = R + (b_max + 1) * sqd          # reduced |a| bound from 0 <= y < 1
    a_raw = abs(a0) + n * abs(sa)          # numpy twin works on unreduced a
    u_max = max(a_red + abs(sa) + R + extra_a, a_red + R + extra_a)
    v_max = b_max
    lim = 1 << 62
    if u_max * u_max >= lim or d * v_max * v_max >= lim:
        return False
    e_max = n + (a_raw + (b_max + 1) * sqd) // max(R, 1) + 2
    if a_raw + e_max * R >= lim:
        return False
    return True


def orbit_membership(a0, b0, sa, sb, R, d, la, lb, ha, hb,
                     lo_closed, hi_closed, wrap, n, *, force=None):
    """Membership of y_i = {y0 + i*step} in the arc, for i = 0..n-1."""
    if n <= 0:
        return np.zeros(0, dtype=np.uint8)
    args = (a0, b0, sa, sb, R, d, la, lb, ha, hb,
            bool(lo_closed), bool(hi_closed), bool(wrap), n)
    extra_a = max(abs(la), abs(ha))
    extra_b = max(abs(lb), abs(hb))
    safe = orbit_guard_ok(a0, b0, sa, sb, R, d, extra_a, extra_b, n)
    path = force or ("int64" if safe else "python")
    if path == "python":
        return _orbit_membership_python(*args)
    if use_numba():
        return _orbit_membership_njit(*args)
    return _orbit_membership_numpy(*args)


# ---------------------------------------------------------------------------
# pair spectrum: counts of ordered pairs of 1s at every distance
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def _spectrum_direct_njit(ones, length):
    counts = np.zeros(length, dtype=np.int64)
    m = ones.shape[0]
    for i in range(m):
        oi = ones[i]
        for j in range(i + 1, m):
            counts[ones[j] - oi] += 1
    return counts


def _spectrum_direct_numpy(ones, length):
    counts = np.zeros(length, dtype=np.int64)
    for i in range(ones.shape[0] - 1):
        np.add.at(counts, ones[i + 1 :] - ones[i], 1)
    return counts


_FFT_RESIDUAL_TOL = 1e-2


def _spectrum_fft(bits):
    n = bits.shape[0]
    size = 1 << int(math.ceil(math.log2(2 * n)))
    f = np.fft.rfft(bits.astype(np.float64), size)
    corr = np.fft.irfft(f * np.conj(f), size)[:n]
    counts = np.rint(corr).astype(np.int64)
    resid = np.max(np.abs(corr - counts))
    if resid > _FFT_RESIDUAL_TOL:
        raise ArithmeticError(f"FFT autocorrelation residual {resid:.3g} too large")
    counts[0] = 0
    return counts

_DIRECT_PAIR_LIMIT = 3 * 10**7


def pair_spectrum(bits) -> np.ndarray:
    """counts[t] = number of index pairs i < j with bits[i] = bits[j] = 1, j - i = t.

    Small words use direct counting; large ones an FFT autocorrelation whose
    rounding to integers is certified by a residual check.
    """
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    n = bits.shape[0]
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    ones = np.flatnonzero(bits).astype(np.int64)
    if ones.shape[0] ** 2 <= _DIRECT_PAIR_LIMIT:
        if use_numba():
            return _spectrum_direct_njit(ones, n)
        return _spectrum_direct_numpy(ones, n)
    return _spectrum_fft(bits)


# ---------------------------------------------------------------------------
# pair-at-distance existence scan (both directions of the oracle equivalence)
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def _pair_witness_njit(bits, ks):
    first = np.full(ks.shape[0], -1, dtype=np.int64)
    n = bits.shape[0]
    for j in range(ks.shape[0]):
        k = ks[j]
        for i in range(n - k):
            if bits[i] and bits[i + k]:
                first[j] = i
                break
    return first


def _pair_witness_numpy(bits, ks):
    first = np.full(ks.shape[0], -1, dtype=np.int64)
    bb = bits.astype(bool)
    for j, k in enumerate(ks):
        both = bb[:-k] & bb[k:]
        idx = np.flatnonzero(both)
        if idx.size:
            first[j] = idx[0]
    return first


def pair_witness(bits, ks) -> np.ndarray:
    """First left endpoint of a pair of 1s at each distance k, or -1 if absent."""
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    ks = np.asarray(ks, dtype=np.int64)
    if use_numba():
        return _pair_witness_njit(bits, ks)
    return _pair_witness_numpy(bits, ks)


# ---------------------------------------------------------------------------
# zero runs and pattern matching
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def _zero_run_occ_njit(bits, m):
    total = 0
    run = 0
    for i in range(bits.shape[0]):
        if bits[i] == 0:
            run += 1
            if run >= m:
                total += 1
        else:
            run = 0
    return total


def _zero_run_occ_numpy(bits, m):
    padded = np.concatenate((np.ones(1, dtype=np.uint8), bits, np.ones(1, dtype=np.uint8)))
    edges = np.flatnonzero(np.diff(padded.astype(np.int8)))
    starts, ends = edges[::2], edges[1::2]
    lens = ends - starts
    return int(np.maximum(lens - m + 1, 0).sum())


def zero_run_occurrences(bits, m: int) -> int:
    """Occurrences (by left endpoint) of the all-zero word of length m."""
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    if m <= 0 or bits.shape[0] < m:
        return 0
    if use_numba():
        return int(_zero_run_occ_njit(bits, m))
    return _zero_run_occ_numpy(bits, m)


def match_indicator(bits, pat) -> np.ndarray:
    """uint8 indicator over left endpoints of exact occurrences of pat."""
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    pat = np.ascontiguousarray(pat, dtype=np.uint8)
    lp = pat.shape[0]
    if lp == 0 or lp > bits.shape[0]:
        return np.zeros(0, dtype=np.uint8)
    win = np.lib.stride_tricks.sliding_window_view(bits, lp)
    return np.all(win == pat, axis=1).astype(np.uint8)


def pattern_count(bits, pat) -> int:
    return int(match_indicator(bits, pat).sum())


# ---------------------------------------------------------------------------
# nested-window pair energies (streaming density estimator core)
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def _window_pair_energies_njit(bits, center, k, m_max, fw):
    """Pair energy of windows bits[center-m*k .. center+m*k] for m = 1..m_max.

    fw[t] is the weight of a pair at distance t (0 beyond the horizon);
    pairs at distances >= len(fw) are ignored (truncation tail).
    """
    T = fw.shape[0] - 1
    out = np.empty(m_max, dtype=np.float64)
    e = 0.0
    lo = center
    hi = center
    for m in range(1, m_max + 1):
        new_hi = center + m * k
        new_lo = center - m * k
        # right-extension sites pair down to the old left edge only;
        # pairs with the simultaneous left extension are owned by the left pass
        for j in range(hi + 1, new_hi + 1):
            if bits[j]:
                tmax = j - lo if j - lo < T else T
                for t in range(1, tmax + 1):
                    if bits[j - t]:
                        e += fw[t]
        hi = new_hi
        for j in range(lo - 1, new_lo - 1, -1):
            if bits[j]:
                tmax = hi - j if hi - j < T else T
                for t in range(1, tmax + 1):
                    if bits[j + t]:
                        e += fw[t]
        lo = new_lo
        out[m - 1] = e
    return out


def _window_pair_energies_numpy(bits, center, k, m_max, fw):
    T = fw.shape[0] - 1
    b = bits.astype(np.float64)
    conv = np.convolve(b, fw)[: bits.shape[0]]       # conv[j] = sum_t fw[t]*bits[j-t]
    contrib = b * conv                               # pairs attributed to right end
    cum = np.concatenate(([0.0], np.cumsum(contrib)))
    out = np.empty(m_max, dtype=np.float64)
    for m in range(1, m_max + 1):
        lo = center - m * k
        hi = center + m * k
        inside = cum[hi + 1] - cum[lo]
        # remove pairs whose left end lies before the window
        jmax = min(lo + T, hi + 1)
        cross = 0.0
        for j in range(lo, jmax):
            if bits[j]:
                tlo = j - lo + 1
                thi = min(T, j)
                if thi >= tlo:
                    seg = bits[j - thi : j - tlo + 1].astype(np.float64)
                    cross += np.dot(seg, fw[tlo : thi + 1][::-1])
        out[m - 1] = inside - cross
    return out


def window_pair_energies(bits, center, k, m_max, fw) -> np.ndarray:
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    fw = np.ascontiguousarray(fw, dtype=np.float64)
    if center - m_max * k < 0 or center + m_max * k >= bits.shape[0]:
        raise ValueError("window schedule exceeds the materialised bits")
    if use_numba():
        return _window_pair_energies_njit(bits, center, k, m_max, fw)
    return _window_pair_energies_numpy(bits, center, k, m_max, fw)


# ---------------------------------------------------------------------------
# residue-folded dot product (exact-limit density of periodic words)
# ---------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def _residue_dot_njit(fw, pc):
    k = pc.shape[0]
    total = 0.0
    for t in range(1, fw.shape[0]):
        c = pc[t % k]
        if c:
            total += fw[t] * c
    return total


def _residue_dot_numpy(fw, pc):
    k = pc.shape[0]
    n = fw.shape[0]
    pad = (-n) % k
    fwp = np.pad(fw, (0, pad))
    per_res = fwp.reshape(-1, k).sum(axis=0)
    # t = 0 must not contribute
    per_res[0] -= fw[0]
    return float(per_res @ pc.astype(np.float64))


def residue_dot(fw, pc) -> float:
    """sum over t >= 1 of fw[t] * pc[t mod k]."""
    fw = np.ascontiguousarray(fw, dtype=np.float64)
    pc = np.ascontiguousarray(pc, dtype=np.int64)
    if use_numba():
        return float(_residue_dot_njit(fw, pc))
    return _residue_dot_numpy(fw, pc)


# ---------------------------------------------------------------------------
# multi-pattern segment counts (fluctuation statistics)
# ---------------------------------------------------------------------------

def segment_counts(bits, seg_starts, seg_len, pat) -> np.ndarray:
    """Occurrences of pat in bits[s : s+seg_len] for each segment start s."""
    ind = match_indicator(bits, pat)
    cum = np.concatenate(([0], np.cumsum(ind, dtype=np.int64)))
    starts = np.asarray(seg_starts, dtype=np.int64)
    last = seg_len - len(pat)            # last admissible left endpoint offset
    if last < 0:
        return np.zeros(starts.shape[0], dtype=np.int64)
    hi = np.minimum(starts + last + 1, ind.shape[0])
    lo = np.minimum(starts, ind.shape[0])
    return cum[hi] - cum[lo]


def warmup() -> None:
    """Trigger JIT compilation of all kernels (no-op on the numpy backend)."""
    if not use_numba():
        return
    bits = np.array([1, 0, 1, 1, 0, 1, 0, 0, 0, 1], dtype=np.uint8)
    _orbit_membership_njit(0, 0, 1, 0, 3, 5, 0, 0, 2, 0, True, False, False, 4)
    _spectrum_direct_njit(np.flatnonzero(bits).astype(np.int64), 10)
    _pair_witness_njit(bits, np.array([1, 2], dtype=np.int64))
    _zero_run_occ_njit(bits, 2)
    _window_pair_energies_njit(bits, 5, 1, 3, np.array([0.0, 1.0, 0.5]))
    _residue_dot_njit(np.array([0.0, 1.0, 0.5, 0.25]), np.array([1, 2], dtype=np.int64))
