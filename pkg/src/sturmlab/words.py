"""Rotation-coded words on {0,1}^Z: Sturmian words, finite windows, periodic tilings."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

from . import kernels
from .quadirr import Arc, QuadIrrError, QuadraticIrrational, ZERO, in_arc

LEFT_CLOSED = "left_closed"    # P = [0, theta)
RIGHT_CLOSED = "right_closed"  # P = (0, theta]


def _as_bits(seq) -> np.ndarray:
    if isinstance(seq, np.ndarray):
        arr = seq.astype(np.uint8, copy=True)
    elif isinstance(seq, str):
        if seq and set(seq) - {"0", "1"}:
            raise ValueError("bit strings may contain only 0 and 1")
        arr = np.frombuffer(seq.encode(), dtype=np.uint8) - ord("0")
    else:
        arr = np.array(list(seq), dtype=np.uint8)
    if arr.size and arr.max() > 1:
        raise ValueError("bits must be 0 or 1")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class FiniteWord:
    """Packed 0/1 word whose first symbol sits at absolute index `origin`."""

    bits: np.ndarray
    origin: int = 0

    def __post_init__(self):
        object.__setattr__(self, "bits", _as_bits(self.bits))

    def __len__(self) -> int:
        return int(self.bits.shape[0])

    @property
    def end(self) -> int:
        return self.origin + len(self) - 1

    def symbol_at(self, n: int) -> int:
        if not self.origin <= n <= self.end:
            raise IndexError(f"index {n} outside [{self.origin}, {self.end}]")
        return int(self.bits[n - self.origin])

    def to01(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)

    def ones_count(self) -> int:
        return int(self.bits.sum())

    def __eq__(self, other):
        if not isinstance(other, FiniteWord):
            return NotImplemented
        return self.origin == other.origin and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.origin, self.bits.tobytes()))

    def __repr__(self):
        s = self.to01()
        if len(s) > 40:
            s = s[:37] + "..."
        return f"FiniteWord({s!r}, origin={self.origin})"


def word_from_string(s: str, origin: int = 0) -> FiniteWord:
    return FiniteWord(s, origin)


# ---------------------------------------------------------------------------
# rotation-coded bi-infinite words
# ---------------------------------------------------------------------------

def _common_field(values: Sequence[QuadraticIrrational]) -> tuple[int, int]:
    """(d, common denominator R) for a family of same-field values."""
    d = 1
    for v in values:
        if v.q != 0:
            if d == 1:
                d = v.d
            elif v.d != d:
                raise QuadIrrError("values live in different quadratic fields")
    R = 1
    for v in values:
        R = R * v.r // math.gcd(R, v.r)
    return d, R


def _scaled(v: QuadraticIrrational, R: int) -> tuple[int, int]:
    f = R // v.r
    return v.p * f, v.q * f


class RotationWord:
    """Bi-infinite coding of the orbit {x0 + n*phi} against P = [0, theta)
    (left_closed) or (0, theta] (right_closed): symbol 0 on P, 1 off it."""

    def __init__(self, phi: QuadraticIrrational, x0: QuadraticIrrational = ZERO,
                 convention: str = LEFT_CLOSED,
                 threshold: QuadraticIrrational | None = None):
        if phi.is_rational:
            raise QuadIrrError("phi must be irrational")
        if not (phi.sign() > 0 and (phi - 1).sign() < 0):
            raise QuadIrrError("phi must lie in (0, 1)")
        if convention not in (LEFT_CLOSED, RIGHT_CLOSED):
            raise ValueError(f"unknown convention {convention!r}")
        theta = phi if threshold is None else threshold
        if not (theta.sign() > 0 and (theta - 1).sign() <= 0):
            raise QuadIrrError("coding threshold must lie in (0, 1]")
        self.phi = phi
        self.x0 = x0.frac()
        self.threshold = theta
        self.convention = convention

    @property
    def coding_arc(self) -> Arc:
        if self.convention == LEFT_CLOSED:
            return Arc(ZERO, self.threshold, lo_closed=True, hi_closed=False)
        return Arc(ZERO, self.threshold, lo_closed=False, hi_closed=True)

    def symbol_at(self, n: int) -> int:
        y = (self.x0 + self.phi * n).frac()
        return 0 if in_arc(y, self.coding_arc) else 1

    def window(self, a: int, b: int) -> FiniteWord:
        """Symbols for n = a..b inclusive, via the exact orbit kernels."""
        if a > b:
            raise ValueError("window requires a <= b")
        n = b - a + 1
        start = (self.x0 + self.phi * a).frac()
        arc = self.coding_arc
        d, R = _common_field([start, self.phi, arc.lo, arc.hi])
        a0, b0 = _scaled(start, R)
        sa, sb = _scaled(self.phi, R)
        la, lb = _scaled(arc.lo, R)
        ha, hb = _scaled(arc.hi, R)
        member = kernels.orbit_membership(
            a0, b0, sa, sb, R, d, la, lb, ha, hb,
            arc.lo_closed, arc.hi_closed, False, n,
        )
        return FiniteWord(1 - member, origin=a)

    def ones_frequency(self) -> QuadraticIrrational:
        """Exact limit frequency of 1s (length of the complement of P)."""
        return 1 - self.threshold


class SturmianWord(RotationWord):
    """Rotation coding with the natural interval P of length phi (Definition coding)."""

    def __init__(self, phi, x0=ZERO, convention: str = LEFT_CLOSED):
        super().__init__(phi, x0, convention, threshold=None)

    def __repr__(self):
        return (f"SturmianWord(phi={self.phi!r}, x0={self.x0!r}, "
                f"convention={self.convention!r})")


@dataclass(frozen=True)
class PeriodicWord:
    """Tiling of a finite period word; symbol_at(n) = period[(n - phase) mod k]."""

    period_word: FiniteWord
    phase: int = 0
    sturmian_phi: QuadraticIrrational | None = None  # set when tagged periodically Sturmian

    def __post_init__(self):
        if len(self.period_word) < 1:
            raise ValueError("period must have length >= 1")

    @property
    def period(self) -> int:
        return len(self.period_word)

    @property
    def is_periodically_sturmian(self) -> bool:
        return self.sturmian_phi is not None

    def symbol_at(self, n: int) -> int:
        return int(self.period_word.bits[(n - self.phase) % self.period])

    def window(self, a: int, b: int) -> FiniteWord:
        if a > b:
            raise ValueError("window requires a <= b")
        k = self.period
        idx = (np.arange(a, b + 1, dtype=np.int64) - self.phase) % k
        return FiniteWord(self.period_word.bits[idx], origin=a)

    def ones_frequency(self) -> Fraction:
        return Fraction(self.period_word.ones_count(), self.period)

    def to_json_dict(self) -> dict:
        return {"period": self.period_word.to01(), "phase": self.phase}

    @staticmethod
    def from_json_dict(js: dict) -> "PeriodicWord":
        return PeriodicWord(FiniteWord(js["period"]), phase=int(js.get("phase", 0)))


Word = Union[RotationWord, PeriodicWord]


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def symbol_at(w: Word, n: int) -> int:
    return w.symbol_at(n)


def window(w: Word, a: int, b: int) -> FiniteWord:
    return w.window(a, b)


def pattern_count(w: FiniteWord, p: FiniteWord) -> int:
    """Occurrences of p as a contiguous factor fully inside w (left endpoints)."""
    return kernels.pattern_count(w.bits, p.bits)


def factor_complexity(w: Word, L: int, N: int) -> int:
    """Number of distinct length-L factors of w([0, N])."""
    if L < 1 or N < L:
        raise ValueError("need 1 <= L <= N")
    bits = w.window(0, N).bits
    seen = set()
    code = 0
    mask = (1 << L) - 1
    for i, b in enumerate(bits):
        code = ((code << 1) | int(b)) & mask
        if i >= L - 1:
            seen.add(code)
    return len(seen)


def frequency_estimate(w: Word, p: FiniteWord, N: int) -> Fraction:
    """Empirical frequency of p over w([0, N-1]), as an exact rational."""
    if N < len(p):
        raise ValueError("window shorter than the pattern")
    count = kernels.pattern_count(w.window(0, N - 1).bits, p.bits)
    return Fraction(count, N - len(p) + 1)


@dataclass(frozen=True)
class FluctuationStats:
    pattern: FiniteWord
    per_segment_deviation: list[int]
    max_deviation: int
    segment_length: int
    c_bound: int  # 2 * (max_deviation + 2 * |pattern|)


def fluctuation_stats(x: Word, y: Word, p: FiniteWord, k: int,
                      s_range: Iterable[int]) -> FluctuationStats:
    """Per-segment pattern-count deviations |n_p(x[sk,(s+1)k]) - n_p(y[sk,(s+1)k])|.

    Segments are inclusive on both ends (k+1 symbols).  The reported bound
    c_bound = 2*(D + 2|p|) feeds the perturbation-energy estimate.
    """
    ss = sorted(set(int(s) for s in s_range))
    if not ss:
        raise ValueError("empty segment range")
    lo = ss[0] * k
    hi = ss[-1] * k + k
    xb = x.window(lo, hi).bits
    yb = y.window(lo, hi).bits
    starts = np.array([s * k - lo for s in ss], dtype=np.int64)
    cx = kernels.segment_counts(xb, starts, k + 1, p.bits)
    cy = kernels.segment_counts(yb, starts, k + 1, p.bits)
    dev = np.abs(cx - cy)
    dmax = int(dev.max())
    return FluctuationStats(
        pattern=p,
        per_segment_deviation=[int(v) for v in dev],
        max_deviation=dmax,
        segment_length=k,
        c_bound=2 * (dmax + 2 * len(p)),
    )


def periodic_sturmian(phi: QuadraticIrrational, k: int,
                      x0: QuadraticIrrational = ZERO, phase: int = 0,
                      convention: str = LEFT_CLOSED) -> PeriodicWord:
    """Tiling of the length-k window of the Sturmian word starting at `phase`."""
    if k < 1:
        raise ValueError("period length must be >= 1")
    w = SturmianWord(phi, x0, convention)
    period = w.window(phase, phase + k - 1)
    return PeriodicWord(FiniteWord(period.bits, origin=0), phase=phase,
                        sturmian_phi=phi)


def is_sturmian_window(phi: QuadraticIrrational, bits,
                       x0: QuadraticIrrational = ZERO) -> bool:
    """Whether the word occurs as a factor of the phi-Sturmian language.

    Sturmian words are uniformly recurrent, so a genuine factor shows up in
    any sufficiently long window; the search doubles the horizon twice
    before giving up.
    """
    probe = _as_bits(bits)
    k = probe.shape[0]
    w = SturmianWord(phi, x0)
    horizon = 64 * k + 1024
    for _ in range(3):
        hay = w.window(0, horizon).bits
        if kernels.pattern_count(hay, probe) > 0:
            return True
        horizon *= 2
    return False
