"""Forbidden-distance oracle and zero-run bound characterising the Sturmian subshift.

A distance k >= 1 is forbidden exactly when {k*phi} lies in the closed arc
[1-phi, phi]; no two 1s of a phi-Sturmian word may sit k apart for such k.
Together with the absence of the all-zero word of length m this pins the
subshift down by pattern absence alone.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .quadirr import Arc, QuadIrrError, QuadraticIrrational, in_arc
from .words import SturmianWord, _common_field, _scaled, ZERO


class CharacterizationError(AssertionError):
    """An absence violation: the exact arithmetic and the scan disagree."""


@dataclass
class ForbiddenModel:
    phi: QuadraticIrrational
    zero_run_m: int | None = None
    arc: Arc = field(init=False)

    def __post_init__(self):
        if self.phi.is_rational:
            raise QuadIrrError("phi must be irrational")
        half = self.phi - QuadraticIrrational(1, 0, 2, 1)
        if not (half.sign() > 0 and (self.phi - 1).sign() < 0):
            raise QuadIrrError("phi must lie in (1/2, 1); smaller phi need the "
                               "0/1-swapped adapter")
        self.arc = Arc(1 - self.phi, self.phi, lo_closed=True, hi_closed=True)
        if self.zero_run_m is not None and self.zero_run_m < 2:
            raise ValueError("zero-run bound must be >= 2")

    @property
    def m(self) -> int:
        if self.zero_run_m is None:
            self.zero_run_m = zero_run_bound(self)
        return self.zero_run_m


def complement_model(phi: QuadraticIrrational) -> tuple[ForbiddenModel, bool]:
    """Model for phi in (0, 1/2) via the 0/1-swapped word (roles exchanged)."""
    half = phi - QuadraticIrrational(1, 0, 2, 1)
    if half.sign() < 0:
        return ForbiddenModel(1 - phi), True
    return ForbiddenModel(phi), False


def is_forbidden_distance(model: ForbiddenModel, k: int) -> bool:
    if k < 1:
        raise ValueError("distances are positive integers")
    y = (model.phi * k).frac()
    return in_arc(y, model.arc)


def forbidden_table(model: ForbiddenModel, k_max: int) -> np.ndarray:
    """uint8 table over t = 0..k_max with table[t] = 1 iff t >= 1 is forbidden."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    phi = model.phi
    start = phi.frac()
    d, R = _common_field([start, phi, model.arc.lo, model.arc.hi])
    a0, b0 = _scaled(start, R)
    sa, sb = _scaled(phi, R)
    la, lb = _scaled(model.arc.lo, R)
    ha, hb = _scaled(model.arc.hi, R)
    member = kernels.orbit_membership(
        a0, b0, sa, sb, R, d, la, lb, ha, hb, True, True, False, k_max,
    )
    out = np.zeros(k_max + 1, dtype=np.uint8)
    out[1:] = member
    return out


def forbidden_set(model: ForbiddenModel, k_max: int) -> list[int]:
    """{k <= k_max : k is a forbidden distance}, sorted."""
    return [int(k) for k in np.flatnonzero(forbidden_table(model, k_max))]


def zero_run_bound(model: ForbiddenModel, scan_N: int = 10**5) -> int:
    """Smallest all-zero word length absent from the word: max observed run + 1.

    Cross-validated against the three-distance structure (gaps between
    consecutive 1s take at most three values) and against a half-length scan;
    an unstable gap set triggers a warning.
    """
    word = SturmianWord(model.phi)
    bits = word.window(0, scan_N).bits
    gaps_full = _one_gaps(bits)
    gaps_half = _one_gaps(bits[: scan_N // 2])
    if set(gaps_full.tolist()) != set(gaps_half.tolist()):
        warnings.warn("gap set not stable between scan_N/2 and scan_N; "
                      "increase scan_N", stacklevel=2)
    distinct = sorted(set(gaps_full.tolist()))
    if len(distinct) > 3:
        raise CharacterizationError(
            f"gaps between 1s take {len(distinct)} values {distinct}; "
            "three-distance structure violated (arithmetic bug)")
    if not gaps_full.size:
        raise CharacterizationError("no 1s found in the scan window")
    # a gap g between consecutive 1s encloses a run of g-1 zeros,
    # so the smallest absent run length is max(gap) - 1 + 1
    return int(gaps_full.max())


def _one_gaps(bits: np.ndarray) -> np.ndarray:
    ones = np.flatnonzero(bits)
    return np.diff(ones)


@dataclass
class CharacterizationReport:
    m: int
    violations: list[dict]
    unrealized: list[dict]
    witnesses: dict[int, int]

    @property
    def ok(self) -> bool:
        return not self.violations and not self.unrealized

    def to_json_dict(self) -> dict:
        return {
            "violations": self.violations,
            "unrealized": self.unrealized,
            "m": self.m,
            "witnesses": {str(k): v for k, v in sorted(self.witnesses.items())},
        }


def verify_characterization(model: ForbiddenModel, word_N: int, k_max: int,
                            x0: QuadraticIrrational = ZERO,
                            bits: np.ndarray | None = None) -> CharacterizationReport:
    """Absence of forbidden patterns (hard) and realization of allowed distances.

    (a) No pair of 1s at a forbidden distance <= k_max and no zero-run of
        length m may occur over word_N symbols: a violation means an
        arithmetic bug and lands in `violations`.
    (b) Every allowed distance should be realized somewhere in the window;
        misses are reported in `unrealized` with the caveat that the witness
        window may simply be too short (expected witness gap ~ k / c).
    """
    if bits is None:
        bits = SturmianWord(model.phi, x0).window(0, word_N).bits
    m = model.m
    table = forbidden_table(model, k_max)
    ks = np.arange(1, k_max + 1, dtype=np.int64)
    witness = kernels.pair_witness(bits, ks)
    violations: list[dict] = []
    unrealized: list[dict] = []
    witnesses: dict[int, int] = {}
    for k, w in zip(ks, witness):
        k = int(k)
        if table[k]:
            if w >= 0:
                violations.append({"kind": "forbidden_pair", "k": k, "position": int(w)})
        else:
            if w >= 0:
                witnesses[k] = int(w)
            else:
                unrealized.append({"k": k, "note": "no witness in window; "
                                   "enlarge word_N (expected gap ~ k/c)"})
    runs = kernels.zero_run_occurrences(bits, m)
    if runs > 0:
        violations.append({"kind": "zero_run", "m": m, "occurrences": int(runs)})
    return CharacterizationReport(m=m, violations=violations,
                                  unrealized=unrealized, witnesses=witnesses)
