"""Quantitative hitting statistics for the accelerated rotation x_{i+1} = x_i + k*phi.

For badly approximable phi and an arc P of length >= 1/2, the orbit started
anywhere hits P at least (d/6)*k times within d*k steps once k is large
enough, with d = ceil(1/c) from the approximation constant of phi.  The scan
records the empirical onset threshold instead of guessing one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .parallel import ordered_map
from .quadirr import (
    Arc,
    QuadIrrError,
    QuadraticIrrational,
    badly_constant_scan,
    cf_expand,
    convergents,
)
from .words import _common_field, _scaled, ZERO


@dataclass(frozen=True)
class HittingResult:
    k: int
    d: int
    hits: int
    bound: float            # (d/6) * k
    passed: bool            # hits >= bound, decided on integers: 6*hits >= d*k
    n_bracket: int          # n with dist(k*phi, 0) in (1/(n+1), 1/n)
    case_id: int            # 1, 2 or 3, following the proof's case split

    def csv_row(self) -> tuple:
        return (self.k, self.n_bracket, self.case_id, self.hits,
                self.bound, self.passed)


def _orbit_members(phi: QuadraticIrrational, x0: QuadraticIrrational,
                   k: int, steps: int, arc: Arc) -> np.ndarray:
    """Membership flags of x_i = {x0 + i*k*phi} in the arc for i = 1..steps."""
    step = (phi * k).frac()
    start = (x0 + step).frac()
    d, R = _common_field([start, step, arc.lo, arc.hi])
    a0, b0 = _scaled(start, R)
    sa, sb = _scaled(step, R)
    la, lb = _scaled(arc.lo, R)
    ha, hb = _scaled(arc.hi, R)
    wrap = arc.lo.cmp(arc.hi) > 0
    return kernels.orbit_membership(a0, b0, sa, sb, R, d, la, lb, ha, hb,
                                    arc.lo_closed, arc.hi_closed, wrap, steps)


def _bracket_n(phi: QuadraticIrrational, k: int) -> int:
    """n with dist({k phi}, 0) in (1/(n+1), 1/n); the symmetric case
    {k phi} > 1/2 is classified through the reflected increment."""
    y = (phi * k).frac()
    beta = y if y.cmp(1 - y) <= 0 else 1 - y
    return beta.inverse().floor()


def _classify_case(n: int, dk: int) -> int:
    if 4 <= n <= dk // 2 - 1:
        return 1
    if n > dk // 2 - 1:
        return 2
    return 3


def hitting_count(phi: QuadraticIrrational, x0: QuadraticIrrational, k: int,
                  d: int, arc: Arc, *, proof_frame: bool = False) -> HittingResult:
    """Exact hit count of the accelerated orbit over i = 1..d*k.

    With proof_frame=True the circle is rotated so the arc's midpoint sits at
    3/4 (the arc then covers [1/2, 1)); hit counts are invariant under the
    rotation, so this is a debugging aid, not a different experiment.
    """
    if k < 1 or d < 1:
        raise ValueError("k and d must be >= 1")
    if phi.is_rational:
        raise QuadIrrError("phi must be irrational")
    if (arc.length() * 2 - 1).sign() < 0:
        raise QuadIrrError("arc must have length >= 1/2 (theorem hypothesis)")
    if proof_frame:
        # rotate by (3/4 - midpoint); membership counts are rotation-invariant
        mid = (arc.lo + arc.length() * Fraction(1, 2)).frac()
        shift = (QuadraticIrrational(3, 0, 4, 1) - mid).frac()
        arc = Arc((arc.lo + shift).frac(), (arc.hi + shift).frac(),
                  arc.lo_closed, arc.hi_closed)
        x0 = (x0 + shift).frac()
    steps = d * k
    member = _orbit_members(phi, x0, k, steps, arc)
    hits = int(member.sum())
    n = _bracket_n(phi, k)
    return HittingResult(
        k=k, d=d, hits=hits, bound=d * k / 6,
        passed=6 * hits >= d * k,
        n_bracket=n, case_id=_classify_case(n, d * k),
    )


def case3_window_check(phi: QuadraticIrrational, x0: QuadraticIrrational,
                       k: int, d: int, arc: Arc) -> bool:
    """Case-3 local property: when dist(k*phi,0) > 1/5 and the arc contains
    [1/2, 1), every 4 consecutive orbit points include a hit."""
    member = _orbit_members(phi, x0, k, d * k, arc)
    if member.shape[0] < 4:
        return bool(member.any())
    windows = np.lib.stride_tricks.sliding_window_view(member, 4)
    return bool(windows.any(axis=1).all())


@dataclass
class HittingScanSummary:
    k_star: int | None       # smallest k after which every scanned k passes
    r_empirical: float       # min over scanned k of hits / k
    d: int
    all_pass_from_start: bool

    def to_json_dict(self) -> dict:
        return {"k_star": self.k_star, "r_empirical": self.r_empirical,
                "d": self.d, "all_pass_from_start": self.all_pass_from_start}


def hitting_scan(phi: QuadraticIrrational, x0: QuadraticIrrational, arc: Arc,
                 k_range: Iterable[int], d: int,
                 threads: int = 1) -> tuple[list[HittingResult], HittingScanSummary]:
    ks = sorted(set(int(k) for k in k_range))
    if threads > 1:
        kernels.warmup()
    results = ordered_map(lambda k: hitting_count(phi, x0, k, d, arc), ks, threads)
    k_star = None
    for res in reversed(results):
        if not res.passed:
            break
        k_star = res.k
    r_emp = min(res.hits / res.k for res in results)
    return results, HittingScanSummary(
        k_star=k_star, r_empirical=r_emp, d=d,
        all_pass_from_start=all(res.passed for res in results),
    )


@dataclass
class LemmaBoundReport:
    c_est: Fraction
    argmin_k: int
    smallest: list[tuple[int, float]]      # three smallest (k, k*dist)
    record_ks: list[int]                   # indices where a new record min occurs
    convergent_denominators: list[int]
    records_at_convergents: bool
    all_above_bound: bool

    def to_json_dict(self) -> dict:
        return {
            "c_est": [self.c_est.numerator, self.c_est.denominator],
            "argmin_k": self.argmin_k,
            "smallest": [[k, v] for k, v in self.smallest],
            "record_ks": self.record_ks,
            "convergent_denominators": self.convergent_denominators,
            "records_at_convergents": self.records_at_convergents,
            "all_above_bound": self.all_above_bound,
        }


def lemma_bound_check(phi: QuadraticIrrational, k_max: int) -> LemmaBoundReport:
    """Self-consistency of dist({k phi}, 0) > c/k and the record-minimum locus.

    Record minima of k*dist must land on continued-fraction convergent
    denominators (best-approximation property, checked cross-module).
    """
    if phi.is_rational:
        raise QuadIrrError("phi must be irrational")
    scan = badly_constant_scan(phi, k_max)
    # float shadow walk; every candidate record is confirmed exactly
    fphi = float(phi.frac())
    y = 0.0
    best_exact: QuadraticIrrational | None = None
    best_f = float("inf")
    records: list[int] = []
    values: list[tuple[int, float]] = []
    for k in range(1, k_max + 1):
        y += fphi
        if y >= 1.0:
            y -= 1.0
        prod_f = k * min(y, 1.0 - y)
        values.append((k, prod_f))
        if prod_f < best_f * (1 + 1e-9) + 1e-9:
            yk = (phi * k).frac()
            dist = yk if yk.cmp(1 - yk) <= 0 else 1 - yk
            exact = dist * k
            if best_exact is None or exact.cmp(best_exact) < 0:
                records.append(k)
                best_exact = exact
                best_f = float(exact)
    cf = cf_expand(phi.frac(), 64)
    denoms = [q for _, q in convergents(cf, 40) if q <= k_max]
    smallest = sorted(values, key=lambda kv: kv[1])[:3]
    c = scan.c_est
    # exactness of the bound is guaranteed upstream; the float re-check only
    # guards against bookkeeping regressions
    all_above = all(v >= float(c) - 1e-6 for _, v in values)
    return LemmaBoundReport(
        c_est=c, argmin_k=scan.argmin_k, smallest=smallest,
        record_ks=records, convergent_denominators=denoms,
        records_at_convergents=all(k in set(denoms) or k == 1 for k in records),
        all_above_bound=all_above,
    )
