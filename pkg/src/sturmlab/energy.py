"""Power-law lattice-gas Hamiltonians on 0/1 words.

H assigns pair_scale / n^alpha to each pair of 1s at a forbidden distance n,
zero_run_energy to each occurrence of the all-zero word of length m, and a
signed table of per-pattern deltas carries finite perturbations.  Membership
decisions stay exact; energies are floats (optionally extended precision).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import kernels
from .forbidden import ForbiddenModel, forbidden_table
from .quadirr import make_quad
from .words import FiniteWord, PeriodicWord, Word, _as_bits


def zeta(alpha: float, n_terms: int = 4000) -> float:
    """Riemann zeta for alpha > 1 by direct sum plus Euler-Maclaurin tail."""
    if alpha <= 1:
        raise ValueError("zeta tail diverges for alpha <= 1")
    n = np.arange(1, n_terms, dtype=np.float64)
    return float((n ** -alpha).sum()) + zeta_tail(alpha, n_terms - 1)


def zeta_tail(alpha: float, T: float) -> float:
    """sum_{t > T} t^-alpha via Euler-Maclaurin at N = T + 1 (error ~ N^-a-5)."""
    if alpha <= 1:
        raise ValueError("zeta tail diverges for alpha <= 1")
    N = float(T) + 1.0
    head = N ** (1 - alpha) / (alpha - 1) + 0.5 * N**-alpha
    b2 = alpha * N ** (-alpha - 1) / 12.0
    b4 = alpha * (alpha + 1) * (alpha + 2) * N ** (-alpha - 3) / 720.0
    return head + b2 - b4


@dataclass(frozen=True)
class PatternTable:
    """Finite signed perturbation: pattern -> delta with |delta| < lam."""

    entries: Mapping[str, float]
    lam: float

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lambda must be >= 0")
        object.__setattr__(self, "entries", dict(self.entries))
        for pat, delta in self.entries.items():
            if not pat or set(pat) - {"0", "1"}:
                raise ValueError(f"bad pattern {pat!r}")
            if abs(delta) >= self.lam:
                raise ValueError(
                    f"|delta({pat})| = {abs(delta)} must be < lambda = {self.lam}")

    def items(self):
        return self.entries.items()

    def __len__(self):
        return len(self.entries)


EMPTY_TABLE = PatternTable({}, 0.0)


@dataclass(frozen=True)
class HamiltonianSpec:
    alpha: float
    forbidden: ForbiddenModel
    pair_scale: float = 1.0
    zero_run_energy: float = 1.0
    perturbation: PatternTable = EMPTY_TABLE

    def __post_init__(self):
        if self.alpha <= 1:
            raise ValueError("alpha must exceed 1 for summability")
        if self.pair_scale < 0 or self.zero_run_energy < 0:
            raise ValueError("base energies must be nonnegative")

    @property
    def m(self) -> int:
        return self.forbidden.m

    def to_json_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "pair_scale": self.pair_scale,
            "zero_run_energy": self.zero_run_energy,
            "phi": list(self.forbidden.phi.to_tuple()),
            "m": self.m,
            "perturbation": [{"pattern": p, "delta": d}
                             for p, d in sorted(self.perturbation.items())],
            "lambda": self.perturbation.lam,
        }

    @staticmethod
    def from_json_dict(js: dict) -> "HamiltonianSpec":
        phi = make_quad(*js["phi"])
        model = ForbiddenModel(phi, zero_run_m=js.get("m"))
        table = PatternTable({e["pattern"]: e["delta"]
                              for e in js.get("perturbation", [])},
                             js.get("lambda", 0.0))
        return HamiltonianSpec(js["alpha"], model, js.get("pair_scale", 1.0),
                               js.get("zero_run_energy", 1.0), table)


def perturb(H: HamiltonianSpec, table: PatternTable) -> HamiltonianSpec:
    """H + H_P; base terms unchanged, table validated by construction."""
    if H.perturbation.entries:
        merged = dict(H.perturbation.entries)
        for p, d in table.items():
            merged[p] = merged.get(p, 0.0) + d
        lam = H.perturbation.lam + table.lam
        table = PatternTable(merged, lam)
    return HamiltonianSpec(H.alpha, H.forbidden, H.pair_scale,
                           H.zero_run_energy, table)


# ---------------------------------------------------------------------------
# forbidden-pair weights (cached per phi)
# ---------------------------------------------------------------------------

_mask_cache: dict[tuple, np.ndarray] = {}
_weight_cache: dict[tuple, np.ndarray] = {}


def forbidden_mask(model: ForbiddenModel, T: int) -> np.ndarray:
    """uint8 forbidden-distance table for t = 0..T, grown and cached per phi."""
    key = model.phi.to_tuple()
    cached = _mask_cache.get(key)
    if cached is None or cached.shape[0] <= T:
        cached = forbidden_table(model, max(T, 1024))
        _mask_cache[key] = cached
    return cached[: T + 1]


def pair_weights(H: HamiltonianSpec, T: int) -> np.ndarray:
    """fw[t] = pair_scale * [t forbidden] / t^alpha for t = 0..T (fw[0] = 0).

    Cached per (phi, alpha, pair_scale); scans hit this thousands of times.
    """
    key = (H.forbidden.phi.to_tuple(), H.alpha, H.pair_scale)
    cached = _weight_cache.get(key)
    if cached is None or cached.shape[0] <= T:
        mask = forbidden_mask(H.forbidden, max(T, 1024))
        size = mask.shape[0]
        t = np.arange(size, dtype=np.float64)
        t[0] = 1.0
        fw = H.pair_scale * mask.astype(np.float64) / t**H.alpha
        fw[0] = 0.0
        fw.flags.writeable = False
        _weight_cache[key] = fw
        cached = fw
    return cached[: T + 1]


# ---------------------------------------------------------------------------
# window energy
# ---------------------------------------------------------------------------

def _coerce_word(w) -> FiniteWord:
    if isinstance(w, FiniteWord):
        return w
    return FiniteWord(w)


def window_energy(H: HamiltonianSpec, w, *, extended_precision: bool = False) -> float:
    """Joint energy of all patterns fully inside the finite word w.

    Pairs of 1s at forbidden distance t contribute pair_scale/t^alpha each;
    every left endpoint of an all-zero run of length m contributes
    zero_run_energy; perturbation patterns add their deltas per occurrence.
    """
    w = _coerce_word(w)
    bits = w.bits
    L = len(w)
    if L == 0:
        return 0.0
    acc_dtype = np.longdouble if extended_precision else np.float64
    counts = kernels.pair_spectrum(bits)
    fw = pair_weights(H, L - 1)
    energy = float((counts.astype(acc_dtype) * fw.astype(acc_dtype)).sum())
    energy += H.zero_run_energy * kernels.zero_run_occurrences(bits, H.m)
    for pat, delta in H.perturbation.items():
        energy += delta * kernels.pattern_count(bits, _as_bits(pat))
    return energy


def summability_bound(H: HamiltonianSpec) -> float:
    """Per-site bound M on the total |energy| of patterns covering one site.

    A site belongs to at most two ends of each pair distance (2*zeta(alpha)),
    to at most m zero-runs, and to at most |p| occurrences of each pattern.
    """
    M = 2.0 * H.pair_scale * zeta(H.alpha)
    M += H.zero_run_energy * H.m
    for pat, delta in H.perturbation.items():
        M += abs(delta) * len(pat)
    return M


# ---------------------------------------------------------------------------
# densities
# ---------------------------------------------------------------------------

@dataclass
class DensityEstimate:
    value: float
    window_sizes: list[int]
    per_window: list[float]
    is_exact: bool
    tail_bound: float
    tail_estimate: float = 0.0

    def csv_rows(self) -> list[tuple[int, float, float]]:
        rows = []
        for size, dens in zip(self.window_sizes, self.per_window):
            rows.append((size, dens * size, dens))
        return rows


_PERIODIC_T_CAP = 4 * 10**6


def density_periodic_exact(H: HamiltonianSpec, y: PeriodicWord,
                           tol: float = 1e-9) -> DensityEstimate:
    """Exact-to-tolerance energy density of a periodic word.

    The pair sum is folded over residues mod the period and truncated at a
    horizon T chosen from tol (integral tail bound); the discarded tail is
    additionally estimated from equidistribution of the forbidden arc and
    added to the value, keeping the certified bound sound.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    k = y.period
    bits = y.period_word.bits
    ones = np.flatnonzero(bits).astype(np.int64)
    k_ones = int(ones.shape[0])
    alpha = H.alpha

    pair_sum = 0.0
    tail_bound = 0.0
    tail_est = 0.0
    if k_ones and H.pair_scale:
        T_req = math.ceil((H.pair_scale * k_ones / ((alpha - 1) * tol * k))
                          ** (1.0 / (alpha - 1)))
        T = int(min(max(T_req, 2 * k, 1024), _PERIODIC_T_CAP))
        pc = np.zeros(k, dtype=np.int64)
        np.add.at(pc, (ones[None, :] - ones[:, None]).ravel() % k, 1)
        fw = pair_weights(H, T)
        pair_sum = kernels.residue_dot(fw, pc) / k
        tail_bound = H.pair_scale * k_ones * T ** (1 - alpha) / ((alpha - 1) * k)
        arc_len = 2.0 * float(H.forbidden.phi) - 1.0
        tail_est = (H.pair_scale * arc_len * k_ones**2 / k**2) * zeta_tail(alpha, T)

    m = H.m
    reps = -(-(k + m) // k) + 1
    tiled = np.tile(bits, reps)
    zero_pat = np.zeros(m, dtype=np.uint8)
    runs = int(kernels.match_indicator(tiled, zero_pat)[:k].sum())
    pert = 0.0
    for pat, delta in H.perturbation.items():
        p = _as_bits(pat)
        pert += delta * int(kernels.match_indicator(tiled, p)[:k].sum())

    value = pair_sum + tail_est + (H.zero_run_energy * runs + pert) / k
    return DensityEstimate(value=value, window_sizes=[k], per_window=[value],
                           is_exact=True, tail_bound=tail_bound,
                           tail_estimate=tail_est)


def density_estimate_stream(H: HamiltonianSpec, w: Word, stride_k: int,
                            m_max: int, *, horizon: int = 1000,
                            center: int = 0) -> DensityEstimate:
    """liminf proxy for the energy density over windows [-m*k, m*k], m <= m_max.

    Every new site interacts with previously seen 1s out to the truncation
    horizon; the declared tail bound covers the truncated pair tail plus a
    finite-window normalisation allowance.
    """
    if stride_k < 1 or m_max < 1:
        raise ValueError("stride_k and m_max must be >= 1")
    k = stride_k
    lo = center - m_max * k
    hi = center + m_max * k
    win = w.window(lo, hi)
    bits = win.bits
    T = min(horizon, 2 * m_max * k)
    fw = pair_weights(H, T)
    pair = kernels.window_pair_energies(bits, center - lo, k, m_max, fw)

    m = H.m
    zero_pat = np.zeros(m, dtype=np.uint8)
    run_ind = kernels.match_indicator(bits, zero_pat)
    run_cum = np.concatenate(([0], np.cumsum(run_ind, dtype=np.int64)))
    pert_cums = []
    for pat, delta in H.perturbation.items():
        ind = kernels.match_indicator(bits, _as_bits(pat))
        pert_cums.append((len(pat), delta,
                          np.concatenate(([0], np.cumsum(ind, dtype=np.int64)))))

    sizes, dens = [], []
    for mm in range(1, m_max + 1):
        a = center - mm * k - lo
        b = center + mm * k - lo
        size = 2 * mm * k + 1
        e = pair[mm - 1]
        e += H.zero_run_energy * _occ_inside(run_cum, a, b, m)
        for lp, delta, cum in pert_cums:
            e += delta * _occ_inside(cum, a, b, lp)
        sizes.append(size)
        dens.append(e / size)

    tail_idx = max(0, m_max // 2 - 1)
    value = min(dens[tail_idx:])
    xi = float(bits.mean())
    trunc_tail = H.pair_scale * xi * zeta_tail(H.alpha, T)
    t = np.arange(T + 1, dtype=np.float64)
    edge = xi * float((fw * (t + 2 * k)).sum()) / sizes[-1]
    return DensityEstimate(value=value, window_sizes=sizes, per_window=dens,
                           is_exact=False, tail_bound=trunc_tail + edge)


def _occ_inside(cum: np.ndarray, a: int, b: int, pat_len: int) -> int:
    """Occurrences with left endpoint in [a, b - pat_len + 1] from a cumsum."""
    last = b - pat_len + 1
    if last < a:
        return 0
    hi = min(last + 1, cum.shape[0] - 1)
    return int(cum[hi] - cum[min(a, cum.shape[0] - 1)])
