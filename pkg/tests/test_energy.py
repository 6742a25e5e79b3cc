import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sturmlab.energy import (
    DensityEstimate,
    HamiltonianSpec,
    PatternTable,
    density_estimate_stream,
    density_periodic_exact,
    forbidden_mask,
    pair_weights,
    perturb,
    summability_bound,
    window_energy,
    zeta,
    zeta_tail,
)
from sturmlab.forbidden import ForbiddenModel
from sturmlab.quadirr import make_quad
from sturmlab.words import (
    FiniteWord,
    PeriodicWord,
    SturmianWord,
    periodic_sturmian,
    word_from_string,
)

from _oracles import naive_pair_energy, naive_pattern_count, naive_zero_run_occurrences

PHI = make_quad(3, -1, 1, 5)
MODEL = ForbiddenModel(PHI, zero_run_m=5)


def H(alpha, **kw):
    return HamiltonianSpec(alpha, MODEL, **kw)


def naive_window_energy(hspec, word: str) -> float:
    bits = [int(c) for c in word]
    mask = forbidden_mask(hspec.forbidden, max(len(word), 2))
    e = naive_pair_energy(bits, mask.astype(bool), hspec.alpha, hspec.pair_scale)
    e += hspec.zero_run_energy * naive_zero_run_occurrences(bits, hspec.m)
    for pat, delta in hspec.perturbation.items():
        e += delta * naive_pattern_count(word, pat)
    return e


# ---------------------------------------------------------------------------
# zeta
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("alpha", [1.2, 1.5, 2.0, 2.5, 3.0, 3.5])
def test_zeta_matches_mpmath(alpha):
    assert zeta(alpha) == pytest.approx(float(mpmath.zeta(alpha)), abs=1e-12)


def test_zeta_2_closed_form():
    assert zeta(2.0) == pytest.approx(math.pi**2 / 6, abs=1e-12)


@pytest.mark.parametrize("alpha,T", [(1.2, 100), (1.5, 1000), (2.5, 37)])
def test_zeta_tail_matches_mpmath(alpha, T):
    expect = float(mpmath.zeta(alpha) - mpmath.nsum(lambda n: n**-alpha, [1, T]))
    assert zeta_tail(alpha, T) == pytest.approx(expect, rel=1e-10)


# ---------------------------------------------------------------------------
# window energy
# ---------------------------------------------------------------------------

def test_sturmian_window_energy_is_exactly_zero():
    w = SturmianWord(PHI).window(0, 30000)
    for alpha in (1.2, 1.5, 2.0, 3.0):
        assert window_energy(H(alpha), w) == 0.0


def test_pair_at_distance_six():
    # 1s at distance 6 (a forbidden distance) contribute 1/6^1.5; the enclosed
    # run of five 0s adds exactly one zero-run occurrence on top
    w = word_from_string("1000001")
    assert window_energy(H(1.5, zero_run_energy=0.0), w) == pytest.approx(6**-1.5)
    assert window_energy(H(1.5), w) == pytest.approx(1.0 + 6**-1.5)
    assert 6**-1.5 == pytest.approx(0.06804, abs=5e-6)


def test_zero_run_energy_on_all_zero_word():
    assert window_energy(H(1.5), word_from_string("00000")) == 1.0
    assert window_energy(H(1.5), word_from_string("0000")) == 0.0


@settings(max_examples=120, deadline=None)
@given(word=st.text(alphabet="01", min_size=0, max_size=90),
       alpha=st.sampled_from([1.2, 1.5, 2.5]))
def test_window_energy_matches_naive(word, alpha):
    got = window_energy(H(alpha), word_from_string(word)) if word else 0.0
    assert got == pytest.approx(naive_window_energy(H(alpha), word), abs=1e-12)


def test_window_energy_monotone_in_added_pair():
    base = "010000100"
    more = "010010100"   # extra 1 can only add forbidden pairs
    assert window_energy(H(1.4), word_from_string(more)) >= window_energy(
        H(1.4), word_from_string(base))


def test_extended_precision_agrees():
    w = periodic_sturmian(PHI, 37).window(0, 4000)
    a = window_energy(H(1.2), w)
    b = window_energy(H(1.2), w, extended_precision=True)
    assert a == pytest.approx(b, rel=1e-12)


# ---------------------------------------------------------------------------
# perturbation algebra
# ---------------------------------------------------------------------------

def test_pattern_table_rejects_large_delta():
    with pytest.raises(ValueError):
        PatternTable({"1": 0.1}, 0.1)
    with pytest.raises(ValueError):
        PatternTable({"": 0.0}, 0.1)


def test_perturb_linearity():
    table = PatternTable({"01": 0.003, "111": -0.002}, 0.01)
    hp = perturb(H(1.5), table)
    w = word_from_string("0110111010011")
    base = window_energy(H(1.5), w)
    expected = base + 0.003 * naive_pattern_count(w.to01(), "01") \
        - 0.002 * naive_pattern_count(w.to01(), "111")
    assert window_energy(hp, w) == pytest.approx(expected, abs=1e-14)


def test_empty_table_is_identity():
    hp = perturb(H(1.5), PatternTable({}, 0.0))
    w = word_from_string("0100101")
    assert window_energy(hp, w) == window_energy(H(1.5), w)


def test_perturbation_of_ones_shifts_density_linearly():
    # delta("1") = -lam/2 lowers density by (lam/2) * ones frequency, exactly
    lam = 1e-3
    hp = perturb(H(1.5), PatternTable({"1": -lam / 2}, lam))
    y = PeriodicWord(word_from_string("0110100101"))
    base = density_periodic_exact(H(1.5), y, tol=1e-8)
    pert = density_periodic_exact(hp, y, tol=1e-8)
    shift = (lam / 2) * float(y.ones_frequency())
    assert pert.value == pytest.approx(base.value - shift, abs=1e-12)


def test_perturbation_no_op_without_pattern():
    hp = perturb(H(1.5), PatternTable({"111": 0.005}, 0.01))
    w = SturmianWord(PHI).window(0, 500)   # Sturmian words never contain 111
    assert window_energy(hp, w) == window_energy(H(1.5), w)


# ---------------------------------------------------------------------------
# summability bound
# ---------------------------------------------------------------------------

def test_summability_bound_alpha_2():
    # 2*zeta(2) + m = pi^2/3 + 5
    assert summability_bound(H(2.0)) == pytest.approx(math.pi**2 / 3 + 5, abs=1e-9)


def test_summability_large_alpha_pair_term_limit():
    got = summability_bound(H(40.0)) - 5.0
    assert got == pytest.approx(2.0, abs=1e-9)


def test_summability_additivity_of_patterns():
    base = summability_bound(H(2.0))
    hp = perturb(H(2.0), PatternTable({"010": 0.01}, 0.02))
    assert summability_bound(hp) == pytest.approx(base + 0.03, abs=1e-12)


def test_alpha_at_most_one_rejected():
    with pytest.raises(ValueError):
        HamiltonianSpec(1.0, MODEL)
    with pytest.raises(ValueError):
        zeta(0.99)


# ---------------------------------------------------------------------------
# periodic density
# ---------------------------------------------------------------------------

def test_all_zero_period_density_is_zero_run_energy():
    y = PeriodicWord(word_from_string("0"))
    est = density_periodic_exact(H(1.5), y)
    assert est.value == 1.0
    assert est.is_exact


def test_periodic_density_matches_big_window_energy():
    # density * L matches a large window's energy once tails are thin (alpha
    # comfortably above 2 keeps truncation and edge bias below the tolerance)
    y = PeriodicWord(word_from_string("10"))
    for alpha in (2.0, 2.8):
        est = density_periodic_exact(H(alpha), y, tol=1e-10)
        L = 60001
        w = y.window(-(L // 2), L // 2)
        direct = window_energy(H(alpha), w) / L
        assert est.value == pytest.approx(direct, rel=2e-3)


def test_periodic_density_period_10_positive():
    y = PeriodicWord(word_from_string("10"))
    est = density_periodic_exact(H(1.5), y, tol=1e-8)
    # distances 2 and 6 are forbidden; per-site at least (2^-1.5 + 6^-1.5)/2
    assert est.value >= (2**-1.5 + 6**-1.5) / 2
    assert est.value <= 0.5 * float(mpmath.zeta(1.5))


def test_periodic_sturmian_density_decreases_with_k():
    dens = [density_periodic_exact(H(1.5), periodic_sturmian(PHI, k), tol=1e-6).value
            for k in (5, 50, 500)]
    assert dens[0] > dens[1] > dens[2] > 0


def test_tail_bound_soundness_under_larger_horizon():
    import sturmlab.energy as energy_mod

    y = periodic_sturmian(PHI, 9)
    est_loose = density_periodic_exact(H(1.5), y, tol=1e-4)
    est_tight = density_periodic_exact(H(1.5), y, tol=1e-9)
    assert abs(est_loose.value - est_tight.value) <= est_loose.tail_bound + 1e-12


# ---------------------------------------------------------------------------
# streaming density
# ---------------------------------------------------------------------------

def test_stream_zero_for_sturmian():
    est = density_estimate_stream(H(1.5), SturmianWord(PHI), 7, 40)
    assert est.value == 0.0
    assert all(v == 0.0 for v in est.per_window)


def test_stream_vs_periodic_exact_on_random_words():
    rng = np.random.default_rng(42)
    for alpha in (1.2, 1.5, 2.5):
        for _ in range(6):
            k = int(rng.integers(2, 12))
            bits = rng.integers(0, 2, size=k)
            if not bits.any():
                bits[0] = 1
            y = PeriodicWord(FiniteWord(bits))
            exact = density_periodic_exact(H(alpha), y, tol=1e-9)
            stream = density_estimate_stream(H(alpha), y, k, 4000 // k,
                                             horizon=2000)
            assert abs(stream.value - exact.value) <= (
                1e-6 + stream.tail_bound + exact.tail_bound)


def test_stream_stride_invariance():
    y = PeriodicWord(word_from_string("0110100"))
    est1 = density_estimate_stream(H(1.5), y, 1, 20000, horizon=500)
    est7 = density_estimate_stream(H(1.5), y, 7, 20000 // 7, horizon=500)
    assert abs(est1.value - est7.value) <= 1e-6 + est1.tail_bound + est7.tail_bound


def test_csv_rows_shape():
    est = density_estimate_stream(H(1.5), PeriodicWord(word_from_string("10")), 2, 10)
    rows = est.csv_rows()
    assert len(rows) == 10
    size, energy, dens = rows[-1]
    assert energy == pytest.approx(dens * size)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def test_hamiltonian_json_round_trip():
    table = PatternTable({"01": 0.002, "1": -0.001}, 0.01)
    h = HamiltonianSpec(1.4, MODEL, pair_scale=2.0, zero_run_energy=0.5,
                        perturbation=table)
    js = h.to_json_dict()
    assert js["phi"] == [3, -1, 1, 5]
    assert js["m"] == 5
    back = HamiltonianSpec.from_json_dict(js)
    assert back.alpha == h.alpha
    assert back.pair_scale == h.pair_scale
    assert back.zero_run_energy == h.zero_run_energy
    assert dict(back.perturbation.items()) == dict(h.perturbation.items())
    w = word_from_string("0110100101")
    assert window_energy(back, w) == window_energy(h, w)


def test_stride_set_equivalence_on_fixed_word():
    # named sampling strides all agree with the stride-1 estimate
    y = PeriodicWord(word_from_string("0100101101"))
    H15 = H(1.5)
    base = density_estimate_stream(H15, y, 1, 20000, horizon=400)
    for k in (2, 3, 5, 7, 11):
        est = density_estimate_stream(H15, y, k, 20000 // k, horizon=400)
        assert abs(est.value - base.value) <= 1e-6 + est.tail_bound + base.tail_bound
