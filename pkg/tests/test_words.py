from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sturmlab.quadirr import QuadIrrError, make_quad
from sturmlab.words import (
    LEFT_CLOSED,
    RIGHT_CLOSED,
    FiniteWord,
    PeriodicWord,
    SturmianWord,
    factor_complexity,
    fluctuation_stats,
    frequency_estimate,
    is_sturmian_window,
    pattern_count,
    periodic_sturmian,
    symbol_at,
    window,
    word_from_string,
)

from _oracles import float_sturmian_bits, mp_value, naive_pattern_count

PHI = make_quad(3, -1, 1, 5)
X = SturmianWord(PHI)          # x0 = 0, left-closed


# ---------------------------------------------------------------------------
# symbol_at
# ---------------------------------------------------------------------------

def test_symbol_examples():
    assert symbol_at(X, 0) == 0          # {0} = 0 in [0, phi)
    assert symbol_at(X, 1) == 1          # {phi} = phi, boundary excluded
    first10 = "".join(str(symbol_at(X, n)) for n in range(10))
    assert first10 == "0100010001"


def test_convention_boundary():
    xr = SturmianWord(PHI, convention=RIGHT_CLOSED)
    # n=0: {0} = 0 not in (0, phi]  -> symbol 1
    assert symbol_at(xr, 0) == 1
    # n=1: {phi} = phi in (0, phi]  -> symbol 0
    assert symbol_at(xr, 1) == 0


def test_symbols_match_50_digit_oracle_safely_off_boundary():
    phi_f = mp_value(3, -1, 1, 5)
    oracle = float_sturmian_bits(phi_f, mpmath.mpf(0), 2, 600)
    mine = [symbol_at(X, n) for n in range(2, 600)]
    assert mine == oracle


def test_window_equals_symbolwise():
    w = window(X, -25, 40)
    assert w.origin == -25 and len(w) == 66
    for n in range(-25, 41):
        assert w.symbol_at(n) == symbol_at(X, n)


def test_window_single_symbol():
    w = window(X, 5, 5)
    assert len(w) == 1 and w.symbol_at(5) == symbol_at(X, 5)


def test_rejects_rational_phi():
    with pytest.raises(QuadIrrError):
        SturmianWord(make_quad(1, 0, 2, 5))


# ---------------------------------------------------------------------------
# pattern_count
# ---------------------------------------------------------------------------

def test_pattern_count_examples():
    w = word_from_string("0100010001")
    assert pattern_count(w, word_from_string("1")) == 3
    assert pattern_count(word_from_string("0001000"), word_from_string("00")) == 4
    assert pattern_count(w, word_from_string("0" * 20)) == 0


@settings(max_examples=150, deadline=None)
@given(word=st.text(alphabet="01", min_size=0, max_size=64),
       pat=st.text(alphabet="01", min_size=1, max_size=6))
def test_pattern_count_matches_naive(word, pat):
    got = pattern_count(word_from_string(word), word_from_string(pat))
    assert got == naive_pattern_count(word, pat)


# ---------------------------------------------------------------------------
# factor complexity and balance
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("L,N,expected", [(1, 10**4, 2), (4, 10**4, 5), (10, 10**5, 11)])
def test_factor_complexity_is_L_plus_1(L, N, expected):
    assert factor_complexity(X, L, N) == expected


def test_factor_complexity_sweep():
    for L in range(1, 21):
        assert factor_complexity(X, L, 10**5) == L + 1


def test_balance_property():
    bits = window(X, 0, 10**5).bits
    for L in (3, 7, 20):
        sums = np.convolve(bits, np.ones(L, dtype=np.int64), mode="valid")
        assert sums.max() - sums.min() <= 1


# ---------------------------------------------------------------------------
# frequencies
# ---------------------------------------------------------------------------

def test_frequency_of_ones_converges_to_1_minus_phi():
    freq = frequency_estimate(X, word_from_string("1"), 10**6)
    assert abs(float(freq) - (1 - float(PHI))) < 1e-5


def test_frequency_of_zeros():
    freq = frequency_estimate(X, word_from_string("0"), 10**6)
    assert abs(float(freq) - float(PHI)) < 1e-5


def test_adjacent_ones_never_occur():
    assert frequency_estimate(X, word_from_string("11"), 10**6) == 0


# ---------------------------------------------------------------------------
# periodic words
# ---------------------------------------------------------------------------

def test_periodic_sturmian_period_five():
    y = periodic_sturmian(PHI, 5)
    assert y.period_word.to01() == "01000"
    assert y.is_periodically_sturmian
    # tiling reproduces the Sturmian window on [0, 5)
    for n in range(5):
        assert y.symbol_at(n) == symbol_at(X, n)
    assert y.symbol_at(5) == y.symbol_at(0)


def test_periodic_sturmian_k1():
    y = periodic_sturmian(PHI, 1)
    assert y.period_word.to01() == str(symbol_at(X, 0))


def test_periodic_word_phase():
    y = periodic_sturmian(PHI, 7, phase=3)
    for n in range(3, 10):
        assert y.symbol_at(n) == symbol_at(X, n)


def test_periodic_window_tiles():
    y = PeriodicWord(word_from_string("011"))
    w = y.window(-4, 7)
    assert w.to01() == "".join(str(y.symbol_at(n)) for n in range(-4, 8))
    assert w.to01() == "101101101101"


def test_is_sturmian_window():
    assert is_sturmian_window(PHI, window(X, 12, 60).bits)
    assert not is_sturmian_window(PHI, word_from_string("11").bits)
    assert not is_sturmian_window(PHI, word_from_string("00000").bits)  # run of 5


# ---------------------------------------------------------------------------
# fluctuation statistics
# ---------------------------------------------------------------------------

def test_fluctuation_deviation_zero_against_self_aligned_tiling():
    k = 30
    y = periodic_sturmian(PHI, k)
    stats = fluctuation_stats(X, y, word_from_string("1"), k, range(0, 1))
    # segment [0, k] of the tiling equals the Sturmian segment except at the
    # wrap position n=k, so counts may differ by at most 1
    assert stats.max_deviation <= 1


def test_fluctuation_bounded_for_periodic_sturmian():
    k = 21
    y = periodic_sturmian(PHI, k)
    for p in ("1", "00", "010"):
        stats = fluctuation_stats(X, y, word_from_string(p), k, range(0, 120))
        assert stats.max_deviation <= 3
        assert stats.c_bound == 2 * (stats.max_deviation + 2 * len(p))
        assert len(stats.per_segment_deviation) == 120


def test_fluctuation_grows_for_random_word():
    rng = np.random.default_rng(7)
    k = 21
    noise = PeriodicWord(FiniteWord(rng.integers(0, 2, size=k, dtype=np.int64)))
    y = periodic_sturmian(PHI, k)
    stats_noise = fluctuation_stats(X, noise, word_from_string("1"), k, range(0, 200))
    stats_ps = fluctuation_stats(X, y, word_from_string("1"), k, range(0, 200))
    assert stats_noise.max_deviation > stats_ps.max_deviation


def test_convention_sensitivity_only_at_orbit_hits():
    # for x0 = 0 the orbit hits the interval endpoints exactly twice: {0} at
    # n = 0 and {phi} at n = 1; irrationality forbids any later boundary hit
    xl = SturmianWord(PHI, convention=LEFT_CLOSED)
    xr = SturmianWord(PHI, convention=RIGHT_CLOSED)
    bl = window(xl, 0, 20000).bits
    br = window(xr, 0, 20000).bits
    diff = np.flatnonzero(bl != br)
    assert diff.tolist() == [0, 1]


def test_periodic_word_json_round_trip():
    y = PeriodicWord(word_from_string("01101"), phase=3)
    js = y.to_json_dict()
    assert js == {"period": "01101", "phase": 3}
    back = PeriodicWord.from_json_dict(js)
    for n in range(-7, 12):
        assert back.symbol_at(n) == y.symbol_at(n)
