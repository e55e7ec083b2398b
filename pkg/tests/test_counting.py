"""Arrangement-counting checks against independently derived values.

Every frozen constant below is computed by a different route than the
library uses: digit-by-digit log sums, exact integer binomials through
math.comb, and rational arithmetic through fractions.Fraction.
"""

import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from gibbslab.counting import (CountingModel, FactorialMethod, MixingFactor,
                               OccupancyStatistics, count_occupancies, entropy,
                               log_factorial, mixing_permutation_factor,
                               reversible_mixing_delta_s,
                               statistics_reduction_ratio,
                               volume_doubling_delta)
from gibbslab.errors import ConfigurationError

EXACT = FactorialMethod.EXACT
SIMPLE = FactorialMethod.STIRLING_SIMPLE
CORRECTED = FactorialMethod.STIRLING_CORRECTED

# sum(ln k, k=2..10) accumulated in extended precision
LN_FACT_10 = 15.104412573075518
# 10 ln 10 - 10
STIRLING_SIMPLE_10 = 13.025850929940457
# 10 ln 10 - 10 + 0.5 ln(20 pi)
STIRLING_CORRECTED_10 = 15.096082009642156
LN_2 = 0.6931471805599453


def test_log_factorial_small_table():
    table = {0: 0.0, 1: 0.0, 2: LN_2, 5: math.log(120), 10: LN_FACT_10}
    for n, expected in table.items():
        assert log_factorial(n, EXACT) == pytest.approx(expected, abs=1e-12)


def test_log_factorial_methods_at_ten():
    assert log_factorial(10, SIMPLE) == pytest.approx(STIRLING_SIMPLE_10, abs=1e-12)
    assert log_factorial(10, CORRECTED) == pytest.approx(STIRLING_CORRECTED_10, abs=1e-12)


@given(st.integers(min_value=0, max_value=300))
def test_log_factorial_matches_integer_product(n):
    exact = math.log(math.factorial(n)) if n > 1 else 0.0
    assert log_factorial(n, EXACT) == pytest.approx(exact, abs=1e-10, rel=1e-12)


@given(st.integers(min_value=1, max_value=500))
def test_stirling_corrected_shortfall_bracket(n):
    """The corrected form undershoots ln n! by between 1/(12n+1) and 1/(12n)."""
    gap = log_factorial(n, EXACT) - log_factorial(n, CORRECTED)
    assert 1.0 / (12 * n + 1) < gap < 1.0 / (12 * n)


@given(st.integers(min_value=2, max_value=400))
def test_method_ordering(n):
    assert log_factorial(n, SIMPLE) < log_factorial(n, CORRECTED) < log_factorial(n, EXACT)


def test_entropy_corrected_subtracts_permutations():
    plain = entropy(CountingModel(7.5, 20, corrected=False))
    fixed = entropy(CountingModel(7.5, 20, corrected=True))
    assert plain.value == pytest.approx(20 * math.log(7.5), rel=1e-14)
    assert plain.value - fixed.value == pytest.approx(log_factorial(20), rel=1e-14)
    assert fixed.exactness is EXACT
    assert entropy(CountingModel(2.0, 3, True), SIMPLE).exactness is SIMPLE


def test_volume_doubling_fixed_n_is_n_ln2():
    for corrected in (False, True):
        delta = volume_doubling_delta(1000, double_n_too=False, corrected=corrected)
        assert delta == pytest.approx(1000 * LN_2, rel=1e-12)
    # the per-particle state count cancels out of the difference
    a = volume_doubling_delta(64, False, True, per_particle_states=0.5)
    b = volume_doubling_delta(64, False, True, per_particle_states=30.0)
    assert a == pytest.approx(b, rel=1e-12)


@pytest.mark.parametrize("n,states", [(10, 1.0), (137, 3.0), (1000, 0.25)])
def test_doubling_with_merge_squares_the_stirling_count(n, states):
    """X -> 2X with N -> 2N doubles the simple-Stirling entropy exactly."""
    before = entropy(CountingModel(states, n, corrected=True), SIMPLE).value
    delta = volume_doubling_delta(n, double_n_too=True, corrected=True,
                                  method=SIMPLE, per_particle_states=states)
    assert delta == pytest.approx(before, rel=1e-12, abs=1e-12)


def test_doubling_with_merge_exact_leaves_subleading_excess():
    # with exact factorials the merge overshoots the doubling by the
    # 0.5 ln(pi N) tail of the binomial, up to a 1/(8N) correction
    n = 1000
    before = entropy(CountingModel(1.0, n, corrected=True)).value
    delta = volume_doubling_delta(n, double_n_too=True, corrected=True)
    excess = delta - before
    assert excess == pytest.approx(0.5 * math.log(math.pi * n), abs=1.0 / n)


@given(st.integers(min_value=1, max_value=120))
def test_mixing_factor_matches_binomial(n):
    factor = mixing_permutation_factor(n)
    binomial = math.comb(2 * n, n)
    assert factor.m == binomial
    assert factor.log_m == pytest.approx(math.log(binomial), abs=1e-10)
    assert factor.delta_s == factor.log_m


def test_mixing_factor_integer_cutoff():
    assert isinstance(mixing_permutation_factor(4000).m, int)
    big = mixing_permutation_factor(4001)
    assert big.m is None
    assert math.isfinite(big.log_m)


def test_mixing_factor_ratio_climbs_toward_one():
    ratios = []
    for n in (1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000):
        f = mixing_permutation_factor(n)
        ratios.append(f.log_m / (2 * n * LN_2))
    assert all(r < 1.0 for r in ratios)
    assert all(a < b for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] > 0.997


def test_occupancy_small_oracles():
    assert count_occupancies(4, 2, OccupancyStatistics.MB) == pytest.approx(math.log(16), abs=1e-14)
    assert count_occupancies(4, 2, OccupancyStatistics.MB_CORRECTED) == pytest.approx(math.log(8), abs=1e-14)
    assert count_occupancies(4, 2, OccupancyStatistics.BE) == pytest.approx(math.log(10), abs=1e-14)
    assert count_occupancies(4, 2, OccupancyStatistics.FD) == pytest.approx(math.log(6), abs=1e-14)


def test_occupancy_matches_brute_enumeration():
    """Counts agree with explicitly listed placements for every small case."""
    for m in range(1, 7):
        for n in range(0, 5):
            modes = range(m)
            be = len(list(itertools.combinations_with_replacement(modes, n)))
            assert count_occupancies(m, n, OccupancyStatistics.BE) == pytest.approx(
                math.log(be), abs=1e-12)
            assert count_occupancies(m, n, OccupancyStatistics.MB) == pytest.approx(
                n * math.log(m), abs=1e-12)
            if n <= m:
                fd = len(list(itertools.combinations(modes, n)))
                assert count_occupancies(m, n, OccupancyStatistics.FD) == pytest.approx(
                    math.log(fd), abs=1e-12)


def test_antisymmetric_count_needs_room():
    with pytest.raises(ConfigurationError):
        count_occupancies(3, 4, OccupancyStatistics.FD)
    with pytest.raises(ConfigurationError):
        statistics_reduction_ratio(3, 4, OccupancyStatistics.FD)


@given(st.integers(min_value=1, max_value=40), st.integers(min_value=1, max_value=40))
def test_occupancy_count_ordering(m, n):
    if n > m:
        n, m = m, n
    fd = count_occupancies(m, n, OccupancyStatistics.FD)
    mbc = count_occupancies(m, n, OccupancyStatistics.MB_CORRECTED)
    be = count_occupancies(m, n, OccupancyStatistics.BE)
    assert fd <= mbc + 1e-12
    assert mbc <= be + 1e-12


def test_reduction_ratio_exact_at_a_million_modes():
    be = statistics_reduction_ratio(10 ** 6, 2, OccupancyStatistics.BE)
    fd = statistics_reduction_ratio(10 ** 6, 2, OccupancyStatistics.FD)
    assert be == float(Fraction(1000001, 1000000))
    assert fd == float(Fraction(999999, 1000000))
    assert be == pytest.approx(1.000001, rel=1e-12)
    assert fd == pytest.approx(0.999999, rel=1e-12)
    assert statistics_reduction_ratio(50, 3, OccupancyStatistics.MB) == 1.0
    assert statistics_reduction_ratio(50, 3, OccupancyStatistics.MB_CORRECTED) == 1.0


@given(st.integers(min_value=100, max_value=10 ** 6), st.integers(min_value=2, max_value=4))
def test_reduction_ratio_dilute_limit(m, n):
    be = statistics_reduction_ratio(m, n, OccupancyStatistics.BE)
    fd = statistics_reduction_ratio(m, n, OccupancyStatistics.FD)
    assert be > 1.0
    assert fd < 1.0
    assert abs(be - 1.0) <= n * n / m
    assert abs(fd - 1.0) <= n * n / m


def test_reversible_mixing_delta_s_values():
    for n in (1, 10, 1000):
        assert reversible_mixing_delta_s(n, True) == pytest.approx(2 * n * LN_2, rel=1e-12)
        assert reversible_mixing_delta_s(n, False) == 0.0


def test_counting_input_guards():
    with pytest.raises(ConfigurationError):
        log_factorial(-1)
    with pytest.raises(ConfigurationError):
        mixing_permutation_factor(0)
    with pytest.raises(ConfigurationError):
        count_occupancies(0, 2, OccupancyStatistics.MB)
    with pytest.raises(ConfigurationError):
        count_occupancies(3, -1, OccupancyStatistics.BE)
    with pytest.raises(ConfigurationError):
        CountingModel(0.0, 5, corrected=True)
    with pytest.raises(ConfigurationError):
        CountingModel(2.0, -5, corrected=True)
    with pytest.raises(ConfigurationError):
        volume_doubling_delta(0, False, True)
