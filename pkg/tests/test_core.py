import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsphyb.core import (
    Budget,
    BudgetExhausted,
    RngStream,
    closed_length,
    error_percent,
    error_percent_2dp,
    make_tour,
    tour_length,
)
from tsphyb.tsplib import instance_from_coords, read_tour_file

from conftest import DATA


def test_berlin52_optimal_tour_length(berlin52):
    tour = read_tour_file(DATA / "berlin52.opt.tour")
    budget = Budget(limit=1)
    assert tour_length(tour, berlin52, budget) == 7542
    assert budget.used == 1


def test_three_city_orientation_independent():
    inst = instance_from_coords("tri", [(0, 0), (3, 0), (0, 4)])
    budget = Budget(limit=10)
    forward = tour_length(np.array([0, 1, 2]), inst, budget)
    backward = tour_length(np.array([2, 1, 0]), inst, budget)
    assert forward == backward == 3 + 5 + 4


def test_length_against_bruteforce_sum(rand_instance):
    inst = rand_instance(8, seed=5)
    rng = np.random.default_rng(2)
    for _ in range(10):
        perm = rng.permutation(8)
        expect = sum(
            inst.dist[perm[i], perm[(i + 1) % 8]] for i in range(8)
        )
        assert tour_length(perm, inst, None) == expect


def test_rotation_and_reversal_invariance(rand_instance):
    inst = rand_instance(9, seed=8)
    base = np.random.default_rng(0).permutation(9)
    ref = closed_length(base, inst.dist)
    for shift in range(9):
        rot = np.roll(base, shift)
        assert closed_length(rot, inst.dist) == ref
        assert closed_length(rot[::-1].copy(), inst.dist) == ref


def test_non_permutation_is_loud(rand_instance):
    inst = rand_instance(5, seed=1)
    with pytest.raises(ValueError):
        tour_length(np.array([0, 1, 2, 3, 3]), inst, Budget(limit=5))
    with pytest.raises(ValueError):
        make_tour(np.array([0, 1, 2]), inst)


def test_budget_charges_and_exhausts(rand_instance):
    inst = rand_instance(5, seed=1)
    budget = Budget(limit=2)
    perm = np.arange(5)
    tour_length(perm, inst, budget)
    tour_length(perm, inst, budget)
    assert budget.used == budget.limit == 2
    with pytest.raises(BudgetExhausted):
        tour_length(perm, inst, budget)
    assert budget.used == 2  # denied call consumed nothing


@pytest.mark.parametrize(
    "best,ref,expect",
    [(432, 426, "1.41"), (7542, 7542, "0.00"), (32648, 29437, "10.91")],
)
def test_error_examples(best, ref, expect):
    assert error_percent_2dp(best, ref) == expect
    assert abs(error_percent(best, ref) - float(expect)) < 5e-3


def test_error_rounds_half_up():
    # 1/800 = 0.125%; half-up gives 0.13
    assert error_percent_2dp(801, 800) == "0.13"
    assert error_percent_2dp(799, 800) == "-0.13"


def test_error_rejects_nonpositive_ref():
    with pytest.raises(ValueError):
        error_percent(10, 0)
    with pytest.raises(ValueError):
        error_percent_2dp(10, -4)


@given(st.integers(1, 10**7))
@settings(max_examples=50, deadline=None)
def test_error_zero_at_ref(x):
    assert error_percent(x, x) == 0.0
    assert error_percent_2dp(x, x) == "0.00"


@given(st.integers(1, 10**6), st.integers(0, 10**5), st.integers(1, 10**5))
@settings(max_examples=50, deadline=None)
def test_error_monotone_in_best(ref, base, step):
    lo = ref + base
    hi = lo + step
    assert error_percent(hi, ref) >= error_percent(lo, ref)


def test_rng_reproducible():
    a, b = RngStream(123), RngStream(123)
    assert [a.u01() for _ in range(5)] == [b.u01() for _ in range(5)]
    assert np.array_equal(a.normal(16), b.normal(16))
    assert np.array_equal(a.integers(50, size=20), b.integers(50, size=20))
    c = RngStream(124)
    assert not np.array_equal(RngStream(123).normal(8), c.normal(8))


def test_rng_uniform_bounds():
    r = RngStream(7)
    draws = r.uniform(1.0, 52.0, 1000)
    assert draws.min() >= 1.0 and draws.max() < 52.0
