import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsphyb.core import RngStream
from tsphyb.repair import dedupe, repair_tour


def test_identity_on_permutation():
    out = repair_tour(np.array([0, 1, 2, 3, 4]), RngStream(0))
    assert out.tolist() == [0, 1, 2, 3, 4]


def test_single_forced_completion():
    out = repair_tour(np.array([0, 0, 2]), RngStream(0))
    assert out.tolist() == [0, 1, 2]


def test_first_occurrence_keeps_position():
    decoded = np.array([4, 2, 4, 2, 0, 4])
    slots, buf = dedupe(decoded)
    assert slots.tolist() == [4, 2, -1, -1, 0, -1]
    assert buf.missing.tolist() == [1, 3, 5]
    assert buf.vacancy_slots.tolist() == [2, 3, 5]


def test_out_of_range_rejected():
    with pytest.raises(ValueError):
        repair_tour(np.array([0, 1, 7]), RngStream(0))
    with pytest.raises(ValueError):
        repair_tour(np.array([0, -1, 2]), RngStream(0))


def test_idempotent_on_feasible():
    rng = RngStream(3)
    first = repair_tour(np.array([5, 5, 5, 5, 5, 5]), rng)
    again = repair_tour(first, rng)
    assert np.array_equal(first, again)


def test_all_same_vacancies_fill_uniformly():
    # n=6, every entry 5: position 0 keeps 5; missing {0..4} scatter
    counts = np.zeros((6, 6), dtype=int)
    trials = 10000
    for seed in range(trials):
        out = repair_tour(np.array([5] * 6), RngStream(seed))
        assert out[0] == 5
        for pos in range(1, 6):
            counts[pos, out[pos]] += 1
    # chi-square against uniform 1/5 per (slot, city) cell
    expected = trials / 5.0
    chi2 = 0.0
    for pos in range(1, 6):
        for city in range(5):
            chi2 += (counts[pos, city] - expected) ** 2 / expected
    # 5 slots x 4 dof = 20 dof; 99.9% quantile ~ 45.3
    assert chi2 < 45.3, f"repair fill looks non-uniform (chi2={chi2:.1f})"


@given(
    st.lists(st.integers(0, 9), min_size=10, max_size=10),
    st.integers(0, 2**32),
)
@settings(max_examples=200, deadline=None)
def test_always_a_permutation_with_first_occurrences_fixed(values, seed):
    decoded = np.array(values, dtype=np.int64)
    out = repair_tour(decoded, RngStream(seed))
    assert sorted(out.tolist()) == list(range(10))
    seen = set()
    for pos, c in enumerate(decoded.tolist()):
        if c not in seen:
            seen.add(c)
            assert out[pos] == c
