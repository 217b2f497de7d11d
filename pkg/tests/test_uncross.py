import numpy as np
import pytest

from tsphyb.core import RngStream, closed_length
from tsphyb.tsplib import instance_from_coords
from tsphyb.uncross import (
    Segment,
    count_crossings,
    final_uncross_loop,
    segments_cross,
    uncross_pass,
    uncross_prob_operator,
)


def square():
    return instance_from_coords("sq", [(0, 0), (10, 0), (10, 10), (0, 10)])


def test_segments_cross_examples():
    assert segments_cross(Segment((0, 0), (2, 2)), Segment((0, 2), (2, 0)))
    assert not segments_cross(Segment((0, 0), (1, 0)), Segment((0, 1), (1, 1)))
    assert not segments_cross(Segment((0, 0), (1, 1)), Segment((1, 1), (2, 0)))


def test_segments_cross_collinear_overlap_is_false():
    assert not segments_cross(Segment((0, 0), (4, 0)), Segment((1, 0), (3, 0)))


def test_segments_cross_symmetric():
    rng = np.random.default_rng(0)
    for _ in range(300):
        pts = rng.uniform(0, 100, size=8)
        s1 = Segment((pts[0], pts[1]), (pts[2], pts[3]))
        s2 = Segment((pts[4], pts[5]), (pts[6], pts[7]))
        assert segments_cross(s1, s2) == segments_cross(s2, s1)


def test_segment_needs_distinct_endpoints():
    with pytest.raises(ValueError):
        Segment((1, 1), (1, 1))


def test_square_crossing_fixed_in_one_pass():
    inst = square()
    crossed = np.array([0, 2, 1, 3])  # A, C, B, D
    assert count_crossings(crossed, inst) == 1
    assert closed_length(crossed, inst.dist) == 48  # two diagonals
    out = uncross_pass(crossed, inst)
    assert out.tolist() == [0, 1, 2, 3]
    assert closed_length(out, inst.dist) == 40
    assert count_crossings(out, inst) == 0


def test_worked_branch_reversal():
    # branch 61-9-47-53-62-33-11-39 with edges (61,9) x (11,39) crossing
    labels = [61, 9, 47, 53, 62, 33, 11, 39]
    coords = [(0, 0), (4, 4), (5, 5), (4.5, 6), (3, 6.5), (2, 6), (1, 4), (5, 0)]
    inst = instance_from_coords("branch", coords)
    assert count_crossings(np.arange(8), inst) == 1
    out = uncross_pass(np.arange(8), inst)
    assert [labels[i] for i in out] == [61, 11, 33, 62, 53, 47, 9, 39]


def test_second_worked_branch_reversal():
    # branch 54-19-67-27: interior pair swaps on uncrossing
    labels = [54, 19, 67, 27]
    coords = [(0, 0), (10, 2), (0, 2), (10, 0)]
    inst = instance_from_coords("branch2", coords)
    out = uncross_pass(np.arange(4), inst)
    assert [labels[i] for i in out] == [54, 67, 19, 27]


def test_passes_never_increase_length(kroa100):
    rng = np.random.default_rng(11)
    for _ in range(30):
        order = rng.permutation(100).astype(np.int64)
        before = closed_length(order, kroa100.dist)
        out = uncross_pass(order, kroa100)
        after = closed_length(out, kroa100.dist)
        assert after <= before
        assert sorted(out.tolist()) == list(range(100))


def test_final_loop_records_trace_and_is_fixpoint_when_clean(kroa100):
    order = np.random.default_rng(5).permutation(100).astype(np.int64)
    out, trace = final_uncross_loop(order, kroa100, iterations=3)
    assert len(trace) == 3
    assert trace[0] >= trace[1] >= trace[2]
    assert trace[-1] == closed_length(out, kroa100.dist)
    if count_crossings(out, kroa100) == 0:
        again, trace2 = final_uncross_loop(out, kroa100, iterations=2)
        assert np.array_equal(again, out)
        assert trace2 == [trace[-1], trace[-1]]


def test_crossing_free_tour_unchanged():
    inst = square()
    clean = np.array([0, 1, 2, 3])
    out, trace = final_uncross_loop(clean, inst, iterations=3)
    assert np.array_equal(out, clean)
    assert trace == [40, 40, 40]


def test_prob_zero_is_identity():
    inst = square()
    crossed = np.array([0, 2, 1, 3])
    for seed in range(20):
        out = uncross_prob_operator(crossed, inst, 0.0, 50, RngStream(seed))
        assert np.array_equal(out, crossed)


def test_prob_one_fixes_sampled_crossing():
    inst = square()
    crossed = np.array([0, 2, 1, 3])
    fixed_count = 0
    for seed in range(200):
        out, (examined, fixed) = uncross_prob_operator(
            crossed, inst, 1.0, 1, RngStream(seed), return_stats=True
        )
        if examined:
            assert fixed == examined == 1
            assert count_crossings(out, inst) == 0
            fixed_count += 1
    assert fixed_count > 0


def test_prob_half_frequency():
    inst = square()
    crossed = np.array([0, 2, 1, 3])
    examined = fixed = 0
    for seed in range(10000):
        _, (ex, fx) = uncross_prob_operator(
            crossed, inst, 0.5, 1, RngStream(seed), return_stats=True
        )
        examined += ex
        fixed += fx
    ratio = fixed / examined
    assert abs(ratio - 0.5) < 0.02, f"fix ratio {ratio:.4f}"


def test_prob_operator_validates_arguments():
    inst = square()
    with pytest.raises(ValueError):
        uncross_prob_operator(np.arange(4), inst, 1.5, 1, RngStream(0))
    with pytest.raises(ValueError):
        uncross_prob_operator(np.arange(4), inst, 0.5, -1, RngStream(0))
    with pytest.raises(ValueError):
        final_uncross_loop(np.arange(4), inst, iterations=0)
