import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_partition
from tcamsplit.bitmatcher import complexity
from tcamsplit.errors import NonSegmentedInput, WidthCapExceeded
from tcamsplit.model import LeafColoring, conflicts, induced_partition, node_levels
from tcamsplit.oracles import dp_min_conflicts
from tcamsplit.segments import (
    color_segments_fast,
    color_segments_full,
    n_of,
    ortc,
    segment_profile,
    size_bound,
)


def test_fig5_orders():
    assert conflicts(color_segments_full(LeafColoring.from_partition([13, 13, 6])))[0] == 6
    assert conflicts(color_segments_full(LeafColoring.from_partition([13, 13, 6], (1, 3, 2))))[0] == 6
    assert n_of([13, 13, 6]) == 6


def test_four_unit_leaves():
    c = color_segments_full(LeafColoring.from_leaves([1, 2, 3, 4]))
    levels = node_levels(c)
    assert list(levels[1]) == [1, 4]
    assert levels[0][0] == 4
    assert conflicts(c)[0] == 4


def test_w1_root_takes_right_leaf():
    c = color_segments_full(LeafColoring.from_leaves([1, 2]))
    assert c.marked == {"": 2, "0": 1}
    assert color_segments_fast(LeafColoring.from_leaves([1, 2]))[0] == 2


def test_fast_matches_full_on_example():
    lc = LeafColoring.from_partition([13, 13, 6])
    n, found = color_segments_fast(lc)
    assert n == 6
    assert found == conflicts(color_segments_full(lc))[1]


def test_lower_bound_state_after_two_levels():
    lc = LeafColoring.from_partition([85, 171, 64, 64, 128], (1, 3, 4, 5, 2))
    profile = segment_profile(lc)
    assert [n for _, n in profile[0]] == [85, 64, 64, 128, 171]
    assert [n for _, n in profile[2]] == [21, 16, 16, 32, 43]


def test_single_color():
    assert color_segments_fast(LeafColoring(40, ((1, 1 << 40),)))[0] == 1
    assert n_of([1 << 40]) == 1


def test_huge_width_fast_path():
    w = 200
    p = [(1 << (w - 1)) - 3, (1 << (w - 1)) + 3]
    assert n_of(p) == complexity(p)
    with pytest.raises(WidthCapExceeded):
        color_segments_full(LeafColoring.from_partition(p))


def test_k2_examples():
    assert n_of([5, 3]) == 3
    assert n_of([8, 8]) == 2


def test_non_segmented_rejected():
    lc = LeafColoring.from_leaves([1, 2, 1, 2])
    with pytest.raises(NonSegmentedInput):
        color_segments_full(lc)
    with pytest.raises(NonSegmentedInput):
        color_segments_fast(lc)
    with pytest.raises(NonSegmentedInput):
        ortc(lc, segmented=True)


def test_ortc_examples():
    c = ortc(LeafColoring.from_leaves([1, 2, 2, 4]))
    levels = node_levels(c)
    assert list(levels[1]) == [2, 2] and levels[0][0] == 2
    assert conflicts(c)[0] == 3
    assert conflicts(ortc(LeafColoring.from_leaves([3] * 8)))[0] == 1
    assert conflicts(ortc(LeafColoring.from_partition([13, 13, 6]), segmented=True))[0] == 6


def test_dp_small_cases():
    assert dp_min_conflicts(LeafColoring.from_leaves([1, 2, 2, 4])) == 3
    assert dp_min_conflicts(LeafColoring.from_leaves([5] * 16)) == 1
    assert dp_min_conflicts(LeafColoring.from_partition([13, 13, 6])) == 6


def _random_segmented(r: random.Random, max_width=9, max_k=8) -> LeafColoring:
    width = r.randint(0, max_width)
    k = r.randint(1, min(max_k, 1 << width))
    p = random_partition(r, width, k)
    order = list(range(1, k + 1))
    r.shuffle(order)
    return LeafColoring.from_partition(p, order)


@settings(max_examples=300, deadline=None)
@given(st.randoms(use_true_random=False))
def test_segmented_optimality_and_agreement(r):
    lc = _random_segmented(r)
    full = color_segments_full(lc)
    n = conflicts(full)[0]
    assert list(full.leaf_colors()) == list(lc.leaves())
    fast_n, fast_list = color_segments_fast(lc)
    assert fast_n == n and fast_list == conflicts(full)[1]
    assert n == conflicts(ortc(lc))[0] == dp_min_conflicts(lc)
    k = len(lc.runs)
    assert n <= size_bound(lc.width, k)
    assert n >= k


@settings(max_examples=200, deadline=None)
@given(st.randoms(use_true_random=False))
def test_ortc_optimal_on_arbitrary_leaves(r):
    width = r.randint(0, 7)
    k = r.randint(1, 6)
    lc = LeafColoring.from_leaves([r.randint(1, k) for _ in range(1 << width)])
    c = ortc(lc)
    assert list(c.leaf_colors()) == list(lc.leaves())
    assert conflicts(c)[0] == dp_min_conflicts(lc)


@settings(max_examples=200, deadline=None)
@given(st.randoms(use_true_random=False))
def test_run_count_per_level(r):
    lc = _random_segmented(r, max_width=30, max_k=10)
    k = len(lc.runs)
    for level in segment_profile(lc):
        assert len(level) <= 2 * k - 1


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 16).flatmap(lambda w: st.tuples(st.just(w), st.integers(1, (1 << w) - 1))))
def test_two_targets_segmented_is_optimal(args):
    width, p = args
    part = [p, (1 << width) - p]
    assert n_of(part) == complexity(part)


def test_induced_partition_of_segmented():
    lc = LeafColoring.from_partition([3, 9, 4], (2, 3, 1))
    assert induced_partition(color_segments_full(lc), 3) == [3, 9, 4]
