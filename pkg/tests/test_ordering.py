import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_partition
from tcamsplit.bitmatcher import bit_matcher_sequence, complexity, realize_sequence
from tcamsplit.errors import InvalidKW, NotOptimalInput, TooManyPermutations
from tcamsplit.model import LeafColoring, TrieColoring, conflicts, validate_partition
from tcamsplit.ordering import (
    canonical_orderings,
    derandomized_bound,
    derandomized_guarantee,
    derandomized_order,
    distinct_orderings,
    exhaustive_best_order,
    greedy_order,
    lower_bound_instance,
    lower_bound_ratio,
    shift_bound,
    shift_estimate,
    shift_to_segments,
)
from tcamsplit.segments import color_segments_full, n_of


def brute_best(p):
    return min(n_of(p, s) for s in itertools.permutations(range(1, len(p) + 1)))


# -- exhaustive ---------------------------------------------------------------


@pytest.mark.parametrize("p", [[13, 13, 6], [12, 49, 195]])
def test_known_gaps(p):
    r = exhaustive_best_order(p)
    assert (r.best_n, r.lam, r.gap) == (6, 5, 1)


@pytest.mark.parametrize("p", [[1, 31], [7, 9], [5, 3], [100, 156]])
def test_two_parts_have_no_gap(p):
    assert exhaustive_best_order(p).gap == 0


def test_report_table_and_text():
    r = exhaustive_best_order([13, 13, 6], keep_table=True)
    assert r.table == [((1, 2, 3), 6), ((1, 3, 2), 6)]
    assert "gap     1" in r.to_text()
    assert r.to_dict()["ratio"] == pytest.approx(1.2)


def test_distinct_orderings_count():
    assert distinct_orderings([13, 13, 6]) == 2
    assert distinct_orderings([1, 2, 3]) == 3
    assert distinct_orderings([1, 1, 7, 7]) == 4
    for values in ([1, 2, 2, 3, 3], [4, 4, 4, 4], [1, 2, 3, 4, 5]):
        p = validate_partition(values + [(1 << 5) - sum(values)])
        assert len(list(canonical_orderings(p))) == distinct_orderings(list(p.weights))


def test_too_many_permutations():
    p = [1] * 15 + [17] + list(range(2, 12))
    p.append(512 - sum(p))
    with pytest.raises(TooManyPermutations):
        exhaustive_best_order(p)


@settings(max_examples=60, deadline=None)
@given(st.randoms(use_true_random=False))
def test_exhaustive_matches_all_permutations(r):
    width = r.randint(1, 9)
    k = r.randint(1, min(5, 1 << width))
    p = random_partition(r, width, k)
    rep = exhaustive_best_order(p)
    assert rep.best_n == brute_best(p) == n_of(p, rep.best_order)
    assert rep.best_n >= rep.lam


# -- derandomized -------------------------------------------------------------


def test_derandomized_examples():
    order = derandomized_order([13, 13, 6])
    assert n_of([13, 13, 6], order) <= 6
    assert derandomized_bound(5, 3) == 6
    assert derandomized_order([8]) == (1,)
    assert n_of([8], (1,)) == 1
    for p in ([5, 3], [1, 15], [100, 156]):
        assert n_of(p, derandomized_order(p)) == complexity(p)


def test_derandomized_short_of_best_order_case():
    # the expectation argument does not reach the best order here
    p = [3, 7, 6]
    order = derandomized_order(p)
    assert (complexity(p), brute_best(p), n_of(p, order)) == (4, 4, 5)
    assert n_of(p, order) > derandomized_bound(brute_best(p), 3)
    assert n_of(p, order) <= derandomized_guarantee(4, 3)


@settings(max_examples=150, deadline=None)
@given(st.randoms(use_true_random=False))
def test_derandomized_guarantee(r):
    width = r.randint(1, 10)
    k = r.randint(1, min(6, 1 << width))
    p = random_partition(r, width, k)
    order = derandomized_order(p)
    assert sorted(order) == list(range(1, k + 1))
    assert n_of(p, order) <= shift_estimate(p, order)
    assert n_of(p, order) <= derandomized_guarantee(complexity(p), k)


@settings(max_examples=60, deadline=None)
@given(st.randoms(use_true_random=False))
def test_shift_estimate_bounds_every_order(r):
    width = r.randint(1, 9)
    k = r.randint(1, min(5, 1 << width))
    p = random_partition(r, width, k)
    for order in itertools.permutations(range(1, k + 1)):
        assert n_of(p, order) <= shift_estimate(p, order)


# -- greedy -------------------------------------------------------------------


def test_greedy_can_pick_a_loser():
    p = [1, 1, 7, 7]
    assert greedy_order(p) == (1, 2, 3, 4)
    assert n_of(p, (1, 2, 3, 4)) == 5
    assert n_of(p, (1, 3, 2, 4)) == 4
    assert n_of(p, greedy_order(p, tie_break="largest")) == 4


def test_greedy_trivial_and_two_parts():
    assert greedy_order([16]) == (1,)
    for p in ([5, 3], [3, 5], [1, 255]):
        assert n_of(p, greedy_order(p)) == complexity(p)


def test_greedy_bad_tie_break():
    with pytest.raises(ValueError):
        greedy_order([5, 3], tie_break="random")


# -- shifting subtrees --------------------------------------------------------


def optimal_coloring(p):
    return realize_sequence(bit_matcher_sequence(p), validate_partition(p).width, len(p))


def test_shift_example():
    c = optimal_coloring([13, 13, 6])
    s = shift_to_segments(c, (1, 2, 3))
    assert LeafColoring.of(s).merged().runs == ((1, 13), (2, 13), (3, 6))
    assert conflicts(s)[0] <= shift_bound(5, 3) == 8
    assert n_of([13, 13, 6], (1, 2, 3)) == 6


def test_shift_two_targets_is_exact():
    for p in ([5, 3], [7, 9], [1, 63]):
        for order in ((1, 2), (2, 1)):
            s = shift_to_segments(optimal_coloring(p), order)
            assert conflicts(s)[0] == complexity(p)


def test_shift_monochromatic():
    c = TrieColoring(4, {"": 1})
    s = shift_to_segments(c, (1,))
    assert s.marked == {"": 1}


def test_shift_rejects_non_optimal():
    c = color_segments_full(LeafColoring.from_partition([13, 13, 6]))
    with pytest.raises(NotOptimalInput):
        shift_to_segments(c, (1, 2, 3))


@settings(max_examples=150, deadline=None)
@given(st.randoms(use_true_random=False))
def test_shift_properties(r):
    width = r.randint(1, 9)
    k = r.randint(2, min(6, 1 << width))
    p = random_partition(r, width, k)
    order = tuple(r.sample(range(1, k + 1), k))
    s = shift_to_segments(optimal_coloring(p), order)
    assert LeafColoring.of(s).merged().runs == tuple((t, p[t - 1]) for t in order)
    n = conflicts(s)[0]
    assert n <= shift_bound(complexity(p), k)
    assert n >= n_of(p, order)


# -- lower-bound instances ----------------------------------------------------


def test_lower_bound_worked_example():
    p, bad, good = lower_bound_instance(5, 9)
    assert sorted(p.weights) == sorted([85, 171, 64, 64, 128])
    assert p.permuted(bad) == [85, 64, 64, 128, 171]
    assert good == (1, 2, 3, 4, 5)
    assert n_of(p, good) == 9 // 2 + 4 == 8
    assert lower_bound_ratio(5, 9) == pytest.approx(13 / 8)


def test_lower_bound_small():
    p, bad, good = lower_bound_instance(3, 5)
    assert lower_bound_ratio(3, 5) == pytest.approx(5 / 4)
    assert n_of(p, bad) / n_of(p, good) >= 5 / 4


@pytest.mark.parametrize("k, w", [(2, 5), (3, 1), (7, 3)])
def test_lower_bound_invalid(k, w):
    with pytest.raises(InvalidKW):
        lower_bound_instance(k, w)


def test_lower_bound_all_small_cases():
    for k in range(3, 7):
        for w in range(2, 13):
            if k - 2 > 1 << (w - 1):
                continue
            p, bad, good = lower_bound_instance(k, w)
            assert p.k == k and p.width == w
            assert p.weights[0] + p.weights[1] == 1 << (w - 1)
            assert n_of(p, good) == w // 2 + k - 1
            assert n_of(p, bad) / n_of(p, good) >= lower_bound_ratio(k, w)
