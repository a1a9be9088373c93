from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_partition
from tcamsplit.bitmatcher import bit_matcher_sequence, realize_sequence
from tcamsplit.errors import MultipleZeroTargets, NotMinimalColoring
from tcamsplit.forcing import clique_partition
from tcamsplit.model import (
    LeafColoring,
    Transaction,
    TrieColoring,
    coloring_from_table,
    parse_sequence,
    parse_table,
    sequence_from_coloring,
)
from tcamsplit.segments import color_segments_full, ortc
from tcamsplit.structure import (
    check_neighbor_order,
    fragmentation,
    neighbor_ordered_sequence,
    transactions_graph,
)

FIG4 = "1 -(1)-> 2\n3 -(2)-> 2\n3 -(4)-> 1\n1 -(16)-> 2\n2 -(32)-> 0"


def test_graph_fig4():
    g = transactions_graph(parse_sequence(FIG4), [13, 13, 6])
    assert g.level == 1
    assert [str(t) for t in g.transactions] == ["1 -(1)-> 2", "3 -(2)-> 2"]
    assert g.edge_list() == [(1, 2), (2, 3)]
    assert not g.is_clique


def test_graph_single_sink():
    g = transactions_graph([Transaction(1, 8, 0)])
    assert g.edges == frozenset()
    assert g.level == -1


def test_graph_wide_example():
    g = transactions_graph(bit_matcher_sequence([12, 49, 195]), [12, 49, 195])
    assert g.level == 2
    assert g.edge_list() == [(1, 3), (2, 3)]


def test_graph_needs_one_sink():
    with pytest.raises(MultipleZeroTargets):
        transactions_graph(parse_sequence("1 -(4)-> 0\n2 -(4)-> 0"))
    with pytest.raises(MultipleZeroTargets):
        transactions_graph(parse_sequence("1 -(4)-> 2"))


def test_graph_degenerate_cutoff():
    # a unit transaction empties target 1, so nothing can be included
    g = transactions_graph(parse_sequence("1 -(1)-> 2\n2 -(2)-> 0"), [1, 1])
    assert g.level == -1 and not g.edges


def test_graph_order_independent():
    seq = list(parse_sequence(FIG4))
    shuffled = [seq[2], seq[0], seq[1], seq[3], seq[4]]
    assert transactions_graph(shuffled, [13, 13, 6]) == transactions_graph(seq, [13, 13, 6])


def test_clique_graph_k3():
    p = clique_partition(3, [1, 1, 2])
    g = transactions_graph(bit_matcher_sequence(p), p)
    assert g.is_clique


def test_fragmentation_examples():
    c = color_segments_full(LeafColoring.from_partition([13, 13, 6]))
    assert fragmentation(c).counts == (1, 1, 1)
    c = realize_sequence(bit_matcher_sequence([13, 13, 6]), 5)
    assert fragmentation(c).maximum >= 2


def test_fragmentation_of_small_table():
    c = coloring_from_table(parse_table("011 -> 1\n01* -> 2\n0** -> 3\n*** -> 1"))
    # leaves 3,3,2,1 | 1,1,1,1: target 1 occupies one contiguous run
    prof = fragmentation(c)
    assert prof.counts == (1, 1, 1)
    assert prof.maximum == 1


def test_fragmentation_counts_runs():
    lc = LeafColoring.from_leaves([1, 2, 1, 3, 3, 1, 2, 2])
    assert fragmentation(lc).counts == (3, 2, 1)
    assert fragmentation(lc, k=4).counts == (3, 2, 1, 0)


def test_neighbor_order_w1():
    c = TrieColoring(1, {"": 2, "0": 1})
    seq, where = neighbor_ordered_sequence(c)
    assert [str(t) for t in seq] == ["1 -(1)-> 2", "2 -(2)-> 0"]
    assert where == ["0", ""]


def test_neighbor_order_fig5b():
    c = color_segments_full(LeafColoring.from_partition([13, 13, 6]))
    seq, where = neighbor_ordered_sequence(c)
    assert len(seq) == 6
    assert check_neighbor_order(c, seq, where) == []
    assert Counter(seq) == Counter(sequence_from_coloring(c))


def test_neighbor_order_rejects_non_minimal():
    c = TrieColoring(2, {"": 1, "0": 2, "00": 1, "01": 1})
    with pytest.raises(NotMinimalColoring):
        neighbor_ordered_sequence(c)


@settings(max_examples=200, deadline=None)
@given(st.randoms(use_true_random=False))
def test_neighbor_order_random(r):
    width = r.randint(0, 10)
    k = r.randint(1, min(6, 1 << width))
    if r.random() < 0.5:
        p = random_partition(r, width, k)
        order = tuple(r.sample(range(1, k + 1), k))
        c = color_segments_full(LeafColoring.from_partition(p, order))
    else:
        c = ortc(LeafColoring.from_leaves([r.randint(1, k) for _ in range(1 << width)]))
    seq, where = neighbor_ordered_sequence(c)
    assert Counter(seq) == Counter(sequence_from_coloring(c))
    assert check_neighbor_order(c, seq, where) == []


@settings(max_examples=200, deadline=None)
@given(st.randoms(use_true_random=False))
def test_segmented_graph_edge_bound(r):
    width = r.randint(1, 10)
    k = r.randint(1, min(8, 1 << width))
    p = random_partition(r, width, k)
    order = tuple(r.sample(range(1, k + 1), k))
    c = color_segments_full(LeafColoring.from_partition(p, order))
    g = transactions_graph(sequence_from_coloring(c), p)
    assert len(g.edges) <= k - 1
