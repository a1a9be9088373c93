import math

import pytest

from tcamsplit.bitmatcher import bit_matcher_sequence, complexity, realize_sequence
from tcamsplit.errors import BadK, BadTargetIds
from tcamsplit.forcing import (
    clique_pairs,
    clique_partition,
    force_sequence,
    force_transaction,
    forced_transactions,
)
from tcamsplit.model import Transaction, apply_sequence
from tcamsplit.oracles import brute_lambda, enumerate_shortest_sequences
from tcamsplit.ordering import exhaustive_best_order
from tcamsplit.structure import fragmentation, transactions_graph


def test_force_transaction_examples():
    assert force_transaction([1, 1, 2], 2, 1).weights == (7, 9, 16)
    assert force_transaction([5, 3], 2, 1).weights == (39, 25)
    assert force_transaction([5, 3], 2, 1).width == 6


def test_forced_transaction_in_every_shortest_sequence():
    seqs = enumerate_shortest_sequences([7, 9, 16])
    assert seqs
    assert all(Transaction(2, 1, 1) in s for s in seqs)


def test_force_sequence_examples():
    assert force_sequence([1, 1, 2], []).weights == (1, 1, 2)
    assert force_sequence([1, 1, 2], [(2, 1)]).weights == (7, 9, 16)
    q = force_sequence([1, 1, 2], [(2, 1), (3, 2)])
    assert q.weights == (63, 57, 136)
    forced = forced_transactions([(2, 1), (3, 2)])
    assert [str(t) for t in forced] == ["2 -(1)-> 1", "3 -(8)-> 2"]
    assert apply_sequence(q.weights, forced) == [64, 64, 128]


def test_clique_partition_examples():
    q = clique_partition(3, [1, 1, 2])
    assert q.weights == (503, 449, 1096) and q.total == 1 << 11
    assert clique_partition(2, [1, 1]).weights == (7, 9)
    assert clique_pairs(3) == [(2, 1), (3, 1), (3, 2)]


def test_clique_k3_has_no_optimal_segmentation():
    q = clique_partition(3, [1, 1, 2])
    rep = exhaustive_best_order(q)
    assert rep.best_n > rep.lam
    assert rep.lam == 3 + complexity([1, 1, 2])


def test_clique_k3_optimal_coloring_is_fragmented():
    q = clique_partition(3, [1, 1, 2])
    seq = bit_matcher_sequence(q)
    assert transactions_graph(seq, q).is_clique
    c = realize_sequence(seq, q.width, 3)
    k = 3
    assert fragmentation(c).maximum >= math.ceil((k + 1) / 4 + 1 / (2 * k))


@pytest.mark.parametrize("k", range(2, 9))
def test_constructions_stay_valid(k):
    p0 = [1] * (k - 1) + [(1 << (k - 1).bit_length()) - (k - 1)]
    q = clique_partition(k, p0)
    assert all(x > 0 for x in q.weights)
    assert q.width == (k - 1).bit_length() + 3 * k * (k - 1) // 2
    assert apply_sequence(q.weights, forced_transactions(clique_pairs(k))) == [
        8 ** (k * (k - 1) // 2) * x for x in p0
    ]


def test_bad_ids_and_k():
    with pytest.raises(BadTargetIds):
        force_transaction([1, 1], 1, 1)
    with pytest.raises(BadTargetIds):
        force_transaction([1, 1], 3, 1)
    with pytest.raises(BadTargetIds):
        force_sequence([1, 1, 2], [(2, 1), (0, 2)])
    with pytest.raises(BadK):
        clique_partition(1, [1])
    with pytest.raises(BadK):
        clique_partition(3, [1, 1])


def test_factor_four_does_not_force():
    # [5,3] is the factor-4 construction for 1 -(1)-> 2 on [1,1]
    assert force_transaction([1, 1], 1, 2, factor=4).weights == (5, 3)
    seqs = enumerate_shortest_sequences([5, 3])
    assert brute_lambda([5, 3]) == 3
    assert any(Transaction(1, 1, 2) not in s for s in seqs)
    expected_a = (Transaction(2, 1, 1), Transaction(2, 2, 1), Transaction(1, 8, 0))
    expected_b = (Transaction(1, 1, 2), Transaction(2, 4, 1), Transaction(1, 8, 0))
    assert expected_a in seqs and expected_b in seqs
    # factor 4 applied to [5,3] itself
    q = force_transaction([5, 3], 2, 1, factor=4)
    assert q.weights == (19, 13)
    assert any(Transaction(2, 1, 1) not in s for s in enumerate_shortest_sequences(q))


def test_small_forced_outputs_checked_by_enumeration():
    for p0, pair in (([1, 1], (1, 2)), ([1, 1], (2, 1)), ([1, 3], (1, 2)), ([2, 1, 1], (3, 1)), ([1, 1, 1, 1], (4, 2))):
        q = force_transaction(p0, *pair)
        forced = Transaction(pair[0], 1, pair[1])
        assert all(forced in s for s in enumerate_shortest_sequences(q)), (p0, pair)
