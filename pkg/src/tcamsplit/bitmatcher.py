"""Shortest zeroing transaction sequences and their realization as tables.

:func:`bit_matcher_sequence` computes a shortest sequence level by level:
at level ``d`` the targets whose weight has bit ``d`` set are split into a
low and a high half by bit-lexicographic order, and each low target sends
``2^d`` to its high partner. Its length is the complexity of the partition,
i.e. the size of a smallest LPM table realizing it.

:func:`realize_sequence` turns such a sequence back into a concrete trie
coloring with exactly one conflict per transaction.
"""
from __future__ import annotations

from collections import Counter
from typing import Sequence

import numpy as np

from .errors import UnrealizableSequence
from .model import (
    Partition,
    TcamTable,
    Transaction,
    TrieColoring,
    as_partition,
    check_explicit_width,
    source_weights,
    table_from_coloring,
)


def _level_order(weights: Sequence[int], members: list[int], width: int) -> list[int]:
    # ascending bit-lex order; equal keys break by ascending target id
    fmt = f"0{width}b"
    return sorted(members, key=lambda i: (format(weights[i], fmt)[::-1], i))


def _pairings(weights: Sequence[int], width: int):
    """Yield ``(d, [(low, high), ...], weights after level d)`` with 0-based target indices."""
    w = list(weights)
    for d in range(width):
        bit = 1 << d
        members = [i for i, x in enumerate(w) if x & bit]
        if not members:
            yield d, [], w
            continue
        ordered = _level_order(w, members, width)
        half = len(ordered) // 2
        pairs = list(zip(ordered[:half], ordered[half:]))
        for lo, hi in pairs:
            w[lo] -= bit
            w[hi] += bit
        yield d, pairs, w


def _levels(p: Partition):
    """Yield ``(d, transactions of level d, weights after level d)``."""
    for d, pairs, w in _pairings(p.weights, p.width):
        bit = 1 << d
        yield d, [Transaction(lo + 1, bit, hi + 1) for lo, hi in pairs], list(w)


def bit_matcher_sequence(p: Partition | Sequence[int]) -> tuple[Transaction, ...]:
    p = as_partition(p)
    seq: list[Transaction] = []
    w = list(p.weights)
    for _, level, w in _levels(p):
        seq.extend(level)
    for i, x in enumerate(w):
        if x:
            seq.append(Transaction(i + 1, x, 0))
    return tuple(seq)


def complexity(p: Partition | Sequence[int]) -> int:
    """Size of a smallest LPM table realizing ``p`` (the length of a shortest zeroing sequence)."""
    p = as_partition(p)
    n = 0
    w = p.weights
    for _, pairs, w in _pairings(p.weights, p.width):
        n += len(pairs)
    return n + sum(1 for x in w if x)


def level_weights(p: Partition | Sequence[int]) -> list[list[int]]:
    """Weights before level 0 followed by the weights after each level."""
    p = as_partition(p)
    return [list(p.weights)] + [w for _, _, w in _levels(p)]


def _check_realizable(seq: Sequence[Transaction], width: int, k: int) -> int:
    sinks = [t for t in seq if t.receiver == 0]
    if len(sinks) != 1 or sinks[0].size != 1 << width:
        raise UnrealizableSequence("expected exactly one transaction of size 2^W into target 0")
    if seq[-1].receiver != 0:
        raise UnrealizableSequence("the transaction into target 0 must come last")
    sizes = [t.size for t in seq]
    if sizes != sorted(sizes):
        raise UnrealizableSequence("transactions must be ordered by non-decreasing size")
    w = source_weights(seq, k)
    if any(x < 0 for x in w) or sum(w) != 1 << width:
        raise UnrealizableSequence(f"sequence does not zero a partition of 2^{width}")
    for t in seq:
        a, b = w[t.sender - 1], (w[t.receiver - 1] if t.receiver else 0)
        if a < t.size or a % t.size or b % t.size:
            raise UnrealizableSequence(f"{t} is not aligned with the weights {w} it is applied to")
        w[t.sender - 1] -= t.size
        if t.receiver:
            w[t.receiver - 1] += t.size
    return sinks[0].sender


def realize_sequence(seq: Sequence[Transaction], width: int, k: int | None = None) -> TrieColoring:
    """A coloring whose bottom-up transactions are exactly ``seq``.

    Rebuild the trie top-down by undoing ``seq`` from its last transaction:
    the whole trie starts with the color of the transaction into target 0,
    and undoing ``a -(2^d)-> b`` marks the lowest-addressed aligned block of
    ``2^d`` leaves that is currently all ``b`` and not already marked, with
    color ``a``.
    """
    seq = tuple(seq)
    check_explicit_width(width)
    k = max(max(t.sender, t.receiver) for t in seq) if k is None else k
    root = _check_realizable(seq, width, k)
    leaves = np.full(1 << width, root, dtype=np.int64)
    marked: dict[str, int] = {"": root}
    for t in reversed(seq[:-1]):
        d = t.level
        depth = width - d
        blocks = leaves.reshape(-1, t.size)
        candidates = np.nonzero((blocks == t.receiver).all(axis=1))[0]
        for idx in candidates:
            prefix = format(int(idx), f"0{depth}b") if depth else ""
            if prefix not in marked:
                break
        else:
            raise UnrealizableSequence(f"no free aligned block of color {t.receiver} for {t}")
        marked[prefix] = t.sender
        leaves[int(idx) * t.size:(int(idx) + 1) * t.size] = t.sender
    return TrieColoring(width, marked)


def synthesize(p: Partition | Sequence[int]) -> TcamTable:
    """Smallest LPM table for ``p``: Bit Matcher sequence, realized and emitted."""
    p = as_partition(p)
    return table_from_coloring(realize_sequence(bit_matcher_sequence(p), p.width, p.k))


def transaction_multiset(seq) -> Counter:
    return Counter((t.sender, t.size, t.receiver) for t in seq)


__all__ = [
    "bit_matcher_sequence",
    "complexity",
    "level_weights",
    "realize_sequence",
    "synthesize",
    "transaction_multiset",
]
