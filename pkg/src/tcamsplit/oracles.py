"""Brute-force ground truth used to check the fast algorithms.

Nothing here relies on the level structure that Bit Matcher or the segment
algorithm exploit:

* :func:`brute_lambda` searches the literal transaction graph: from a weight
  vector, any target may send any power of two it can afford to any other
  target or to 0.
* :func:`enumerate_shortest_sequences` lists every shortest zeroing sequence
  over labeled weight vectors.
* :func:`dp_min_conflicts` is a per-node, per-color dynamic program over the
  explicit trie.
"""
from __future__ import annotations

import sys
from contextlib import contextmanager
from typing import Iterable

import numpy as np

from .errors import StateSpaceTooLarge
from .model import LeafColoring, Partition, Transaction, check_explicit_width

DEFAULT_MAX_SUM = 1 << 9
DEFAULT_MAX_ENUM_SUM = 1 << 7
DP_MAX_WIDTH = 12
DP_MAX_COLORS = 16


@contextmanager
def _recursion_room(depth: int):
    old = sys.getrecursionlimit()
    if depth > old:
        sys.setrecursionlimit(depth)
    try:
        yield
    finally:
        sys.setrecursionlimit(old)


def _weights(p) -> tuple[int, ...]:
    return tuple(p.weights) if isinstance(p, Partition) else tuple(int(x) for x in p)


class LambdaOracle:
    """Exact shortest zeroing length by iterative deepening on the literal graph.

    States are sorted weight multisets (the length is invariant under
    relabeling targets). The search bound is on the *excess*
    ``length - (#nonzero weights)``: every nonzero target has to send at least
    once, so ``#nonzero`` never overestimates the remaining length. A move
    costs ``1 + change in #nonzero`` excess, which is 0, 1 or 2.

    Failed ``(state, budget)`` pairs are remembered for the lifetime of the
    object, so one oracle answering many partitions shares work between them.
    """

    def __init__(self, max_sum: int = DEFAULT_MAX_SUM):
        self.max_sum = max_sum
        self._fail: dict[tuple[tuple[int, ...], int], int] = {}

    def __call__(self, p) -> int:
        w = _weights(p)
        if any(x < 0 for x in w):
            raise ValueError("weights must be non-negative")
        if sum(w) > self.max_sum:
            raise StateSpaceTooLarge(f"sum {sum(w)} exceeds the oracle guard {self.max_sum}")
        pos = tuple(sorted(x for x in w if x))
        zeros = len(w) - len(pos)
        budget = 0
        with _recursion_room(4 * sum(w) + 200):
            while not self._solvable(pos, zeros, budget):
                budget += 1
        return len(pos) + budget

    def _solvable(self, pos: tuple[int, ...], zeros: int, budget: int) -> bool:
        if not pos:
            return True
        # every use of an empty target costs at least one unit of excess
        zeros = min(zeros, budget)
        key = (pos, zeros)
        if self._fail.get(key, -1) >= budget:
            return False
        n = len(pos)
        for si in range(n):
            v = pos[si]
            if si and pos[si - 1] == v:
                continue
            rest = pos[:si] + pos[si + 1:]
            m = 1
            while m <= v:
                left = v - m
                emptied = left == 0
                cost = 0 if emptied else 1
                base = rest if emptied else rest + (left,)
                freed = 1 if emptied else 0
                if cost <= budget:
                    # receiver 0
                    if self._solvable(tuple(sorted(base)), zeros + freed, budget - cost):
                        return True
                    # receiver: another nonzero target
                    seen = set()
                    for u in rest:
                        if u in seen:
                            continue
                        seen.add(u)
                        nb = list(base)
                        nb.remove(u)
                        nb.append(u + m)
                        if self._solvable(tuple(sorted(nb)), zeros + freed, budget - cost):
                            return True
                # receiver: an empty target
                if zeros and cost + 1 <= budget:
                    nb = tuple(sorted(base + (m,)))
                    if self._solvable(nb, zeros - 1 + freed, budget - cost - 1):
                        return True
                m <<= 1
        self._fail[key] = budget
        return False


def brute_lambda(p, max_sum: int = DEFAULT_MAX_SUM) -> int:
    """Length of a shortest zeroing transaction sequence, by exhaustive search."""
    return LambdaOracle(max_sum)(p)


def brute_lambdas(partitions: Iterable, max_sum: int = DEFAULT_MAX_SUM) -> list[int]:
    """:func:`brute_lambda` over many inputs, sharing one search memo."""
    oracle = LambdaOracle(max_sum)
    return [oracle(p) for p in partitions]


def canonical(seq: Iterable[Transaction]) -> tuple[Transaction, ...]:
    return tuple(sorted(seq, key=Transaction.canonical_key))


def enumerate_shortest_sequences(p, max_sum: int = DEFAULT_MAX_ENUM_SUM) -> set[tuple[Transaction, ...]]:
    """Every shortest zeroing sequence of ``p``, each sorted by (size, sender, receiver).

    Target identities matter here, so states are labeled weight vectors.
    Two orderings of the same transactions collapse to one entry.
    """
    w = _weights(p)
    if sum(w) > max_sum:
        raise StateSpaceTooLarge(f"sum {sum(w)} exceeds the enumeration guard {max_sum}")
    length = LambdaOracle(max(max_sum, sum(w)))(w)
    k = len(w)
    memo: dict[tuple[tuple[int, ...], int], frozenset] = {}

    def walk(state: tuple[int, ...], steps: int) -> frozenset:
        nonzero = sum(1 for x in state if x)
        if nonzero == 0:
            return frozenset([()]) if steps == 0 else frozenset()
        if nonzero > steps:
            return frozenset()
        key = (state, steps)
        hit = memo.get(key)
        if hit is not None:
            return hit
        found = set()
        for i in range(k):
            v = state[i]
            m = 1
            while m <= v:
                for j in range(k + 1):
                    if j == i + 1:
                        continue
                    nxt = list(state)
                    nxt[i] -= m
                    if j:
                        nxt[j - 1] += m
                    t = Transaction(i + 1, m, j)
                    for tail in walk(tuple(nxt), steps - 1):
                        found.add(tuple(sorted((t,) + tail, key=Transaction.canonical_key)))
                m <<= 1
        res = frozenset(found)
        memo[key] = res
        return res

    with _recursion_room(4 * sum(w) + 200):
        return set(walk(w, length))


def dp_min_conflicts(lc: LeafColoring) -> int:
    """Fewest conflicts over all extensions of ``lc`` (root counted).

    ``cost[v][c]`` is the cheapest coloring of the subtree at ``v`` given that
    ``v`` has color ``c``; a child either shares ``c`` or pays one conflict.
    Internal colors are drawn from the leaf colors, which loses nothing.
    """
    if lc.width > DP_MAX_WIDTH:
        raise StateSpaceTooLarge(f"width {lc.width} exceeds the DP guard {DP_MAX_WIDTH}")
    palette = lc.colors()
    if len(palette) > DP_MAX_COLORS:
        raise StateSpaceTooLarge(f"{len(palette)} colors exceed the DP guard {DP_MAX_COLORS}")
    check_explicit_width(lc.width)
    index = {c: i for i, c in enumerate(palette)}
    leaves = np.array([index[int(c)] for c in lc.leaves()])
    big = 1 << 30
    cost = np.full((len(leaves), len(palette)), big, dtype=np.int64)
    cost[np.arange(len(leaves)), leaves] = 0
    while len(cost) > 1:
        best = cost.min(axis=1, keepdims=True)
        child = np.minimum(cost, best + 1)
        cost = child[0::2] + child[1::2]
    return int(cost.min()) + 1


__all__ = [
    "LambdaOracle",
    "brute_lambda",
    "brute_lambdas",
    "canonical",
    "dp_min_conflicts",
    "enumerate_shortest_sequences",
]
