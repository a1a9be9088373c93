"""Structure of transaction sequences and colorings.

* :func:`transactions_graph` links the targets that trade small blocks
  before any target runs dry.
* :func:`fragmentation` counts how many separate runs each target occupies.
* :func:`neighbor_ordered_sequence` orders the transactions of a
  minimum-conflict coloring so that every one recolors leaves to the color of
  an adjacent leaf.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import MultipleZeroTargets, NotMinimalColoring, StateSpaceTooLarge, UnrealizableSequence
from .model import (
    LeafColoring,
    Partition,
    Transaction,
    TrieColoring,
    as_partition,
    check_explicit_width,
    conflicts,
    node_levels,
    source_weights,
)
from .oracles import dp_min_conflicts


@dataclass(frozen=True)
class TransactionsGraph:
    k: int
    edges: frozenset[tuple[int, int]]
    level: int
    transactions: tuple[Transaction, ...]

    @property
    def is_clique(self) -> bool:
        return len(self.edges) == self.k * (self.k - 1) // 2

    def edge_list(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "level": self.level,
            "edges": [list(e) for e in self.edge_list()],
            "transactions": [str(t) for t in self.transactions],
            "clique": self.is_clique,
        }

    def to_text(self) -> str:
        lines = [f"L {self.level}", f"clique {'yes' if self.is_clique else 'no'}"]
        lines += [f"edge {i} {j}" for i, j in self.edge_list()]
        lines += [f"uses {t}" for t in self.transactions]
        return "\n".join(lines)


def _net(weights: Sequence[int], seq: Sequence[Transaction]) -> list[int]:
    w = list(weights)
    for t in seq:
        w[t.sender - 1] -= t.size
        if t.receiver:
            w[t.receiver - 1] += t.size
    return w


def transactions_graph(
    seq: Sequence[Transaction], source: Partition | Sequence[int] | None = None
) -> TransactionsGraph:
    """Graph on targets ``1..k`` joining the two ends of every transaction up to the cutoff.

    The cutoff is the largest ``L`` such that applying all transactions of size
    at most ``2^L`` (in any order) leaves every weight positive. ``L`` is
    reported as the level of the largest transaction actually included, so a
    cutoff that adds nothing new does not raise it; it is ``-1`` when no
    transaction can be included.
    """
    seq = tuple(seq)
    sinks = sum(1 for t in seq if t.receiver == 0)
    if sinks != 1:
        raise MultipleZeroTargets(f"expected exactly one transaction into target 0, found {sinks}")
    if source is None:
        weights = source_weights(seq)
    else:
        weights = list(as_partition(source).weights)
    k = len(weights)
    if any(max(t.sender, t.receiver) > k for t in seq):
        raise UnrealizableSequence(f"sequence names a target outside 1..{k}")
    if any(_net(weights, seq)):
        raise UnrealizableSequence(f"sequence does not zero {weights}")
    top = max(t.level for t in seq)
    chosen: tuple[Transaction, ...] = ()
    for cut in range(top, -1, -1):
        subset = tuple(t for t in seq if t.level <= cut)
        if all(x > 0 for x in _net(weights, subset)):
            chosen = subset
            break
    level = max((t.level for t in chosen), default=-1)
    edges = frozenset((min(t.sender, t.receiver), max(t.sender, t.receiver)) for t in chosen)
    return TransactionsGraph(k, edges, level, chosen)


@dataclass(frozen=True)
class FragmentationProfile:
    counts: tuple[int, ...]

    @property
    def maximum(self) -> int:
        return max(self.counts, default=0)

    def to_dict(self) -> dict:
        return {"segments": list(self.counts), "max": self.maximum}


def fragmentation(c: TrieColoring | LeafColoring, k: int | None = None) -> FragmentationProfile:
    """Number of maximal leaf runs of each color ``1..k``."""
    lc = c if isinstance(c, LeafColoring) else LeafColoring.of(c)
    runs = lc.merged().runs
    k = max((color for color, _ in runs), default=0) if k is None else k
    counts = [0] * k
    for color, _ in runs:
        counts[color - 1] += 1
    return FragmentationProfile(tuple(counts))


# --------------------------------------------------------------------------
# Neighbor-ordered sequences
# --------------------------------------------------------------------------


def recolors_neighbor(leaves: np.ndarray, width: int, prefix: str, t: Transaction) -> bool:
    """Whether applying ``t`` at node ``prefix`` gives its leaves the color of an adjacent leaf."""
    span = 1 << (width - len(prefix))
    lo = (int(prefix, 2) if prefix else 0) * span
    hi = lo + span
    return (lo > 0 and leaves[lo - 1] == t.receiver) or (hi < len(leaves) and leaves[hi] == t.receiver)


def _verify_minimal(c: TrieColoring) -> None:
    lc = LeafColoring.of(c)
    try:
        best = dp_min_conflicts(lc)
    except StateSpaceTooLarge:
        return
    have = conflicts(c)[0]
    if have != best:
        raise NotMinimalColoring(f"coloring has {have} conflicts, the minimum for its leaves is {best}")


def neighbor_ordered_sequence(
    c: TrieColoring, verify: bool = True
) -> tuple[tuple[Transaction, ...], list[str]]:
    """Bottom-up transactions of ``c``, each recoloring toward a neighboring color.

    Returns the sequence and the node prefix each transaction deletes. The
    order comes from a recursion on subtrees: first solve every subtree that
    hangs off the block of nodes sharing the root's color, then walk the
    leaves outward from one leaf of that block (left first, then right) and
    delete each hanging subtree the walk runs into.
    """
    check_explicit_width(c.width)
    if verify:
        _verify_minimal(c)
    width = c.width
    levels = node_levels(c)
    seq: list[Transaction] = []
    where: list[str] = []

    def leaf_range(depth: int, index: int) -> tuple[int, int]:
        span = 1 << (width - depth)
        return index * span, (index + 1) * span

    def solve(depth: int, index: int) -> None:
        color = levels[depth][index]
        # block of nodes joined to (depth, index) by a path of its own color
        hanging: list[tuple[int, int]] = []
        block_leaf = None
        stack = [(depth, index)]
        while stack:
            d, i = stack.pop()
            if d == width:
                if block_leaf is None or i < block_leaf:
                    block_leaf = i
                continue
            for j in (2 * i, 2 * i + 1):
                if levels[d + 1][j] == color:
                    stack.append((d + 1, j))
                else:
                    hanging.append((d + 1, j))
        if block_leaf is None:
            raise NotMinimalColoring("no leaf shares the color of its subtree root")
        hanging.sort(key=lambda h: leaf_range(*h)[0])
        for d, i in hanging:
            solve(d, i)
        starts = [leaf_range(d, i)[0] for d, i in hanging]
        left = [h for h, s in zip(hanging, starts) if s < block_leaf]
        right = [h for h, s in zip(hanging, starts) if s > block_leaf]
        for d, i in reversed(left):
            _emit(d, i, color)
        for d, i in right:
            _emit(d, i, color)

    def _emit(d: int, i: int, parent_color: int) -> None:
        seq.append(Transaction(int(levels[d][i]), 1 << (width - d), int(parent_color)))
        where.append(format(i, f"0{d}b"))

    solve(0, 0)
    seq.append(Transaction(int(levels[0][0]), 1 << width, 0))
    where.append("")
    return tuple(seq), where


def check_neighbor_order(c: TrieColoring, seq: Sequence[Transaction], where: Sequence[str]) -> list[int]:
    """Indices of transactions (other than the last) that fail the neighbor condition."""
    leaves = c.leaf_colors().copy()
    bad = []
    for n, (t, prefix) in enumerate(zip(seq[:-1], where[:-1])):
        span = 1 << (c.width - len(prefix))
        lo = int(prefix, 2) * span
        if not (leaves[lo:lo + span] == t.sender).all() or not recolors_neighbor(leaves, c.width, prefix, t):
            bad.append(n)
        leaves[lo:lo + span] = t.receiver
    return bad


__all__ = [
    "FragmentationProfile",
    "TransactionsGraph",
    "check_neighbor_order",
    "fragmentation",
    "neighbor_ordered_sequence",
    "recolors_neighbor",
    "transactions_graph",
]
