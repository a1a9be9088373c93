"""Choosing the left-to-right order of the segments.

``n_of(p, order)`` is the best a segmented layout can do for a fixed order.
This module searches over orders: exhaustively, by a derandomized
conditional-expectation rule, and greedily. It also rearranges an optimal
coloring into segments by moving subtrees, and builds partitions on which a
bad order is provably expensive.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Iterator, Sequence

import numpy as np

from .bitmatcher import bit_matcher_sequence, complexity
from .errors import InvalidKW, NotOptimalInput, TcamError, TooManyPermutations
from .model import (
    LeafColoring,
    Partition,
    TrieColoring,
    as_partition,
    coloring_from_node_levels,
    conflicts,
    induced_partition,
    node_levels,
    validate_partition,
)
from .segments import color_segments_fast

MAX_ORDERINGS = 10**7
TIE_BREAKS = ("smallest", "largest")


@dataclass
class OrderSearchReport:
    best_order: tuple[int, ...]
    best_n: int
    lam: int
    table: list[tuple[tuple[int, ...], int]] | None = field(default=None, repr=False)

    @property
    def gap(self) -> int:
        return self.best_n - self.lam

    @property
    def ratio(self) -> float:
        return self.best_n / self.lam

    def to_dict(self) -> dict:
        out = {
            "order": list(self.best_order),
            "n": self.best_n,
            "lambda": self.lam,
            "gap": self.gap,
            "ratio": self.ratio,
        }
        if self.table is not None:
            out["table"] = [{"order": list(o), "n": n} for o, n in self.table]
        return out

    def to_text(self) -> str:
        lines = [f"order   {','.join(map(str, self.best_order))}",
                 f"N       {self.best_n}",
                 f"lambda  {self.lam}",
                 f"gap     {self.gap}",
                 f"ratio   {self.ratio:.4f}"]
        if self.table is not None:
            lines.append("")
            lines.append("order\tN")
            lines.extend(f"{','.join(map(str, o))}\t{n}" for o, n in self.table)
        return "\n".join(lines)


def _count_runs(width: int, runs: Sequence[tuple[int, int]]) -> int:
    return color_segments_fast(LeafColoring(width, tuple(runs)))[0]


def order_cost(p: Partition, order: Sequence[int]) -> int:
    return _count_runs(p.width, [(t, p.weights[t - 1]) for t in order])


# --------------------------------------------------------------------------
# Exhaustive search
# --------------------------------------------------------------------------


def distinct_orderings(values: Sequence[int]) -> int:
    """Number of orderings left after merging equal values and mirror images."""
    total = factorial(len(values))
    for v in set(values):
        total //= factorial(values.count(v))
    palindromes = _palindromic_orderings(list(values))
    return (total + palindromes) // 2


def _palindromic_orderings(values: list[int]) -> int:
    counts: dict[int, int] = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    if sum(c % 2 for c in counts.values()) > len(values) % 2:
        return 0
    halves = [c // 2 for c in counts.values()]
    total = factorial(sum(halves))
    for h in halves:
        total //= factorial(h)
    return total


def multiset_permutations(values: list[int]) -> Iterator[tuple[int, ...]]:
    # classic next-permutation walk over the sorted values
    a = sorted(values)
    n = len(a)
    while True:
        yield tuple(a)
        i = n - 2
        while i >= 0 and a[i] >= a[i + 1]:
            i -= 1
        if i < 0:
            return
        j = n - 1
        while a[j] <= a[i]:
            j -= 1
        a[i], a[j] = a[j], a[i]
        a[i + 1:] = reversed(a[i + 1:])


def _ids_for(values: tuple[int, ...], p: Partition) -> tuple[int, ...]:
    pools: dict[int, list[int]] = {}
    for t in range(p.k, 0, -1):
        pools.setdefault(p.weights[t - 1], []).append(t)
    return tuple(pools[v].pop() for v in values)


def canonical_orderings(p: Partition) -> Iterator[tuple[int, ...]]:
    """One representative per class of orders with equal cost.

    Orders that differ by swapping equal parts, or by reading the whole layout
    backwards, give the same number of conflicts. The representative is the
    lexicographically smallest order of target ids in its class.
    """
    for values in multiset_permutations(list(p.weights)):
        mirrored = values[::-1]
        if values <= mirrored:
            yield min(_ids_for(values, p), _ids_for(mirrored, p))


def exhaustive_best_order(
    p: Partition | Sequence[int], keep_table: bool = False, limit: int = MAX_ORDERINGS
) -> OrderSearchReport:
    """Exact minimum of ``n_of`` over all segment orders.

    Ties go to the lexicographically smallest order of target ids.
    """
    p = as_partition(p)
    count = distinct_orderings(list(p.weights))
    if count > limit:
        raise TooManyPermutations(f"{count} distinct orderings exceed the limit {limit}")
    best: tuple[int, tuple[int, ...]] | None = None
    table = [] if keep_table else None
    for order in canonical_orderings(p):
        n = order_cost(p, order)
        if table is not None:
            table.append((order, n))
        cand = (n, order)
        if best is None or cand < best:
            best = cand
    return OrderSearchReport(best[1], best[0], complexity(p), table)


# --------------------------------------------------------------------------
# Derandomized order
# --------------------------------------------------------------------------


def _mean_gap_free(free: Sequence[int]) -> Fraction:
    # E|i - j| for an ordered pair of distinct positions drawn from ``free``
    n = len(free)
    if n < 2:
        return Fraction(1)
    total = sum(abs(a - b) for a in free for b in free if a != b)
    return Fraction(total, n * (n - 1))


def _mean_gap_to(anchor: int, free: Sequence[int]) -> Fraction:
    if not free:
        return Fraction(1)
    return Fraction(sum(abs(anchor - j) for j in free), len(free))


def _expected_extra(pairs: Sequence[tuple[int, int]], placed: dict[int, int], free: Sequence[int]) -> Fraction:
    both_free = _mean_gap_free(free)
    total = Fraction(0)
    for a, b in pairs:
        ia, ib = placed.get(a), placed.get(b)
        if ia is not None and ib is not None:
            total += abs(ia - ib) - 1
        elif ia is not None:
            total += _mean_gap_to(ia, free) - 1
        elif ib is not None:
            total += _mean_gap_to(ib, free) - 1
        else:
            total += both_free - 1
    return total


def shift_pairs(p: Partition | Sequence[int]) -> list[tuple[int, int]]:
    """(child color, parent color) of every non-root conflict in a Bit Matcher coloring."""
    return [(t.sender, t.receiver) for t in bit_matcher_sequence(p) if t.receiver]


def derandomized_order(p: Partition | Sequence[int]) -> tuple[int, ...]:
    """Fix positions left to right, each time minimizing the expected shifting cost.

    Each conflict of an optimal coloring costs ``|i - j| - 1`` extra conflicts
    when its color lands in position ``i`` and its parent's color in ``j``.
    With some positions fixed and the rest uniformly random, the expected
    total is exact to compute, and choosing the color with the smallest
    expectation at every step never increases it.
    """
    p = as_partition(p)
    pairs = shift_pairs(p)
    placed: dict[int, int] = {}
    order: list[int] = []
    remaining = list(range(1, p.k + 1))
    for pos in range(1, p.k + 1):
        free = list(range(pos + 1, p.k + 1))
        best = None
        for c in remaining:
            placed[c] = pos
            score = _expected_extra(pairs, placed, free)
            del placed[c]
            if best is None or score < best[0]:
                best = (score, c)
        placed[best[1]] = pos
        order.append(best[1])
        remaining.remove(best[1])
    return tuple(order)


def shift_estimate(p: Partition | Sequence[int], order: Sequence[int]) -> int:
    """Optimum plus ``|i - j| - 1`` per conflict: an upper bound on ``n_of(p, order)``."""
    p = as_partition(p)
    pos = {t: i for i, t in enumerate(order)}
    return complexity(p) + sum(abs(pos[a] - pos[b]) - 1 for a, b in shift_pairs(p))


def derandomized_guarantee(lam: int, k: int) -> Fraction:
    """Expected shift estimate of a uniformly random order; the derandomized order never exceeds it."""
    return lam + Fraction((lam - 1) * (k - 2), 3)


def derandomized_bound(n_best: int, k: int) -> Fraction:
    """``n_best * (k+1)/3 - (k-2)(k+1)/6``; tighter than :func:`derandomized_guarantee`
    and not always met (``[3, 7, 6]`` is a counterexample)."""
    return Fraction(n_best * (k + 1), 3) - Fraction((k - 2) * (k + 1), 6)


# --------------------------------------------------------------------------
# Greedy
# --------------------------------------------------------------------------


def greedy_order(p: Partition | Sequence[int], tie_break: str = "smallest") -> tuple[int, ...]:
    """Place parts left to right, each minimizing the conflicts of prefix + one residual segment.

    Ties between equally good parts go to the smallest part value
    (``tie_break="smallest"``) or the largest (``"largest"``), then to the
    smallest target id.
    """
    if tie_break not in TIE_BREAKS:
        raise TcamError(f"tie_break must be one of {TIE_BREAKS}")
    p = as_partition(p)
    sign = 1 if tie_break == "smallest" else -1
    rest_color = p.k + 1
    order: list[int] = []
    placed_sum = 0
    remaining = list(range(1, p.k + 1))
    while remaining:
        best = None
        for t in remaining:
            w = p.weights[t - 1]
            runs = [(u, p.weights[u - 1]) for u in order] + [(t, w)]
            residual = p.total - placed_sum - w
            if residual:
                runs.append((rest_color, residual))
            key = (_count_runs(p.width, runs), sign * w, t)
            if best is None or key < best:
                best = key
        t = best[2]
        order.append(t)
        remaining.remove(t)
        placed_sum += p.weights[t - 1]
    return tuple(order)


# --------------------------------------------------------------------------
# Moving subtrees into segment order
# --------------------------------------------------------------------------


def shift_bound(lam: int, k: int) -> Fraction:
    return Fraction(lam * (k - 1)) - Fraction((k - 2) * (k + 1), 2)


def shift_to_segments(c: TrieColoring, order: Sequence[int]) -> TrieColoring:
    """Rearrange an optimal coloring so its leaves are the segments in ``order``.

    Work top-down. At each depth the nodes are stably sorted by the position
    of their color in ``order``, carrying their subtrees along. Nodes that
    agree with their parent stay put relative to each other; stray conflict
    nodes slide to their color's block, and several strays at one depth end
    up in ``order``'s relative order.
    """
    order = tuple(order)
    k = len(order)
    if sorted(order) != list(range(1, k + 1)):
        raise TcamError(f"{order} is not a permutation of 1..{k}")
    p = validate_partition(induced_partition(c, k), c.width)
    n_in = conflicts(c)[0]
    lam = complexity(p)
    if n_in != lam:
        raise NotOptimalInput(f"coloring has {n_in} conflicts, but the optimum for {p} is {lam}")
    rank = np.zeros(k + 1, dtype=np.int64)
    for pos, t in enumerate(order):
        rank[t] = pos
    orig = node_levels(c)
    slots = np.zeros(1, dtype=np.int64)
    colored = [orig[0].copy()]
    for d in range(1, c.width + 1):
        children = np.empty(2 * len(slots), dtype=np.int64)
        children[0::2] = 2 * slots
        children[1::2] = 2 * slots + 1
        colors = orig[d][children]
        perm = np.argsort(rank[colors], kind="stable")
        slots = children[perm]
        colored.append(colors[perm])
    return coloring_from_node_levels(c.width, colored)


# --------------------------------------------------------------------------
# Lower-bound instances
# --------------------------------------------------------------------------


def _fill_powers(total: int, count: int) -> list[int]:
    """``count`` powers of two summing to ``total``, each as large as possible in turn."""
    out = []
    for left in range(count, 0, -1):
        x = 1 << (total - (left - 1)).bit_length() - 1
        while x > 1 and not _splittable(total - x, left - 1):
            x >>= 1
        out.append(x)
        total -= x
    return out


def _splittable(total: int, count: int) -> bool:
    # total is a sum of exactly `count` powers of two
    return count == 0 and total == 0 or 0 < count and bin(total).count("1") <= count <= total


def lower_bound_instance(k: int, width: int) -> tuple[Partition, tuple[int, ...], tuple[int, ...]]:
    """A partition with a costly order, its costly order and a cheap order.

    The first two parts split the left half of the address space into two
    numbers with alternating bits; the rest are powers of two filling the
    right half, in ascending order. Putting the second part last makes the
    low bits cost one conflict per part per two levels.
    """
    if k < 3 or width < 2 or k - 2 > 1 << (width - 1):
        raise InvalidKW(f"need k >= 3, W >= 2 and k - 2 <= 2^(W-1); got k={k}, W={width}")
    half = 1 << (width - 1)
    if width % 2:
        p1 = half // 3
        p2 = 2 * p1 + 1
    else:
        p1 = -(-half // 3)
        p2 = 2 * p1 - 1
    rest = sorted(_fill_powers(half, k - 2))
    p = validate_partition([p1, p2] + rest, width)
    bad = (1,) + tuple(range(3, k + 1)) + (2,)
    good = tuple(range(1, k + 1))
    return p, bad, good


def lower_bound_ratio(k: int, width: int) -> Fraction:
    lg = k.bit_length() - 1
    return Fraction((width - lg) // 2 * (k - 1) + 1, width // 2 + (k - 1))


__all__ = [
    "MAX_ORDERINGS",
    "OrderSearchReport",
    "canonical_orderings",
    "derandomized_bound",
    "derandomized_guarantee",
    "derandomized_order",
    "distinct_orderings",
    "exhaustive_best_order",
    "greedy_order",
    "lower_bound_instance",
    "lower_bound_ratio",
    "multiset_permutations",
    "order_cost",
    "shift_bound",
    "shift_estimate",
    "shift_pairs",
    "shift_to_segments",
]
