"""Exhaustive searches over partitions.

The segment-optimality report finds every partition of ``2^W`` whose best
segmented layout needs more rules than its optimum. Work is grouped by
unordered partition (all orderings share the optimum and the best layout
cost), optionally spread over processes, and merged in sorted order.
"""
from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from math import comb
from typing import Iterable, Iterator

from .bitmatcher import complexity
from .errors import BudgetExceeded
from .model import Partition, validate_partition
from .ordering import exhaustive_best_order, multiset_permutations

DEFAULT_BUDGET = 10**7


def integer_partitions(n: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    """Unordered partitions of ``n`` as non-increasing tuples, in reverse lexicographic order."""
    largest = n if largest is None else min(largest, n)
    if n == 0:
        yield ()
        return
    for first in range(largest, 0, -1):
        for rest in integer_partitions(n - first, first):
            yield (first,) + rest


def partitions_into(n: int, k: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    """Unordered partitions of ``n`` into exactly ``k`` positive parts, non-increasing."""
    largest = n if largest is None else min(largest, n)
    if k == 0:
        if n == 0:
            yield ()
        return
    # the first part is at least ceil(n / k) and leaves room for k - 1 ones
    for first in range(min(largest, n - k + 1), -(-n // k) - 1, -1):
        for rest in partitions_into(n - first, k - 1, first):
            yield (first,) + rest


def ordered_count(width: int, k: int) -> int:
    return comb((1 << width) - 1, k - 1)


def _check_budget(count: int, budget: int) -> None:
    if count > budget:
        raise BudgetExceeded(f"{count} ordered partitions exceed the budget {budget}")


def enumerate_partitions(width: int, k: int, budget: int = DEFAULT_BUDGET) -> Iterator[Partition]:
    """Every ordered partition of ``2^width`` into ``k`` positive parts, lexicographically."""
    total = 1 << width
    if not 1 <= k <= total:
        return
    _check_budget(ordered_count(width, k), budget)

    def walk(prefix: list[int], left: int, slots: int) -> Iterator[list[int]]:
        if slots == 1:
            yield prefix + [left]
            return
        for x in range(1, left - slots + 2):
            yield from walk(prefix + [x], left - x, slots - 1)

    for weights in walk([], total, k):
        yield Partition(tuple(weights), width)


@dataclass(frozen=True)
class GapRow:
    partition: tuple[int, ...]
    lam: int
    min_n: int

    @property
    def gap(self) -> int:
        return self.min_n - self.lam


@dataclass
class SegmentReport:
    width: int
    ks: tuple[int, ...]
    rows: list[GapRow]
    ordered_checked: int
    unordered_checked: int

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["partition", "lambda", "minN", "gap"])
        for r in self.rows:
            writer.writerow([",".join(map(str, r.partition)), r.lam, r.min_n, r.gap])
        buf.write(
            f"# W={self.width} k={','.join(map(str, self.ks))}: "
            f"{self.ordered_checked} ordered partitions ({self.unordered_checked} unordered), "
            f"{len(self.rows)} with a gap\n"
        )
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "width": self.width,
            "k": list(self.ks),
            "ordered_checked": self.ordered_checked,
            "unordered_checked": self.unordered_checked,
            "rows": [
                {"partition": list(r.partition), "lambda": r.lam, "minN": r.min_n, "gap": r.gap}
                for r in self.rows
            ],
        }


def _shard(args: tuple[int, list[tuple[int, ...]]]) -> list[GapRow]:
    width, shard = args
    out = []
    for parts in shard:
        p = validate_partition(parts, width)
        lam = complexity(p)
        best = exhaustive_best_order(p).best_n
        if best > lam:
            out.extend(GapRow(values, lam, best) for values in multiset_permutations(list(parts)))
    return out


def _chunks(items: Iterable, size: int) -> Iterator[list]:
    chunk = []
    for x in items:
        chunk.append(x)
        if len(chunk) == size:
            yield chunk
            chunk = []
    if chunk:
        yield chunk


def segment_optimality_report(
    width: int,
    k: int | str = "all",
    budget: int = DEFAULT_BUDGET,
    jobs: int = 1,
    shard_size: int = 2000,
) -> SegmentReport:
    """Ordered partitions of ``2^width`` with no segmented layout of optimal size.

    ``k`` is a part count or ``"all"``. The budget caps the number of ordered
    partitions the run stands for.
    """
    total = 1 << width
    ks = tuple(range(1, total + 1)) if k == "all" else (int(k),)
    ordered = sum(ordered_count(width, kk) for kk in ks if 1 <= kk <= total)
    _check_budget(ordered, budget)

    unordered = [parts for kk in ks for parts in partitions_into(total, kk)]
    shards = ((width, s) for s in _chunks(unordered, shard_size))
    rows: list[GapRow] = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for part in pool.map(_shard, shards):
                rows.extend(part)
    else:
        for part in map(_shard, shards):
            rows.extend(part)
    rows.sort(key=lambda r: (len(r.partition), r.partition))
    return SegmentReport(width, ks, rows, ordered, len(unordered))


__all__ = [
    "DEFAULT_BUDGET",
    "GapRow",
    "SegmentReport",
    "enumerate_partitions",
    "integer_partitions",
    "ordered_count",
    "partitions_into",
    "segment_optimality_report",
]
