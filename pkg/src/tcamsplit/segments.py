"""Minimum-conflict trie colorings that extend a given leaf coloring.

For leaves colored in consecutive segments (one run per color) a purely
local rule suffices: looking at four cousins ``a, b, c, d`` that share a
grandparent, the left parent takes ``b`` if ``b == c`` and ``a`` otherwise,
the right parent ``b`` if ``b == c`` and ``d`` otherwise; the root takes the
color of its right child.

:func:`color_segments_full` applies the rule to an explicit trie,
:func:`color_segments_fast` to run-length encoded levels (so ``W`` may be
huge), and :func:`ortc` handles arbitrary leaf colorings.
"""
from __future__ import annotations

from bisect import bisect_right
from itertools import accumulate
from typing import Iterable, Sequence

import numpy as np

from .errors import NonSegmentedInput
from .model import (
    Conflict,
    LeafColoring,
    Partition,
    Transaction,
    TrieColoring,
    as_partition,
    check_explicit_width,
    coloring_from_node_levels,
)


def _require_segmented(lc: LeafColoring) -> None:
    if not lc.is_segmented():
        raise NonSegmentedInput("each color must occupy a single run of leaves")


def _prefix(depth: int, index: int) -> str:
    return format(index, f"0{depth}b") if depth else ""


def _cousin_rule(row: np.ndarray) -> np.ndarray:
    a, b, c, d = row[0::4], row[1::4], row[2::4], row[3::4]
    same = b == c
    out = np.empty(len(row) // 2, dtype=row.dtype)
    out[0::2] = np.where(same, b, a)
    out[1::2] = np.where(same, b, d)
    return out


def segment_levels(lc: LeafColoring) -> list[np.ndarray]:
    """Explicit node colors, ``levels[d]`` for depth ``d = 0..W``."""
    _require_segmented(lc)
    check_explicit_width(lc.width)
    levels = [lc.leaves()]
    while len(levels[-1]) > 2:
        levels.append(_cousin_rule(levels[-1]))
    if len(levels[-1]) == 2:
        levels.append(levels[-1][1:2].copy())
    levels.reverse()
    return levels


def color_segments_full(lc: LeafColoring) -> TrieColoring:
    """Minimum-conflict extension of a segmented leaf coloring, on the explicit trie."""
    return coloring_from_node_levels(lc.width, segment_levels(lc))


# --------------------------------------------------------------------------
# Run-length implementation
# --------------------------------------------------------------------------


def _push(runs: list[list[int]], color: int, length: int) -> None:
    if runs and runs[-1][0] == color:
        runs[-1][1] += length
    else:
        runs.append([color, length])


def _climb(runs: Sequence[Sequence[int]], depth: int):
    """One level up: return (parent runs, conflicts among the nodes at ``depth``).

    ``runs`` covers the ``2^depth`` nodes at ``depth >= 2``. Only groups of
    four cousins that straddle a run boundary need looking at; every other
    group is monochromatic and simply halves.
    """
    colors = [c for c, _ in runs]
    starts = [0] + list(accumulate(n for _, n in runs))[:-1]
    total = starts[-1] + runs[-1][1]

    def color_at(pos: int) -> int:
        return colors[bisect_right(starts, pos) - 1]

    straddling = sorted({s // 4 for s in starts[1:] if s % 4})
    out: list[list[int]] = []
    found: list[Conflict] = []

    def copy_range(lo: int, hi: int) -> None:
        # [lo, hi) is made of whole groups; every run piece in it has length % 4 == 0
        if lo >= hi:
            return
        i = bisect_right(starts, lo) - 1
        pos = lo
        while pos < hi:
            end = min(hi, starts[i] + runs[i][1])
            _push(out, colors[i], (end - pos) // 2)
            pos = end
            i += 1

    pos = 0
    for g in straddling:
        copy_range(pos, 4 * g)
        a, b, c, d = (color_at(4 * g + j) for j in range(4))
        left = b if b == c else a
        right = b if b == c else d
        _push(out, left, 1)
        _push(out, right, 1)
        for j, (node, parent) in enumerate(zip((a, b, c, d), (left, left, right, right))):
            if node != parent:
                found.append(Conflict(_prefix(depth, 4 * g + j), node, parent))
        pos = 4 * g + 4
    copy_range(pos, total)
    return out, found


def _fast(lc: LeafColoring, trace: list | None = None) -> list[Conflict]:
    runs = [[c, n] for c, n in lc.merged().runs]
    width = lc.width
    found: list[Conflict] = []
    if trace is not None:
        trace.append([tuple(r) for r in runs])
    depth = width
    while depth >= 2:
        runs, level_conflicts = _climb(runs, depth)
        found.extend(level_conflicts)
        depth -= 1
        if trace is not None:
            trace.append([tuple(r) for r in runs])
    if width == 0:
        found.append(Conflict("", runs[0][0], 0))
    else:
        # depth 1: two nodes, root takes the right child's color
        pair = [c for c, n in runs for _ in range(n)]
        root = pair[1]
        for j, node in enumerate(pair):
            if node != root:
                found.append(Conflict(str(j), node, root))
        found.append(Conflict("", root, 0))
        if trace is not None:
            trace.append([(root, 1)])
    found.sort(key=lambda cf: (len(cf.prefix), cf.prefix))
    return found


def color_segments_fast(lc: LeafColoring) -> tuple[int, list[Conflict]]:
    """Conflict count and conflicts of the segmented extension, without an explicit trie."""
    _require_segmented(lc)
    found = _fast(lc)
    return len(found), found


def segment_sequence(lc: LeafColoring) -> tuple[Transaction, ...]:
    """Bottom-up transactions of the segmented extension, from the run-length conflicts."""
    _require_segmented(lc)
    found = sorted(_fast(lc), key=lambda cf: (-len(cf.prefix), cf.prefix))
    return tuple(Transaction(cf.color, 1 << (lc.width - len(cf.prefix)), cf.parent_color) for cf in found)


def segment_profile(lc: LeafColoring) -> list[list[tuple[int, int]]]:
    """Runs ``(color, nodes)`` at each depth, from the leaves (first) up to the root."""
    _require_segmented(lc)
    trace: list = []
    _fast(lc, trace)
    return trace


# --------------------------------------------------------------------------
# ORTC
# --------------------------------------------------------------------------


def _bits(mask: int) -> Iterable[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def ortc(lc: LeafColoring, segmented: bool = False) -> TrieColoring:
    """Minimum-conflict extension of an arbitrary leaf coloring.

    Bottom-up, every node gets a candidate set: the intersection of its
    children's sets when that is non-empty, their union otherwise. Top-down,
    a node keeps its parent's color when it is a candidate and otherwise takes
    its smallest candidate.

    With ``segmented=True`` the input must be segmented.
    """
    if segmented:
        _require_segmented(lc)
    check_explicit_width(lc.width)
    leaves = lc.leaves()
    # color sets as int bitmasks, one python int per node
    sets: list[list[int]] = [[1 << int(c) for c in leaves]]
    while len(sets[-1]) > 1:
        row = sets[-1]
        up = []
        for i in range(0, len(row), 2):
            both = row[i] & row[i + 1]
            up.append(both if both else row[i] | row[i + 1])
        sets.append(up)
    sets.reverse()

    levels: list[list[int]] = []
    root_set = sets[0][0]
    levels.append([next(_bits(root_set))])
    for d in range(1, lc.width + 1):
        parent_row = levels[-1]
        row = []
        for i, cand in enumerate(sets[d]):
            pc = parent_row[i >> 1]
            row.append(pc if cand >> pc & 1 else next(_bits(cand)))
        levels.append(row)
    return coloring_from_node_levels(lc.width, levels)


def n_of(p: Partition | Sequence[int], order: Sequence[int] | None = None) -> int:
    """Conflicts of the segmented extension with the parts of ``p`` laid out in ``order``."""
    p = as_partition(p)
    return color_segments_fast(LeafColoring.from_partition(p, order))[0]


def size_bound(width: int, k: int) -> int:
    """Upper bound on the conflicts of any segmented extension with ``k`` colors."""
    return (width - (k.bit_length() - 1) + 1) * (k - 1) + 1


__all__ = [
    "color_segments_fast",
    "color_segments_full",
    "n_of",
    "ortc",
    "segment_levels",
    "segment_profile",
    "segment_sequence",
    "size_bound",
]
