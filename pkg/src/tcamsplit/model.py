"""Domain types and lossless conversions between the views of a rule table.

A longest-prefix-match table over ``W``-bit addresses can be looked at in
three equivalent ways, and this module converts between them:

* a :class:`TcamTable`, an ordered list of ``prefix -> target`` rules;
* a :class:`TrieColoring`, the set of marked trie nodes (one per rule);
* a transaction sequence, obtained by deleting rules bottom-up and recording
  which block of addresses moves from which target to which.

Targets are 1-based. Target ``0`` is the "unallocated" pseudo target and is
never used as a color.

Prefixes are plain bit strings (``""`` is the root, ``"01"`` the node reached
by going left then right). Weights are Python ints, so nothing overflows.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import (
    InsufficientWeight,
    NonPositiveWeight,
    OutOfRange,
    SumNotPowerOfTwo,
    TcamError,
    UnmatchedAddress,
    WidthCapExceeded,
    WidthMismatch,
)

# Operations that materialize every trie node or leaf refuse wider tries.
MAX_EXPLICIT_WIDTH = 22


def is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def check_explicit_width(width: int, cap: int | None = None) -> None:
    cap = MAX_EXPLICIT_WIDTH if cap is None else cap
    if width > cap:
        raise WidthCapExceeded(f"width {width} exceeds explicit-trie cap {cap}")


# --------------------------------------------------------------------------
# Partitions
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Partition:
    """Addresses per target: ``weights[i]`` addresses go to target ``i + 1``."""

    weights: tuple[int, ...]
    width: int

    @property
    def k(self) -> int:
        return len(self.weights)

    @property
    def total(self) -> int:
        return 1 << self.width

    def __iter__(self):
        return iter(self.weights)

    def __len__(self) -> int:
        return len(self.weights)

    def __getitem__(self, i):
        return self.weights[i]

    def __str__(self) -> str:
        return format_partition(self.weights)

    def permuted(self, order: Sequence[int]) -> list[int]:
        """Weights listed in ``order`` (a sequence of 1-based target ids)."""
        return [self.weights[t - 1] for t in order]


def validate_partition(weights: Iterable[int], width: int | None = None) -> Partition:
    ws = tuple(int(w) for w in weights)
    if not ws:
        raise NonPositiveWeight("a partition needs at least one part")
    for i, w in enumerate(ws, start=1):
        if w <= 0:
            raise NonPositiveWeight(f"weight of target {i} is {w}; all weights must be positive")
    total = sum(ws)
    if not is_power_of_two(total):
        raise SumNotPowerOfTwo(f"weights sum to {total}, which is not a power of two")
    inferred = total.bit_length() - 1
    if width is not None and width != inferred:
        raise WidthMismatch(f"weights sum to 2^{inferred} but width {width} was requested")
    return Partition(ws, inferred)


def as_partition(p: Partition | Iterable[int]) -> Partition:
    return p if isinstance(p, Partition) else validate_partition(p)


def parse_partition(text: str, width: int | None = None) -> Partition:
    try:
        weights = [int(tok) for tok in text.replace(" ", "").split(",") if tok]
    except ValueError as exc:
        raise TcamError(f"cannot parse partition {text!r}") from exc
    return validate_partition(weights, width)


def format_partition(weights: Iterable[int]) -> str:
    return ",".join(str(w) for w in weights)


# --------------------------------------------------------------------------
# Transactions
# --------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Transaction:
    """Move ``size`` addresses from ``sender`` to ``receiver`` (0 discards)."""

    sender: int
    size: int
    receiver: int

    def __post_init__(self):
        if not is_power_of_two(self.size):
            raise TcamError(f"transaction size {self.size} is not a power of two")
        if self.sender < 1 or self.receiver < 0:
            raise TcamError(f"bad endpoints {self.sender} -> {self.receiver}")
        if self.sender == self.receiver:
            raise TcamError(f"transaction from target {self.sender} to itself")

    def __str__(self) -> str:
        return f"{self.sender} -({self.size})-> {self.receiver}"

    @property
    def level(self) -> int:
        return self.size.bit_length() - 1

    def canonical_key(self):
        return (self.size, self.sender, self.receiver)


TransactionSequence = tuple  # tuple[Transaction, ...]

_TX_RE = re.compile(r"^\s*(\d+)\s*-\(\s*(\d+)\s*\)->\s*(\d+)\s*$")


def parse_transaction(text: str) -> Transaction:
    m = _TX_RE.match(text)
    if not m:
        raise TcamError(f"cannot parse transaction {text!r}; expected 'i -(m)-> j'")
    i, size, j = (int(g) for g in m.groups())
    return Transaction(i, size, j)


def parse_sequence(text: str) -> tuple[Transaction, ...]:
    lines = [ln.split("#", 1)[0] for ln in text.splitlines()]
    return tuple(parse_transaction(ln) for ln in lines if ln.strip())


def format_sequence(seq: Iterable[Transaction]) -> str:
    return "\n".join(str(t) for t in seq)


def apply_transaction(weights: Sequence[int], t: Transaction) -> list[int]:
    """Return a copy of ``weights`` (index ``i`` holds target ``i + 1``) after ``t``."""
    k = len(weights)
    if t.sender > k or t.receiver > k:
        raise TcamError(f"transaction {t} refers to a target beyond k={k}")
    out = list(weights)
    if out[t.sender - 1] < t.size:
        raise InsufficientWeight(
            f"target {t.sender} holds {out[t.sender - 1]} but {t} sends {t.size}"
        )
    out[t.sender - 1] -= t.size
    if t.receiver:
        out[t.receiver - 1] += t.size
    return out


def apply_sequence(weights: Sequence[int], seq: Iterable[Transaction]) -> list[int]:
    """Apply transactions in order; raises InsufficientWeight on any negative step."""
    w = list(weights)
    for t in seq:
        w = apply_transaction(w, t)
    return w


def zeroes(weights: Sequence[int], seq: Iterable[Transaction]) -> bool:
    try:
        return not any(apply_sequence(weights, seq))
    except InsufficientWeight:
        return False


def source_weights(seq: Sequence[Transaction], k: int | None = None) -> list[int]:
    """The weight vector that ``seq`` zeroes, recovered from net flows."""
    if k is None:
        k = max((max(t.sender, t.receiver) for t in seq), default=0)
    w = [0] * k
    for t in seq:
        w[t.sender - 1] += t.size
        if t.receiver:
            w[t.receiver - 1] -= t.size
    return w


# --------------------------------------------------------------------------
# Bit-lexicographic order
# --------------------------------------------------------------------------


def bit_reverse(x: int, width: int) -> int:
    if not 0 <= x < (1 << width) and not (width == 0 and x == 0):
        raise OutOfRange(f"{x} does not fit in {width} bits")
    if width == 0:
        return 0
    return int(format(x, f"0{width}b")[::-1], 2)


def bitlex_less(a: int, b: int, width: int) -> bool:
    """True iff ``a`` precedes ``b`` when both are read bit-reversed at ``width`` bits."""
    return bit_reverse(a, width) < bit_reverse(b, width)


# --------------------------------------------------------------------------
# Tables
# --------------------------------------------------------------------------


class Rule(NamedTuple):
    prefix: str
    target: int

    @property
    def length(self) -> int:
        return len(self.prefix)

    @property
    def value(self) -> int:
        return int(self.prefix, 2) if self.prefix else 0

    def pattern(self, width: int) -> str:
        return self.prefix + "*" * (width - len(self.prefix))

    def matches(self, address: int, width: int) -> bool:
        if not self.prefix:
            return True
        return address >> (width - len(self.prefix)) == self.value


def _check_prefix(prefix: str, width: int) -> None:
    if len(prefix) > width or any(ch not in "01" for ch in prefix):
        raise TcamError(f"invalid prefix {prefix!r} for width {width}")


def lpm_sort_key(prefix: str):
    return (-len(prefix), int(prefix, 2) if prefix else 0)


@dataclass(frozen=True)
class TcamTable:
    """Priority-ordered prefix rules; the first matching rule wins."""

    width: int
    rules: tuple[Rule, ...]

    def __post_init__(self):
        for r in self.rules:
            _check_prefix(r.prefix, self.width)
            if r.target < 1:
                raise TcamError(f"rule {r} has a non-positive target")

    def __len__(self) -> int:
        return len(self.rules)

    def lookup(self, address: int) -> int:
        """Target of ``address``; 0 when no rule matches."""
        for r in self.rules:
            if r.matches(address, self.width):
                return r.target
        return 0

    def address_map(self) -> np.ndarray:
        """Target of every address, by first-match semantics (0 = unmatched)."""
        check_explicit_width(self.width)
        out = np.zeros(1 << self.width, dtype=np.int64)
        done = np.zeros(1 << self.width, dtype=bool)
        for r in self.rules:
            span = 1 << (self.width - r.length)
            lo = r.value * span
            free = ~done[lo:lo + span]
            out[lo:lo + span][free] = r.target
            done[lo:lo + span] = True
        return out

    def to_text(self) -> str:
        return "\n".join(f"{r.pattern(self.width)} -> {r.target}" for r in self.rules)

    def lpm_sorted(self) -> "TcamTable":
        return TcamTable(self.width, tuple(sorted(self.rules, key=lambda r: lpm_sort_key(r.prefix))))


_RULE_RE = re.compile(r"^\s*([01*]*)\s*->\s*(\d+)\s*$")


def parse_table(text: str, width: int | None = None) -> TcamTable:
    rules = []
    for ln in text.splitlines():
        ln = ln.split("#", 1)[0]
        if not ln.strip():
            continue
        m = _RULE_RE.match(ln)
        if not m:
            raise TcamError(f"cannot parse rule {ln!r}; expected '<bits padded with *> -> <target>'")
        pattern, target = m.group(1), int(m.group(2))
        if width is None:
            width = len(pattern)
        if len(pattern) != width:
            raise WidthMismatch(f"pattern {pattern!r} is not {width} characters wide")
        prefix = pattern.rstrip("*")
        if "*" in prefix:
            raise TcamError(f"pattern {pattern!r} has an interior wildcard (not a prefix)")
        rules.append(Rule(prefix, target))
    return TcamTable(width or 0, tuple(rules))


# --------------------------------------------------------------------------
# Trie colorings
# --------------------------------------------------------------------------


class Conflict(NamedTuple):
    prefix: str
    color: int
    parent_color: int  # 0 for the root


@dataclass
class TrieColoring:
    """Marked trie nodes; each node takes the color of its closest marked ancestor.

    The root (empty prefix) must be marked. Marks that repeat the inherited
    color are allowed here and dropped by :func:`table_from_coloring`.
    """

    width: int
    marked: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        self.marked = dict(self.marked)
        if "" not in self.marked:
            raise UnmatchedAddress("the root of a trie coloring must be marked")
        for prefix, color in self.marked.items():
            _check_prefix(prefix, self.width)
            if color < 1:
                raise TcamError(f"node {prefix!r} has non-positive color {color}")

    def color_of(self, prefix: str) -> int:
        """Effective color of the node at ``prefix``."""
        for cut in range(len(prefix), -1, -1):
            c = self.marked.get(prefix[:cut])
            if c is not None:
                return c
        raise AssertionError("root is always marked")

    def parent_color(self, prefix: str) -> int:
        return self.color_of(prefix[:-1]) if prefix else 0

    def leaf_colors(self) -> np.ndarray:
        check_explicit_width(self.width)
        out = np.empty(1 << self.width, dtype=np.int64)
        for prefix in sorted(self.marked, key=len):
            span = 1 << (self.width - len(prefix))
            lo = (int(prefix, 2) if prefix else 0) * span
            out[lo:lo + span] = self.marked[prefix]
        return out

    def max_color(self) -> int:
        return max(self.marked.values())


def coloring_from_table(t: TcamTable) -> TrieColoring:
    """Marked-node view of a table, keeping its first-match address map.

    Rules fully shadowed by an earlier rule with a shorter-or-equal prefix
    never fire and are skipped.
    """
    seen: set[str] = set()
    marked: dict[str, int] = {}
    for r in t.rules:
        if any(r.prefix[:cut] in seen for cut in range(r.length + 1)):
            continue
        seen.add(r.prefix)
        marked[r.prefix] = r.target
    if "" not in marked:
        raise UnmatchedAddress("table has no match-all rule, so some addresses may be unmatched")
    return TrieColoring(t.width, marked)


def conflicts(c: TrieColoring) -> tuple[int, list[Conflict]]:
    """Nodes whose color differs from their parent's, plus the root."""
    found = [Conflict("", c.marked[""], 0)]
    for prefix, color in c.marked.items():
        if prefix:
            parent = c.color_of(prefix[:-1])
            if parent != color:
                found.append(Conflict(prefix, color, parent))
    found.sort(key=lambda cf: (len(cf.prefix), cf.prefix))
    return len(found), found


def table_from_coloring(c: TrieColoring) -> TcamTable:
    _, found = conflicts(c)
    rules = sorted((Rule(cf.prefix, cf.color) for cf in found), key=lambda r: lpm_sort_key(r.prefix))
    return TcamTable(c.width, tuple(rules))


def minimal_coloring(c: TrieColoring) -> TrieColoring:
    """Same coloring with redundant marks removed (marks = conflicts)."""
    _, found = conflicts(c)
    return TrieColoring(c.width, {cf.prefix: cf.color for cf in found})


def induced_partition(c: TrieColoring, k: int | None = None) -> list[int]:
    """Leaf count of each color ``1..k`` (``k`` defaults to the largest color)."""
    k = c.max_color() if k is None else k
    counts = [0] * k
    if c.width <= MAX_EXPLICIT_WIDTH:
        binc = np.bincount(c.leaf_colors(), minlength=k + 1)
        return [int(x) for x in binc[1:k + 1]]
    # Wide tries: count by inclusion-exclusion over the marks.
    by_len = sorted(c.marked, key=len)
    for prefix in by_len:
        counts[c.marked[prefix] - 1] += 1 << (c.width - len(prefix))
        parent = c.color_of(prefix[:-1]) if prefix else 0
        if parent:
            counts[parent - 1] -= 1 << (c.width - len(prefix))
    return counts


def sequence_from_coloring(c: TrieColoring) -> tuple[Transaction, ...]:
    """Transactions of deleting the rules bottom-up (smallest blocks first).

    Every non-root conflict ``v`` gives ``color(v) -(2^(W-|v|))-> color(parent)``;
    the root gives ``color(root) -(2^W)-> 0``.
    """
    _, found = conflicts(c)
    ordered = sorted(found, key=lambda cf: (-len(cf.prefix), cf.prefix))
    return tuple(
        Transaction(cf.color, 1 << (c.width - len(cf.prefix)), cf.parent_color) for cf in ordered
    )


def node_levels(c: TrieColoring) -> list[np.ndarray]:
    """Effective node colors, ``levels[d][i]`` = node ``i`` at depth ``d``."""
    check_explicit_width(c.width)
    by_depth: dict[int, list[tuple[int, int]]] = {}
    for prefix, color in c.marked.items():
        if prefix:
            by_depth.setdefault(len(prefix), []).append((int(prefix, 2), color))
    levels = [np.array([c.marked[""]], dtype=np.int64)]
    for d in range(1, c.width + 1):
        row = np.repeat(levels[-1], 2)
        for i, color in by_depth.get(d, ()):
            row[i] = color
        levels.append(row)
    return levels


def coloring_from_node_levels(width: int, levels: Sequence[Sequence[int]]) -> TrieColoring:
    """Build a coloring from explicit node colors, ``levels[d][i]`` = node ``i`` at depth ``d``.

    Only conflicting nodes are marked.
    """
    marked = {"": int(levels[0][0])}
    for d in range(1, width + 1):
        row = np.asarray(levels[d])
        parent = np.repeat(np.asarray(levels[d - 1]), 2)
        for i in np.nonzero(row != parent)[0]:
            marked[format(int(i), f"0{d}b")] = int(row[i])
    return TrieColoring(width, marked)


# --------------------------------------------------------------------------
# Leaf colorings
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class LeafColoring:
    """Colors of all ``2^width`` leaves, run-length encoded left to right."""

    width: int
    runs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        total = 0
        for color, length in self.runs:
            if length <= 0:
                raise TcamError(f"run length {length} is not positive")
            if color < 1:
                raise TcamError(f"run color {color} is not a target id")
            total += length
        if total != 1 << self.width:
            raise TcamError(f"runs cover {total} leaves, expected 2^{self.width}")

    @classmethod
    def from_partition(cls, p: Partition | Iterable[int], order: Sequence[int] | None = None) -> "LeafColoring":
        """Segments of ``p`` laid out left to right in ``order`` (1-based target ids)."""
        p = as_partition(p)
        order = tuple(range(1, p.k + 1)) if order is None else tuple(order)
        if sorted(order) != list(range(1, p.k + 1)):
            raise TcamError(f"{order} is not a permutation of 1..{p.k}")
        return cls(p.width, tuple((t, p.weights[t - 1]) for t in order))

    @classmethod
    def from_leaves(cls, leaves: Iterable[int]) -> "LeafColoring":
        leaves = [int(x) for x in leaves]
        width = len(leaves).bit_length() - 1
        if not is_power_of_two(len(leaves)):
            raise TcamError(f"{len(leaves)} leaves is not a power of two")
        return cls(width, tuple(_runs(leaves)))

    @classmethod
    def of(cls, c: TrieColoring) -> "LeafColoring":
        return cls.from_leaves(c.leaf_colors())

    def merged(self) -> "LeafColoring":
        out: list[tuple[int, int]] = []
        for color, length in self.runs:
            if out and out[-1][0] == color:
                out[-1] = (color, out[-1][1] + length)
            else:
                out.append((color, length))
        return LeafColoring(self.width, tuple(out))

    def is_segmented(self) -> bool:
        colors = [c for c, _ in self.merged().runs]
        return len(colors) == len(set(colors))

    def leaves(self) -> np.ndarray:
        check_explicit_width(self.width)
        return np.repeat(
            np.array([c for c, _ in self.runs], dtype=np.int64),
            np.array([n for _, n in self.runs], dtype=np.int64),
        )

    def colors(self) -> list[int]:
        return sorted({c for c, _ in self.runs})


def _runs(leaves: Sequence[int]) -> list[tuple[int, int]]:
    out: list[tuple[int, int]] = []
    for x in leaves:
        if out and out[-1][0] == x:
            out[-1] = (x, out[-1][1] + 1)
        else:
            out.append((x, 1))
    return out


def color_runs(c: TrieColoring) -> list[tuple[int, int]]:
    """Maximal runs ``(color, length)`` of the leaves of ``c``."""
    leaves = c.leaf_colors()
    if len(leaves) == 0:
        return []
    cut = np.nonzero(np.diff(leaves))[0] + 1
    starts = np.concatenate(([0], cut))
    ends = np.concatenate((cut, [len(leaves)]))
    return [(int(leaves[s]), int(e - s)) for s, e in zip(starts, ends)]


def same_address_map(a: TcamTable | TrieColoring, b: TcamTable | TrieColoring) -> bool:
    def amap(x):
        return x.address_map() if isinstance(x, TcamTable) else x.leaf_colors()

    return a.width == b.width and bool(np.array_equal(amap(a), amap(b)))


__all__ = [
    "MAX_EXPLICIT_WIDTH",
    "Conflict",
    "LeafColoring",
    "Partition",
    "Rule",
    "TcamTable",
    "Transaction",
    "TrieColoring",
    "apply_sequence",
    "apply_transaction",
    "as_partition",
    "bit_reverse",
    "bitlex_less",
    "color_runs",
    "coloring_from_node_levels",
    "coloring_from_table",
    "conflicts",
    "format_partition",
    "format_sequence",
    "induced_partition",
    "is_power_of_two",
    "minimal_coloring",
    "node_levels",
    "parse_partition",
    "parse_sequence",
    "parse_table",
    "parse_transaction",
    "same_address_map",
    "sequence_from_coloring",
    "source_weights",
    "table_from_coloring",
    "validate_partition",
    "zeroes",
]
