"""Smallest longest-prefix-match rule tables for weighted traffic splitting.

A partition ``[p_1, ..., p_k]`` of ``2^W`` addresses among ``k`` targets is
realized by a table of prefix rules. :func:`complexity` gives the fewest rules
possible, :func:`synthesize` builds such a table, and :func:`n_of` gives the
fewest rules when every target must occupy one contiguous address range in a
given order.
"""
from .bitmatcher import bit_matcher_sequence, complexity, realize_sequence, synthesize
from .errors import InvariantViolation, TcamError
from .forcing import clique_partition, force_sequence, force_transaction
from .harness import enumerate_partitions, segment_optimality_report
from .model import (
    LeafColoring,
    Partition,
    TcamTable,
    Transaction,
    TrieColoring,
    parse_partition,
    parse_sequence,
    parse_table,
    validate_partition,
)
from .oracles import brute_lambda, dp_min_conflicts, enumerate_shortest_sequences
from .ordering import (
    OrderSearchReport,
    derandomized_order,
    exhaustive_best_order,
    greedy_order,
    lower_bound_instance,
    shift_to_segments,
)
from .segments import color_segments_fast, color_segments_full, n_of, ortc
from .structure import fragmentation, neighbor_ordered_sequence, transactions_graph

__version__ = "0.1.0"

lambda_of = complexity

__all__ = [
    "InvariantViolation",
    "LeafColoring",
    "OrderSearchReport",
    "Partition",
    "TcamError",
    "TcamTable",
    "Transaction",
    "TrieColoring",
    "bit_matcher_sequence",
    "brute_lambda",
    "clique_partition",
    "color_segments_fast",
    "color_segments_full",
    "complexity",
    "derandomized_order",
    "dp_min_conflicts",
    "enumerate_partitions",
    "enumerate_shortest_sequences",
    "exhaustive_best_order",
    "force_sequence",
    "force_transaction",
    "fragmentation",
    "greedy_order",
    "lambda_of",
    "lower_bound_instance",
    "n_of",
    "neighbor_ordered_sequence",
    "ortc",
    "parse_partition",
    "parse_sequence",
    "parse_table",
    "realize_sequence",
    "segment_optimality_report",
    "shift_to_segments",
    "synthesize",
    "transactions_graph",
    "validate_partition",
]
