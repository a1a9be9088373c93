"""Partitions whose every shortest sequence must contain chosen transactions.

Scaling a partition by 8 and then moving one unit from ``receiver`` to
``sender`` leaves ``sender`` one above a multiple of 8 and ``receiver`` one
below, and the cheapest way to fix both low bits at once is the unit
transaction ``sender -(1)-> receiver``. Repeating the step forces a whole list
of transactions; forcing every pair of targets gives a clique of
transactions.
"""
from __future__ import annotations

from typing import Sequence

from .errors import BadK, BadTargetIds, TcamError
from .model import Partition, Transaction, as_partition, is_power_of_two, validate_partition

FORCING_FACTOR = 8


def _check_ids(k: int, sender: int, receiver: int) -> None:
    if sender == receiver or not (1 <= sender <= k and 1 <= receiver <= k):
        raise BadTargetIds(f"need distinct targets in 1..{k}, got sender={sender}, receiver={receiver}")


def force_transaction(
    p: Partition | Sequence[int], sender: int, receiver: int, factor: int = FORCING_FACTOR
) -> Partition:
    """Scale ``p`` by ``factor`` and move one unit from ``receiver`` to ``sender``.

    With the default factor 8 every shortest sequence of the result contains
    ``sender -(1)-> receiver``. Smaller factors are accepted for experiments.
    """
    p = as_partition(p)
    _check_ids(p.k, sender, receiver)
    if factor < 2 or not is_power_of_two(factor):
        raise TcamError(f"factor must be a power of two >= 2, got {factor}")
    q = [factor * x for x in p.weights]
    q[receiver - 1] -= 1
    q[sender - 1] += 1
    return validate_partition(q, p.width + factor.bit_length() - 1)


def force_sequence(p0: Partition | Sequence[int], pairs: Sequence[tuple[int, int]]) -> Partition:
    """Partition forcing ``sender -(8^m)-> receiver`` for the ``m``-th pair (from 0).

    Built from the last pair inwards: the last pair is forced on ``p0`` first
    and each earlier pair wraps the result, so after the forced transactions
    run the weights are ``8^len(pairs) * p0``.
    """
    p = as_partition(p0)
    for sender, receiver in pairs:
        _check_ids(p.k, sender, receiver)
    for sender, receiver in reversed(list(pairs)):
        p = force_transaction(p, sender, receiver)
    return p


def forced_transactions(pairs: Sequence[tuple[int, int]]) -> tuple[Transaction, ...]:
    return tuple(Transaction(s, FORCING_FACTOR ** m, r) for m, (s, r) in enumerate(pairs))


def clique_pairs(k: int) -> list[tuple[int, int]]:
    """All ``(i, j)`` with ``1 <= j < i <= k``, sorted."""
    return [(i, j) for i in range(2, k + 1) for j in range(1, i)]


def clique_partition(k: int, p0: Partition | Sequence[int]) -> Partition:
    """Partition whose shortest sequences trade between every pair of targets."""
    if k < 2:
        raise BadK(f"k must be at least 2, got {k}")
    p0 = as_partition(p0)
    if p0.k != k:
        raise BadK(f"base partition has {p0.k} parts, expected {k}")
    return force_sequence(p0, clique_pairs(k))


__all__ = [
    "FORCING_FACTOR",
    "clique_pairs",
    "clique_partition",
    "force_sequence",
    "force_transaction",
    "forced_transactions",
]
