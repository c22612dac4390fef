"""Shared fixtures and independent brute-force oracles.

The oracles here deliberately avoid the library's optimized paths
(correlation profiles, reduced offset enumeration, chunked simulation)
so the tests compare two genuinely different routes to the same answer.
"""

from __future__ import annotations

import pytest

from schedseq.constructor import ScheduleSequenceSet
from schedseq.seqcore import ScheduleSequence, Symbol


def seq_from_str(text: str, owner_group: int) -> ScheduleSequence:
    return ScheduleSequence.from_symbols(
        [Symbol.from_str(tok) for tok in text.split()], owner_group)


@pytest.fixture
def three_node_set() -> ScheduleSequenceSet:
    """Hand-written (M=2, K=3, L=12) set known to satisfy the guarantee."""
    return ScheduleSequenceSet((
        seq_from_str("T1 T1 T1 T1 T1 T1 R1 R1 R1 R2 R2 R2", 1),
        seq_from_str("T1 R1 T1 R2 T1 R1 T1 R2 T1 R1 T1 R2", 1),
        seq_from_str("T2 R1 R1 T2 R1 R1 T2 R1 R1 T2 R1 R1", 2),
    ))


@pytest.fixture
def two_node_set() -> ScheduleSequenceSet:
    """Tiny (M=2, K=2, L=4) set; small enough for full offset enumeration."""
    return ScheduleSequenceSet((
        seq_from_str("T1 T1 R2 R2", 1),
        seq_from_str("T2 R1 T2 R1", 2),
    ))


def pair_succeeds_at(sset: ScheduleSequenceSet, i: int, j: int,
                     offsets: dict[int, int], t: int) -> bool:
    """Direct read of the success predicate at one slot, no vectorization."""
    division = sset.division
    m = division.group_of(i)
    L = sset.L

    def action(x: int) -> int:
        return int(sset.sequences[x - 1].codes[(t + offsets.get(x, 0)) % L])

    if action(i) != m or action(j) != -m:
        return False
    return all(action(x) != m
               for x in division.members(m) if x not in (i, j))


def pair_ok_for_offsets(sset: ScheduleSequenceSet, i: int, j: int,
                        offsets: dict[int, int]) -> bool:
    return any(pair_succeeds_at(sset, i, j, offsets, t) for t in range(sset.L))


def brute_force_pair_check(sset: ScheduleSequenceSet, i: int, j: int) -> bool:
    """Quantify over the FULL K-node offset space, slot by slot."""
    L, K = sset.L, sset.K
    from itertools import product
    for combo in product(range(L), repeat=K):
        offsets = {x + 1: combo[x] for x in range(K)}
        if not pair_ok_for_offsets(sset, i, j, offsets):
            return False
    return True


def brute_force_completion(sset: ScheduleSequenceSet, offsets: dict[int, int],
                           max_slots: int) -> int | None:
    """Slot-by-slot completion time; None when some pair never succeeds."""
    K, L, W = sset.K, sset.L, sset.W
    first: dict[tuple[int, int], int] = {}
    for t in range(max_slots):
        actions = {x: int(sset.sequences[x - 1].codes[(t + offsets.get(x, 0)) % L])
                   for x in range(1, K + 1)}
        for m in range(1, W + 1):
            transmitters = [x for x, a in actions.items() if a == m]
            if len(transmitters) != 1:
                continue
            tx = transmitters[0]
            for rx, a in actions.items():
                if a == -m and (tx, rx) not in first:
                    first[(tx, rx)] = t
        if len(first) == K * (K - 1):
            return 1 + max(first.values())
    return None


def brute_force_cross_correlation(bits_a, bits_b, tau: int) -> int:
    L = len(bits_a)
    return sum(int(bits_a[t]) * int(bits_b[(t + tau) % L]) for t in range(L))
