"""Geometric block search over the advice ordering.

Ranks ``1..N`` are cut into consecutive blocks of sizes ``1, floor(e),
floor(e^2), ...`` (the last one truncated at ``N``).  Blocks whose index
span ``end - start`` is at least 100 are searched with the noisy Grover
routine; smaller ones are scanned classically.  Everything works in rank
space: rank ``r`` stands for the element ``ordering[r]`` and one oracle call
on that element is one query.

If every block reports absence (only possible when a capped quantum search
misses), a terminal classical sweep over all ranks guarantees the answer.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .advice import AdviceDistribution
from .errors import InvalidArgument
from .grover import (
    RoundSchedule,
    block_statistics,
    position_invariant,
    resolve_engine,
    run_block_search,
)
from .quantum import NoiseModel

QUANTUM_SPAN = 100


@dataclass(frozen=True)
class Block:
    start: int
    end: int
    mode: str  # "classical" | "quantum"

    @property
    def size(self) -> int:
        return self.end - self.start + 1

    @property
    def ranks(self) -> range:
        return range(self.start, self.end + 1)


@dataclass(frozen=True)
class BlockPlan:
    blocks: tuple[Block, ...]
    domain_size: int

    def __iter__(self):
        return iter(self.blocks)

    def __len__(self):
        return len(self.blocks)

    def block_of(self, rank: int) -> int:
        """Index of the block containing ``rank``."""
        starts = [b.start for b in self.blocks]
        return bisect.bisect_right(starts, rank) - 1


def block_plan(N: int) -> BlockPlan:
    if N < 1:
        raise InvalidArgument(f"N must be >= 1, got {N}")
    blocks = []
    start = end = 1
    step = 0
    while start <= N:
        mode = "quantum" if end - start >= QUANTUM_SPAN else "classical"
        blocks.append(Block(start, end, mode))
        step += 1
        start = end + 1
        end = min(start + math.floor(math.exp(step)) - 1, N)
    return BlockPlan(tuple(blocks), N)


class AdviceOrdering:
    """Bijection from rank ``1..N`` to element ``1..N``."""

    def __init__(self, permutation):
        perm = np.asarray(permutation, dtype=np.int64)
        n = perm.size
        if n < 1 or not np.array_equal(np.sort(perm), np.arange(1, n + 1)):
            raise InvalidArgument("permutation must be a bijection onto 1..N")
        perm.setflags(write=False)
        self.permutation = perm
        self._identity = bool(np.array_equal(perm, np.arange(1, n + 1)))

    @classmethod
    def identity(cls, N: int) -> "AdviceOrdering":
        return cls(np.arange(1, N + 1))

    @classmethod
    def from_weights(cls, weights) -> "AdviceOrdering":
        """Order elements by decreasing weight (ties keep element order)."""
        w = np.asarray(weights, dtype=float)
        return cls(np.argsort(-w, kind="stable") + 1)

    @property
    def N(self) -> int:
        return self.permutation.size

    def element(self, rank: int) -> int:
        return int(self.permutation[rank - 1])

    def rank_of(self, element: int) -> int:
        return int(np.flatnonzero(self.permutation == element)[0]) + 1

    def elements(self, ranks: range):
        if self._identity:
            return ranks
        return self.permutation[ranks.start - 1 : ranks.stop - 1]


@dataclass(frozen=True)
class QueryLedger:
    classical_queries: int = 0
    quantum_queries: int = 0
    verification_queries: int = 0
    fallback_queries: int = 0

    @property
    def total(self) -> int:
        return (
            self.classical_queries
            + self.quantum_queries
            + self.verification_queries
            + self.fallback_queries
        )

    def to_dict(self) -> dict:
        return {**asdict(self), "total": self.total}


@dataclass(frozen=True)
class SearchResult:
    element: int
    ledger: QueryLedger
    blocks_visited: int
    used_fallback: bool


def classical_scan(block: range, oracle, ordering: AdviceOrdering) -> tuple[bool, Optional[int], int]:
    """Query ranks of ``block`` in order until the marked one is hit.

    Returns ``(found, element, queries)``.
    """
    queries = 0
    for rank in block:
        queries += 1
        element = ordering.element(rank)
        if oracle.query(element):
            return True, element, queries
    return False, None, queries


def run_geometric_search(
    oracle,
    ordering: AdviceOrdering,
    noise: NoiseModel,
    schedule: RoundSchedule,
    rng: np.random.Generator,
    engine: str = "auto",
) -> SearchResult:
    if ordering.N != oracle.domain_size:
        raise InvalidArgument(f"ordering covers {ordering.N} elements, oracle {oracle.domain_size}")
    classical = quantum = verification = 0
    visited = 0
    for block in block_plan(ordering.N):
        visited += 1
        if block.mode == "quantum":
            out = run_block_search(
                block.ranks, oracle, noise, schedule, rng, engine, elements=ordering.elements(block.ranks)
            )
            quantum += out.quantum_queries
            verification += out.verification_queries
            if out.found:
                ledger = QueryLedger(classical, quantum, verification, 0)
                return SearchResult(ordering.element(out.element), ledger, visited, False)
        else:
            found, element, used = classical_scan(block.ranks, oracle, ordering)
            classical += used
            if found:
                return SearchResult(element, QueryLedger(classical, quantum, verification, 0), visited, False)

    found, element, used = classical_scan(range(1, ordering.N + 1), oracle, ordering)
    if not found:
        raise RuntimeError("oracle has no marked element")
    return SearchResult(element, QueryLedger(classical, quantum, verification, used), visited, True)


def rank_costs(
    N: int, noise: NoiseModel, schedule: RoundSchedule, engine: str = "auto"
) -> np.ndarray:
    """Exact expected query count ``T(n)`` when rank ``n`` holds the marked element.

    For rank ``n`` in block ``b``: all earlier blocks are searched in vain at
    their deterministic absent cost, then block ``b`` is searched.  A quantum
    block can miss; the run then pays every later block's absent cost plus a
    fallback sweep of ``n`` queries.
    """
    plan = block_plan(N)
    q = max(1, math.ceil(math.log2(N)))
    engine = resolve_engine(engine, noise)
    invariant = position_invariant(noise)

    absent = np.empty(len(plan))
    stats = []
    for b, block in enumerate(plan):
        if block.mode == "quantum":
            st = block_statistics(block.size, q, noise, schedule, engine)
            stats.append(st)
            absent[b] = st.absent_cost
        else:
            stats.append(None)
            absent[b] = block.size
    before = np.concatenate(([0.0], np.cumsum(absent)[:-1]))
    after = np.cumsum(absent[::-1])[::-1] - absent

    costs = np.empty(N)
    for b, block in enumerate(plan):
        lo, hi = block.start - 1, block.end
        ranks = np.arange(block.start, block.end + 1, dtype=float)
        if block.mode == "classical":
            costs[lo:hi] = before[b] + (ranks - block.start + 1)
        elif invariant:
            st = stats[b]
            costs[lo:hi] = before[b] + st.present_cost + st.miss_probability * (after[b] + ranks)
        else:
            for k, r in enumerate(ranks):
                st = block_statistics(block.size, q, noise, schedule, engine, marked_local=k + 1)
                costs[lo + k] = before[b] + st.present_cost + st.miss_probability * (after[b] + r)
    return costs


def exact_expected_queries(
    N: int,
    mu: AdviceDistribution,
    noise: NoiseModel,
    schedule: RoundSchedule,
    engine: str = "auto",
) -> float:
    """Average-case expected queries ``sum_n mu_n T(n)`` (correctly rounded sum)."""
    if mu.N != N:
        raise InvalidArgument(f"distribution has {mu.N} ranks, expected {N}")
    if not mu.is_non_increasing:
        raise InvalidArgument("advice distribution must be non-increasing over ranks")
    costs = rank_costs(N, noise, schedule, engine)
    return math.fsum((mu.weights * costs).tolist())
