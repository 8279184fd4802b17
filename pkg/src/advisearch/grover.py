"""Round-structured noise-resistant Grover search over one block.

Round ``i`` prepares the equal superposition on the block's register, runs
``floor(alpha_i * pi/4 * sqrt(d))`` noisy Grover iterations, measures, and
checks the outcome with one classical oracle query.  Rounds repeat until
the check succeeds or ``max_rounds`` rounds have been spent, after which
the block is reported as not containing the marked element.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidArgument, UnsupportedEngine
from .quantum import (
    Dephasing,
    Depolarizing,
    DensityOperator,
    NoiseModel,
    equal_superposition,
    grover_iterations,
    measure_probabilities,
    register_dim,
)
from .reduced import SymmetricGroverState

ENGINES = ("auto", "full", "reduced")
INITIAL_STATES = ("pure", "mixed")


@dataclass(frozen=True)
class RoundSchedule:
    """Parameters of the round loop.

    ``initial_state="mixed"`` starts every round from ``I/d`` instead of the
    equal superposition; it exists only to show that no amplification then
    takes place.
    """

    epsilon: float = 0.5
    c: float = 10.0
    max_rounds: int = 200
    initial_state: str = "pure"

    def __post_init__(self):
        if not 0.0 < self.epsilon <= 0.5:
            raise InvalidArgument(f"epsilon must lie in (0, 0.5], got {self.epsilon}")
        if not self.c > 0:
            raise InvalidArgument(f"c must be positive, got {self.c}")
        if self.max_rounds < 1:
            raise InvalidArgument(f"max_rounds must be >= 1, got {self.max_rounds}")
        if self.initial_state not in INITIAL_STATES:
            raise InvalidArgument(f"initial_state must be one of {INITIAL_STATES}")


@dataclass(frozen=True)
class BlockSearchOutcome:
    found: bool
    element: Optional[int]
    rounds_used: int
    quantum_queries: int
    verification_queries: int

    @property
    def total_queries(self) -> int:
        return self.quantum_queries + self.verification_queries


def alpha(i: int, epsilon: float, c: float) -> float:
    """Shrinking multiplier ``1 / sqrt(1 + i / (c ln(1/epsilon)))``."""
    if not 0.0 < epsilon < 1.0:
        raise InvalidArgument(f"epsilon must lie in (0, 1), got {epsilon}")
    if not c > 0:
        raise InvalidArgument(f"c must be positive, got {c}")
    return 1.0 / math.sqrt(1.0 + i / (c * math.log(1.0 / epsilon)))


def iterations_for_round(i: int, schedule: RoundSchedule, d1: int) -> int:
    return math.floor(alpha(i, schedule.epsilon, schedule.c) * (math.pi / 4) * math.sqrt(d1))


def resolve_engine(engine: str, noise: NoiseModel) -> str:
    """Map ``auto`` to a concrete engine and reject impossible combinations."""
    if engine not in ENGINES:
        raise InvalidArgument(f"engine must be one of {ENGINES}, got {engine!r}")
    if engine == "auto":
        return "reduced" if noise.is_depolarizing else "full"
    if engine == "reduced" and not noise.is_depolarizing:
        raise UnsupportedEngine(
            f"reduced engine requires the depolarizing channel, got {type(noise.channel).__name__}"
        )
    return engine


def position_invariant(noise: NoiseModel) -> bool:
    # channels commuting with basis permutations give the same success
    # probability wherever the marked element sits
    return noise.p == 0.0 or isinstance(noise.channel, (Depolarizing, Dephasing))


def _full_engine_probabilities(
    d1: int, marked_local: Optional[int], noise: NoiseModel, iterations: int, initial_state: str
) -> np.ndarray:
    psi = equal_superposition(d1)
    if initial_state == "mixed":
        rho = DensityOperator.maximally_mixed(d1)
    else:
        rho = DensityOperator.from_pure(psi)
    rho, _ = grover_iterations(rho, marked_local, psi, noise, iterations)
    return measure_probabilities(rho)


@lru_cache(maxsize=4096)
def _round_profile(
    d1: int, noise: NoiseModel, schedule: RoundSchedule, engine: str, marked_local: int
) -> tuple[np.ndarray, np.ndarray]:
    m = np.array([iterations_for_round(i, schedule, d1) for i in range(schedule.max_rounds)])
    s = np.empty(schedule.max_rounds)
    for i, mi in enumerate(m):
        mi = int(mi)
        if engine == "reduced":
            if schedule.initial_state == "mixed":
                s[i] = 1.0 / d1
            else:
                s[i] = SymmetricGroverState.after(d1, noise.p, mi).success_probability
        else:
            probs = _full_engine_probabilities(d1, marked_local, noise, mi, schedule.initial_state)
            s[i] = probs[marked_local - 1]
    m.setflags(write=False)
    s.setflags(write=False)
    return m, s


def round_profile(
    block_size: int,
    q: int,
    noise: NoiseModel,
    schedule: RoundSchedule,
    engine: str = "auto",
    marked_local: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-round iteration counts ``M_i`` and success probabilities ``s_i``.

    Both arrays have length ``schedule.max_rounds`` and assume the marked
    element sits at 1-based position ``marked_local`` of the block.
    """
    d1 = register_dim(block_size, q)
    if not 1 <= marked_local <= block_size:
        raise InvalidArgument(f"marked_local={marked_local} outside 1..{block_size}")
    engine = resolve_engine(engine, noise)
    if position_invariant(noise):
        marked_local = 1
    return _round_profile(d1, noise, schedule, engine, marked_local)


def round_success_probability(
    block_size: int,
    q: int,
    noise: NoiseModel,
    round_index: int,
    schedule: RoundSchedule,
    marked_in_block: bool,
    engine: str = "auto",
    marked_local: int = 1,
) -> float:
    if not marked_in_block:
        return 0.0
    d1 = register_dim(block_size, q)
    if round_index < schedule.max_rounds:
        _, s = round_profile(block_size, q, noise, schedule, engine, marked_local)
        return float(s[round_index])
    # beyond the cached horizon: evaluate the single round directly
    mi = iterations_for_round(round_index, schedule, d1)
    engine = resolve_engine(engine, noise)
    if engine == "reduced":
        if schedule.initial_state == "mixed":
            return 1.0 / d1
        return SymmetricGroverState.after(d1, noise.p, mi).success_probability
    probs = _full_engine_probabilities(d1, marked_local, noise, mi, schedule.initial_state)
    return float(probs[marked_local - 1])


@dataclass(frozen=True)
class BlockStatistics:
    """Exact query statistics of one block search.

    ``present_cost`` is the expected total (quantum + verification) queries
    when the marked element is in the block, including the capped runs that
    miss it; ``miss_probability`` is the chance of such a miss;
    ``absent_cost`` is the deterministic cost when it is not in the block.
    """

    present_cost: float
    miss_probability: float
    absent_cost: int


def block_statistics(
    block_size: int,
    q: int,
    noise: NoiseModel,
    schedule: RoundSchedule,
    engine: str = "auto",
    marked_local: int = 1,
) -> BlockStatistics:
    m, s = round_profile(block_size, q, noise, schedule, engine, marked_local)
    per_round = m + 1
    # probability of reaching round i: prod_{j<i} (1 - s_j)
    survive = np.cumprod(1.0 - s)
    reach = np.concatenate(([1.0], survive[:-1]))
    present = math.fsum((reach * per_round).tolist())
    return BlockStatistics(present, float(survive[-1]), int(per_round.sum()))


def expected_block_queries(
    block_size: int,
    q: int,
    noise: NoiseModel,
    schedule: RoundSchedule,
    marked_in_block: bool,
    engine: str = "auto",
    marked_local: int = 1,
) -> float:
    stats = block_statistics(block_size, q, noise, schedule, engine, marked_local)
    return stats.present_cost if marked_in_block else float(stats.absent_cost)


def run_block_search(
    block: range,
    oracle,
    noise: NoiseModel,
    schedule: RoundSchedule,
    rng: np.random.Generator,
    engine: str = "auto",
    elements: Optional[Sequence[int]] = None,
) -> BlockSearchOutcome:
    """Search the consecutive indices ``block`` for the marked element.

    ``oracle`` must provide ``query(n)`` (one classical evaluation, ``None``
    always evaluating to 0) and ``phase_target(elements, uses)`` (``uses``
    superposition queries; returns the 0-based position of the marked
    element within ``elements`` or ``None``).  ``elements`` defaults to the
    block itself; callers searching a relabelled domain pass the labels the
    oracle understands.  Returned ``element`` is always an index from ``block``.
    """
    n1 = len(block)
    if n1 < 1:
        raise InvalidArgument("block must be nonempty")
    if elements is None:
        elements = block
    q = oracle.q
    d1 = register_dim(n1, q)
    engine = resolve_engine(engine, noise)
    quantum = verification = 0
    for i in range(schedule.max_rounds):
        mi = iterations_for_round(i, schedule, d1)
        # zero-iteration rounds charge nothing; the position only sets up the register
        pos = oracle.phase_target(elements, mi)
        marked_local = None if pos is None else pos + 1
        quantum += mi
        if engine == "reduced":
            survival = 0.0 if schedule.initial_state == "mixed" else (1.0 - noise.p) ** mi
            state = SymmetricGroverState(d1, survival, mi, marked_local is not None)
            outcome = state.sample(rng, marked_local)
        else:
            probs = _full_engine_probabilities(d1, marked_local, noise, mi, schedule.initial_state)
            probs = np.clip(probs, 0.0, None)
            outcome = int(rng.choice(d1, p=probs / probs.sum())) + 1
        verification += 1
        label = elements[outcome - 1] if outcome <= n1 else None
        if oracle.query(label):
            return BlockSearchOutcome(True, block[outcome - 1], i + 1, quantum, verification)
    return BlockSearchOutcome(False, None, schedule.max_rounds, quantum, verification)


def theorem1_bound(block_size: int, q: int, p: float, epsilon: float) -> float:
    """Expected-query bound for one block search with ``c = 10``.

    ``(100 / (1 - eps)) * (1.02 + d p + sqrt(d)) * ln(1/eps)``.
    """
    if block_size < 100:
        raise InvalidArgument(f"bound requires block_size >= 100, got {block_size}")
    if not 0.0 < epsilon <= 0.5:
        raise InvalidArgument(f"epsilon must lie in (0, 0.5], got {epsilon}")
    if not 0.0 <= p <= 1.0:
        raise InvalidArgument(f"p must lie in [0, 1], got {p}")
    d1 = register_dim(block_size, q)
    return (100.0 / (1.0 - epsilon)) * (1.02 + d1 * p + math.sqrt(d1)) * math.log(1.0 / epsilon)
