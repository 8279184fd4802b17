"""Closed-form backend for Grover search under the depolarizing channel.

Starting from the equal superposition, ``M`` noisy iterations with the
depolarizing channel leave the register in

    (1 - p)^M * rho_M + (1 - (1 - p)^M) * I / d

where ``rho_M`` is the noiseless Grover state, because ``I/d`` is fixed by
the oracle, the diffusion and the channel alike.  The noiseless state puts
weight ``sin^2((2M + 1) theta)`` on the marked element, ``sin(theta) = 1/sqrt(d)``,
and spreads the remainder evenly over the other ``d - 1`` basis states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidArgument


def _theta(dim: int) -> float:
    return math.asin(1.0 / math.sqrt(dim))


def noiseless_success_probability(dim: int, iterations: int) -> float:
    if dim < 2:
        raise InvalidArgument(f"dim must be >= 2, got {dim}")
    if iterations < 0:
        raise InvalidArgument(f"iterations must be >= 0, got {iterations}")
    return math.sin((2 * iterations + 1) * _theta(dim)) ** 2


def depolarized_success_probability(
    dim: int, p: float, iterations: int, marked_present: bool = True
) -> float:
    """Probability that measuring the register yields the marked element.

    Returns 0 when the register holds no marked element, since the
    verification query can then never succeed.
    """
    if not 0.0 <= p <= 1.0:
        raise InvalidArgument(f"p must lie in [0, 1], got {p}")
    ideal = noiseless_success_probability(dim, iterations)
    if not marked_present:
        return 0.0
    survival = (1.0 - p) ** iterations
    return survival * ideal + (1.0 - survival) / dim


@dataclass(frozen=True)
class SymmetricGroverState:
    """Compact encoding of the depolarized Grover state.

    ``survival * (noiseless state after angle_steps) + (1 - survival) * I/dim``.
    """

    dim: int
    survival: float
    angle_steps: int
    marked_present: bool = True

    def __post_init__(self):
        if not 0.0 <= self.survival <= 1.0:
            raise InvalidArgument(f"survival must lie in [0, 1], got {self.survival}")

    @classmethod
    def after(cls, dim: int, p: float, iterations: int, marked_present: bool = True):
        return cls(dim, (1.0 - p) ** iterations, iterations, marked_present)

    @property
    def ideal_marked_weight(self) -> float:
        if not self.marked_present:
            return 0.0
        return noiseless_success_probability(self.dim, self.angle_steps)

    @property
    def success_probability(self) -> float:
        if not self.marked_present:
            return 0.0
        return self.survival * self.ideal_marked_weight + (1.0 - self.survival) / self.dim

    def probabilities(self, marked_index: Optional[int]) -> np.ndarray:
        """Full outcome distribution; ``marked_index`` is 1-based or ``None``."""
        d = self.dim
        if marked_index is None:
            return np.full(d, 1.0 / d)
        w = self.ideal_marked_weight
        probs = np.full(d, self.survival * (1.0 - w) / (d - 1) + (1.0 - self.survival) / d)
        probs[marked_index - 1] = self.success_probability
        return probs

    def sample(self, rng: np.random.Generator, marked_index: Optional[int]) -> int:
        """Draw one 1-based measurement outcome without building the d-vector.

        Mixture decomposition: with weight ``survival`` sample the noiseless
        state (marked with its ideal weight, else uniform over the rest);
        otherwise sample uniformly over the register.
        """
        d = self.dim
        if marked_index is None or rng.random() >= self.survival:
            return int(rng.integers(1, d + 1))
        if rng.random() < self.ideal_marked_weight:
            return marked_index
        k = int(rng.integers(1, d))
        return k if k < marked_index else k + 1
