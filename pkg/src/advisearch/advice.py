"""Advice distributions, the optimal classical cost, and closed-form bounds.

All logarithms are natural.  Long sums use :func:`math.fsum` so that the
result is correctly rounded and independent of summation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidArgument

E2 = math.e**2
C1, C2 = 9.0, 1.04
C3 = 3.0 / 8.0
C4 = 4440.0 * E2
DIRECT_SUM_LIMIT = 2**24


@dataclass(frozen=True, eq=False)
class AdviceDistribution:
    """A strictly positive, non-increasing distribution over ranks ``1..N``.

    ``descriptor`` is ``"power_law"``, ``"uniform"`` or ``"custom"``;
    ``delta`` is set for power laws.
    """

    weights: np.ndarray
    descriptor: str = "custom"
    delta: Optional[float] = None

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size < 1:
            raise InvalidArgument("weights must be a nonempty vector")
        if np.any(w <= 0):
            raise InvalidArgument("weights must be strictly positive")
        total = math.fsum(w.tolist())
        if abs(total - 1.0) > 1e-12:
            raise InvalidArgument(f"weights sum to {total!r}, expected 1")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def N(self) -> int:
        return self.weights.size

    @property
    def is_non_increasing(self) -> bool:
        return bool(np.all(np.diff(self.weights) <= 0))

    @property
    def regime(self) -> str:
        """Which delta range applies: ``corollary`` (delta <= 1/N) or ``theorem``."""
        if self.delta is None:
            return "n/a"
        return "corollary" if self.delta <= 1.0 / self.N else "theorem"


def power_law_advice(N: int, delta: float) -> AdviceDistribution:
    """``mu_n proportional to n^(delta - 2)`` on ``1..N``."""
    if N < 1:
        raise InvalidArgument(f"N must be >= 1, got {N}")
    if not 0.0 < delta <= 0.25:
        raise InvalidArgument(f"delta must lie in (0, 1/4], got {delta}")
    raw = np.arange(1, N + 1, dtype=float) ** (delta - 2.0)
    norm = math.fsum(raw.tolist())
    w = raw / norm
    # fold the last ulps of rounding error into the head so the sum is exact to 1e-12
    w[0] += 1.0 - math.fsum(w.tolist())
    return AdviceDistribution(w, "power_law", delta)


def uniform_advice(N: int) -> AdviceDistribution:
    if N < 1:
        raise InvalidArgument(f"N must be >= 1, got {N}")
    return AdviceDistribution(np.full(N, 1.0 / N), "uniform")


def normalizer_bracket(N: int, delta: float) -> tuple[float, float]:
    """Integral bracket on ``sum_{n<=N} n^(delta-2)`` for sizes too big to sum.

    ``(N^(r+1) - 1)/(r+1) <= sum <= that + 1`` with ``r = delta - 2``.
    """
    r = delta - 2.0
    lo = (N ** (r + 1) - 1) / (r + 1)
    return lo, lo + 1.0


def classical_average_complexity(mu: AdviceDistribution) -> float:
    """Expected queries of the sorted scan, ``sum_n mu_n n``."""
    if not mu.is_non_increasing:
        raise InvalidArgument("advice distribution must be non-increasing")
    ranks = np.arange(1, mu.N + 1, dtype=float)
    return math.fsum((mu.weights * ranks).tolist())


def g_bound(r, p: float, epsilon: float):
    """``(200/(1-eps)) (1.04 + r p + sqrt(r)) ln(1/eps)``; ``r`` may be an array."""
    if not 0.0 < epsilon <= 0.5:
        raise InvalidArgument(f"epsilon must lie in (0, 0.5], got {epsilon}")
    if not 0.0 <= p <= 1.0:
        raise InvalidArgument(f"p must lie in [0, 1], got {p}")
    if np.any(np.asarray(r) < 0):
        raise InvalidArgument("r must be nonnegative")
    return (200.0 / (1.0 - epsilon)) * (1.04 + r * p + np.sqrt(r)) * math.log(1.0 / epsilon)


def lemma1_bound(mu: AdviceDistribution, p: float, epsilon: float) -> float:
    """Upper bound ``e^2 sum_n mu_n G(n, p, eps)`` on the expected queries."""
    ranks = np.arange(1, mu.N + 1, dtype=float)
    return E2 * math.fsum((mu.weights * g_bound(ranks, p, epsilon)).tolist())


def theorem2_bounds(N: int, delta: float, p: float) -> tuple[float, float]:
    """Power-law bounds ``(classical_lower, quantum_upper)``.

    ``classical_lower = (3 N^delta - 3) / (8 delta)`` and
    ``quantum_upper = 400 e^2 (9 + 1.04 p (N^delta - 1) / delta)``.

    The constants 9 and 1.04 are the rounded ones.  The derivation gives the
    slightly tighter ``200 e^2 ln(1/eps) / (1 - eps) * (1.04 + 1.04 (7.04 +
    p (N^delta - 1) / delta))``, which at ``eps = 1/2`` sits below this value.
    """
    if N < 100:
        raise InvalidArgument(f"bounds hold for N >= 100, got {N}")
    if not 0.0 < delta <= 0.25:
        raise InvalidArgument(f"delta must lie in (0, 1/4], got {delta}")
    if not 0.0 <= p <= 1.0:
        raise InvalidArgument(f"p must lie in [0, 1], got {p}")
    # expm1 keeps (N^delta - 1)/delta accurate when delta ~ 1/N
    growth = math.expm1(delta * math.log(N)) / delta
    return 3.0 * growth / 8.0, 400.0 * E2 * (C1 + C2 * p * growth)


def corollary_noise_level(N: int, exponent_q: float) -> float:
    """Noise schedule ``p(N) = 1 / (ln N)^q``, clamped to ``[0, 1]``."""
    if N < 2:
        raise InvalidArgument(f"N must be >= 2, got {N}")
    if not 0.0 < exponent_q <= 1.0:
        raise InvalidArgument(f"exponent_q must lie in (0, 1], got {exponent_q}")
    return min(1.0, 1.0 / math.log(N) ** exponent_q)


def corollary_constants() -> tuple[float, float]:
    return C3, C4
