"""Exact density-operator simulation of noisy Grover iterations.

Basis states are labelled ``1..dim`` in every public function; the
underlying numpy arrays are of course indexed from zero.  A marked index
of ``None`` denotes a register in which no basis state is marked (used for
padded registers, whose extra basis states never carry the marked element).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .errors import InvalidArgument, InvalidChannel

TRACE_TOL = 1e-10
HERMITIAN_TOL = 1e-12
POSITIVITY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """A ``dim x dim`` trace-one, Hermitian, positive semidefinite matrix.

    Instances are treated as immutable; every operation returns a new one.
    Construction does not validate; call :meth:`validate` when needed.
    """

    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_pure(cls, state: "PureState") -> "DensityOperator":
        a = state.amplitudes
        return cls(np.outer(a, a.conj()))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityOperator":
        if dim < 1:
            raise InvalidArgument(f"dim must be >= 1, got {dim}")
        return cls(np.eye(dim, dtype=complex) / dim)

    @classmethod
    def basis(cls, dim: int, index: int) -> "DensityOperator":
        """The projector ``|index><index|`` (1-based)."""
        _check_index(index, dim)
        m = np.zeros((dim, dim), dtype=complex)
        m[index - 1, index - 1] = 1.0
        return cls(m)

    def validate(self, positivity: bool = False) -> None:
        """Raise :class:`InvalidArgument` if an invariant is violated.

        The eigenvalue check costs ``O(dim^3)`` and only runs with
        ``positivity=True``.
        """
        m = self.matrix
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise InvalidArgument(f"density operator must be square, got shape {m.shape}")
        tr = np.trace(m)
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidArgument(f"trace is {tr}, expected 1")
        herm = np.max(np.abs(m - m.conj().T))
        if herm > HERMITIAN_TOL:
            raise InvalidArgument(f"not Hermitian (deviation {herm:.3g})")
        if positivity:
            lo = np.linalg.eigvalsh(m).min()
            if lo < -POSITIVITY_TOL:
                raise InvalidArgument(f"not positive semidefinite (min eigenvalue {lo:.3g})")

    def to_json(self) -> str:
        """Debug dump: ``{"dim": d, "real": [...], "imag": [...]}``, row-major."""
        m = self.matrix
        return json.dumps(
            {
                "dim": int(self.dim),
                "real": m.real.ravel().tolist(),
                "imag": m.imag.ravel().tolist(),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "DensityOperator":
        data = json.loads(text)
        d = int(data["dim"])
        re = np.asarray(data["real"], dtype=float).reshape(d, d)
        im = np.asarray(data["imag"], dtype=float).reshape(d, d)
        return cls(re + 1j * im)


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def __post_init__(self):
        norm2 = float(np.vdot(self.amplitudes, self.amplitudes).real)
        if abs(norm2 - 1.0) > 1e-12:
            raise InvalidArgument(f"state is not normalised (|a|^2 = {norm2})")


@dataclass(frozen=True)
class OracleSpec:
    """Classical description of the search oracle ``f`` on ``1..domain_size``.

    ``q`` is the number of qubits of the full register.  When ``domain_size``
    is a power of two it equals ``log2(domain_size)``; otherwise the smallest
    register that holds the domain is used.
    """

    domain_size: int
    marked: int
    q: Optional[int] = None

    def __post_init__(self):
        if self.domain_size < 1:
            raise InvalidArgument(f"domain_size must be >= 1, got {self.domain_size}")
        if not 1 <= self.marked <= self.domain_size:
            raise InvalidArgument(f"marked={self.marked} outside 1..{self.domain_size}")
        q = max(1, math.ceil(math.log2(self.domain_size))) if self.q is None else self.q
        if q < 1 or 2**q < self.domain_size:
            raise InvalidArgument(f"q={q} too small for domain of size {self.domain_size}")
        object.__setattr__(self, "q", q)

    def __call__(self, n: int) -> int:
        return int(n == self.marked)

    def query(self, n: Optional[int]) -> int:
        """One classical evaluation; ``None`` (an outcome outside the domain) is 0."""
        return 0 if n is None else self(n)

    def phase_target(self, elements: Sequence[int], uses: int) -> Optional[int]:
        """Account for ``uses`` superposition queries over ``elements``.

        Returns the 0-based position of the marked element in ``elements``,
        or ``None``; this is what the phase oracle acts on.
        """
        if isinstance(elements, range):
            if self.marked in elements:
                return elements.index(self.marked)
            return None
        hits = np.flatnonzero(np.asarray(elements) == self.marked)
        return int(hits[0]) if hits.size else None


# -- noise channels ---------------------------------------------------------


@dataclass(frozen=True)
class Depolarizing:
    """``T(rho) = tr(rho) I / d``."""

    def apply(self, m: np.ndarray) -> np.ndarray:
        d = m.shape[0]
        return np.trace(m) * np.eye(d, dtype=complex) / d


@dataclass(frozen=True)
class Dephasing:
    """Complete dephasing in the computational basis: keeps the diagonal."""

    def apply(self, m: np.ndarray) -> np.ndarray:
        return np.diag(np.diag(m))


@dataclass(frozen=True, eq=False)
class ReplaceWithFixedState:
    """``T(rho) = tr(rho) sigma`` for a fixed density matrix ``sigma``."""

    sigma: np.ndarray

    def apply(self, m: np.ndarray) -> np.ndarray:
        if self.sigma.shape != m.shape:
            raise InvalidChannel(f"sigma has shape {self.sigma.shape}, state {m.shape}")
        return np.trace(m) * self.sigma


@dataclass(frozen=True, eq=False)
class CustomKraus:
    operators: Sequence[np.ndarray]

    def __post_init__(self):
        ops = [np.asarray(k, dtype=complex) for k in self.operators]
        if not ops:
            raise InvalidChannel("empty Kraus set")
        d = ops[0].shape[0]
        if any(k.shape != (d, d) for k in ops):
            raise InvalidChannel("Kraus operators must all be square of equal size")
        completeness = sum(k.conj().T @ k for k in ops)
        dev = np.max(np.abs(completeness - np.eye(d)))
        if dev > 1e-10:
            raise InvalidChannel(f"Kraus completeness violated (deviation {dev:.3g})")
        object.__setattr__(self, "operators", tuple(ops))

    def apply(self, m: np.ndarray) -> np.ndarray:
        if self.operators[0].shape != m.shape:
            raise InvalidChannel(f"Kraus operators of shape {self.operators[0].shape} on state {m.shape}")
        out = np.zeros_like(m)
        for k in self.operators:
            out += k @ m @ k.conj().T
        return out


Channel = Union[Depolarizing, Dephasing, ReplaceWithFixedState, CustomKraus]


@dataclass(frozen=True)
class NoiseModel:
    """``N_p(rho) = (1 - p) rho + p T(rho)``."""

    p: float = 0.0
    channel: Channel = field(default_factory=Depolarizing)

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise InvalidArgument(f"p must lie in [0, 1], got {self.p}")

    @property
    def is_depolarizing(self) -> bool:
        return isinstance(self.channel, Depolarizing)


# -- operations -------------------------------------------------------------


def register_dim(block_size: int, q: int) -> int:
    """Dimension of the register used to search a block of ``block_size`` items.

    ``2 ** min(floor(log2(block_size)) + 1, q)``; satisfies
    ``block_size <= d <= 2 * block_size`` and ``d <= 2 ** q``.
    """
    if q < 1:
        raise InvalidArgument(f"q must be >= 1, got {q}")
    if block_size < 1 or block_size > 2**q:
        raise InvalidArgument(f"block_size={block_size} outside 1..2^{q}")
    # bit_length is floor(log2(n)) + 1, exact for integers
    return 2 ** min(int(block_size).bit_length(), q)


def equal_superposition(dim: int) -> PureState:
    if dim < 1:
        raise InvalidArgument(f"dim must be >= 1, got {dim}")
    return PureState(np.full(dim, 1.0 / math.sqrt(dim), dtype=complex))


def _check_index(index: int, dim: int) -> None:
    if not 1 <= index <= dim:
        raise InvalidArgument(f"index {index} outside 1..{dim}")


def _oracle(m: np.ndarray, marked_index: Optional[int]) -> np.ndarray:
    if marked_index is None:
        return m
    k = marked_index - 1
    out = m.copy()
    out[k, :] *= -1
    out[:, k] *= -1
    return out


def _diffusion(m: np.ndarray, psi: np.ndarray) -> np.ndarray:
    # U m U with U = I - 2|psi><psi|, expanded into rank-one updates
    pc = psi.conj()
    v = m @ psi
    w = pc @ m
    s = pc @ v
    return m - 2 * np.outer(psi, w) - 2 * np.outer(v, pc) + 4 * s * np.outer(psi, pc)


def _noise(m: np.ndarray, noise: NoiseModel) -> np.ndarray:
    if noise.p == 0.0:
        return m
    return (1 - noise.p) * m + noise.p * noise.channel.apply(m)


def apply_oracle(rho: DensityOperator, marked_index: Optional[int]) -> DensityOperator:
    """Conjugate by the phase oracle that flips the sign of ``|marked_index>``."""
    if marked_index is not None:
        _check_index(marked_index, rho.dim)
    return DensityOperator(_oracle(rho.matrix, marked_index))


def apply_diffusion(rho: DensityOperator, psi: PureState) -> DensityOperator:
    if rho.dim != psi.dim:
        raise InvalidArgument(f"dimension mismatch: rho {rho.dim}, psi {psi.dim}")
    return DensityOperator(_diffusion(rho.matrix, psi.amplitudes))


def apply_noise(rho: DensityOperator, noise: NoiseModel) -> DensityOperator:
    return DensityOperator(_noise(rho.matrix, noise))


def grover_iterations(
    rho: DensityOperator,
    marked_index: Optional[int],
    psi: PureState,
    noise: NoiseModel,
    iterations: int,
) -> tuple[DensityOperator, int]:
    """Apply ``iterations`` noisy Grover steps ``U (O (N_p(rho)) O^+) U^+``.

    Returns the final state and the number of oracle queries spent, which is
    always ``iterations``.
    """
    if iterations < 0:
        raise InvalidArgument(f"iterations must be >= 0, got {iterations}")
    if rho.dim != psi.dim:
        raise InvalidArgument(f"dimension mismatch: rho {rho.dim}, psi {psi.dim}")
    if marked_index is not None:
        _check_index(marked_index, rho.dim)
    m = rho.matrix
    a = psi.amplitudes
    for _ in range(iterations):
        m = _diffusion(_oracle(_noise(m, noise), marked_index), a)
    return DensityOperator(m), iterations


def measure_probabilities(rho: DensityOperator) -> np.ndarray:
    """Computational-basis outcome distribution (entry ``k`` is outcome ``k+1``)."""
    return np.real(np.diag(rho.matrix)).copy()
