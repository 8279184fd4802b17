import math

import numpy as np
import pytest

from advisearch import OracleSpec


def random_density(rng, d, rank=None):
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    m = g @ g.conj().T
    return m / np.trace(m)


def random_pure(rng, d):
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def random_kraus(rng, d, k=3):
    # isometry d -> k*d split into k blocks satisfies sum K^+ K = I
    g = rng.normal(size=(k * d, d)) + 1j * rng.normal(size=(k * d, d))
    q, _ = np.linalg.qr(g)
    return [q[i * d : (i + 1) * d] for i in range(k)]


def explicit_grover(d, marked, iterations, p=0.0):
    """Brute-force dense-matrix Grover with depolarizing noise (0-based marked)."""
    psi = np.ones(d) / math.sqrt(d)
    U = np.eye(d) - 2 * np.outer(psi, psi)
    O = np.eye(d)
    if marked is not None:
        O[marked, marked] = -1
    rho = np.outer(psi, psi).astype(complex)
    for _ in range(iterations):
        rho = (1 - p) * rho + p * np.eye(d) / d
        rho = U @ O @ rho @ O.T @ U.T
    return rho


class CountingOracle:
    """Wraps an OracleSpec and counts every evaluation independently."""

    def __init__(self, spec: OracleSpec):
        self.spec = spec
        self.classical = 0
        self.superposition = 0

    @property
    def q(self):
        return self.spec.q

    @property
    def domain_size(self):
        return self.spec.domain_size

    def query(self, n):
        self.classical += 1
        return self.spec.query(n)

    def phase_target(self, elements, uses):
        self.superposition += uses
        return self.spec.phase_target(elements, uses)

    @property
    def total(self):
        return self.classical + self.superposition


@pytest.fixture
def rng():
    return np.random.default_rng(20170706)


# one line per acceptance criterion, echoed at the end of the session
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":").split("(")[0])):
            terminalreporter.write_line(line)
