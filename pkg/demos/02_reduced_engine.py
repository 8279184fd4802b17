# coding: utf-8

# # The closed-form engine for depolarizing noise
#
# Under depolarizing noise the state after M steps is a mixture: with weight
# (1-p)^M the ideal Grover state, otherwise I/d. That collapses the simulation
# to one formula, which we compare against the dense engine here.

import time

import numpy as np

from advisearch import (
    DensityOperator,
    NoiseModel,
    SymmetricGroverState,
    depolarized_success_probability,
    equal_superposition,
    grover_iterations,
)

# ## Agreement on a small grid

worst = 0.0
for d in (4, 16, 64):
    psi = equal_superposition(d)
    for p in (0.0, 0.05, 0.3):
        rho = DensityOperator.from_pure(psi)
        for M in range(1, 9):
            rho, _ = grover_iterations(rho, 1, psi, NoiseModel(p), 1)
            worst = max(worst, abs(rho.matrix[0, 0].real - depolarized_success_probability(d, p, M)))
print(f"largest disagreement: {worst:.2e}")

# ## Cost
#
# The dense engine is O(d^2) per step; the formula is O(1).

d, M = 1024, 25
psi = equal_superposition(d)
t = time.perf_counter()
dense, _ = grover_iterations(DensityOperator.from_pure(psi), 1, psi, NoiseModel(0.1), M)
t_dense = time.perf_counter() - t
t = time.perf_counter()
closed = depolarized_success_probability(d, 0.1, M)
t_closed = time.perf_counter() - t
print(f"dense {dense.matrix[0, 0].real:.6f} in {t_dense:.3f}s, closed form {closed:.6f} in {t_closed * 1e6:.1f}us")

# ## Sampling measurement outcomes without the matrix

state = SymmetricGroverState.after(d, 0.1, M)
rng = np.random.default_rng(0)
hits = sum(state.sample(rng, 1) == 1 for _ in range(5000))
print(f"empirical P(marked) = {hits / 5000:.3f}, exact {state.success_probability:.3f}")
