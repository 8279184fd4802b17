# coding: utf-8

# # Density-matrix primitives
#
# The library keeps states as dense density matrices. Basis labels start at 1,
# so the oracle for element k flips the sign of row k and column k.

import numpy as np

from advisearch import (
    DensityOperator,
    Dephasing,
    NoiseModel,
    apply_diffusion,
    apply_noise,
    apply_oracle,
    equal_superposition,
    grover_iterations,
    measure_probabilities,
)

np.set_printoptions(precision=3, suppress=True)

# ## The uniform superposition on four labels

psi = equal_superposition(4)
rho = DensityOperator.from_pure(psi)
print(rho.matrix.real)

# ## One oracle call marks element 1
#
# Off-diagonal entries touching row/column 1 change sign.

marked = apply_oracle(rho, 1)
print(marked.matrix.real)

# The diffusion step reflects about psi. After one oracle and one diffusion the
# whole weight sits on the marked element; for d = 4 this is exact.

after = apply_diffusion(marked, psi)
print(measure_probabilities(after))

# ## Noise
#
# N_p(rho) = (1 - p) rho + p T(rho). Depolarizing sends everything towards I/d,
# dephasing removes the off-diagonal part.

half = apply_noise(rho, NoiseModel(0.5))
print(half.matrix.real)
print(apply_noise(rho, NoiseModel(1.0, Dephasing())).matrix.real)

# ## Iterating
#
# grover_iterations applies noise, oracle and diffusion M times and returns the
# new state together with the number of oracle uses.

for p in (0.0, 0.1, 0.3):
    out, used = grover_iterations(DensityOperator.from_pure(equal_superposition(16)), 5, equal_superposition(16), NoiseModel(p), 3)
    print(f"p={p:.1f}  M={used}  P(marked)={out.matrix[4, 4].real:.4f}")
