# coding: utf-8

# # Searching one block with a shrinking schedule
#
# A block of size n lives in a register of dimension d = 2^min(bitlen(n), q).
# Round i runs M_i = floor(alpha_i * pi/4 * sqrt(d)) iterations, measures, and
# spends one more query verifying the outcome. alpha_i shrinks slowly so that
# later rounds use fewer iterations.

import numpy as np

from advisearch import (
    NoiseModel,
    OracleSpec,
    RoundSchedule,
    block_statistics,
    iterations_for_round,
    register_dim,
    run_block_search,
    theorem1_bound,
)

schedule = RoundSchedule()
d = register_dim(148, 10)
print("register dimension:", d)
print("iterations per round:", [iterations_for_round(i, schedule, d) for i in range(0, 200, 20)])

# ## One run

oracle = OracleSpec(1024, 120)
out = run_block_search(range(85, 233), oracle, NoiseModel(0.1), schedule, np.random.default_rng(1))
print(out)

# ## Exact statistics vs the analytic bound
#
# block_statistics returns the expected cost given the marked element is in
# the block, the probability that every round misses, and the cost of a block
# that does not contain it.

for p in (0.0, 0.1, 0.3):
    st = block_statistics(148, 10, NoiseModel(p), schedule)
    print(f"p={p}: E[cost]={st.present_cost:8.2f}  miss={st.miss_probability:.2e}  "
          f"absent={st.absent_cost}  bound={theorem1_bound(148, 10, p, schedule.epsilon):.1f}")
