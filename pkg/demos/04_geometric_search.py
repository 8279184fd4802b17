# coding: utf-8

# # Search guided by advice
#
# Candidates are ranked by the advice distribution. The ranks are cut into
# blocks of geometrically growing size; short blocks are scanned classically,
# blocks spanning at least 100 ranks are searched with the quantum routine.

import numpy as np

from advisearch import (
    AdviceOrdering,
    NoiseModel,
    OracleSpec,
    RoundSchedule,
    block_plan,
    exact_expected_queries,
    power_law_advice,
    run_geometric_search,
)

for b in block_plan(300):
    print(f"[{b.start:3d}, {b.end:3d}]  {b.mode}")

# ## A single search with a query ledger
#
# Every oracle call is charged to one of four accounts.

N = 4096
ordering = AdviceOrdering.identity(N)
rng = np.random.default_rng(7)
res = run_geometric_search(OracleSpec(N, 700), ordering, NoiseModel(0.1), RoundSchedule(), rng)
print(res.element, res.ledger.to_dict())

# ## Expected cost, exactly and by sampling

mu = power_law_advice(N, 1 / N)
noise = NoiseModel(1 / np.log(N))
T = exact_expected_queries(N, mu, noise, RoundSchedule())
ranks = rng.choice(np.arange(1, N + 1), size=3000, p=mu.weights)
costs = [run_geometric_search(OracleSpec(N, int(r)), ordering, noise, RoundSchedule(), rng).ledger.total for r in ranks]
print(f"exact {T:.3f}   sampled {np.mean(costs):.3f} +- {np.std(costs) / np.sqrt(len(costs)):.3f}")
