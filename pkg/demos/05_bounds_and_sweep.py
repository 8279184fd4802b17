# coding: utf-8

# # Bounds and a size sweep
#
# With power-law advice mu_n ~ n^(delta-2) the classical expected cost D grows
# like ln N when delta = 1/N, while the quantum expected cost stays bounded by
# a constant when the noise level is p = 1/ln N.

import math

from advisearch import classical_average_complexity, corollary_constants, power_law_advice, theorem2_bounds
from advisearch.harness import ExperimentConfig, report_text, run_sweep

c3, c4 = corollary_constants()
print(f"c3 = {c3}, c4 = {c4:.1f}")

for N in (2**7, 2**12, 2**20):
    mu = power_law_advice(N, 1 / N)
    lower, upper = theorem2_bounds(N, 1 / N, 1 / math.log(N))
    print(f"N=2^{int(math.log2(N)):2d}  D={classical_average_complexity(mu):6.3f}  "
          f"lower={lower:6.3f}  c3 lnN={c3 * math.log(N):6.3f}  quantum upper={upper:9.1f}")

# ## Exact sweep
#
# run_sweep computes the exact expected query count at each N and attaches
# the bound checks. The same table is available from the command line with
#   advisearch sweep --grid 2^7,2^10,2^14 --corollary-q 1 --format text

report = run_sweep(ExperimentConfig(mode="sweep", grid=(2**7, 2**10, 2**14, 2**18), corollary_q=1.0))
print(report_text(report))
