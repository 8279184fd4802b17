"""Noise-resistant quantum search with advice: simulation and query accounting."""

from .advice import (
    AdviceDistribution,
    classical_average_complexity,
    corollary_constants,
    corollary_noise_level,
    g_bound,
    lemma1_bound,
    power_law_advice,
    theorem2_bounds,
    uniform_advice,
)
from .errors import ConfigError, InvalidArgument, InvalidChannel, UnsupportedEngine
from .geometric import (
    AdviceOrdering,
    Block,
    BlockPlan,
    QueryLedger,
    SearchResult,
    block_plan,
    classical_scan,
    exact_expected_queries,
    rank_costs,
    run_geometric_search,
)
from .grover import (
    BlockSearchOutcome,
    RoundSchedule,
    alpha,
    block_statistics,
    expected_block_queries,
    iterations_for_round,
    round_success_probability,
    run_block_search,
    theorem1_bound,
)
from .quantum import (
    CustomKraus,
    DensityOperator,
    Dephasing,
    Depolarizing,
    NoiseModel,
    OracleSpec,
    PureState,
    ReplaceWithFixedState,
    apply_diffusion,
    apply_noise,
    apply_oracle,
    equal_superposition,
    grover_iterations,
    measure_probabilities,
    register_dim,
)
from .reduced import (
    SymmetricGroverState,
    depolarized_success_probability,
    noiseless_success_probability,
)

__version__ = "0.1.0"
