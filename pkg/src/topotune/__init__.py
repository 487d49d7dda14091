"""Topology-aware combinatorial black-box optimization.

Search spaces built from four parameter kinds (factorization, permutation,
discrete, categorical) carry explicit neighborhood graphs.  The OpEvo
evolutionary engine exploits those graphs through killed-random-walk
mutation; random search, simulated annealing, and greedy best-first search
provide baselines over the same spaces, and synthetic tensor-operator cost
models plus a subprocess evaluator protocol supply objectives.
"""

from .baselines import (
    GbfsConfig,
    SaConfig,
    calibrate_temperature,
    greedy_bfs,
    metropolis_accept,
    random_search,
    simulated_annealing,
)
from .benchmarks import (
    BatchMatMulSpec,
    Conv2dSpec,
    CostModelParams,
    DEFAULT_COST_PARAMS,
    DESK_BATCHMATMUL,
    DESK_CONV2D,
    DESK_MATMUL,
    GOLDEN_OPTIMA,
    MatMulSpec,
    batchmatmul_space,
    conv2d_space,
    enumerate_optimum,
    make_objective,
    matmul_space,
    operator_space,
    parse_operator,
    synthetic_cost,
)
from .engine import (
    Archive,
    AskResult,
    EngineConfig,
    OpEvo,
    ProtocolError,
    evaluate_batch,
    mutate,
    recombine,
    run,
)
from .external import EvaluatorSpawnError, ExternalEvaluator
from .logs import Individual, TrialRecord, TrialRecorder, read_trial_log, write_trial_log
from .spaces import (
    Categorical,
    Discrete,
    Factorization,
    ParameterSpace,
    Permutation,
    SearchSpace,
    TopologyGraph,
    build_graph,
    is_connected,
    sample_unvisited,
)
from .walk import column_sum_deviation, sample_walk, transition_matrix, walk_distribution

__version__ = "0.1.0"

__all__ = [
    "Archive",
    "AskResult",
    "BatchMatMulSpec",
    "Categorical",
    "Conv2dSpec",
    "CostModelParams",
    "DEFAULT_COST_PARAMS",
    "DESK_BATCHMATMUL",
    "DESK_CONV2D",
    "DESK_MATMUL",
    "Discrete",
    "EngineConfig",
    "EvaluatorSpawnError",
    "ExternalEvaluator",
    "Factorization",
    "GOLDEN_OPTIMA",
    "GbfsConfig",
    "Individual",
    "MatMulSpec",
    "OpEvo",
    "ParameterSpace",
    "Permutation",
    "ProtocolError",
    "SaConfig",
    "SearchSpace",
    "TopologyGraph",
    "TrialRecord",
    "TrialRecorder",
    "batchmatmul_space",
    "build_graph",
    "calibrate_temperature",
    "column_sum_deviation",
    "conv2d_space",
    "enumerate_optimum",
    "evaluate_batch",
    "greedy_bfs",
    "is_connected",
    "make_objective",
    "matmul_space",
    "metropolis_accept",
    "mutate",
    "operator_space",
    "parse_operator",
    "random_search",
    "read_trial_log",
    "recombine",
    "run",
    "sample_unvisited",
    "sample_walk",
    "simulated_annealing",
    "synthetic_cost",
    "transition_matrix",
    "walk_distribution",
    "write_trial_log",
]
