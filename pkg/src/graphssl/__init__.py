"""Graph-based semi-supervised classification.

Two solvers for the same diffusion objective: a deterministic power
iteration of an affine contraction, and a stochastic-approximation sampler
driven by a teleported random walk. Plus synthetic graph generators and a
dynamic-graph simulator for studying the sampler under node churn.
"""

from .estimators import PowerIterationClassifier, SamplingClassifier
from .graph import (
    CapacityError,
    EdgeError,
    FeatureMatrix,
    GraphError,
    LabelAssignment,
    SimilarityGraph,
    UnknownNodeError,
)
from .metrics import TrajectoryRecord, classify, error_against
from .operators import (
    DiffusionOperator,
    WalkKernel,
    alpha_for,
    build_operator,
    closed_form_solve,
    objective,
    perron_weights,
    weighted_norm,
)
from .power import PowerSolveReport, power_solve, power_step
from .sampling import (
    ConstantSchedule,
    DecreasingSchedule,
    McmcPolicy,
    NewNodeFocusPolicy,
    RoundRobinPolicy,
    SamplingEngine,
    SolverConfig,
    WalkerState,
    constant,
    decreasing,
    likelihood_ratio,
    run_sampling,
    sample_next,
    sampling_update,
    track_new_node,
)
from .generators import (
    DynamicSbmSpec,
    GaussianMixtureSpec,
    SimulationEvent,
    generate_gaussian_mixture,
    generate_sbm,
    occupancy_time_average,
    pick_labeled_nodes,
    replace_labeled_node,
    simulate_dynamic_sbm,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "ConstantSchedule",
    "DecreasingSchedule",
    "DiffusionOperator",
    "DynamicSbmSpec",
    "EdgeError",
    "FeatureMatrix",
    "GaussianMixtureSpec",
    "GraphError",
    "LabelAssignment",
    "McmcPolicy",
    "NewNodeFocusPolicy",
    "PowerIterationClassifier",
    "PowerSolveReport",
    "RoundRobinPolicy",
    "SamplingClassifier",
    "SamplingEngine",
    "SimilarityGraph",
    "SimulationEvent",
    "SolverConfig",
    "TrajectoryRecord",
    "UnknownNodeError",
    "WalkKernel",
    "WalkerState",
    "alpha_for",
    "build_operator",
    "classify",
    "closed_form_solve",
    "constant",
    "decreasing",
    "error_against",
    "generate_gaussian_mixture",
    "generate_sbm",
    "likelihood_ratio",
    "objective",
    "occupancy_time_average",
    "perron_weights",
    "pick_labeled_nodes",
    "power_solve",
    "power_step",
    "replace_labeled_node",
    "run_sampling",
    "sample_next",
    "sampling_update",
    "simulate_dynamic_sbm",
    "track_new_node",
    "weighted_norm",
]
