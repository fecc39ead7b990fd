"""Learn full Pareto fronts of multi-objective MDPs with one conditioned policy.

A single network maps (state, desired horizon, desired return) to an
action and is trained by supervised learning on its own best trajectories.
The package bundles the training loop, the dominance/hypervolume/epsilon
metrics used to score coverage sets, and two analytic benchmark
environments with known fronts.
"""

from .agent import (
    AgentConfig,
    EvalResult,
    ParetoConditionedNetwork,
    evaluate,
    run_episode,
    train,
    warmup,
)
from .envs import (
    WALKROOM_MAX_DIMS,
    DeepSeaTreasure,
    EnvDescriptor,
    StepOutcome,
    Walkroom,
    WalkroomSpec,
    dst_env,
    generate_walkroom_spec,
    walkroom_env,
)
from .experience import (
    DataPoint,
    ExperienceBuffer,
    Trajectory,
    suffix_returns,
    to_datapoints,
)
from .metrics import (
    BOUNDARY_SCORE,
    CROWD_THRESHOLD,
    MetricReport,
    crowding_distance,
    dominating_score,
    epsilon_metrics,
    front_normalized_epsilon,
    hypervolume,
)
from .network import (
    AdamOptimizer,
    PcnModel,
    TrainBatch,
    action_distribution,
    forward,
    init_model,
    load_model,
    save_model,
    train_batch,
)
from .pareto import (
    dominates,
    non_dominated,
    normalize,
    pareto_filter,
    read_points_csv,
    write_points_csv,
)

__version__ = "0.1.0"

__all__ = [
    "AdamOptimizer",
    "AgentConfig",
    "BOUNDARY_SCORE",
    "CROWD_THRESHOLD",
    "DataPoint",
    "DeepSeaTreasure",
    "EnvDescriptor",
    "EvalResult",
    "ExperienceBuffer",
    "MetricReport",
    "ParetoConditionedNetwork",
    "PcnModel",
    "StepOutcome",
    "TrainBatch",
    "Trajectory",
    "WALKROOM_MAX_DIMS",
    "Walkroom",
    "WalkroomSpec",
    "__version__",
    "action_distribution",
    "crowding_distance",
    "dominates",
    "dominating_score",
    "dst_env",
    "epsilon_metrics",
    "evaluate",
    "forward",
    "front_normalized_epsilon",
    "generate_walkroom_spec",
    "hypervolume",
    "init_model",
    "load_model",
    "non_dominated",
    "normalize",
    "pareto_filter",
    "read_points_csv",
    "run_episode",
    "save_model",
    "suffix_returns",
    "to_datapoints",
    "train",
    "train_batch",
    "walkroom_env",
    "warmup",
    "write_points_csv",
]
