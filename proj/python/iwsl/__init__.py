"""Importance-weighted skill learning from cluttered demonstrations."""

from ._core import (  # noqa: F401
    Environment,
    Error,
    GaussianTrajectoryPrior,
    IncrementalLearner,
    SignedDistanceField,
    SkillModel,
    WeightParams,
    batch_estimate_step,
    dtw_align,
    dtw_cost,
    estimate_states,
    hinge_cost,
    importance_weight,
    learn_batch,
    optimize_map,
    rollout_moments,
    weight_trajectory,
)

__version__ = "0.1.0"
