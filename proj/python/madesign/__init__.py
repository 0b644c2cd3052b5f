"""Mixture adaptive design: anytime-valid ATE inference for bandit experiments."""

from ._core import (
    ConfidenceSequenceTrack,
    DeltaSchedule,
    InvariantError,
    ParameterError,
    Trajectory,
    asymptotic_radius,
    beta_superiority,
    cs_track,
    eta_for_horizon,
    evaluate_schedule,
    generate_table,
    ipw_step,
    list_presets,
    mix,
    normal_mixture_boundary,
    preset_json,
    run_preset,
    run_trajectory,
    stitched_boundary,
    stopping_time,
    true_ate_curve,
)

__all__ = [
    "ConfidenceSequenceTrack",
    "DeltaSchedule",
    "InvariantError",
    "ParameterError",
    "Trajectory",
    "asymptotic_radius",
    "beta_superiority",
    "cs_track",
    "eta_for_horizon",
    "evaluate_schedule",
    "generate_table",
    "ipw_step",
    "list_presets",
    "mix",
    "normal_mixture_boundary",
    "preset_json",
    "run_preset",
    "run_trajectory",
    "stitched_boundary",
    "stopping_time",
    "true_ate_curve",
]
