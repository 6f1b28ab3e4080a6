"""Experiment engine: configs, seeded sweeps, heatmaps, scaling fits, plots."""

from .config import DEFAULT_TRIALS, NORMS, ExperimentConfig, parse_instance_source
from .sweep import (
    Cell,
    ScalingFit,
    SweepResult,
    cell_seed,
    h2_scaling,
    heatmap,
    heatmap_csv,
    run_trials,
    scaling_csv,
    scaling_x,
    soundness_rate,
    theorem1_bound,
)

__all__ = [
    "DEFAULT_TRIALS",
    "NORMS",
    "Cell",
    "ExperimentConfig",
    "ScalingFit",
    "SweepResult",
    "cell_seed",
    "h2_scaling",
    "heatmap",
    "heatmap_csv",
    "parse_instance_source",
    "run_trials",
    "scaling_csv",
    "scaling_x",
    "soundness_rate",
    "theorem1_bound",
]
