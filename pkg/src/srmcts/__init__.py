"""Fixed-budget eps-good max-min subtree identification in depth-2 trees."""

from .algorithms import get_algorithm, phase_schedule, soundness_check, sr_mcts
from .env import Environment, RewardStream, Transcript, load_transcript, save_transcript
from .errors import MaxMinError
from .instance import (
    CanonicalMap,
    EpsSummary,
    GapTable,
    MaxMinInstance,
    analyze,
    canonicalize,
    eps_summary,
    gap_table,
    gen_experiment_instance,
    h1,
    h_lb,
    load_instance,
    rho_instance,
    save_instance,
)

__version__ = "0.1.0"
