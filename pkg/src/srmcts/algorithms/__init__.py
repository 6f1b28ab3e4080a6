"""Fixed-budget algorithms and the string registry used by the CLI."""

from functools import partial

from ..errors import InvalidParameterError
from .baselines import (
    DEFAULT_ALPHA,
    SARResult,
    SRResult,
    bottom_up_sar,
    multibandit_sar,
    sar_compare,
    sr_classic,
    sr_classic_tree,
    uniform_baseline,
)
from .schedule import PhaseSchedule, harmonic_schedule, log_bar, phase_schedule
from .soundness import SoundnessReport, soundness_check
from .sr_mcts import EmpiricalState, choose_elimination, empirical_state, sr_mcts

ALGORITHMS = {
    "sr-mcts": sr_mcts,
    "uniform": uniform_baseline,
    "bottom-up-sar": bottom_up_sar,
    "sar-compare": sar_compare,
    "sr-classic": sr_classic_tree,
}


def get_algorithm(name: str, alpha: float = DEFAULT_ALPHA):
    """Return a callable ``f(env) -> Transcript`` for a registered algorithm name."""
    try:
        fn = ALGORITHMS[name]
    except KeyError:
        raise InvalidParameterError(
            f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHMS)}"
        ) from None
    if name == "sar-compare":
        return partial(fn, alpha=alpha)
    return fn


__all__ = [
    "ALGORITHMS",
    "DEFAULT_ALPHA",
    "EmpiricalState",
    "PhaseSchedule",
    "SARResult",
    "SRResult",
    "SoundnessReport",
    "bottom_up_sar",
    "choose_elimination",
    "empirical_state",
    "get_algorithm",
    "harmonic_schedule",
    "log_bar",
    "multibandit_sar",
    "phase_schedule",
    "sar_compare",
    "soundness_check",
    "sr_classic",
    "sr_classic_tree",
    "sr_mcts",
    "uniform_baseline",
]
