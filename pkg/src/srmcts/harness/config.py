"""Experiment configuration and instance-source parsing."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from ..algorithms import ALGORITHMS, DEFAULT_ALPHA
from ..errors import ConfigError, MaxMinError
from ..instance import NOISE_KINDS, MaxMinInstance, gen_experiment_instance, load_instance, rho_instance

NORMS = ("ln", "overline")
DEFAULT_TRIALS = 1000


def parse_instance_source(src: str) -> MaxMinInstance:
    """Build an instance from a generator spec or load it from a JSON file.

    Generator specs: ``structured:KxL[:seed[:noise]]``,
    ``random:KxL[:seed[:noise]]``, ``assigned:KxL[:seed[:noise]]`` (evenly
    spaced structured leaves) and ``rho:value[:noise]``.
    """
    if isinstance(src, MaxMinInstance):
        return src
    parts = str(src).split(":")
    kind = parts[0]
    try:
        if kind in ("structured", "random", "assigned"):
            K, L = (int(x) for x in parts[1].lower().split("x"))
            seed = int(parts[2]) if len(parts) > 2 else 0
            noise = parts[3] if len(parts) > 3 else "gaussian"
            variant = "random" if kind == "random" else "structured"
            return gen_experiment_instance(K, L, variant, seed, assign=kind == "assigned", noise=noise)
        if kind == "rho":
            noise = parts[2] if len(parts) > 2 else "gaussian"
            return rho_instance(float(parts[1]), noise)
    except (IndexError, ValueError) as exc:
        if isinstance(exc, MaxMinError):
            raise ConfigError("instance", str(exc)) from exc
        raise ConfigError("instance", f"malformed generator spec {src!r}") from exc
    path = Path(src)
    if not path.is_file():
        raise ConfigError("instance", f"{src!r} is neither a generator spec nor an existing file")
    return load_instance(path)


@dataclass
class ExperimentConfig:
    instance: MaxMinInstance | str
    algorithms: list = field(default_factory=lambda: ["sr-mcts"])
    budgets: list = field(default_factory=list)
    eps: list = field(default_factory=lambda: [0.0])
    trials: int = DEFAULT_TRIALS
    seed: int = 0
    workers: int = 1
    out: str | None = None
    norm: str = "ln"
    alpha: float = DEFAULT_ALPHA

    def __post_init__(self):
        self.instance = parse_instance_source(self.instance)
        self.algorithms = list(self.algorithms)
        self.budgets = [int(t) for t in self.budgets]
        self.eps = [float(e) for e in self.eps]
        self.validate()

    def validate(self) -> None:
        K, L = self.instance.K, self.instance.L
        if not self.algorithms:
            raise ConfigError("algorithms", "at least one algorithm is required")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise ConfigError("algorithms", f"unknown algorithm {a!r}; choose from {', '.join(ALGORITHMS)}")
        if not self.budgets:
            raise ConfigError("budgets", "at least one budget is required")
        bad = [t for t in self.budgets if t <= K * L]
        if bad:
            raise ConfigError("budgets", f"every budget must exceed KL = {K * L}, got {bad}")
        if not self.eps:
            raise ConfigError("eps", "at least one eps value is required")
        if any(e < 0 for e in self.eps):
            raise ConfigError("eps", f"eps values must be >= 0, got {self.eps}")
        if self.trials < 1:
            raise ConfigError("trials", f"must be >= 1, got {self.trials}")
        if self.workers < 1:
            raise ConfigError("workers", f"must be >= 1, got {self.workers}")
        if self.seed < 0:
            raise ConfigError("seed", f"must be >= 0, got {self.seed}")
        if self.norm not in NORMS:
            raise ConfigError("norm", f"must be one of {NORMS}, got {self.norm!r}")
        if not 0 < self.alpha < 1:
            raise ConfigError("alpha", f"must lie in (0, 1), got {self.alpha}")
        if self.instance.noise not in NOISE_KINDS:
            raise ConfigError("instance", f"unknown noise {self.instance.noise!r}")
