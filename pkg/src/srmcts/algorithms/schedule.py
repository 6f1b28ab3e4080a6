"""Harmonic phase schedule shared by every successive-rejects style routine."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import InvalidBudgetError, InvalidParameterError


def log_bar(N: int) -> float:
    """1/2 + sum_{r=2}^{N} 1/r."""
    return 0.5 + math.fsum(1.0 / r for r in range(2, N + 1))


@dataclass(frozen=True)
class PhaseSchedule:
    N: int
    budget: int
    log_bar: float
    n: tuple  # n[k] for k = 0 .. N-1, with n[0] = 0

    @property
    def a(self) -> float:
        return (self.budget - self.N) / self.log_bar

    def __getitem__(self, k: int) -> int:
        return self.n[k]

    def worst_case_total(self) -> int:
        """Pulls used when every phase eliminates exactly one arm."""
        N, n = self.N, self.n
        return sum(n[1:N - 1]) + 2 * n[N - 1]

    def is_nondecreasing(self) -> bool:
        return all(x <= y for x, y in zip(self.n, self.n[1:]))


def harmonic_schedule(N: int, T: int) -> PhaseSchedule:
    """n_k = ceil(((T - N) / log_bar(N)) / (N + 1 - k)) for k = 1 .. N-1."""
    if N < 2:
        raise InvalidParameterError(f"need at least 2 arms, got {N}")
    if T <= N:
        raise InvalidBudgetError(f"budget {T} must exceed the number of arms {N}")
    lb = log_bar(N)
    a = (T - N) / lb
    n = (0,) + tuple(math.ceil(a / (N + 1 - k)) for k in range(1, N))
    return PhaseSchedule(N, int(T), lb, n)


def phase_schedule(K: int, L: int, T: int) -> PhaseSchedule:
    return harmonic_schedule(K * L, T)
