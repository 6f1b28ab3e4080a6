"""Successive Rejects for depth-2 max-min trees (SR-MCTS).

Each phase tops every active leaf up to ``n_k`` pulls, computes tree-aware
empirical gaps, and removes the leaf with the largest gap, or a whole
non-leading subtree when all of its active leaves attain that maximum.
Ties always go to the lowest (row-major) index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..env import Environment, PhaseRecord, Transcript
from ..errors import InvalidBudgetError
from .schedule import phase_schedule

SINGLE_LEAF = "single-leaf"
SUBTREE = "subtree"


@dataclass(frozen=True, eq=False)
class EmpiricalState:
    means: np.ndarray   # K x L empirical means, nan where inactive
    hat1: np.ndarray    # per-subtree empirical minimizer, -1 if the subtree is empty
    a_hat: int          # empirical maximin subtree
    mu_star: float      # its empirical min-value
    gaps: np.ndarray    # K x L empirical gaps, nan where inactive
    dmax: float


def empirical_state(means: np.ndarray, active: np.ndarray) -> EmpiricalState:
    """Empirical minimizers, leader and gaps over the active leaves.

    Needs at least two nonempty subtrees.
    """
    K = means.shape[0]
    alive = active.any(axis=1)
    masked = np.where(active, means, np.inf)
    hat1 = np.argmin(masked, axis=1)
    vhat = masked[np.arange(K), hat1]
    contenders = np.where(alive, vhat, -np.inf)
    a_hat = int(np.argmax(contenders))
    mu_star = float(contenders[a_hat])
    runner_up = float(np.max(np.delete(contenders, a_hat)))

    gaps = np.maximum(mu_star - vhat[:, None], means - vhat[:, None])
    gaps[a_hat] = means[a_hat] - runner_up
    gaps = np.where(active, gaps, np.nan)
    return EmpiricalState(
        np.where(active, means, np.nan),
        np.where(alive, hat1, -1),
        a_hat,
        mu_star,
        gaps,
        float(np.nanmax(gaps)),
    )


def choose_elimination(state: EmpiricalState, active: np.ndarray) -> tuple[tuple, str]:
    """Leaves to drop this phase and the kind of elimination."""
    at_max = state.gaps == state.dmax  # nan compares False
    alive = active.any(axis=1)
    whole = alive & np.all(at_max | ~active, axis=1)
    whole[state.a_hat] = False
    if whole.any():
        x = int(np.argmax(whole))
        return tuple((x, int(j)) for j in np.flatnonzero(active[x])), SUBTREE
    i, j = divmod(int(np.argmax(at_max.ravel())), active.shape[1])
    return ((i, j),), SINGLE_LEAF


def sr_mcts(env: Environment, budget: int | None = None) -> Transcript:
    T = env.budget if budget is None else int(budget)
    K, L = env.K, env.L
    N = K * L
    if T <= N:
        raise InvalidBudgetError(f"SR-MCTS needs T > KL = {N}, got {T}")
    if T > env.budget:
        raise InvalidBudgetError(f"budget {T} exceeds the environment budget {env.budget}")
    if K == 1:
        return env.finish(0, algorithm="sr-mcts")

    sched = phase_schedule(K, L, T)
    active = np.ones((K, L), dtype=bool)
    counts = np.zeros((K, L), dtype=np.int64)
    sums = np.zeros((K, L))
    log = []
    k = 1
    state = None
    recommendation = None
    while k <= N - 1:
        nk = sched[k]
        todo = np.flatnonzero(active.ravel() & (counts.ravel() < nk))
        if len(todo):
            need = nk - counts.ravel()[todo]
            sums.ravel()[todo] += env.pull_block(todo, need)
            counts.ravel()[todo] = nk
        state = empirical_state(sums / np.maximum(counts, 1), active)
        leaves, kind = choose_elimination(state, active)
        for i, j in leaves:
            active[i, j] = False
        log.append(PhaseRecord(k, leaves, kind))
        alive = np.flatnonzero(active.any(axis=1))
        if len(alive) == 1:
            recommendation = int(alive[0])
            break
        k += len(leaves)

    truncated = recommendation is None
    if truncated:
        recommendation = state.a_hat
    return env.finish(recommendation, log, algorithm="sr-mcts", truncated=truncated)
