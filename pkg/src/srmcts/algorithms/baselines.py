"""Baselines: uniform allocation, bottom-up SAR, SAR+Compare, and the two
subroutines they share (multi-bandit Successive Accepts and Rejects on
negated rewards, and classic Successive Rejects)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..env import Environment, PhaseRecord, Transcript
from ..errors import InvalidBudgetError, InvalidParameterError
from .schedule import harmonic_schedule

DEFAULT_ALPHA = 0.8


def _budget(env: Environment, budget) -> int:
    T = env.budget if budget is None else int(budget)
    if T > env.remaining:
        raise InvalidBudgetError(f"budget {T} exceeds the {env.remaining} pulls left in the environment")
    return T


def uniform_baseline(env: Environment, budget: int | None = None) -> Transcript:
    """Spread the budget evenly over all leaves and recommend argmax_i min_j of the means."""
    T = _budget(env, budget)
    N = env.K * env.L
    if T < N:
        raise InvalidBudgetError(f"uniform allocation needs T >= KL = {N}, got {T}")
    q, r = divmod(T, N)
    num = np.full(N, q, dtype=np.int64)
    num[:r] += 1
    sums = env.pull_block(np.arange(N), num)
    means = (sums / num).reshape(env.K, env.L)
    return env.finish(int(np.argmax(means.min(axis=1))), algorithm="uniform")


@dataclass(frozen=True)
class SARResult:
    candidates: tuple  # one (i, j) leaf per bandit
    means: tuple       # empirical means of the candidates on the original rewards
    log: tuple
    spent: int


def multibandit_sar(env: Environment, bandits=None, budget: int | None = None) -> SARResult:
    """Successive Accepts and Rejects over several bandits, one best arm each.

    Works on negated rewards, so each bandit's "best" arm is its empirical
    minimum.  Every phase tops the active arms up to ``n_k`` pulls; per
    bandit the leader's gap is (leader - runner-up) and every other arm's is
    (leader - arm).  The arm with the globally largest gap is accepted if it
    leads its bandit (which then stops sampling) and rejected otherwise.  A
    bandit left with one active arm accepts it.
    """
    B = _budget(env, budget)
    if bandits is None:
        bandits = [[(i, j) for j in range(env.L)] for i in range(env.K)]
    arms = [leaf for b in bandits for leaf in b]
    N = len(arms)
    if B <= N:
        raise InvalidBudgetError(f"MultiBanditSAR needs B > number of arms = {N}, got {B}")
    sizes = [len(b) for b in bandits]
    owner = np.repeat(np.arange(len(bandits)), sizes)
    # arm ids laid out as a padded bandits x max-size grid
    grid_ok = np.arange(max(sizes))[None, :] < np.array(sizes)[:, None]
    grid_arm = np.zeros(grid_ok.shape, dtype=np.int64)
    grid_arm[grid_ok] = np.arange(N)
    rows = np.arange(len(bandits))
    flat = np.array([i * env.L + j for i, j in arms], dtype=np.int64)
    sched = harmonic_schedule(N, B) if N >= 2 else None

    counts = np.zeros(N, dtype=np.int64)
    sums = np.zeros(N)
    active = np.ones(N, dtype=bool)
    chosen = [None] * len(bandits)
    log = []
    spent0 = env.spent

    def accept(a, k):
        b = owner[a]
        chosen[b] = int(a)
        active[owner == b] = False
        log.append(PhaseRecord(k, (arms[a],), "accept"))

    def accept_singletons(k):
        left = np.bincount(owner[active], minlength=len(bandits))
        for b in np.flatnonzero(left == 1):
            accept(int(np.flatnonzero(active & (owner == b))[0]), k)

    if N == 1:
        sums[0] = env.pull_block(flat, [1])[0]
        counts[0] = 1
        accept(0, 1)
    for k in range(1, N):
        if all(c is not None for c in chosen):
            break
        nk = sched[k]
        todo = np.flatnonzero(active & (counts < nk))
        if len(todo):
            sums[todo] += env.pull_block(flat[todo], nk - counts[todo])
            counts[todo] = nk
        accept_singletons(k)
        if all(c is not None for c in chosen):
            break
        # per-bandit view, -inf on inactive slots
        neg = np.full(grid_arm.shape, -np.inf)
        live = active[grid_arm] & grid_ok
        neg[live] = -sums[grid_arm[live]] / counts[grid_arm[live]]
        open_b = live.any(axis=1)
        top = np.argmax(neg, axis=1)
        best = neg[rows, top]
        rest = neg.copy()
        rest[rows, top] = -np.inf
        second = rest.max(axis=1)
        with np.errstate(invalid="ignore"):
            g = np.where(live, best[:, None] - neg, -np.inf)
            g[rows, top] = np.where(open_b, best - second, -np.inf)
        gaps = np.full(N, -np.inf)
        gaps[grid_arm[live]] = g[live]
        leader = {int(b): int(grid_arm[b, top[b]]) for b in np.flatnonzero(open_b)}
        a = int(np.argmax(gaps))
        if leader[owner[a]] == a:
            accept(a, k)
        else:
            active[a] = False
            log.append(PhaseRecord(k, (arms[a],), "reject"))
            accept_singletons(k)

    for b in range(len(bandits)):
        if chosen[b] is None:
            ids = np.flatnonzero(active & (owner == b))
            means = sums[ids] / np.maximum(counts[ids], 1)
            accept(ids[int(np.argmin(means))], N)

    cand = tuple(arms[c] for c in chosen)
    means = tuple(float(sums[c] / counts[c]) for c in chosen)
    return SARResult(cand, means, tuple(log), env.spent - spent0)


def bottom_up_sar(env: Environment, budget: int | None = None) -> Transcript:
    T = _budget(env, budget)
    res = multibandit_sar(env, budget=T)
    rec = int(np.argmax(res.means))
    return env.finish(res.candidates[rec][0], res.log, algorithm="bottom-up-sar",
                      candidates=[list(c) for c in res.candidates])


@dataclass(frozen=True)
class SRResult:
    survivor: tuple
    mean: float
    eliminated: tuple  # arms in elimination order
    log: tuple


def sr_classic(arms, env: Environment, budget: int) -> SRResult:
    """Classic Successive Rejects over ``arms`` with its own fresh statistics.

    Each phase tops the survivors up to ``n_k`` pulls and drops the
    empirically worst arm; the empirical leader is never dropped.
    """
    arms = [tuple(a) for a in arms]
    N = len(arms)
    B = int(budget)
    if N < 2:
        raise InvalidParameterError(f"Successive Rejects needs at least 2 arms, got {N}")
    if B > env.remaining:
        raise InvalidBudgetError(f"budget {B} exceeds the {env.remaining} pulls left")
    sched = harmonic_schedule(N, B)
    flat = np.array([i * env.L + j for i, j in arms], dtype=np.int64)
    counts = np.zeros(N, dtype=np.int64)
    sums = np.zeros(N)
    active = np.ones(N, dtype=bool)
    eliminated, log = [], []
    for k in range(1, N):
        nk = sched[k]
        todo = np.flatnonzero(active & (counts < nk))
        if len(todo):
            sums[todo] += env.pull_block(flat[todo], nk - counts[todo])
            counts[todo] = nk
        ids = np.flatnonzero(active)
        means = sums[ids] / counts[ids]
        lead = int(np.argmax(means))
        rest = np.delete(np.arange(len(ids)), lead)
        worst = int(ids[rest[np.argmin(means[rest])]])
        active[worst] = False
        eliminated.append(arms[worst])
        log.append(PhaseRecord(k, (arms[worst],), "single-leaf"))
    s = int(np.flatnonzero(active)[0])
    return SRResult(arms[s], float(sums[s] / counts[s]), tuple(eliminated), tuple(log))


def sr_classic_tree(env: Environment, budget: int | None = None) -> Transcript:
    """Classic SR on an L = 1 tree, whose subtrees are single arms."""
    T = _budget(env, budget)
    if env.L != 1:
        raise InvalidParameterError(f"sr-classic runs on L = 1 trees only, got L = {env.L}")
    if env.K == 1:
        return env.finish(0, algorithm="sr-classic")
    res = sr_classic([(i, 0) for i in range(env.K)], env, T)
    return env.finish(res.survivor[0], res.log, algorithm="sr-classic")


def sar_compare(env: Environment, budget: int | None = None, alpha: float = DEFAULT_ALPHA) -> Transcript:
    """Bottom-up candidate minima with ``floor(alpha T)`` pulls, then SR across them."""
    T = _budget(env, budget)
    if not 0 < alpha < 1:
        raise InvalidParameterError(f"alpha must lie in (0, 1), got {alpha}")
    t_min = math.floor(alpha * T)
    t_cmp = T - t_min
    K, L = env.K, env.L
    if t_min <= K * L:
        raise InvalidBudgetError(f"first stage budget floor(alpha T) = {t_min} must exceed KL = {K * L}")
    if K >= 2 and t_cmp <= K:
        raise InvalidBudgetError(f"comparison stage budget {t_cmp} must exceed K = {K}")
    stage1 = multibandit_sar(env, budget=t_min)
    if K == 1:
        return env.finish(0, stage1.log, algorithm="sar-compare", stage_budgets=[t_min, t_cmp])
    stage2 = sr_classic(stage1.candidates, env, t_cmp)
    return env.finish(stage2.survivor[0], stage1.log + stage2.log, algorithm="sar-compare",
                      candidates=[list(c) for c in stage1.candidates],
                      stage_budgets=[t_min, t_cmp])
