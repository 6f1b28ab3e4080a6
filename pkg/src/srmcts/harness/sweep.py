"""Seeded Monte Carlo sweeps over (algorithm, budget, eps) cells.

Reward streams are keyed by (master seed, budget, trial), so at a given
budget every algorithm sees the same rewards in trial ``t`` (common random
numbers), and scheduling or worker count cannot change any result.  None of
the algorithms looks at eps, so each run is scored against every eps value
in the grid instead of being repeated.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.stats import linregress

from ..algorithms import get_algorithm, soundness_check, sr_mcts
from ..algorithms.schedule import log_bar
from ..env import Environment, RewardStream, stream_key
from ..errors import InsufficientDataError, InvalidParameterError
from ..instance import MaxMinInstance, analyze, canonicalize
from .config import ExperimentConfig

SWEEP_FIELDS = ("algo", "budget", "eps", "errors", "trials", "rate", "se")


def cell_seed(master_seed: int, budget: int) -> int:
    return stream_key(master_seed, budget, -1)


@dataclass(frozen=True)
class Cell:
    algo: str
    budget: int
    eps: float
    errors: int
    trials: int

    @property
    def rate(self) -> float:
        return self.errors / self.trials

    @property
    def se(self) -> float:
        p = self.rate
        return math.sqrt(p * (1 - p) / self.trials)

    def row(self) -> list:
        return [self.algo, self.budget, f"{self.eps:g}", self.errors, self.trials,
                f"{self.rate:.6f}", f"{self.se:.6f}"]


@dataclass(eq=False)
class SweepResult:
    instance: MaxMinInstance
    cells: list
    recommendations: dict  # (algo, budget) -> int array over trials
    mean_pulls: dict       # (algo, budget) -> K x L mean pull counts
    mean_spent: dict       # (algo, budget) -> average total pulls per trial

    def cell(self, algo: str, budget: int, eps: float) -> Cell:
        for c in self.cells:
            if c.algo == algo and c.budget == budget and c.eps == eps:
                return c
        raise KeyError((algo, budget, eps))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SWEEP_FIELDS)
        for c in self.cells:
            w.writerow(c.row())
        return buf.getvalue()


def _run_chunk(inst, algo, alpha, budget, seed, trials):
    """Run ``algo`` on trials ``trials``; returns recommendations, pull sum, spent sum."""
    run = get_algorithm(algo, alpha)
    recs = np.empty(len(trials), dtype=np.int64)
    pulls = np.zeros((inst.K, inst.L), dtype=np.int64)
    spent = 0
    for n, t in enumerate(trials):
        env = Environment(inst, budget, stream=RewardStream(inst, seed, t))
        tr = run(env)
        recs[n] = tr.recommendation
        pulls += tr.pulls
        spent += tr.spent
    return recs, pulls, spent


def _chunks(trials: int, parts: int):
    bounds = np.linspace(0, trials, parts + 1).astype(int)
    return [range(a, b) for a, b in zip(bounds, bounds[1:]) if b > a]


def run_trials(cfg: ExperimentConfig) -> SweepResult:
    inst = cfg.instance
    values = inst.values
    v_star = values.max()
    jobs = [(a, T) for a in cfg.algorithms for T in cfg.budgets]
    parts = cfg.workers if cfg.workers > 1 else 1
    tasks = [(inst, a, cfg.alpha, T, cell_seed(cfg.seed, T), ch)
             for a, T in jobs for ch in _chunks(cfg.trials, parts)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            outs = list(pool.map(_run_chunk, *zip(*tasks)))
    else:
        outs = [_run_chunk(*t) for t in tasks]

    # merge in task order, which is fixed by the config alone
    recs, pulls, spent = {}, {}, {}
    for (_, a, _, T, _, _), (r, p, s) in zip(tasks, outs):
        key = (a, T)
        recs[key] = np.concatenate([recs[key], r]) if key in recs else r
        pulls[key] = pulls.get(key, 0) + p
        spent[key] = spent.get(key, 0) + s

    cells = []
    for a, T in jobs:
        v_rec = values[recs[(a, T)]]
        for e in cfg.eps:
            errors = int(np.sum(v_rec < v_star - e))
            cells.append(Cell(a, T, e, errors, cfg.trials))
    return SweepResult(
        inst,
        cells,
        recs,
        {k: v / cfg.trials for k, v in pulls.items()},
        {k: v / cfg.trials for k, v in spent.items()},
    )


def heatmap(cfg: ExperimentConfig) -> np.ndarray:
    """K x L matrix of mean pull counts for one algorithm at one budget."""
    if len(cfg.algorithms) != 1 or len(cfg.budgets) != 1:
        raise InvalidParameterError("heatmap needs exactly one algorithm and one budget")
    res = run_trials(cfg)
    return res.mean_pulls[(cfg.algorithms[0], cfg.budgets[0])]


def heatmap_csv(mat: np.ndarray) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("subtree", "leaf", "mean_pulls"))
    for (i, j), v in np.ndenumerate(mat):
        w.writerow((i, j, f"{v:.6f}"))
    return buf.getvalue()


def theorem1_bound(inst: MaxMinInstance, T: int, eps: float) -> float:
    """2 K^2 L^2 exp(-(T - KL) / (128 logbar(KL) H2(eps))); 0 when every subtree is eps-good."""
    K, L = inst.K, inst.L
    if T <= K * L:
        raise InvalidParameterError(f"budget must exceed KL = {K * L}, got {T}")
    summary = analyze(inst, eps)[3]
    if summary.trivial:
        return 0.0
    N = K * L
    return 2.0 * N * N * math.exp(-(T - N) / (128.0 * log_bar(N) * summary.h2))


def scaling_x(T: int, N: int, h2: float, norm: str = "ln") -> float:
    """(-T + KL) / (log(KL) H2), with ln or the harmonic log_bar."""
    if norm == "ln":
        lg = math.log(N)
    elif norm == "overline":
        lg = log_bar(N)
    else:
        raise InvalidParameterError(f"norm must be 'ln' or 'overline', got {norm!r}")
    return (-T + N) / (lg * h2)


@dataclass(frozen=True)
class ScalingFit:
    points: tuple    # (budget, x, log_rate)
    dropped: tuple   # budgets with zero errors
    slope: float
    intercept: float
    r2: float


def h2_scaling(result: SweepResult, algo: str, eps: float, norm: str = "ln") -> ScalingFit:
    """Least-squares line through (scaling_x, ln error rate) over the budget cells."""
    canon, _ = canonicalize(result.instance)
    summary = analyze(canon, eps)[3]
    if summary.trivial:
        raise InsufficientDataError(f"every subtree is {eps}-good, so H2 is undefined")
    N = canon.K * canon.L
    pts, dropped = [], []
    for c in result.cells:
        if c.algo != algo or c.eps != eps:
            continue
        if c.errors == 0:
            dropped.append(c.budget)
            continue
        pts.append((c.budget, scaling_x(c.budget, N, summary.h2, norm), math.log(c.rate)))
    if len(pts) < 3:
        raise InsufficientDataError(
            f"need at least 3 budgets with errors, got {len(pts)} (dropped zero-error budgets {dropped})"
        )
    pts.sort()
    fit = linregress([p[1] for p in pts], [p[2] for p in pts])
    return ScalingFit(tuple(pts), tuple(dropped), float(fit.slope), float(fit.intercept),
                      float(fit.rvalue ** 2))


def scaling_csv(fit: ScalingFit) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("budget", "x", "log_rate"))
    for T, x, y in fit.points:
        w.writerow((T, f"{x:.9g}", f"{y:.9g}"))
    return buf.getvalue()


def soundness_rate(inst: MaxMinInstance, budget: int, eps: float, trials: int, seed: int = 0) -> float:
    """Fraction of SR-MCTS runs whose every phase is eps-sound."""
    canon, cmap, table, summary = analyze(inst, eps)
    sc = cell_seed(seed, budget)
    ok = 0
    for t in range(trials):
        env = Environment(inst, budget, stream=RewardStream(inst, sc, t))
        ok += soundness_check(inst, summary, sr_mcts(env), eps).verdict
    return ok / trials
