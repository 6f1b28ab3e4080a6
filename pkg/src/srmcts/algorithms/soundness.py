"""Per-phase eps-soundness monitor for SR-MCTS transcripts.

Replays the elimination log against the true instance and checks, at the
beginning of every phase (and of the phase after termination), that the
optimal and near-optimal subtrees survive and that every surviving
not-near-optimal subtree still holds its true minimizing leaf.  Needs the
true means, so it is a test and diagnostics tool only.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..env import Transcript
from ..errors import InconsistencyError, InvalidParameterError
from ..instance import EpsSummary, MaxMinInstance, canonicalize, good_set


@dataclass(frozen=True)
class PhaseSoundness:
    k: int
    regime: str  # "early" (k <= KL - m) or "late"
    conditions: dict  # condition number -> bool
    post_termination: bool = False

    @property
    def sound(self) -> bool:
        return all(self.conditions.values())


@dataclass(frozen=True)
class SoundnessReport:
    eps: float
    m: int
    phases: tuple

    @property
    def verdict(self) -> bool:
        return all(p.sound for p in self.phases)

    def first_violation(self):
        return next((p for p in self.phases if not p.sound), None)


def phase_conditions(active: np.ndarray, k: int, N: int, m: int,
                     good_half: np.ndarray, bad_eps: np.ndarray) -> tuple[str, dict]:
    """Evaluate the soundness conditions on a canonical active-leaf mask."""
    nonempty = active.any(axis=1)
    anchored = active[:, 0] | ~nonempty  # min leaf survives, or subtree gone
    if k <= N - m:
        others = good_half.copy()
        others[0] = False
        return "early", {
            1: bool(nonempty[0]),
            2: bool(np.all(active[others, 0])),
            3: bool(np.all(anchored[~good_half])),
        }
    return "late", {
        4: bool(np.all(nonempty[good_half]) or not np.any(nonempty[bad_eps])),
        5: bool(np.all(anchored[bad_eps])),
    }


def soundness_check(true_inst: MaxMinInstance, summary: EpsSummary, tr: Transcript,
                    eps: float) -> SoundnessReport:
    """``true_inst`` may be raw; the transcript must use the same (raw) labels."""
    if summary.trivial:
        raise InvalidParameterError("soundness is only defined when not every subtree is eps-good")
    if summary.eps != eps:
        raise InconsistencyError(f"summary was computed for eps={summary.eps}, not {eps}")
    canon, cmap = canonicalize(true_inst)
    K, L = canon.K, canon.L
    if tr.pulls.shape != (K, L):
        raise InconsistencyError(f"transcript shape {tr.pulls.shape} does not match instance {(K, L)}")
    N, m = K * L, summary.m
    v = canon.means[:, 0]
    good_half = good_set(v, eps / 2)
    bad_eps = ~good_set(v, eps)

    active = np.ones((K, L), dtype=bool)
    phases = []
    k = 1
    for rec in tr.phase_log:
        if rec.kind not in ("single-leaf", "subtree"):
            raise InconsistencyError(f"phase log entry of kind {rec.kind!r} is not an SR-MCTS elimination")
        if rec.k != k:
            raise InconsistencyError(f"phase log jumps to k={rec.k}, expected k={k}")
        regime, cond = phase_conditions(active, k, N, m, good_half, bad_eps)
        phases.append(PhaseSoundness(k, regime, cond))
        for i, j in rec.eliminated:
            c, cj = cmap.leaf_to_canonical(i, j)
            if not active[c, cj]:
                raise InconsistencyError(f"leaf {(i, j)} eliminated twice")
            active[c, cj] = False
        k += len(rec.eliminated)
    regime, cond = phase_conditions(active, k, N, m, good_half, bad_eps)
    phases.append(PhaseSoundness(k, regime, cond, post_termination=True))
    return SoundnessReport(float(eps), m, tuple(phases))
