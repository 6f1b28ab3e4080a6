"""Fixed-budget interaction: seeded reward streams, pull accounting, transcripts.

Rewards are counter-based: the noise of the ``p``-th pull of leaf ``l`` in
trial ``t`` under master seed ``s`` is a pure function of ``(s, t, l, p)``.
It does not depend on which algorithm asks for it or in what order leaves
are pulled, so runs reproduce exactly and parallel trials cannot interleave.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import ndtri

from .errors import BudgetExceededError, InvalidParameterError, UnavailableMeanError
from .instance import MaxMinInstance

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_TWO_M53 = 2.0 ** -53


def _mix64(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * _M1) & _MASK
    z = ((z ^ (z >> 27)) * _M2) & _MASK
    return z ^ (z >> 31)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def stream_key(seed: int, trial: int, leaf: int) -> int:
    """64-bit key of one leaf's reward stream."""
    h = _mix64(seed ^ 0x5851F42D4C957F2D)
    h = _mix64(h + (trial + 1) * _GAMMA)
    return _mix64(h + (leaf + 1) * _GAMMA)


def counter_bits(keys: np.ndarray, pulls: np.ndarray) -> np.ndarray:
    """SplitMix64 output at position ``pulls`` of the streams ``keys``."""
    z = keys.astype(np.uint64) + (pulls.astype(np.uint64) + np.uint64(1)) * np.uint64(_GAMMA)
    return _mix64_array(z)


def _noise_from_bits(bits: np.ndarray, kind: str) -> np.ndarray:
    if kind == "gaussian":
        u = ((bits >> np.uint64(11)).astype(np.float64) + 0.5) * _TWO_M53
        return ndtri(u)
    if kind == "bernoulli":
        # +-1 with equal probability: range 2, hence 1-sub-Gaussian
        return np.where(bits >> np.uint64(63), 1.0, -1.0)
    return np.zeros(bits.shape)


class RewardStream:
    """Deterministic reward source for one trial of one instance."""

    def __init__(self, inst: MaxMinInstance, seed: int = 0, trial: int = 0):
        self.inst = inst
        self.seed = int(seed)
        self.trial = int(trial)
        self._means = inst.means.ravel()
        self._keys = np.array(
            [stream_key(self.seed, self.trial, l) for l in range(inst.K * inst.L)], dtype=np.uint64
        )

    def rewards(self, leaves, pulls) -> np.ndarray:
        """Rewards at pull indices ``pulls`` of flat leaf indices ``leaves``."""
        leaves = np.asarray(leaves, dtype=np.int64)
        bits = counter_bits(self._keys[leaves], np.asarray(pulls))
        return self._means[leaves] + _noise_from_bits(bits, self.inst.noise)

    def block_sums(self, leaves: np.ndarray, starts: np.ndarray, counts: np.ndarray) -> np.ndarray:
        """Sum of pulls ``starts[g] .. starts[g]+counts[g]-1`` of each leaf ``leaves[g]``."""
        total = int(counts.sum())
        if total == 0:
            return np.zeros(len(leaves))
        group = np.repeat(np.arange(len(leaves)), counts)
        offsets = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
        r = self.rewards(leaves[group], starts[group] + offsets)
        return np.bincount(group, weights=r, minlength=len(leaves))


@dataclass(frozen=True)
class PhaseRecord:
    k: int
    eliminated: tuple  # of (i, j)
    kind: str  # "single-leaf" | "subtree" | "accept" | "reject"


@dataclass(frozen=True, eq=False)
class Transcript:
    """Outcome of one algorithm run.

    ``pulls`` and ``sums`` are K x L; ``phase_log`` lists eliminations in
    order; ``recommendation`` is the recommended subtree (raw index).
    """

    pulls: np.ndarray
    sums: np.ndarray
    phase_log: tuple
    recommendation: int
    spent: int
    budget: int
    algorithm: str = ""
    truncated: bool = False
    info: dict = field(default_factory=dict)

    def empirical_means(self) -> np.ndarray:
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(self.pulls > 0, self.sums / np.maximum(self.pulls, 1), np.nan)

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "budget": self.budget,
            "spent": self.spent,
            "recommendation": self.recommendation,
            "truncated": self.truncated,
            "pulls": self.pulls.tolist(),
            "sums": self.sums.tolist(),
            "phase_log": [
                {"k": r.k, "eliminated": [list(x) for x in r.eliminated], "kind": r.kind}
                for r in self.phase_log
            ],
            "info": self.info,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Transcript":
        return cls(
            pulls=np.array(doc["pulls"], dtype=np.int64),
            sums=np.array(doc["sums"], dtype=np.float64),
            phase_log=tuple(
                PhaseRecord(int(r["k"]), tuple(tuple(x) for x in r["eliminated"]), r["kind"])
                for r in doc["phase_log"]
            ),
            recommendation=int(doc["recommendation"]),
            spent=int(doc["spent"]),
            budget=int(doc["budget"]),
            algorithm=doc.get("algorithm", ""),
            truncated=bool(doc.get("truncated", False)),
            info=doc.get("info", {}),
        )


def save_transcript(tr: Transcript, path) -> None:
    Path(path).write_text(json.dumps(tr.to_dict(), indent=2) + "\n")


def load_transcript(path) -> Transcript:
    return Transcript.from_dict(json.loads(Path(path).read_text()))


def empirical_mean(tr: Transcript, leaf) -> float:
    i, j = leaf
    n = tr.pulls[i, j]
    if n == 0:
        raise UnavailableMeanError(f"leaf {leaf} has not been pulled")
    return float(tr.sums[i, j] / n)


class Environment:
    """One algorithm run against one instance with a hard budget of ``budget`` pulls."""

    def __init__(self, inst: MaxMinInstance, budget: int, seed: int = 0, trial: int = 0,
                 *, stream: RewardStream | None = None, record: bool = False):
        if budget < 1:
            raise InvalidParameterError(f"budget must be positive, got {budget}")
        self.inst = inst
        self.budget = int(budget)
        self.stream = stream if stream is not None else RewardStream(inst, seed, trial)
        self.K, self.L = inst.K, inst.L
        self.counts = np.zeros((self.K, self.L), dtype=np.int64)
        self.sums = np.zeros((self.K, self.L))
        self.spent = 0
        self.log = {} if record else None

    @property
    def remaining(self) -> int:
        return self.budget - self.spent

    def pull(self, i: int, j: int) -> float:
        if self.spent >= self.budget:
            raise BudgetExceededError(f"budget of {self.budget} pulls exhausted")
        leaf = i * self.L + j
        x = float(self.stream.rewards([leaf], [self.counts[i, j]])[0])
        self.counts[i, j] += 1
        self.sums[i, j] += x
        self.spent += 1
        if self.log is not None:
            self.log.setdefault((i, j), []).append(x)
        return x

    def pull_block(self, leaves, num) -> np.ndarray:
        """Pull each flat leaf ``leaves[g]`` a further ``num[g]`` times.

        Returns the per-leaf sums of the new rewards.
        """
        leaves = np.asarray(leaves, dtype=np.int64)
        num = np.asarray(num, dtype=np.int64)
        need = int(num.sum())
        if need > self.remaining:
            raise BudgetExceededError(
                f"request for {need} pulls exceeds remaining budget {self.remaining}"
            )
        if need == 0:
            return np.zeros(len(leaves))
        flat_counts = self.counts.reshape(-1)
        starts = flat_counts[leaves].copy()
        if self.log is not None:
            for l, s, c in zip(leaves, starts, num):
                xs = self.stream.rewards(np.full(c, l), np.arange(s, s + c))
                self.log.setdefault(divmod(int(l), self.L), []).extend(xs.tolist())
        block = self.stream.block_sums(leaves, starts, num)
        np.add.at(flat_counts, leaves, num)
        np.add.at(self.sums.reshape(-1), leaves, block)
        self.spent += need
        return block

    def finish(self, recommendation: int, phase_log=(), algorithm: str = "",
               truncated: bool = False, **info) -> Transcript:
        pulls = self.counts.copy()
        sums = self.sums.copy()
        pulls.setflags(write=False)
        sums.setflags(write=False)
        return Transcript(pulls, sums, tuple(phase_log), int(recommendation), self.spent,
                          self.budget, algorithm, truncated, info)
