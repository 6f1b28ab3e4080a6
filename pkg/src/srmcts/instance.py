"""Depth-2 max-min tree instances, canonical ordering and the gap calculus.

Indices are 0-based throughout: subtree ``i`` in ``range(K)``, leaf ``j`` in
``range(L)``.  In canonical form subtree 0 is optimal and leaf 0 of every
subtree is its minimizer.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    DegenerateInstanceError,
    InvalidInstanceError,
    InvalidParameterError,
)

NOISE_KINDS = ("gaussian", "bernoulli", "noiseless")

# subtree minima of the experiment generator
EXPERIMENT_MIN_SPAN = 0.18
STRUCTURED_WIDTH = 0.04


def _as_matrix(means) -> np.ndarray:
    arr = np.array(means, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.size == 0:
        raise InvalidInstanceError(f"means must be a nonempty K x L matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInstanceError("means contain non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class MaxMinInstance:
    """K subtrees of L leaves each; ``means[i, j]`` is the mean reward of leaf (i, j)."""

    means: np.ndarray
    noise: str = "gaussian"

    def __post_init__(self):
        object.__setattr__(self, "means", _as_matrix(self.means))
        if self.noise not in NOISE_KINDS:
            raise InvalidInstanceError(f"unknown noise kind {self.noise!r}; expected one of {NOISE_KINDS}")

    @property
    def K(self) -> int:
        return self.means.shape[0]

    @property
    def L(self) -> int:
        return self.means.shape[1]

    @property
    def values(self) -> np.ndarray:
        """Subtree min-values v_i."""
        return self.means.min(axis=1)

    @property
    def v_star(self) -> float:
        return float(self.values.max())

    @property
    def optimal_subtree(self) -> int:
        return int(np.argmax(self.values))

    def has_unique_optimum(self) -> bool:
        v = self.values
        return int(np.sum(v == v.max())) == 1

    def is_canonical(self) -> bool:
        m = self.means
        rows_sorted = bool(np.all(np.diff(m, axis=1) >= 0)) if self.L > 1 else True
        firsts_sorted = bool(np.all(np.diff(m[:, 0]) <= 0)) if self.K > 1 else True
        return rows_sorted and firsts_sorted

    def with_means(self, means) -> "MaxMinInstance":
        return MaxMinInstance(means, self.noise)

    def with_noise(self, noise: str) -> "MaxMinInstance":
        return MaxMinInstance(self.means, noise)

    def to_dict(self) -> dict:
        return {
            "k": self.K,
            "l": self.L,
            "means": self.means.tolist(),
            "noise": self.noise,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "MaxMinInstance":
        try:
            k, l, means = int(doc["k"]), int(doc["l"]), doc["means"]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInstanceError(f"instance document missing or malformed field: {exc}") from exc
        inst = cls(means, doc.get("noise", "gaussian"))
        if inst.means.shape != (k, l):
            raise InvalidInstanceError(f"declared shape ({k}, {l}) does not match means {inst.means.shape}")
        return inst


def save_instance(inst: MaxMinInstance, path) -> None:
    Path(path).write_text(json.dumps(inst.to_dict(), indent=2) + "\n")


def load_instance(path) -> MaxMinInstance:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidInstanceError(f"{path}: not a JSON document ({exc})") from exc
    return MaxMinInstance.from_dict(doc)


@dataclass(frozen=True)
class CanonicalMap:
    """Relabeling from a raw instance to its canonical form.

    ``subtree_perm[c]`` is the raw subtree placed at canonical position ``c``;
    ``leaf_perms[c][j]`` is the raw leaf (within that raw subtree) placed at
    canonical leaf ``j``.
    """

    subtree_perm: tuple
    leaf_perms: tuple

    @classmethod
    def identity(cls, K: int, L: int) -> "CanonicalMap":
        return cls(tuple(range(K)), tuple(tuple(range(L)) for _ in range(K)))

    @property
    def is_identity(self) -> bool:
        K, L = len(self.subtree_perm), len(self.leaf_perms[0])
        return self == CanonicalMap.identity(K, L)

    def apply(self, raw_means) -> np.ndarray:
        raw = np.asarray(raw_means, dtype=np.float64)
        return np.array([raw[r][list(p)] for r, p in zip(self.subtree_perm, self.leaf_perms)])

    def invert(self, canonical_means) -> np.ndarray:
        canon = np.asarray(canonical_means, dtype=np.float64)
        raw = np.empty_like(canon)
        for c, (r, p) in enumerate(zip(self.subtree_perm, self.leaf_perms)):
            raw[r, list(p)] = canon[c]
        return raw

    def subtree_to_raw(self, c: int) -> int:
        return self.subtree_perm[c]

    def subtree_to_canonical(self, r: int) -> int:
        return self.subtree_perm.index(r)

    def leaf_to_raw(self, c: int, j: int) -> tuple:
        return self.subtree_perm[c], self.leaf_perms[c][j]

    def leaf_to_canonical(self, r: int, j: int) -> tuple:
        c = self.subtree_perm.index(r)
        return c, self.leaf_perms[c].index(j)


def canonicalize(raw) -> tuple[MaxMinInstance, CanonicalMap]:
    """Sort each subtree's leaves ascending, then subtrees by min-value descending.

    Ties keep the lower raw index first.
    """
    if isinstance(raw, MaxMinInstance):
        noise, means = raw.noise, raw.means
    else:
        noise, means = "gaussian", _as_matrix(raw)
    leaf_orders = [np.argsort(row, kind="stable") for row in means]
    sorted_rows = np.array([row[o] for row, o in zip(means, leaf_orders)])
    subtree_order = np.argsort(-sorted_rows[:, 0], kind="stable")
    cmap = CanonicalMap(
        tuple(int(r) for r in subtree_order),
        tuple(tuple(int(x) for x in leaf_orders[r]) for r in subtree_order),
    )
    return MaxMinInstance(sorted_rows[subtree_order], noise), cmap


def _require_canonical(inst: MaxMinInstance) -> None:
    if not inst.is_canonical():
        raise InvalidInstanceError("instance is not in canonical order; canonicalize it first")


def _require_unique(inst: MaxMinInstance) -> None:
    if inst.K >= 2 and inst.means[0, 0] == inst.means[1, 0]:
        raise DegenerateInstanceError(
            f"optimal subtree is not unique (v_1 = v_2 = {inst.means[0, 0]!r})"
        )


@dataclass(frozen=True, eq=False)
class GapTable:
    gaps: np.ndarray
    sorted: np.ndarray
    order: tuple  # (i, j) source of each sorted entry, row-major tie-break

    @property
    def N(self) -> int:
        return self.gaps.size


def gap_table(inst: MaxMinInstance) -> GapTable:
    """Leafwise gaps of a canonical instance with a unique optimal subtree.

    For K = 1 there is no competitor and every gap is +inf.
    """
    _require_canonical(inst)
    _require_unique(inst)
    mu = inst.means
    K, L = mu.shape
    gaps = np.empty_like(mu)
    if K == 1:
        gaps[:] = np.inf
    else:
        v = mu[:, 0]
        gaps[0] = mu[0] - v[1]
        gaps[1:] = np.maximum((v[0] - v[1:])[:, None], mu[1:] - v[1:, None])
    flat = gaps.ravel()
    idx = np.argsort(flat, kind="stable")
    order = tuple(divmod(int(f), L) for f in idx)
    gaps.setflags(write=False)
    srt = flat[idx]
    srt.setflags(write=False)
    return GapTable(gaps, srt, order)


@dataclass(frozen=True)
class EpsSummary:
    eps: float
    good_set: tuple
    bad_set: tuple
    g: int
    delta_star: float | None
    m: int | None
    h1: float
    h2: float  # 0.0 when trivial
    trivial: bool


def good_set(values, eps: float) -> np.ndarray:
    """Boolean mask of eps-good subtrees given subtree min-values."""
    values = np.asarray(values, dtype=np.float64)
    return values >= values.max() - eps


def eps_summary(inst: MaxMinInstance, table: GapTable, eps: float) -> EpsSummary:
    if eps < 0:
        raise InvalidParameterError(f"eps must be >= 0, got {eps}")
    _require_canonical(inst)
    K = inst.K
    mask = good_set(inst.means[:, 0], eps)
    good = tuple(int(i) for i in np.flatnonzero(mask))
    bad = tuple(int(i) for i in np.flatnonzero(~mask))
    g = len(good)
    h1 = float(np.sum(np.maximum(table.sorted, eps) ** -2.0))
    if g == K:
        return EpsSummary(float(eps), good, bad, g, None, None, h1, 0.0, True)
    # canonical order puts the good subtrees first
    delta_star = float(table.gaps[g, 0])
    m = int(np.flatnonzero(table.sorted == delta_star).max())
    r = np.arange(1, table.N + 1)
    h2 = float(np.max(r[m:] * table.sorted[m:] ** -2.0))
    return EpsSummary(float(eps), good, bad, g, delta_star, m, h1, h2, False)


def h1(inst: MaxMinInstance, table: GapTable | None = None) -> float:
    """H(nu) = H1(0), the full leafwise complexity."""
    table = table or gap_table(inst)
    return float(np.sum(table.sorted ** -2.0))


def h_lb(inst: MaxMinInstance, table: GapTable | None = None) -> float:
    """Lower-bound complexity over the critical leaves (competitor minima and
    the optimal subtree's non-minimizers)."""
    table = table or gap_table(inst)
    gaps = table.gaps
    return float(np.sum(gaps[1:, 0] ** -2.0) + np.sum(gaps[0, 1:] ** -2.0))


def analyze(inst: MaxMinInstance, eps: float = 0.0):
    """Canonicalize a raw instance and return (canonical, map, gaps, summary)."""
    canon, cmap = canonicalize(inst)
    table = gap_table(canon)
    return canon, cmap, table, eps_summary(canon, table, eps)


def gen_experiment_instance(
    K: int,
    L: int,
    variant: str = "structured",
    seed: int = 0,
    *,
    assign: bool = False,
    noise: str = "gaussian",
) -> MaxMinInstance:
    """Experiment trees: subtree minima evenly spaced from 0 down to -0.18.

    The other L-1 leaves of subtree i are drawn uniformly from
    ``[v_i, v_i + 0.04]`` (structured) or ``[v_i, 1]`` (random).  With
    ``assign=True`` the structured leaves are evenly spaced over that interval
    instead of sampled.  The result is returned in canonical form.
    """
    if K < 2:
        raise InvalidParameterError(f"K must be >= 2, got {K}")
    if L < 1:
        raise InvalidParameterError(f"L must be >= 1, got {L}")
    if variant not in ("structured", "random"):
        raise InvalidParameterError(f"variant must be 'structured' or 'random', got {variant!r}")
    mins = np.linspace(0.0, -EXPERIMENT_MIN_SPAN, K)
    rng = np.random.default_rng(seed)
    means = np.empty((K, L))
    means[:, 0] = mins
    if L > 1:
        if variant == "structured":
            if assign:
                steps = np.arange(1, L) / (L - 1) * STRUCTURED_WIDTH
                means[:, 1:] = mins[:, None] + steps[None, :]
            else:
                means[:, 1:] = rng.uniform(mins[:, None], mins[:, None] + STRUCTURED_WIDTH, size=(K, L - 1))
        else:
            means[:, 1:] = rng.uniform(mins[:, None], 1.0, size=(K, L - 1))
    canon, _ = canonicalize(MaxMinInstance(means, noise))
    return canon


def rho_instance(rho: float, noise: str = "gaussian") -> MaxMinInstance:
    """The (2,2) grouped instance with subtrees {rho, 1} and {0, rho^2}, canonical."""
    return MaxMinInstance([[rho, 1.0], [0.0, rho * rho]], noise)
