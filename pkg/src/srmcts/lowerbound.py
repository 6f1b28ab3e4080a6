"""Lower-bound constructions: KL and Bretagnolle-Huber arithmetic, the
best-arm flipping family, the critical-leaf alternative family of a max-min
instance, and the flatten-vs-tree complexity counterexample.

Everything here assumes unit-variance Gaussian rewards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .env import Transcript
from .errors import DegenerateInstanceError, InconsistencyError, InvalidParameterError
from .instance import MaxMinInstance, canonicalize, gap_table, h1, h_lb

# explicit constants of the restated lower bound: c1 * exp(-c2 T / H_lb)
LB_C1 = 0.25
LB_C2 = 2.0
CLASS_FACTOR = 4.0


def kl_gaussian(m: float, m_prime: float) -> float:
    """KL(N(m, 1), N(m', 1))."""
    return 0.5 * (m - m_prime) ** 2


def bh_floor(kl: float) -> float:
    """Bretagnolle-Huber: P(E^c) + Q(E) >= exp(-kl) / 2."""
    if kl < 0:
        raise InvalidParameterError(f"KL divergence must be >= 0, got {kl}")
    return 0.5 * math.exp(-kl)


def lb_exponent(nu: MaxMinInstance, T: float) -> float:
    """Error floor (1/4) exp(-2T / H_lb(nu)) attained somewhere in the 4H(nu) class."""
    _require_gaussian(nu)
    canon, _ = canonicalize(nu)
    hlb = h_lb(canon)
    if hlb == 0:
        return LB_C1
    return LB_C1 * math.exp(-LB_C2 * T / hlb)


def _require_gaussian(nu: MaxMinInstance) -> None:
    if nu.noise != "gaussian":
        raise InvalidParameterError(f"lower-bound tooling needs Gaussian noise, got {nu.noise!r}")


def bai_complexity(means) -> float:
    """sum_{k != best} (mu_best - mu_k)^-2 for a plain bandit."""
    mu = np.asarray(means, dtype=np.float64)
    best = int(np.argmax(mu))
    rest = np.delete(mu[best] - mu, best)
    return float(np.sum(rest ** -2.0))


@dataclass(frozen=True, eq=False)
class FlipFamily:
    d: np.ndarray
    base: np.ndarray          # (1/2, 1/2 - d_2, ..., 1/2 - d_K)
    alts: tuple               # alts[i-1] flips arm i (0-based i >= 1) to 1/2 + d_i
    h_base: float
    h_alts: tuple

    @property
    def monotone(self) -> bool:
        return all(h <= self.h_base for h in self.h_alts)


def build_flip_family(d) -> FlipFamily:
    d = np.asarray(d, dtype=np.float64).ravel()
    if d.size == 0 or not np.all(d > 0):
        raise InvalidParameterError("flip family needs at least one gap and all gaps > 0")
    base = np.concatenate([[0.5], 0.5 - d])
    alts = []
    for i in range(1, base.size):
        a = base.copy()
        a[i] = 0.5 + d[i - 1]
        alts.append(a)
    # complexities straight from the gaps: recovering d_i as 0.5 - (0.5 - d_i)
    # loses bits and can break the K = 2 equality case.  Arm i's flip keeps
    # gap d_i for the old best arm and widens every other gap to d_i + d_j.
    # Summing termwise in the same order keeps h_alt <= h_base exact in floats.
    h_base = float(np.sum(d ** -2.0))
    h_alts = []
    for i in range(d.size):
        gaps = d + d[i]
        gaps[i] = d[i]
        h_alts.append(float(np.sum(gaps ** -2.0)))
    return FlipFamily(d, base, tuple(alts), h_base, tuple(h_alts))


@dataclass(frozen=True, eq=False)
class Alternative:
    leaf: tuple               # critical leaf (i, j), canonical 0-based
    instance: MaxMinInstance  # in the base's canonical coordinates
    optimum: int
    h: float                  # H(nu'); inf when nu' has a tied optimum
    h_ratio: float
    min_gap_ratio: float      # min over leaves of Delta'/Delta

    @property
    def optimum_moved(self) -> bool:
        return self.optimum != 0

    @property
    def half_gap(self) -> bool:
        return self.min_gap_ratio >= 0.5

    @property
    def in_class(self) -> bool:
        return self.h_ratio <= CLASS_FACTOR


@dataclass(frozen=True, eq=False)
class AlternativeFamily:
    base: MaxMinInstance
    h: float
    h_lb: float
    alts: tuple

    def violations(self) -> list:
        """(leaf, check) pairs for every alternative that fails a check."""
        out = []
        for a in self.alts:
            for name, ok in (("optimum", a.optimum_moved), ("half-gap", a.half_gap),
                             ("class", a.in_class)):
                if not ok:
                    out.append((a.leaf, name))
        return out


def _alt_gaps(alt: MaxMinInstance):
    """Leafwise gaps of ``alt`` laid out in its own (un-canonicalized) coordinates."""
    canon, cmap = canonicalize(alt)
    table = gap_table(canon)
    return cmap.invert(table.gaps), h1(canon, table)


def build_alt_family(nu: MaxMinInstance) -> AlternativeFamily:
    """Alternatives nu^{i,1} (subtree i lifted by 2 Delta_{i,1}) and nu^{1,j}
    (leaf (1,j) lowered by 2 Delta_{1,j}).

    Checks are reported on each alternative, not raised.
    """
    _require_gaussian(nu)
    if not nu.is_canonical():
        raise InvalidParameterError("alternative family needs a canonical base instance")
    if nu.K < 2:
        raise DegenerateInstanceError("alternative family needs at least two subtrees")
    table = gap_table(nu)
    gaps = table.gaps
    H = h1(nu, table)
    K, L = nu.K, nu.L
    alts = []
    leaves = [(i, 0) for i in range(1, K)] + [(0, j) for j in range(1, L)]
    for i, j in leaves:
        mu = nu.means.copy()
        if j == 0:
            mu[i] += 2 * gaps[i, 0]
        else:
            mu[0, j] -= 2 * gaps[0, j]
        alt = nu.with_means(mu)
        try:
            alt_gaps, h_alt = _alt_gaps(alt)
            ratio = float(np.min(alt_gaps / gaps))
        except DegenerateInstanceError:
            h_alt, ratio = math.inf, 0.0
        alts.append(Alternative((i, j), alt, alt.optimal_subtree, h_alt, h_alt / H, ratio))
    return AlternativeFamily(nu, H, h_lb(nu, table), tuple(alts))


def llr_from_sums(nu: MaxMinInstance, alt: MaxMinInstance, tr: Transcript) -> float:
    """log dP_nu / dP_alt of a transcript, from per-leaf counts and reward sums."""
    mu, mu2 = nu.means, alt.means
    return float(np.sum((mu - mu2) * (tr.sums - tr.pulls * (mu + mu2) / 2)))


def kl_budget_identity_check(nu: MaxMinInstance, alt: MaxMinInstance, tr: Transcript):
    """(lhs, rhs): the transcript log-likelihood ratio and sum_{a,b} N_ab KL(mu_ab, mu'_ab).

    Averaged over runs under ``nu`` the two sides agree in expectation.
    """
    if nu.noise != alt.noise:
        raise InconsistencyError(f"noise mismatch: {nu.noise!r} vs {alt.noise!r}")
    _require_gaussian(nu)
    if nu.means.shape != alt.means.shape or tr.pulls.shape != nu.means.shape:
        raise InconsistencyError("instance, alternative and transcript shapes differ")
    rhs = float(np.sum(tr.pulls * 0.5 * (nu.means - alt.means) ** 2))
    return llr_from_sums(nu, alt, tr), rhs


def counterexample_22(rho: float):
    """(h1_flatten, h1_tree, ratio) for the grouped instance {{rho, 1}, {0, rho^2}}."""
    if not 0 < rho < 1:
        raise InvalidParameterError(f"rho must lie in (0, 1), got {rho}")
    flat = (1 - rho) ** -2 + (1 - rho * rho) ** -2 + 1.0
    tree = 1.0 + 3.0 * rho ** -2
    return flat, tree, flat / tree


def _check_perm(p, n: int, what: str) -> tuple:
    p = tuple(int(x) for x in p)
    if sorted(p) != list(range(n)):
        raise InvalidParameterError(f"{what} {p} is not a permutation of range({n})")
    return p


def subtree_preserving_permute(nu: MaxMinInstance, sigma0, sigmas) -> MaxMinInstance:
    """Leaf (i, j) of the result carries the distribution of (sigma0[i], sigmas[i][j])."""
    K, L = nu.K, nu.L
    s0 = _check_perm(sigma0, K, "subtree permutation")
    if len(sigmas) != K:
        raise InvalidParameterError(f"need {K} leaf permutations, got {len(sigmas)}")
    ss = [_check_perm(s, L, f"leaf permutation {i}") for i, s in enumerate(sigmas)]
    mu = np.array([nu.means[s0[i]][list(ss[i])] for i in range(K)])
    return nu.with_means(mu)
