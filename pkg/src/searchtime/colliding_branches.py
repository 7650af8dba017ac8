"""Runtime estimates for graph search on multiply connected graphs.

Everything is driven by the descendant counter ``L[n, d]``: the number of
level-d nodes reachable from the first level-n node that DFS reaches.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .distributions import GoalProbabilities, tc
from .tree_analysis import RuntimeEstimate, bfs_level_mixture

__all__ = [
    "DescendantCounter",
    "SubgraphSizes",
    "ExplorableProbs",
    "subgraph_sizes",
    "explorable_goal_probs",
    "dfs_cb",
    "bfs_cb_sgl",
    "bfs_cb",
    "MAX_DEPTH",
]

MAX_DEPTH = 62


class DescendantCounter:
    """Dense ``(D+1) x (D+1)`` matrix of 64-bit descendant counts."""

    def __init__(self, counts):
        counts = np.array(counts, dtype=np.int64)
        if counts.ndim != 2 or counts.shape[0] != counts.shape[1]:
            raise ValueError(f"descendant counter must be square, got shape {counts.shape}")
        depth = counts.shape[0] - 1
        if depth > MAX_DEPTH:
            raise ValueError(f"depth {depth} exceeds {MAX_DEPTH}")
        if (counts < 0).any():
            raise ValueError("descendant counts must be non-negative")
        if (np.diag(counts) < 1).any():
            raise ValueError("L(n, n) must be at least 1: delta_n counts itself")
        if np.tril(counts, -1).any():
            raise ValueError("L(n, d) must vanish for d < n")
        if (counts[:-1] < counts[1:]).any():
            raise ValueError("L(n, d) must not increase with n")
        counts.setflags(write=False)
        self.counts = counts

    @classmethod
    def complete_tree(cls, branching: int, depth: int) -> "DescendantCounter":
        if branching**depth > 2**63 - 1:
            raise ValueError(f"{branching}^{depth} nodes overflow 64-bit counts")
        return cls([[branching ** (d - n) if d >= n else 0 for d in range(depth + 1)]
                    for n in range(depth + 1)])

    @classmethod
    def binary_grammar(cls, depth: int) -> "DescendantCounter":
        from .grammar import lbg_matrix

        return cls(lbg_matrix(depth))

    @classmethod
    def full_grammar(cls, depth: int) -> "DescendantCounter":
        from .grammar import lfg_matrix

        return cls(lfg_matrix(depth))

    @property
    def depth(self) -> int:
        return self.counts.shape[0] - 1

    def __getitem__(self, nd) -> int:
        return int(self.counts[nd])

    def __eq__(self, other) -> bool:
        if not isinstance(other, DescendantCounter):
            return NotImplemented
        return np.array_equal(self.counts, other.counts)

    def __repr__(self) -> str:
        return f"DescendantCounter(depth={self.depth})"

    def explorables(self) -> np.ndarray:
        """``A[n, d] = L(n, d) - L(n+1, d)`` with ``L(D+1, .) = 0``."""
        shifted = np.vstack([self.counts[1:], np.zeros((1, self.depth + 1), dtype=np.int64)])
        return self.counts - shifted

    def level_sizes(self) -> list[int]:
        """Row 0: node count per level of the whole problem."""
        return [int(x) for x in self.counts[0]]


@dataclass(frozen=True)
class SubgraphSizes:
    """``|S_n|`` for n in -1..D+1, ``|T_n|`` for n in 0..D and ``U_k`` for k in 0..D+1.

    Use :meth:`s_at` for the shifted indexing of ``s``.
    """

    s: tuple[int, ...]
    t: tuple[int, ...]
    u: tuple[int, ...]

    def s_at(self, n: int) -> int:
        return self.s[n + 1]


class ExplorableProbs(NamedTuple):
    """``tau[n]`` for n in 0..D; ``phi[0]`` is the no-goal probability and
    ``phi[n + 1]`` the probability that ``T_n`` holds the first goal."""

    tau: list[float]
    phi: list[float]

    @property
    def phi_none(self) -> float:
        return self.phi[0]


def subgraph_sizes(L: DescendantCounter) -> SubgraphSizes:
    counts = L.counts
    depth = L.depth
    s_n = [int(x) for x in counts.sum(axis=1)]
    s = (s_n[0] + 1, *s_n, 0)
    A = L.explorables()
    t = tuple(int(A[n, n:].sum()) for n in range(depth + 1))
    level0 = counts[0]
    u = tuple(int(level0[:k].sum()) for k in range(depth + 2))
    for n in range(depth + 1):
        if s[n + 1] != s[n + 2] + t[n]:
            raise ValueError(f"malformed descendant counter: |S_{n}| != |S_{n + 1}| + |T_{n}|")
    return SubgraphSizes(s, t, u)


def _check_dims(p: GoalProbabilities, L: DescendantCounter) -> None:
    if p.depth != L.depth:
        raise ValueError(f"probabilities cover depth {p.depth}, counter has depth {L.depth}")


def explorable_goal_probs(L: DescendantCounter, p: GoalProbabilities) -> ExplorableProbs:
    _check_dims(p, L)
    depth = L.depth
    A = L.explorables()
    log_q = []
    certain = []
    for k in range(depth + 1):
        certain.append(p[k] >= 1.0)
        log_q.append(math.log1p(-p[k]) if 0.0 < p[k] < 1.0 else 0.0)
    tau = []
    for n in range(depth + 1):
        if any(certain[k] and A[n, k] > 0 for k in range(depth + 1)):
            tau.append(1.0)
            continue
        log_miss = sum(int(A[n, k]) * log_q[k] for k in range(depth + 1) if log_q[k])
        tau.append(-math.expm1(log_miss))
    phi_n = []
    for n in range(depth + 1):
        later_miss = math.prod(1.0 - tau[i] for i in range(n + 1, depth + 1))
        phi_n.append(tau[n] * later_miss)
    phi_none = 1.0 - math.fsum(phi_n)
    # round-off can leave a -1e-17 remainder
    phi_none = min(max(phi_none, 0.0), 1.0)
    return ExplorableProbs(tau, [phi_none, *phi_n])


def dfs_cb(D: int, p: GoalProbabilities, L: DescendantCounter, conditioned: bool = False) -> RuntimeEstimate:
    """Lower/upper bounds on expected DFS runtime and their midpoint.

    Assumes DFS reaches the deepest first node ``delta_D`` before it can meet a
    goal; the caller is responsible for that holding for the graph family.
    """
    if D != L.depth:
        raise ValueError(f"depth {D} disagrees with counter depth {L.depth}")
    if not p.nonzero_levels():
        raise ValueError("no level has a positive goal probability")
    sizes = subgraph_sizes(L)
    probs = explorable_goal_probs(L, p)
    lower = sum(sizes.s_at(n + 1) * probs.phi[n + 1] for n in range(D + 1))
    upper = sum(sizes.s_at(n) * probs.phi[n + 1] for n in range(D + 1))
    none = probs.phi_none
    if conditioned:
        p_goal = 1.0 - none
        if p_goal <= 0.0:
            raise ValueError("no goal can exist under these probabilities")
        lower, upper = lower / p_goal, upper / p_goal
    else:
        lower += sizes.s_at(0) * none
        upper += sizes.s_at(-1) * none
    return RuntimeEstimate(lower, (lower + upper) / 2.0, upper, conditioned)


def bfs_cb_sgl(g: int, p_g: float, L: DescendantCounter, conditioned: bool = False) -> RuntimeEstimate:
    """Exact expected BFS runtime with goals only on level ``g``."""
    if not 0 <= g <= L.depth:
        raise ValueError(f"goal level {g} outside [0, {L.depth}]")
    if p_g <= 0.0:
        raise ValueError("goal probability must be positive on the goal level")
    sizes = L.level_sizes()
    width = sizes[g]
    if width < 1:
        raise ValueError(f"level {g} is empty")
    given_goal = sum(sizes[:g]) + tc(p_g, width)
    if conditioned:
        return RuntimeEstimate.point(given_goal, True)
    p_goal = -math.expm1(width * math.log1p(-p_g)) if p_g < 1.0 else 1.0
    value = p_goal * given_goal + (1.0 - p_goal) * (sum(sizes) + 1)
    return RuntimeEstimate.point(value)


def bfs_cb(
    p: GoalProbabilities,
    L: DescendantCounter,
    conditioned: bool = False,
    renormalize: bool = True,
) -> RuntimeEstimate:
    """Exact expected BFS runtime with level sizes ``L(0, k)``."""
    _check_dims(p, L)
    value = bfs_level_mixture(p, L.level_sizes(), conditioned, renormalize)
    return RuntimeEstimate.point(value, conditioned)
