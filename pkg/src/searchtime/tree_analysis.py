"""Expected BFS/DFS runtime on complete b-ary trees with goals seeded per level.

Runtime means the number of goal checks up to and including the first goal;
an instance without goals costs the node count plus one.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

from .distributions import (
    GoalProbabilities,
    exp_rate,
    first_goal_level_probs,
    level_goal_prob,
    tc,
)

__all__ = [
    "TreeModel",
    "RuntimeEstimate",
    "GaussianGoalParams",
    "Verdict",
    "bfs_sgl",
    "dfs_sgl",
    "dfs_block_size",
    "sgl_gamma",
    "sgl_decision",
    "gaussian_goal_vector",
    "dfs_mgl",
    "bfs_mgl",
    "bfs_level_mixture",
    "mgl_decision",
]


class Verdict(str, enum.Enum):
    BFS = "BFS"
    DFS = "DFS"
    BAND = "Band"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class TreeModel:
    depth: int
    branching: int = 2

    def __post_init__(self):
        if self.branching < 2:
            raise ValueError(f"branching factor must be >= 2, got {self.branching}")
        if self.depth < 0:
            raise ValueError(f"depth must be >= 0, got {self.depth}")
        if self.depth * math.log2(self.branching) > 62:
            raise ValueError("tree too large: node count would not fit in 64 bits")

    def level_size(self, k: int) -> int:
        return self.branching**k

    @property
    def level_sizes(self) -> list[int]:
        return [self.branching**k for k in range(self.depth + 1)]

    def nodes_above(self, k: int) -> int:
        """Number of nodes on levels strictly above ``k``."""
        b = self.branching
        return (b**k - 1) // (b - 1)

    @property
    def node_count(self) -> int:
        return self.nodes_above(self.depth + 1)


@dataclass(frozen=True)
class RuntimeEstimate:
    lower: float
    mean: float
    upper: float
    conditioned_on_goal: bool = False

    def __post_init__(self):
        # tolerate round-off when bounds coincide
        slack = 1e-9 * max(1.0, abs(self.upper))
        if not (self.lower <= self.mean + slack and self.mean <= self.upper + slack):
            raise ValueError(f"inconsistent estimate {self.lower} <= {self.mean} <= {self.upper}")

    @classmethod
    def point(cls, value: float, conditioned_on_goal: bool = False) -> "RuntimeEstimate":
        return cls(value, value, value, conditioned_on_goal)

    @property
    def is_point(self) -> bool:
        return self.lower == self.mean == self.upper

    def as_dict(self) -> dict:
        return {
            "lower": self.lower,
            "mean": self.mean,
            "upper": self.upper,
            "conditioned_on_goal": self.conditioned_on_goal,
        }


@dataclass(frozen=True)
class GaussianGoalParams:
    mu: int
    sigma2: float

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise ValueError(f"goal spread sigma2 must be > 0, got {self.sigma2}")
        if self.mu < 0:
            raise ValueError(f"goal peak mu must be >= 0, got {self.mu}")


def _check_sgl(model: TreeModel, g: int, p_g: float) -> None:
    if not 0 <= g <= model.depth:
        raise ValueError(f"goal level {g} outside [0, {model.depth}]")
    if p_g <= 0.0:
        raise ValueError("goal probability must be positive on the goal level")
    if p_g > 1.0:
        raise ValueError(f"goal probability {p_g} > 1")


def _mix_no_goal(conditional: float, p_goal: float, no_goal_cost: float) -> float:
    if p_goal >= 1.0:
        return conditional
    return p_goal * conditional + (1.0 - p_goal) * no_goal_cost


def bfs_sgl(model: TreeModel, g: int, p_g: float, conditioned: bool = False) -> RuntimeEstimate:
    """Exact expected BFS runtime with goals only on level ``g``."""
    _check_sgl(model, g, p_g)
    width = model.level_size(g)
    given_goal = model.nodes_above(g) + tc(p_g, width)
    if conditioned:
        return RuntimeEstimate.point(given_goal, True)
    p_goal = level_goal_prob(p_g, width)
    return RuntimeEstimate.point(_mix_no_goal(given_goal, p_goal, model.node_count + 1))


def dfs_block_size(model: TreeModel, g: int) -> float:
    """Nodes DFS spends per skipped goal-level node: its subtree plus its
    amortised share of ancestors, ``b**(D-g+1) / (b-1)`` (``2**(D-g+1)`` when b=2)."""
    b = model.branching
    return b ** (model.depth - g + 1) / (b - 1)


def dfs_sgl(model: TreeModel, g: int, p_g: float, conditioned: bool = False) -> RuntimeEstimate:
    """Approximate expected DFS runtime with goals only on level ``g``."""
    _check_sgl(model, g, p_g)
    width = model.level_size(g)
    given_goal = (tc(p_g, width) - 1.0) * dfs_block_size(model, g) + 2.0
    if conditioned:
        return RuntimeEstimate.point(given_goal, True)
    p_goal = level_goal_prob(p_g, width)
    return RuntimeEstimate.point(_mix_no_goal(given_goal, p_goal, model.node_count + 1))


def sgl_gamma(model: TreeModel, g: int, p_g: float, approximate: bool = False) -> float:
    """Shift of the BFS/DFS boundary away from ``D/2``.

    ``approximate=True`` uses ``(1-p)/p`` in place of ``tc(p, b**g) - 1``; for
    display only.
    """
    if approximate:
        excess = (1.0 - p_g) / p_g
    else:
        excess = tc(p_g, model.level_size(g)) - 1.0
    if excess <= 0.0:
        return -math.inf
    return math.log(excess, model.branching) / 2.0


def sgl_decision(model: TreeModel, g: int, p_g: float) -> Verdict:
    _check_sgl(model, g, p_g)
    gamma = sgl_gamma(model, g, p_g)
    if gamma == -math.inf:
        return Verdict.BFS
    boundary = model.depth / 2.0 + gamma
    if g < boundary:
        return Verdict.BFS
    if g > boundary + 0.5:
        return Verdict.DFS
    return Verdict.BAND


def gaussian_goal_vector(depth: int, params: GaussianGoalParams) -> GoalProbabilities:
    """Goal probabilities peaking at level ``mu`` with spread ``sigma2``, capped at 1/2."""
    if params.mu > depth:
        raise ValueError(f"goal peak {params.mu} deeper than depth {depth}")
    scale = 1.0 / (20.0 * math.sqrt(params.sigma2))
    probs = [
        min(scale * math.exp(-((i - params.mu) ** 2) / params.sigma2), 0.5)
        for i in range(depth + 1)
    ]
    return GoalProbabilities(probs)


def dfs_mgl(model: TreeModel, p: GoalProbabilities) -> RuntimeEstimate:
    """Exponential-race approximation of DFS runtime with goals on many levels.

    Not conditioned on a goal existing.
    """
    if p.depth != model.depth:
        raise ValueError(f"probabilities cover depth {p.depth}, tree has depth {model.depth}")
    total_rate = 0.0
    for k in p.nonzero_levels():
        if p[k] >= 1.0:
            raise ValueError(f"p[{k}] = 1: the exponential approximation needs p < 1")
        total_rate += exp_rate(p[k]) / dfs_block_size(model, k)
    if total_rate == 0.0:
        raise ValueError("no level has a positive goal probability")
    return RuntimeEstimate.point(1.0 / total_rate)


def bfs_level_mixture(
    p: GoalProbabilities,
    sizes: Sequence[int],
    conditioned: bool = False,
    renormalize: bool = True,
) -> float:
    """Expected BFS runtime for a graph explored level by level.

    Sums ``P(F_k) * (U_k + tc(p_k, n_k))`` over first-goal levels. Unconditioned,
    the no-goal event adds ``P(no goal) * (N + 1)``. Conditioned, that term is
    dropped and, when ``renormalize``, the sum is divided by ``P(goal)``;
    ``renormalize=False`` gives ``E[X; goal exists]``.
    """
    first = first_goal_level_probs(p, sizes)
    total = 0.0
    above = 0
    for k, n_k in enumerate(sizes):
        if p[k] > 0.0 and first[k] > 0.0:
            total += first[k] * (above + tc(p[k], n_k))
        above += n_k
    p_none = first[-1]
    if not conditioned:
        return total + p_none * (above + 1)
    if not renormalize:
        return total
    p_goal = 1.0 - p_none
    if p_goal <= 0.0:
        raise ValueError("no goal can exist under these probabilities")
    return total / p_goal


def bfs_mgl(
    model: TreeModel,
    p: GoalProbabilities,
    conditioned: bool = False,
    renormalize: bool = True,
) -> RuntimeEstimate:
    """Exact expected BFS runtime with goals on many levels."""
    if p.depth != model.depth:
        raise ValueError(f"probabilities cover depth {p.depth}, tree has depth {model.depth}")
    value = bfs_level_mixture(p, model.level_sizes, conditioned, renormalize)
    return RuntimeEstimate.point(value, conditioned)


def mgl_decision(model: TreeModel, p: GoalProbabilities) -> Verdict:
    if bfs_mgl(model, p).mean <= dfs_mgl(model, p).mean:
        return Verdict.BFS
    return Verdict.DFS
