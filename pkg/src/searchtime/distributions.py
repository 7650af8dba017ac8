"""Probability primitives: (truncated) geometric expectations, the exponential
rate matching a geometric CDF, and per-level goal / first-goal probabilities.

Powers ``(1 - p)**n`` are evaluated as ``exp(n * log1p(-p))`` throughout so
that level sizes around ``2**20`` do not lose precision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

__all__ = [
    "GoalProbabilities",
    "LevelSizes",
    "survival",
    "tc",
    "exp_rate",
    "level_goal_prob",
    "first_goal_level_probs",
]

# Below this value of p*m, 1/p - m q^m / (1 - q^m) loses ~eps/(p m) relative
# precision; the series used instead has relative error below (p m)^3.
_TC_SERIES_CUTOFF = 1e-4


@dataclass(frozen=True)
class GoalProbabilities:
    """Per-level goal probabilities ``probs[k]`` for levels ``0..depth``."""

    probs: tuple[float, ...]

    def __init__(self, probs: Sequence[float], *, allow_zero: bool = False):
        probs = tuple(float(x) for x in probs)
        if not probs:
            raise ValueError("goal probability vector must cover at least level 0")
        for k, x in enumerate(probs):
            if not 0.0 <= x <= 1.0 or math.isnan(x):
                raise ValueError(f"goal probability p[{k}]={x} outside [0, 1]")
        if not allow_zero and not any(x > 0.0 for x in probs):
            raise ValueError("at least one level must have a positive goal probability")
        object.__setattr__(self, "probs", probs)

    @classmethod
    def single_level(cls, depth: int, level: int, prob: float) -> "GoalProbabilities":
        if not 0 <= level <= depth:
            raise ValueError(f"goal level {level} outside [0, {depth}]")
        probs = [0.0] * (depth + 1)
        probs[level] = prob
        return cls(probs)

    @classmethod
    def zeros(cls, depth: int) -> "GoalProbabilities":
        return cls([0.0] * (depth + 1), allow_zero=True)

    @property
    def depth(self) -> int:
        return len(self.probs) - 1

    def q(self, k: int) -> float:
        return 1.0 - self.probs[k]

    def __len__(self) -> int:
        return len(self.probs)

    def __getitem__(self, k: int) -> float:
        return self.probs[k]

    def __iter__(self):
        return iter(self.probs)

    def nonzero_levels(self) -> list[int]:
        return [k for k, x in enumerate(self.probs) if x > 0.0]


@dataclass(frozen=True)
class LevelSizes:
    """Number of nodes on each level."""

    sizes: tuple[int, ...]

    def __init__(self, sizes: Sequence[int]):
        sizes = tuple(int(s) for s in sizes)
        if any(s < 0 for s in sizes):
            raise ValueError("level sizes must be non-negative")
        object.__setattr__(self, "sizes", sizes)

    @classmethod
    def complete_tree(cls, branching: int, depth: int) -> "LevelSizes":
        return cls([branching**k for k in range(depth + 1)])

    @property
    def depth(self) -> int:
        return len(self.sizes) - 1

    @property
    def total(self) -> int:
        return sum(self.sizes)

    def __len__(self) -> int:
        return len(self.sizes)

    def __getitem__(self, k: int) -> int:
        return self.sizes[k]

    def __iter__(self):
        return iter(self.sizes)


def survival(p: float, n: float) -> float:
    """``(1 - p)**n`` without underflow trouble; ``0**0`` is taken as 1."""
    if n == 0 or p == 0.0:
        return 1.0
    if p >= 1.0:
        return 0.0
    return math.exp(n * math.log1p(-p))


def tc(p: float, m: int) -> float:
    """Expectation of a geometric(p) variable truncated to ``{1, ..., m}``."""
    if not 0.0 < p <= 1.0:
        raise ValueError(f"tc needs 0 < p <= 1, got p={p}")
    if m < 1 or int(m) != m:
        raise ValueError(f"tc needs an integer m >= 1, got m={m}")
    if p == 1.0 or m == 1:
        return 1.0
    if p * m < _TC_SERIES_CUTOFF:
        return (m + 1) / 2.0 - (m * m - 1) * (p / 12.0 + p * p / 24.0)
    log_q = math.log1p(-p)
    q_m = math.exp(m * log_q)
    hit = -math.expm1(m * log_q)
    value = 1.0 / p - m * q_m / hit
    return min(max(value, 1.0), float(m))


def exp_rate(p: float) -> float:
    """Rate ``-ln(1 - p)`` of the exponential whose CDF matches Geo(p) on integers."""
    if not 0.0 <= p < 1.0:
        raise ValueError(f"exp_rate needs 0 <= p < 1, got p={p}")
    if p == 0.0:
        return 0.0
    return -math.log1p(-p)


def level_goal_prob(p_k: float, n_k: int) -> float:
    """Probability that a level of ``n_k`` iid candidates holds at least one goal."""
    if not 0.0 <= p_k <= 1.0:
        raise ValueError(f"probability {p_k} outside [0, 1]")
    if n_k < 0:
        raise ValueError(f"node count must be non-negative, got {n_k}")
    if n_k == 0 or p_k == 0.0:
        return 0.0
    if p_k == 1.0:
        return 1.0
    return -math.expm1(n_k * math.log1p(-p_k))


def first_goal_level_probs(p: GoalProbabilities, sizes: LevelSizes | Sequence[int]) -> list[float]:
    """``P(F_k)`` for k = 0..D, followed by the no-goal probability at index D+1."""
    if len(sizes) != len(p):
        raise ValueError(f"level sizes cover {len(sizes)} levels, probabilities {len(p)}")
    out = []
    none_yet = 1.0
    for p_k, n_k in zip(p, sizes):
        hit = level_goal_prob(p_k, n_k)
        out.append(none_yet * hit)
        none_yet *= 1.0 - hit
    out.append(none_yet)
    return out
