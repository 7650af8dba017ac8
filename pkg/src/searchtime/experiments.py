"""Reproduction experiments: the three D=14 runtime tables, decision-boundary
sweeps raced against sampled problems, and the random-grammar dataset.

Every function here is deterministic given its seed.
"""
from __future__ import annotations

import functools
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Iterator

import numpy as np

from .colliding_branches import DescendantCounter, bfs_cb_sgl, dfs_cb
from .distributions import GoalProbabilities
from .grammar import ADDING_RULES, MOVING_RULES, GrammarRules, build_binary_grammar, build_random_grammar, graph_features
from .graph import SearchGraph
from .simulator import (
    AllTrialsGoalless,
    Method,
    Problem,
    build_complete_tree,
    dfs_first_hit,
    monte_carlo,
    run_search,
    sample_goal_mask,
    search_order,
)
from .tree_analysis import (
    GaussianGoalParams,
    RuntimeEstimate,
    TreeModel,
    Verdict,
    bfs_mgl,
    bfs_sgl,
    dfs_mgl,
    dfs_sgl,
    gaussian_goal_vector,
    mgl_decision,
    sgl_decision,
)

log = logging.getLogger(__name__)

__all__ = [
    "TABLES",
    "BOUNDARIES",
    "TableCell",
    "Table",
    "BoundarySample",
    "BoundaryResult",
    "DatasetRow",
    "run_table",
    "run_boundary",
    "iter_dataset",
    "race",
    "winner_of",
]

TABLE_DEPTH = 14
SGL_LEVELS = (5, 8, 11, 14)
SGL_PROBS = (0.001, 0.01, 0.1)
MGL_PEAKS = (5, 8, 11, 14)
MGL_SPREADS = (0.1, 1.0, 10.0, 100.0)
# about 3% of instances carry a goal here; left empty like the original tables
BLANK_CELLS = frozenset({(5, 0.001)})

TABLES = ("sgl", "mgl", "bg")
BOUNDARIES = ("sgl-fig", "bg-fig", "gaussian-fig")

MAX_GOAL_RESAMPLES = 100_000


# --- tables -----------------------------------------------------------------


@dataclass(frozen=True)
class TableCell:
    row: float
    col: float
    method: str
    analytical: float | None = None
    lower: float | None = None
    upper: float | None = None
    empirical: float | None = None
    stderr: float | None = None
    trials_kept: int | None = None
    error_pct: float | None = None
    blank: bool = False

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Table:
    which: str
    row_name: str
    col_name: str
    depth: int
    cells: list[TableCell] = field(default_factory=list)

    def cell(self, row, col, method: str) -> TableCell:
        for c in self.cells:
            if c.row == row and c.col == col and c.method == method:
                return c
        raise KeyError((row, col, method))


def _error_pct(empirical: float | None, analytical: float | None) -> float | None:
    if empirical is None or analytical is None or analytical <= 0:
        return None
    return 100.0 * abs(empirical - analytical) / analytical


def _empirical(problem: Problem, method: Method, trials: int, seed) -> tuple[float | None, float | None, int]:
    if trials <= 0:
        return None, None, 0
    try:
        stats = monte_carlo(problem, method, trials, seed, condition_on_goal=True)
    except AllTrialsGoalless:
        return None, None, 0
    return stats.mean, stats.stderr, stats.trials_kept


def _make_cell(row, col, method, est: RuntimeEstimate, problem, trials, seed) -> TableCell:
    emp, se, kept = _empirical(problem, Method(method.lower()), trials, seed)
    lower = upper = None
    if not est.is_point:
        lower, upper = est.lower, est.upper
    return TableCell(row, col, method, est.mean, lower, upper, emp, se,
                     kept if trials > 0 else None, _error_pct(emp, est.mean))


def run_table(which: str, trials: int = 1000, seed: int = 0) -> Table:
    """Analytical expectations (and, for ``trials > 0``, conditioned Monte Carlo
    averages) over the standard D=14 grid.

    Analytical columns are conditioned on at least one goal, except the
    multi-level DFS estimate, which is reported raw. The multi-level BFS
    column is ``E[runtime; goal exists]``.
    """
    D = TABLE_DEPTH
    cells: list[TableCell] = []
    if which == "sgl":
        model = TreeModel(D)
        graph = build_complete_tree(2, D)
        for i, g in enumerate(SGL_LEVELS):
            for j, p in enumerate(SGL_PROBS):
                if (g, p) in BLANK_CELLS:
                    cells += [TableCell(g, p, m, blank=True) for m in ("BFS", "DFS")]
                    continue
                problem = Problem(graph, GoalProbabilities.single_level(D, g, p))
                cell_seed = (seed, i, j)
                cells.append(_make_cell(g, p, "BFS", bfs_sgl(model, g, p, True), problem, trials, cell_seed))
                cells.append(_make_cell(g, p, "DFS", dfs_sgl(model, g, p, True), problem, trials, cell_seed))
        return Table(which, "g", "p_g", D, cells)
    if which == "mgl":
        model = TreeModel(D)
        graph = build_complete_tree(2, D)
        for i, mu in enumerate(MGL_PEAKS):
            for j, s2 in enumerate(MGL_SPREADS):
                probs = gaussian_goal_vector(D, GaussianGoalParams(mu, s2))
                problem = Problem(graph, probs)
                cell_seed = (seed, i, j)
                bfs = bfs_mgl(model, probs, conditioned=True, renormalize=False)
                cells.append(_make_cell(mu, s2, "BFS", bfs, problem, trials, cell_seed))
                cells.append(_make_cell(mu, s2, "DFS", dfs_mgl(model, probs), problem, trials, cell_seed))
        return Table(which, "mu", "sigma2", D, cells)
    if which == "bg":
        L = DescendantCounter.binary_grammar(D)
        graph = build_binary_grammar(D, labels=False)
        for i, g in enumerate(SGL_LEVELS):
            for j, p in enumerate(SGL_PROBS):
                if (g, p) in BLANK_CELLS:
                    cells += [TableCell(g, p, m, blank=True) for m in ("BFS", "DFS")]
                    continue
                probs = GoalProbabilities.single_level(D, g, p)
                problem = Problem(graph, probs)
                cell_seed = (seed, i, j)
                cells.append(_make_cell(g, p, "BFS", bfs_cb_sgl(g, p, L, True), problem, trials, cell_seed))
                cells.append(_make_cell(g, p, "DFS", dfs_cb(D, probs, L, True), problem, trials, cell_seed))
        return Table(which, "g", "p_g", D, cells)
    raise ValueError(f"unknown table {which!r}; choose from {', '.join(TABLES)}")


# --- decision boundaries ----------------------------------------------------


@dataclass(frozen=True)
class BoundarySample:
    index: int
    params: dict
    predicted: str
    bfs_time: int
    dfs_time: int
    winner: str

    @property
    def correct(self) -> bool:
        return self.predicted == self.winner

    def as_dict(self) -> dict:
        out = asdict(self)
        out["correct"] = self.correct
        return out


@dataclass(frozen=True)
class BoundaryResult:
    which: str
    grid: list[dict]
    samples: list[BoundarySample]

    @property
    def accuracy(self) -> float:
        if not self.samples:
            return math.nan
        return sum(s.correct for s in self.samples) / len(self.samples)


def winner_of(bfs_time: int, dfs_time: int) -> str:
    """Ties go to BFS."""
    return "BFS" if bfs_time <= dfs_time else "DFS"


def race(graph: SearchGraph, probs: GoalProbabilities, seed) -> tuple[int, int]:
    """One instance with at least one goal, searched by both methods."""
    seed = [int(s) for s in np.atleast_1d(seed)]
    for attempt in range(MAX_GOAL_RESAMPLES):
        mask = sample_goal_mask(graph, probs, [*seed, attempt])
        if mask.any():
            return run_search(graph, mask, Method.BFS), run_search(graph, mask, Method.DFS)
    raise RuntimeError(f"no goal in {MAX_GOAL_RESAMPLES} draws; goal probabilities too small")


def _sgl_prediction(model: TreeModel, g: int, p: float) -> tuple[Verdict, str]:
    verdict = sgl_decision(model, g, p)
    if verdict is Verdict.BAND:
        bfs = bfs_sgl(model, g, p, True).mean
        dfs = dfs_sgl(model, g, p, True).mean
        return verdict, winner_of(bfs, dfs)
    return verdict, verdict.value


def _bg_prediction(L: DescendantCounter, g: int, p: float) -> tuple[float, float, str]:
    D = L.depth
    bfs = bfs_cb_sgl(g, p, L, True).mean
    dfs = dfs_cb(D, GoalProbabilities.single_level(D, g, p), L, True).mean
    return bfs, dfs, winner_of(bfs, dfs)


def _gaussian_prediction(model: TreeModel, mu: int, sigma2: float) -> tuple[float, float, str]:
    probs = gaussian_goal_vector(model.depth, GaussianGoalParams(mu, sigma2))
    return bfs_mgl(model, probs).mean, dfs_mgl(model, probs).mean, mgl_decision(model, probs).value


@functools.lru_cache(maxsize=16)
def _tree(depth: int) -> SearchGraph:
    return build_complete_tree(2, depth)


@functools.lru_cache(maxsize=2)
def _binary_grammar(depth: int) -> SearchGraph:
    return build_binary_grammar(depth, labels=False)


SGL_FIG_PROB = 0.07
SGL_FIG_DEPTHS = (4, 15)
FIG_DEPTH = 14
BG_FIG_LEVELS = (8, 14)
BG_FIG_LOG_P = (-4.0, 0.0)
GAUSS_FIG_PEAKS = (5, 14)
GAUSS_FIG_LOG_S2 = (-2.0, 2.0)


def boundary_grid(which: str, points: int = 41) -> list[dict]:
    """Analytical verdicts over the figure's parameter grid."""
    rows = []
    if which == "sgl-fig":
        p = SGL_FIG_PROB
        lo, hi = SGL_FIG_DEPTHS
        for D in range(lo, hi + 1):
            model = TreeModel(D)
            for g in range(3, D + 1):
                verdict, predicted = _sgl_prediction(model, g, p)
                rows.append({"depth": D, "g": g, "p_g": p, "verdict": verdict.value, "predicted": predicted})
        return rows
    if which == "bg-fig":
        L = DescendantCounter.binary_grammar(FIG_DEPTH)
        for g in range(BG_FIG_LEVELS[0], BG_FIG_LEVELS[1] + 1):
            for lp in np.linspace(*BG_FIG_LOG_P, points):
                p = min(10.0 ** float(lp), 1.0 - 1e-12)
                bfs, dfs, predicted = _bg_prediction(L, g, p)
                rows.append({"depth": FIG_DEPTH, "g": g, "log10_p_g": float(lp), "bfs": bfs, "dfs": dfs,
                             "predicted": predicted})
        return rows
    if which == "gaussian-fig":
        model = TreeModel(FIG_DEPTH)
        for mu in range(GAUSS_FIG_PEAKS[0], GAUSS_FIG_PEAKS[1] + 1):
            for ls in np.linspace(*GAUSS_FIG_LOG_S2, points):
                bfs, dfs, predicted = _gaussian_prediction(model, mu, 10.0 ** float(ls))
                rows.append({"depth": FIG_DEPTH, "mu": mu, "log10_sigma2": float(ls), "bfs": bfs, "dfs": dfs,
                             "predicted": predicted})
        return rows
    raise ValueError(f"unknown figure {which!r}; choose from {', '.join(BOUNDARIES)}")


def run_boundary(which: str, samples: int = 100, seed: int = 0, grid_points: int = 41) -> BoundaryResult:
    """Grid of predicted winners plus ``samples`` raced problems drawn uniformly
    from the figure's parameter ranges (log ranges are base 10)."""
    grid = boundary_grid(which, grid_points)
    rng = np.random.default_rng([seed, BOUNDARIES.index(which)])
    out = []
    for i in range(samples):
        if which == "sgl-fig":
            D = int(rng.integers(SGL_FIG_DEPTHS[0], SGL_FIG_DEPTHS[1] + 1))
            g = int(rng.integers(3, D + 1))
            p = SGL_FIG_PROB
            _, predicted = _sgl_prediction(TreeModel(D), g, p)
            graph = _tree(D)
            probs = GoalProbabilities.single_level(D, g, p)
            params = {"depth": D, "g": g, "p_g": p}
        elif which == "bg-fig":
            D = FIG_DEPTH
            g = int(rng.integers(BG_FIG_LEVELS[0], BG_FIG_LEVELS[1] + 1))
            p = min(10.0 ** float(rng.uniform(*BG_FIG_LOG_P)), 1.0 - 1e-12)
            _, _, predicted = _bg_prediction(DescendantCounter.binary_grammar(D), g, p)
            graph = _binary_grammar(D)
            probs = GoalProbabilities.single_level(D, g, p)
            params = {"depth": D, "g": g, "p_g": p}
        else:
            D = FIG_DEPTH
            mu = int(rng.integers(GAUSS_FIG_PEAKS[0], GAUSS_FIG_PEAKS[1] + 1))
            s2 = 10.0 ** float(rng.uniform(*GAUSS_FIG_LOG_S2))
            _, _, predicted = _gaussian_prediction(TreeModel(D), mu, s2)
            graph = _tree(D)
            probs = gaussian_goal_vector(D, GaussianGoalParams(mu, s2))
            params = {"depth": D, "mu": mu, "sigma2": s2}
        bfs_time, dfs_time = race(graph, probs, (seed, i))
        out.append(BoundarySample(i, params, predicted, bfs_time, dfs_time, winner_of(bfs_time, dfs_time)))
    return BoundaryResult(which, grid, out)


# --- random grammar dataset -------------------------------------------------

DATASET_RULES = ADDING_RULES + MOVING_RULES
DATASET_COLUMNS = ("mean_branching", "std_branching", "num_rules", "max_depth", "bfs_time", "dfs_time", "winner")


@dataclass(frozen=True)
class DatasetRow:
    mean_branching: float
    std_branching: float
    num_rules: int
    max_depth: int
    bfs_time: int
    dfs_time: int
    winner: str

    def as_dict(self) -> dict:
        return asdict(self)


@functools.lru_cache(maxsize=8)
def _random_grammar(rules: GrammarRules, depth: int) -> SearchGraph:
    return build_random_grammar(rules, depth, labels=False)


def _eligible_by_level(graph: SearchGraph, depth: int) -> list[np.ndarray]:
    nodes = np.flatnonzero(graph.goal_eligible)
    levels = graph.level[nodes]
    return [nodes[levels == k] for k in range(depth + 1)]


def sample_problem(rng: np.random.Generator, max_level_retries: int = 100):
    """Draw one random-grammar problem; ``None`` if no goal could be placed."""
    r = int(rng.integers(4, 9))
    picked = sorted(rng.choice(len(DATASET_RULES), size=r, replace=False))
    rules = GrammarRules.from_names(DATASET_RULES[i] for i in picked)
    D = int(rng.integers(11, 16))
    n_goals = int(rng.integers(3, 5 * D + 1))
    graph = _random_grammar(rules, D)
    pools = _eligible_by_level(graph, D)
    goals = set()
    for _ in range(n_goals):
        for _ in range(max_level_retries):
            k = int(rng.integers(1, D + 1))
            if len(pools[k]):
                break
        else:
            log.warning("rules %s, depth %d: no goal-eligible node on any sampled level; skipped",
                        rules.ordered(), D)
            return None
        goals.add(int(pools[k][rng.integers(len(pools[k]))]))
    return rules, D, graph, goals


def iter_dataset(count: int, seed: int = 0, max_skips: int | None = None) -> Iterator[DatasetRow]:
    """Yield ``count`` labelled random-grammar races.

    BFS time is the best goal-check rank in the cached BFS order; DFS stops
    at its first goal. Ties are labelled BFS.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    max_skips = 10 * count if max_skips is None else max_skips
    made = skipped = 0
    while made < count:
        drawn = sample_problem(rng)
        if drawn is None:
            skipped += 1
            if skipped > max_skips:
                raise RuntimeError(f"gave up after {skipped} problems without placeable goals")
            continue
        rules, D, graph, goals = drawn
        bfs_rank = search_order(graph, Method.BFS).rank
        bfs_time = int(bfs_rank[list(goals)].min())
        dfs_time = dfs_first_hit(graph, goals)
        feats = graph_features(graph, rules, depth=D)
        yield DatasetRow(feats.mean_branching, feats.std_branching, feats.num_rules, feats.max_depth,
                         bfs_time, dfs_time, winner_of(bfs_time, dfs_time))
        made += 1
