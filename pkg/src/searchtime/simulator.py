"""Instrumented BFS/DFS, iid goal seeding, an exact expectation oracle and a
seeded Monte Carlo harness.

Each trial draws its goals from ``numpy.random.default_rng([seed, trial])``,
so results do not depend on trial scheduling or the number of workers.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order

from .colliding_branches import DescendantCounter
from .distributions import GoalProbabilities
from .graph import SearchGraph

__all__ = [
    "Method",
    "SearchOrder",
    "TrialStats",
    "Problem",
    "AllTrialsGoalless",
    "build_complete_tree",
    "sample_goal_mask",
    "iter_search",
    "search_order",
    "run_search",
    "dfs_first_hit",
    "exact_expected_runtime",
    "monte_carlo",
    "find_deltas",
    "compute_descendant_counter",
]

MAX_TREE_NODES = 2**26


class Method(str, enum.Enum):
    BFS = "bfs"
    DFS = "dfs"

    def __str__(self) -> str:
        return self.value


class AllTrialsGoalless(RuntimeError):
    pass


@dataclass(frozen=True)
class SearchOrder:
    method: Method
    order: np.ndarray

    @property
    def rank(self) -> np.ndarray:
        """1-based goal-check position of every node."""
        rank = np.empty(len(self.order), dtype=np.int64)
        rank[self.order] = np.arange(1, len(self.order) + 1)
        return rank

    def __len__(self) -> int:
        return len(self.order)


@dataclass(frozen=True)
class TrialStats:
    trials_total: int
    trials_kept: int
    mean: float
    stderr: float
    discarded_no_goal: int = 0

    def as_dict(self) -> dict:
        return {
            "trials_total": self.trials_total,
            "trials_kept": self.trials_kept,
            "mean": self.mean,
            "stderr": self.stderr,
            "discarded_no_goal": self.discarded_no_goal,
        }


@dataclass(frozen=True, eq=False)
class Problem:
    graph: SearchGraph
    probs: GoalProbabilities

    def node_probs(self) -> np.ndarray:
        """Goal probability of every node, zero where goals are not allowed."""
        return node_probs(self.graph, self.probs)


def node_probs(graph: SearchGraph, probs: GoalProbabilities) -> np.ndarray:
    if graph.node_count and graph.depth > probs.depth:
        raise ValueError(f"graph reaches level {graph.depth}, probabilities stop at {probs.depth}")
    per_level = np.asarray(probs.probs, dtype=float)
    return np.where(graph.goal_eligible, per_level[graph.level], 0.0)


def build_complete_tree(branching: int, depth: int) -> SearchGraph:
    """Complete tree in heap numbering: node u has children ``b*u+1 .. b*u+b``."""
    if branching < 2 or depth < 0:
        raise ValueError("need branching >= 2 and depth >= 0")
    if branching**depth > 2**40:
        raise ValueError(f"tree with b^D = {branching}^{depth} exceeds the 2^40 leaf limit")
    n = (branching ** (depth + 1) - 1) // (branching - 1)
    if n > MAX_TREE_NODES:
        raise ValueError(f"tree with {n} nodes exceeds the in-memory limit of {MAX_TREE_NODES}")
    internal = (branching**depth - 1) // (branching - 1)
    counts = np.zeros(n, dtype=np.int64)
    counts[:internal] = branching
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    level = np.repeat(np.arange(depth + 1), [branching**k for k in range(depth + 1)])
    return SearchGraph(
        level=level.astype(np.int64),
        goal_eligible=np.ones(n, dtype=bool),
        indptr=indptr,
        indices=np.arange(1, indptr[-1] + 1, dtype=np.int64),
        edge_rule=np.tile(np.arange(branching, dtype=np.int16), internal),
        rule_names=tuple(f"child{i}" for i in range(branching)),
    )


def sample_goal_mask(graph: SearchGraph, probs: GoalProbabilities, seed) -> np.ndarray:
    """Independent goal flags, one uniform draw per node in index order."""
    rng = np.random.default_rng(seed)
    return rng.random(graph.node_count) < node_probs(graph, probs)


def _bfs_order(graph: SearchGraph) -> np.ndarray:
    # level-synchronous: a frontier's children, in order, keep their first
    # undiscovered occurrence, which is exactly FIFO-queue order. Children on
    # the eager rule are checked right after their parent instead of on dequeue.
    indptr, indices, edge_rule = graph.indptr, graph.indices, graph.edge_rule
    eager = graph.eager_rule
    seen = np.zeros(graph.node_count, dtype=bool)
    checked_early = np.zeros(graph.node_count, dtype=bool)
    seen[graph.root] = True
    frontier = np.array([graph.root], dtype=np.int64)
    out = []
    while len(frontier):
        starts, stops = indptr[frontier], indptr[frontier + 1]
        lens = stops - starts
        total = int(lens.sum())
        edge_pos = np.repeat(starts - np.concatenate([[0], np.cumsum(lens)[:-1]]), lens) + np.arange(total)
        kids = indices[edge_pos]
        fresh = np.flatnonzero(~seen[kids])
        if len(fresh):
            _, first = np.unique(kids[fresh], return_index=True)
            fresh = fresh[np.sort(first)]
        new = kids[fresh]
        if eager is None:
            is_eager = np.zeros(len(fresh), dtype=bool)
        else:
            is_eager = edge_rule[edge_pos[fresh]] == eager
        parent = np.repeat(np.arange(len(frontier)), lens)[fresh]
        keep = ~checked_early[frontier]
        items = np.concatenate([frontier[keep], new[is_eager]])
        major = np.concatenate([np.flatnonzero(keep), parent[is_eager]])
        minor = np.concatenate([np.full(keep.sum(), -1), fresh[is_eager]])
        out.append(items[np.lexsort((minor, major))])
        checked_early[new[is_eager]] = True
        seen[new] = True
        frontier = new
    return np.concatenate(out)


def _iter_dfs(graph: SearchGraph) -> Iterator[int]:
    # recursive DFS unrolled: mark on entry, test each child when reached
    adj = graph.adjacency()
    seen = bytearray(graph.node_count)
    root = graph.root
    seen[root] = 1
    yield root
    stack = [iter(adj[root])]
    while stack:
        for v in stack[-1]:
            if not seen[v]:
                seen[v] = 1
                yield v
                stack.append(iter(adj[v]))
                break
        else:
            stack.pop()


def iter_search(graph: SearchGraph, method: Method | str) -> Iterator[int]:
    """Nodes in goal-check order."""
    method = Method(method)
    if method is Method.BFS:
        return iter(search_order(graph, method).order.tolist())
    return _iter_dfs(graph)


def search_order(graph: SearchGraph, method: Method | str) -> SearchOrder:
    """Goal-check order of BFS / recursive DFS; cached on the graph."""
    method = Method(method)
    cache = graph.__dict__.setdefault("_orders", {})
    if method not in cache:
        if method is Method.BFS:
            order = _bfs_order(graph)
        else:
            order = np.fromiter(_iter_dfs(graph), dtype=np.int64)
        order.setflags(write=False)
        cache[method] = SearchOrder(method, order)
    return cache[method]


def run_search(graph: SearchGraph, mask: np.ndarray, method: Method | str) -> int:
    """Goal checks until the first goal, or ``node_count + 1`` when there is none."""
    method = Method(method)
    if len(mask) != graph.node_count:
        raise ValueError("goal mask is not aligned with the graph")
    cache = graph.__dict__.get("_orders", {})
    if method is Method.BFS or method in cache:
        order = search_order(graph, method).order
        hits = np.flatnonzero(mask[order])
        return int(hits[0]) + 1 if len(hits) else graph.node_count + 1
    return dfs_first_hit(graph, np.flatnonzero(mask))


def dfs_first_hit(graph: SearchGraph, goals) -> int:
    """Recursive-DFS goal checks until one of ``goals`` is met.

    Walks the CSR arrays directly and stops early, so a one-off race on a big
    graph never materialises the full DFS order.
    """
    goals = set(int(g) for g in goals)
    n = graph.node_count
    if not goals:
        return n + 1
    root = graph.root
    if root in goals:
        return 1
    ip = graph.indptr.tolist()
    ix = graph.indices.tolist()
    seen = bytearray(n)
    seen[root] = 1
    checks = 1
    nodes, cursor = [root], [ip[root]]
    while nodes:
        pos, end = cursor[-1], ip[nodes[-1] + 1]
        while pos < end and seen[ix[pos]]:
            pos += 1
        if pos == end:
            nodes.pop()
            cursor.pop()
            continue
        v = ix[pos]
        cursor[-1] = pos + 1
        seen[v] = 1
        checks += 1
        if v in goals:
            return checks
        nodes.append(v)
        cursor.append(ip[v])
    return n + 1


def exact_expected_runtime(order: SearchOrder, graph: SearchGraph, probs: GoalProbabilities) -> float:
    """Exact E[run_search] under iid per-level goal seeding."""
    p = node_probs(graph, probs)[order.order]
    n = len(p)
    alive = np.cumprod(1.0 - p)
    before = np.concatenate([[1.0], alive[:-1]])
    ranks = np.arange(1, n + 1, dtype=float)
    return float(np.sum(ranks * p * before) + (n + 1) * (alive[-1] if n else 1.0))


def _seed_words(seed) -> list[int]:
    return [int(seed)] if np.isscalar(seed) else [int(s) for s in seed]


def _trial_ranks(p_in_order: np.ndarray, order: np.ndarray, seed, trials: range) -> np.ndarray:
    n = len(order)
    words = _seed_words(seed)
    out = np.empty(len(trials), dtype=np.int64)
    for j, t in enumerate(trials):
        u = np.random.default_rng([*words, t]).random(n)
        hits = np.flatnonzero(u[order] < p_in_order)
        out[j] = hits[0] + 1 if len(hits) else n + 1
    return out


def monte_carlo(
    problem: Problem,
    method: Method | str,
    trials: int,
    seed: int | tuple[int, ...],
    condition_on_goal: bool = False,
    workers: int = 1,
) -> TrialStats:
    """Average explored-node count over ``trials`` freshly seeded goal masks.

    Trial ``t`` uses the same goals for BFS and DFS, so two calls with the same
    seed race the methods on identical instances. ``seed`` may be a tuple of
    non-negative ints, e.g. ``(master, cell)``.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    graph = problem.graph
    order = search_order(graph, method).order
    p_in_order = problem.node_probs()[order]
    if workers > 1:
        chunks = [range(lo, min(lo + 256, trials)) for lo in range(0, trials, 256)]
        with ThreadPoolExecutor(workers) as pool:
            parts = pool.map(lambda r: _trial_ranks(p_in_order, order, seed, r), chunks)
            ranks = np.concatenate(list(parts))
    else:
        ranks = _trial_ranks(p_in_order, order, seed, range(trials))
    discarded = 0
    if condition_on_goal:
        goalless = ranks == graph.node_count + 1
        discarded = int(goalless.sum())
        ranks = ranks[~goalless]
    kept = len(ranks)
    if kept == 0:
        raise AllTrialsGoalless(f"all {trials} trials goalless")
    mean = float(ranks.mean())
    stderr = float(ranks.std(ddof=1) / math.sqrt(kept)) if kept > 1 else 0.0
    return TrialStats(trials, kept, mean, stderr, discarded)


def find_deltas(graph: SearchGraph, depth: int | None = None) -> list[int]:
    """First node of each level ``0..depth`` reached by DFS."""
    depth = graph.depth if depth is None else depth
    found: dict[int, int] = {}
    level = graph.level
    for u in iter_search(graph, Method.DFS):
        k = int(level[u])
        if k <= depth and k not in found:
            found[k] = u
            if len(found) == depth + 1:
                break
    missing = [k for k in range(depth + 1) if k not in found]
    if missing:
        raise ValueError(f"DFS never reaches levels {missing}")
    return [found[k] for k in range(depth + 1)]


def compute_descendant_counter(graph: SearchGraph, depth: int | None = None) -> DescendantCounter:
    """Count level-d nodes reachable from each DFS-first level-n node."""
    depth = graph.depth if depth is None else depth
    deltas = find_deltas(graph, depth)
    n = graph.node_count
    adj = csr_matrix((np.ones(graph.edge_count, dtype=np.int8), graph.indices, graph.indptr), shape=(n, n))
    counts = np.zeros((depth + 1, depth + 1), dtype=np.int64)
    for k, start in enumerate(deltas):
        reach = breadth_first_order(adj, start, directed=True, return_predecessors=False)
        counts[k] = np.bincount(graph.level[reach], minlength=depth + 1)[: depth + 1]
    return DescendantCounter(counts)
