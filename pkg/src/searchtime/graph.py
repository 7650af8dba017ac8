"""Leveled search graphs with a fixed, ordered child list per node."""
from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Sequence, TextIO

import numpy as np

__all__ = ["SearchGraph", "GraphBuilder", "closure_graph", "write_graph", "read_graph"]


@dataclass(frozen=True, eq=False)
class SearchGraph:
    """Immutable adjacency in CSR form.

    ``children(u)`` is the ordered child list used by both BFS and DFS; the
    same child may appear under several parents. Node 0 is the root unless
    ``root`` says otherwise. Children reached through ``eager_rule`` are
    goal-checked by BFS as soon as they are generated rather than queued.
    """

    level: np.ndarray
    goal_eligible: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    edge_rule: np.ndarray
    rule_names: tuple[str, ...] = ()
    labels: Sequence[str] | None = None
    root: int = 0
    eager_rule: int | None = None
    _adjacency: list = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.level)
        if len(self.goal_eligible) != n or len(self.indptr) != n + 1:
            raise ValueError("node arrays disagree in length")
        if len(self.indices) != len(self.edge_rule) or self.indptr[-1] != len(self.indices):
            raise ValueError("edge arrays disagree in length")
        if n and self.level[self.root] != 0:
            raise ValueError("root must sit on level 0")
        for arr in (self.level, self.goal_eligible, self.indptr, self.indices, self.edge_rule):
            arr.setflags(write=False)

    @property
    def node_count(self) -> int:
        return len(self.level)

    @property
    def edge_count(self) -> int:
        return len(self.indices)

    @property
    def depth(self) -> int:
        return int(self.level.max()) if len(self.level) else 0

    def children(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def adjacency(self) -> list[list[int]]:
        """Child lists as plain Python lists (cached; traversal hot path)."""
        if self._adjacency is None:
            ip = self.indptr.tolist()
            ix = self.indices.tolist()
            object.__setattr__(self, "_adjacency", [ix[ip[u]:ip[u + 1]] for u in range(len(ip) - 1)])
        return self._adjacency

    def out_degree(self) -> np.ndarray:
        return np.diff(self.indptr)

    def level_sizes(self, depth: int | None = None) -> np.ndarray:
        depth = self.depth if depth is None else depth
        return np.bincount(self.level, minlength=depth + 1)[: depth + 1]

    def eligible_level_sizes(self, depth: int | None = None) -> np.ndarray:
        depth = self.depth if depth is None else depth
        return np.bincount(self.level[self.goal_eligible], minlength=depth + 1)[: depth + 1]

    def with_goal_eligible(self, eligible) -> "SearchGraph":
        """Same structure with a different goal-eligibility mask (``True`` for all)."""
        if eligible is True:
            eligible = np.ones(self.node_count, dtype=bool)
        eligible = np.array(eligible, dtype=bool)
        if eligible.shape != self.level.shape:
            raise ValueError("eligibility mask is not aligned with the graph")
        return SearchGraph(self.level, eligible, self.indptr, self.indices, self.edge_rule,
                           self.rule_names, self.labels, self.root, self.eager_rule)

    def label(self, u: int) -> str:
        return self.labels[u] if self.labels is not None else str(u)

    def index_of(self, label: str) -> int:
        if self.labels is None:
            raise KeyError("graph carries no labels")
        if isinstance(self.labels, EncodedLabels):
            return self.labels.index(label)
        if not hasattr(self, "_label_index"):
            object.__setattr__(self, "_label_index", {s: i for i, s in enumerate(self.labels)})
        return self._label_index[label]


class EncodedLabels(Sequence[str]):
    """String labels decoded on demand from integer node codes."""

    def __init__(self, codes: np.ndarray, decode: Callable[[int], str],
                 encode: Callable[[str], int], universe: int):
        self._codes = codes
        self._decode = decode
        self._encode = encode
        self._universe = universe
        self._position = None

    def __len__(self) -> int:
        return len(self._codes)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self._decode(int(c)) for c in self._codes[i]]
        return self._decode(int(self._codes[i]))

    def index(self, label: str, *args) -> int:
        if self._position is None:
            pos = np.full(self._universe, -1, dtype=np.int64)
            pos[self._codes] = np.arange(len(self._codes))
            self._position = pos
        code = self._encode(label)
        i = int(self._position[code]) if 0 <= code < self._universe else -1
        if i < 0:
            raise KeyError(label)
        return i


def closure_graph(
    universe: int,
    root: int,
    expand: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]],
    level_of: Callable[[np.ndarray], np.ndarray],
    eligible_of: Callable[[np.ndarray], np.ndarray],
    rule_names: Sequence[str],
    decode: Callable[[int], str] | None = None,
    encode: Callable[[str], int] | None = None,
    eager_rule: int | None = None,
) -> SearchGraph:
    """Discover everything reachable from ``root`` in breadth-first order.

    Nodes live in an integer universe ``[0, universe)``. ``expand(codes)``
    returns a ``(len(codes), R)`` matrix of child codes (``-1`` for none),
    already ordered and duplicate-free per row, plus a same-shape matrix of
    rule ids. The resulting node indices follow plain breadth-first discovery
    order.
    """
    discovered = np.zeros(universe, dtype=bool)
    discovered[root] = True
    frontier = np.array([root], dtype=np.int64)
    layers = [frontier]
    edge_children, edge_rules, counts = [], [], []
    while len(frontier):
        kids, rules = expand(frontier)
        valid = kids >= 0
        counts.append(valid.sum(axis=1))
        flat = kids[valid]
        edge_children.append(flat)
        edge_rules.append(rules[valid])
        fresh = flat[~discovered[flat]]
        if len(fresh):
            _, first = np.unique(fresh, return_index=True)
            fresh = fresh[np.sort(first)]
            discovered[fresh] = True
        frontier = fresh
        layers.append(frontier)
    codes = np.concatenate(layers)
    position = np.full(universe, -1, dtype=np.int64)
    position[codes] = np.arange(len(codes))
    indptr = np.zeros(len(codes) + 1, dtype=np.int64)
    np.cumsum(np.concatenate(counts), out=indptr[1:])
    labels = None
    if decode is not None and encode is not None:
        labels = EncodedLabels(codes, decode, encode, universe)
    return SearchGraph(
        level=np.asarray(level_of(codes), dtype=np.int64),
        goal_eligible=np.asarray(eligible_of(codes), dtype=bool),
        indptr=indptr,
        indices=position[np.concatenate(edge_children)],
        edge_rule=np.concatenate(edge_rules).astype(np.int16),
        rule_names=tuple(rule_names),
        labels=labels,
        eager_rule=eager_rule,
    )


class GraphBuilder:
    """Interns node keys and collects ordered, duplicate-free child lists."""

    def __init__(self, rule_names: Iterable[str] = (), eager_rule: int | None = None):
        self.rule_names = tuple(rule_names)
        self.eager_rule = eager_rule
        self._rule_ids = {name: i for i, name in enumerate(self.rule_names)}
        self._index: dict[Hashable, int] = {}
        self.keys: list[Hashable] = []
        self.levels: list[int] = []
        self.eligible: list[bool] = []
        self._children: list[list[int]] = []
        self._rules: list[list[int]] = []

    def __len__(self) -> int:
        return len(self.keys)

    def lookup(self, key: Hashable) -> int | None:
        return self._index.get(key)

    def add_node(self, key: Hashable, level: int, eligible: bool) -> tuple[int, bool]:
        """Return ``(index, created)``."""
        idx = self._index.get(key)
        if idx is not None:
            return idx, False
        idx = len(self.keys)
        self._index[key] = idx
        self.keys.append(key)
        self.levels.append(level)
        self.eligible.append(eligible)
        self._children.append([])
        self._rules.append([])
        return idx, True

    def add_edge(self, parent: int, child: int, rule: str | int = 0) -> None:
        kids = self._children[parent]
        if child in kids:
            return
        kids.append(child)
        self._rules[parent].append(self._rule_ids[rule] if isinstance(rule, str) else rule)

    def build(self, labels: bool = True) -> SearchGraph:
        counts = [len(c) for c in self._children]
        indptr = np.zeros(len(counts) + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        indices = np.fromiter(
            (c for kids in self._children for c in kids), dtype=np.int64, count=int(indptr[-1])
        )
        rules = np.fromiter(
            (r for rs in self._rules for r in rs), dtype=np.int16, count=int(indptr[-1])
        )
        return SearchGraph(
            level=np.asarray(self.levels, dtype=np.int64),
            goal_eligible=np.asarray(self.eligible, dtype=bool),
            indptr=indptr,
            indices=indices,
            edge_rule=rules,
            rule_names=self.rule_names,
            labels=tuple(str(k) for k in self.keys) if labels else None,
            eager_rule=self.eager_rule,
        )


def write_graph(graph: SearchGraph, out: TextIO) -> None:
    """Nodes as ``index\tstring\tlevel\tgoal_eligible``, then edges as
    ``parent\tchild\trule_id``, separated by a blank line. Rule ids index
    ``graph.rule_names``."""
    for u in range(graph.node_count):
        out.write(f"{u}\t{graph.label(u)}\t{int(graph.level[u])}\t{int(graph.goal_eligible[u])}\n")
    out.write("\n")
    for u in range(graph.node_count):
        lo, hi = graph.indptr[u], graph.indptr[u + 1]
        for v, r in zip(graph.indices[lo:hi], graph.edge_rule[lo:hi]):
            out.write(f"{u}\t{int(v)}\t{int(r)}\n")


def read_graph(src: TextIO | str, rule_names: Sequence[str] = (), eager_rule: int | None = None) -> SearchGraph:
    """Inverse of :func:`write_graph`; rule names and the eager rule are not
    part of the text and can be passed back in."""
    if isinstance(src, str):
        src = io.StringIO(src)
    lines = src.read().split("\n")
    try:
        blank = lines.index("")
    except ValueError:
        raise ValueError("graph text lacks the blank line between nodes and edges")
    node_lines, edge_lines = lines[:blank], [ln for ln in lines[blank + 1:] if ln]
    labels, levels, eligible = [], [], []
    for i, ln in enumerate(node_lines):
        idx, label, level, elig = ln.split("\t")
        if int(idx) != i:
            raise ValueError(f"node lines out of order at line {i + 1}")
        labels.append(label)
        levels.append(int(level))
        eligible.append(elig == "1")
    children: list[list[tuple[int, int]]] = [[] for _ in labels]
    for ln in edge_lines:
        u, v, rule = (int(x) for x in ln.split("\t"))
        children[u].append((v, rule))
    counts = [len(c) for c in children]
    indptr = np.zeros(len(labels) + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return SearchGraph(
        level=np.asarray(levels, dtype=np.int64),
        goal_eligible=np.asarray(eligible, dtype=bool),
        indptr=indptr,
        indices=np.asarray([v for c in children for v, _ in c], dtype=np.int64),
        edge_rule=np.asarray([r for c in children for _, r in c], dtype=np.int16),
        rule_names=tuple(rule_names),
        labels=tuple(labels),
        eager_rule=eager_rule,
    )
