"""Binary, full and random grammar search graphs and their descendant counters.

Strings are over ``{S, a, b}``. A node's level is its number of letters, so an
S-less string sits on the same level as the S-bearing strings of its node
cluster (``a``, ``Sa`` and ``aS`` are all on level 1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .graph import SearchGraph, closure_graph

__all__ = [
    "ERASE",
    "ADDING_RULES",
    "MOVING_RULES",
    "ALL_RULES",
    "GrammarRules",
    "FeatureVector",
    "lbg",
    "lbg_explorables",
    "lfg",
    "lbg_matrix",
    "lfg_matrix",
    "build_binary_grammar",
    "build_full_grammar",
    "build_random_grammar",
    "graph_features",
]

ERASE = "S->"
ADDING_RULES = ("S->Sa", "S->Sb", "S->aS", "S->bS")
MOVING_RULES = ("Sa->aS", "Sb->bS", "aS->Sa", "bS->Sb")
ALL_RULES = (ERASE,) + ADDING_RULES + MOVING_RULES

_MAX_COUNT = 2**63 - 1
MAX_BINARY_DEPTH = 20
MAX_FULL_DEPTH = 15


def _split(rule: str) -> tuple[str, str]:
    lhs, rhs = rule.split("->")
    return lhs, rhs


@dataclass(frozen=True)
class GrammarRules:
    """A rule set; ``S -> ε`` is always present."""

    adding: frozenset[str] = frozenset()
    moving: frozenset[str] = frozenset()

    def __init__(self, adding: Iterable[str] = (), moving: Iterable[str] = ()):
        adding, moving = frozenset(adding), frozenset(moving)
        bad = (adding - set(ADDING_RULES)) | (moving - set(MOVING_RULES))
        if bad:
            raise ValueError(f"unknown rules: {sorted(bad)}")
        object.__setattr__(self, "adding", adding)
        object.__setattr__(self, "moving", moving)

    @classmethod
    def full(cls) -> "GrammarRules":
        return cls(ADDING_RULES, MOVING_RULES)

    @classmethod
    def from_names(cls, names: Iterable[str]) -> "GrammarRules":
        names = [n for n in names if n != ERASE]
        return cls([n for n in names if n in ADDING_RULES], [n for n in names if n in MOVING_RULES])

    def ordered(self) -> list[str]:
        """Rules in the canonical application order, erase first."""
        return [ERASE] + [r for r in ADDING_RULES if r in self.adding] + [
            r for r in MOVING_RULES if r in self.moving
        ]

    def __len__(self) -> int:
        return 1 + len(self.adding) + len(self.moving)


class FeatureVector(NamedTuple):
    mean_branching: float
    std_branching: float
    num_rules: int
    max_depth: int


def lbg(n: int, d: int) -> int:
    """Level-``d`` strings reachable from ``a**n`` in the binary grammar."""
    if not 0 <= n <= d:
        raise ValueError(f"need 0 <= n <= d, got n={n}, d={d}")
    value = sum(math.comb(d, i) for i in range(d - n + 1))
    if value > _MAX_COUNT:
        raise OverflowError(f"lbg({n}, {d}) exceeds 64-bit range")
    return value


def lbg_explorables(n: int, d: int) -> int:
    """``lbg(n, d) - lbg(n + 1, d)``, i.e. ``C(d, d - n)``."""
    if not 0 <= n <= d:
        raise ValueError(f"need 0 <= n <= d, got n={n}, d={d}")
    return math.comb(d, d - n)


def lfg(n: int, d: int) -> int:
    value = (d + 2) * lbg(n, d)
    if value > _MAX_COUNT:
        raise OverflowError(f"lfg({n}, {d}) exceeds 64-bit range")
    return value


def _counter_matrix(depth: int, fn) -> np.ndarray:
    out = np.zeros((depth + 1, depth + 1), dtype=np.int64)
    for n in range(depth + 1):
        for d in range(n, depth + 1):
            out[n, d] = fn(n, d)
    return out


def lbg_matrix(depth: int) -> np.ndarray:
    return _counter_matrix(depth, lbg)


def lfg_matrix(depth: int) -> np.ndarray:
    return _counter_matrix(depth, lfg)


def _insert_bit(w: np.ndarray, pos: np.ndarray, bit: int) -> np.ndarray:
    low = w & ((np.int64(1) << pos) - 1)
    return low | (np.int64(bit) << pos) | ((w >> pos) << (pos + 1))


def _letters(w: int, d: int) -> str:
    return "".join("ab"[(w >> i) & 1] for i in range(d))


def _bits(letters: str) -> int:
    if set(letters) - {"a", "b"}:
        raise KeyError(letters)
    return sum(1 << i for i, ch in enumerate(letters) if ch == "b")


def build_binary_grammar(depth: int, labels: bool = True) -> SearchGraph:
    """All strings over ``{a, b}`` of length at most ``depth``.

    Children come from inserting ``a`` at each position left to right, then
    ``b``; duplicates collapse, so a level-d node has d+2 children.
    """
    if not 0 <= depth <= MAX_BINARY_DEPTH:
        raise ValueError(f"binary grammar depth must be in [0, {MAX_BINARY_DEPTH}], got {depth}")
    # code of a length-d string with letter bits w (bit i = position i, b=1)
    offset = np.array([2**d - 1 for d in range(depth + 2)], dtype=np.int64)

    def level_of(codes):
        return np.searchsorted(offset, codes, side="right") - 1

    def expand(codes):
        d = level_of(codes)
        w = codes - offset[d]
        n = len(codes)
        width = 2 * (depth + 1)
        kids = np.full((n, width), -1, dtype=np.int64)
        rules = np.zeros((n, width), dtype=np.int16)
        grow = d < depth
        for bit in (0, 1):
            for i in range(depth + 1):
                col = bit * (depth + 1) + i
                # inserting next to an equal letter repeats an earlier child
                ok = grow & (i <= d)
                if i > 0:
                    ok &= ((w >> (i - 1)) & 1) != bit
                if not ok.any():
                    continue
                pos = np.full(ok.sum(), i, dtype=np.int64)
                kids[ok, col] = offset[d[ok] + 1] + _insert_bit(w[ok], pos, bit)
                rules[ok, col] = bit
        return kids, rules

    def decode(code: int) -> str:
        d = int(level_of(np.array([code]))[0])
        return _letters(code - int(offset[d]), d)

    def encode(label: str) -> int:
        return int(offset[len(label)]) + _bits(label) if len(label) <= depth else -1

    return closure_graph(
        universe=int(offset[-1]),
        root=0,
        expand=expand,
        level_of=level_of,
        eligible_of=lambda codes: np.ones(len(codes), dtype=bool),
        rule_names=("->a", "->b"),
        decode=decode if labels else None,
        encode=encode if labels else None,
    )


class _GrammarCodec:
    """Dense integer codes for strings over {S, a, b} with at most one S.

    S-bearing strings of d letters with letter bits w and S before letter s
    occupy ``s_off[d] + w*(d+1) + s``; S-less strings follow at ``e_off[d] + w``.
    """

    def __init__(self, depth: int):
        self.depth = depth
        s_sizes = [(d + 1) * 2**d for d in range(depth + 1)]
        self.s_off = np.concatenate([[0], np.cumsum(s_sizes)]).astype(np.int64)
        e_start = self.s_off[-1]
        self.e_off = (e_start + np.array([2**d - 1 for d in range(depth + 2)])).astype(np.int64)
        self.universe = int(self.e_off[-1])

    def s_code(self, d, w, s):
        return self.s_off[d] + w * (d + 1) + s

    def e_code(self, d, w):
        return self.e_off[d] + w

    def split(self, codes: np.ndarray):
        """Return ``(has_s, d, w, s)`` arrays; ``s`` is -1 for S-less codes."""
        codes = np.asarray(codes, dtype=np.int64)
        has_s = codes < self.s_off[-1]
        d = np.where(
            has_s,
            np.searchsorted(self.s_off, codes, side="right") - 1,
            np.searchsorted(self.e_off, codes, side="right") - 1,
        )
        rel = np.where(has_s, codes - self.s_off[np.minimum(d, self.depth)], codes - self.e_off[d])
        w = np.where(has_s, rel // (d + 1), rel)
        s = np.where(has_s, rel % (d + 1), -1)
        return has_s, d, w, s

    def decode(self, code: int) -> str:
        has_s, d, w, s = (int(x[0]) for x in self.split(np.array([code])))
        letters = _letters(w, d)
        return letters[:s] + "S" + letters[s:] if has_s else letters

    def encode(self, label: str) -> int:
        n_s = label.count("S")
        letters = label.replace("S", "")
        d = len(letters)
        if n_s > 1 or d > self.depth:
            return -1
        w = _bits(letters)
        if n_s:
            return int(self.s_code(d, w, label.index("S")))
        return int(self.e_code(d, w))


def build_random_grammar(rules: GrammarRules, depth: int, labels: bool = True) -> SearchGraph:
    """Closure of ``S`` under ``rules``, keeping strings with at most ``depth`` letters.

    S-less strings are goal candidates and have no children. Child order is
    the canonical rule order (erase, adding, moving); BFS checks the erased
    child as soon as it is generated, so S-less strings are searched together
    with the level of their letter count.
    """
    if not 0 <= depth <= MAX_FULL_DEPTH:
        raise ValueError(f"grammar depth must be in [0, {MAX_FULL_DEPTH}], got {depth}")
    codec = _GrammarCodec(depth)
    ordered = rules.ordered()

    def expand(codes):
        has_s, d, w, s = codec.split(codes)
        n = len(codes)
        kids = np.full((n, len(ordered)), -1, dtype=np.int64)
        rule_ids = np.broadcast_to(np.arange(len(ordered), dtype=np.int16), kids.shape).copy()
        for col, rule in enumerate(ordered):
            lhs, rhs = _split(rule)
            if rule == ERASE:
                ok = has_s
                kids[ok, col] = codec.e_code(d[ok], w[ok])
            elif rule in ADDING_RULES:
                letter, shift = (rhs[1], 0) if rhs[0] == "S" else (rhs[0], 1)
                bit = "ab".index(letter)
                ok = has_s & (d < depth)
                dd, ww, ss = d[ok], w[ok], s[ok]
                kids[ok, col] = codec.s_code(dd + 1, _insert_bit(ww, ss, bit), ss + shift)
            else:
                if lhs[0] == "S":
                    bit, probe, step = "ab".index(lhs[1]), s, 1
                    ok = has_s & (s < d)
                else:
                    bit, probe, step = "ab".index(lhs[0]), s - 1, -1
                    ok = has_s & (s > 0)
                ok &= ((w >> np.maximum(probe, 0)) & 1) == bit
                kids[ok, col] = codec.s_code(d[ok], w[ok], s[ok] + step)
        return kids, rule_ids

    return closure_graph(
        universe=codec.universe,
        root=int(codec.s_code(0, 0, 0)),
        expand=expand,
        level_of=lambda codes: codec.split(codes)[1],
        eligible_of=lambda codes: ~codec.split(codes)[0],
        rule_names=ordered,
        decode=codec.decode if labels else None,
        encode=codec.encode if labels else None,
        eager_rule=0,
    )


def build_full_grammar(depth: int, labels: bool = True) -> SearchGraph:
    return build_random_grammar(GrammarRules.full(), depth, labels)


def graph_features(
    graph: SearchGraph, rules: GrammarRules | None = None, depth: int | None = None
) -> FeatureVector:
    """Mean and population std of out-degree over all nodes, rule count, depth.

    ``depth`` defaults to the deepest level present in the graph.
    """
    deg = graph.out_degree().astype(float)
    num_rules = len(rules) if rules is not None else len(graph.rule_names)
    depth = graph.depth if depth is None else depth
    return FeatureVector(float(deg.mean()), float(deg.std()), num_rules, depth)
