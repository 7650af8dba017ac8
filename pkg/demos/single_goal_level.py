"""
BFS or DFS on a complete binary tree
====================================

Goals sit on a single level g of a depth-14 binary tree, each node there
being a goal with probability p. We compare the closed-form expectations with
a Monte Carlo run and see where the decision rule switches sides.
"""

import numpy as np

from searchtime import (
    GoalProbabilities, Problem, TreeModel, bfs_sgl, build_complete_tree, dfs_sgl, monte_carlo, sgl_decision,
)

D = 14
model = TreeModel(D)
tree = build_complete_tree(2, D)

# Analytical expectations, conditioned on at least one goal existing
for g, p in [(5, 0.01), (8, 0.01), (11, 0.1), (14, 0.1)]:
    bfs = bfs_sgl(model, g, p, conditioned=True).mean
    dfs = dfs_sgl(model, g, p, conditioned=True).mean
    print(f"g={g:2d} p={p:<5}  BFS {bfs:9.2f}  DFS {dfs:9.2f}  verdict {sgl_decision(model, g, p).value}")

# Same goals, sampled 1000 times
problem = Problem(tree, GoalProbabilities.single_level(D, 8, 0.01))
for method in ("bfs", "dfs"):
    stats = monte_carlo(problem, method, trials=1000, seed=0, condition_on_goal=True)
    print(f"{method.upper()} Monte Carlo: {stats.mean:.1f} +/- {stats.stderr:.1f}")

# Where does DFS take over? Shallow goals favour BFS, deep goals DFS.
for p in (0.001, 0.07, 0.5):
    verdicts = "".join(sgl_decision(model, g, p).value[0] for g in range(1, D + 1))
    print(f"p={p:<5} g=1..14: {verdicts}")
