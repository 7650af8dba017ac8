"""
Search graphs with many paths to a node
=======================================

In the binary grammar, strings grow by inserting a or b anywhere, so most
strings are reachable along several paths. DFS runtime is bracketed by a
lower and an upper bound computed from the descendant counter; BFS is exact.
"""

from searchtime import (
    DescendantCounter, GoalProbabilities, Problem, bfs_cb_sgl, build_binary_grammar, compute_descendant_counter,
    dfs_cb, monte_carlo,
)

D = 10
graph = build_binary_grammar(D)
L = compute_descendant_counter(graph)
assert L == DescendantCounter.binary_grammar(D)
print(f"{graph.node_count} nodes, level sizes {graph.level_sizes().tolist()}")

for g, p in [(6, 0.01), (8, 0.05), (10, 0.1)]:
    probs = GoalProbabilities.single_level(D, g, p)
    est = dfs_cb(D, probs, L, conditioned=True)
    bfs = bfs_cb_sgl(g, p, L, conditioned=True).mean
    mc = monte_carlo(Problem(graph, probs), "dfs", trials=2000, seed=g, condition_on_goal=True)
    print(f"g={g:2d} p={p:<5} BFS {bfs:8.1f} | DFS bounds [{est.lower:.1f}, {est.upper:.1f}] "
          f"mean {est.mean:.1f}, simulated {mc.mean:.1f} +/- {mc.stderr:.1f}")
