"""
Racing BFS and DFS on random grammars
=====================================

Each row draws a random rule set, a depth and a handful of goals among the
S-less strings, races both searches, and records graph features that could
feed a classifier.
"""

import collections

from searchtime import iter_dataset

rows = list(iter_dataset(40, seed=3))
for r in rows[:8]:
    print(f"rules={r.num_rules} D={r.max_depth} branching {r.mean_branching:.2f}+/-{r.std_branching:.2f} "
          f"BFS {r.bfs_time:6d} DFS {r.dfs_time:6d} -> {r.winner}")

wins = collections.Counter(r.winner for r in rows)
ties = sum(r.bfs_time == r.dfs_time for r in rows)
print(f"winners over {len(rows)} races: {dict(wins)} ({ties} ties, labelled BFS)")
