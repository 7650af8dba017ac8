"""
Goals spread over many levels
=============================

Goal probabilities follow a bell shape over the levels, peaking at level mu
with spread sigma2. The peak level mostly decides the winner; a narrow spread
helps DFS further.
"""

import numpy as np

from searchtime import (
    GaussianGoalParams, TreeModel, bfs_mgl, dfs_mgl, gaussian_goal_vector, mgl_decision,
)

D = 14
model = TreeModel(D)

p = gaussian_goal_vector(D, GaussianGoalParams(mu=5, sigma2=0.1))
print("goal probabilities per level:", np.round(p.probs, 6))

print("  mu  sigma2      BFS        DFS   winner")
for mu in (5, 8, 11, 14):
    for sigma2 in (0.1, 1, 10, 100):
        p = gaussian_goal_vector(D, GaussianGoalParams(mu, sigma2))
        bfs = bfs_mgl(model, p, conditioned=True).mean
        dfs = dfs_mgl(model, p).mean
        print(f"{mu:4d} {sigma2:7} {bfs:9.2f} {dfs:10.2f}   {mgl_decision(model, p).value}")
