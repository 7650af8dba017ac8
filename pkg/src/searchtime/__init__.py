"""Expected BFS and DFS runtime on goal-seeded trees and grammar graphs."""
__version__ = "0.1.0"

from .colliding_branches import (
    DescendantCounter,
    SubgraphSizes,
    bfs_cb,
    bfs_cb_sgl,
    dfs_cb,
    explorable_goal_probs,
    subgraph_sizes,
)
from .distributions import (
    GoalProbabilities,
    LevelSizes,
    exp_rate,
    first_goal_level_probs,
    level_goal_prob,
    tc,
)
from .experiments import iter_dataset, run_boundary, run_table
from .grammar import (
    GrammarRules,
    build_binary_grammar,
    build_full_grammar,
    build_random_grammar,
    graph_features,
    lbg,
    lfg,
)
from .graph import SearchGraph, read_graph, write_graph
from .simulator import (
    Method,
    Problem,
    TrialStats,
    build_complete_tree,
    compute_descendant_counter,
    exact_expected_runtime,
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
