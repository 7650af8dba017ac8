"""Command-line interface.

    searchtime estimate --depth 14 --goal-level 8 --goal-prob 0.01 --conditioned
    searchtime table sgl --trials 1000 --seed 0 --format json --out sgl.json
    searchtime boundary gaussian-fig --samples 100 --seed 1
    searchtime dataset --count 1827 --seed 0 --out grammars.csv
    searchtime simulate --model binary-grammar --depth 10 --goal-level 10 --goal-prob 0.1 --method dfs
    searchtime export-graph --model full-grammar --depth 2

Exit codes: 0 success, 2 usage error, 3 runtime or capacity error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from contextlib import contextmanager

import numpy as np

from . import __version__
from .colliding_branches import DescendantCounter, bfs_cb, bfs_cb_sgl, dfs_cb
from .distributions import GoalProbabilities
from .experiments import (
    BOUNDARIES,
    DATASET_COLUMNS,
    TABLES,
    iter_dataset,
    run_boundary,
    run_table,
    winner_of,
)
from .grammar import ALL_RULES, ERASE, GrammarRules, build_binary_grammar, build_full_grammar, build_random_grammar
from .graph import write_graph
from .simulator import (
    AllTrialsGoalless,
    Method,
    Problem,
    build_complete_tree,
    exact_expected_runtime,
    monte_carlo,
    node_probs,
    search_order,
)
from .tree_analysis import (
    GaussianGoalParams,
    TreeModel,
    Verdict,
    bfs_mgl,
    bfs_sgl,
    dfs_mgl,
    dfs_sgl,
    gaussian_goal_vector,
    mgl_decision,
    sgl_decision,
    sgl_gamma,
)

log = logging.getLogger("searchtime")

MODELS = ("tree", "binary-grammar", "full-grammar")
ORACLE_NODE_LIMIT = 2**24
TIE_NOTE = "winner ties (equal explored counts) are labelled BFS"

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 2, 3


class UsageError(Exception):
    pass


# --- output -----------------------------------------------------------------


def _clean(x):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.generic):
        x = x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def to_json(payload: dict) -> str:
    return json.dumps(_clean(payload), indent=2, allow_nan=False) + "\n"


def _csv_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def to_csv(columns, rows, comments=()) -> str:
    buf = io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_value(row.get(c)) for c in columns])
    return buf.getvalue()


@contextmanager
def _sink(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _meta(args, trials=None) -> dict:
    return {"seed": getattr(args, "seed", None), "trials": trials, "version": __version__}


# --- argument handling ------------------------------------------------------


def _model_flags(p: argparse.ArgumentParser, models=MODELS):
    p.add_argument("--model", choices=models, default="tree")
    p.add_argument("--depth", type=int, required=True, help="maximum level D")
    p.add_argument("--branching", type=int, default=2, help="branching factor (tree model only)")
    p.add_argument("--goal-level", type=int, help="single goal level g")
    p.add_argument("--goal-prob", type=float, help="goal probability on the goal level")
    p.add_argument("--mu", type=int, help="Gaussian goal peak")
    p.add_argument("--sigma2", type=float, help="Gaussian goal spread")
    p.add_argument("--probs", help="explicit per-level goal probabilities p_0,...,p_D")


def _output_flags(p: argparse.ArgumentParser, default: str, text: bool = False):
    choices = ("text", "csv", "json") if text else ("csv", "json")
    p.add_argument("--format", choices=choices, default=default)
    p.add_argument("--out", metavar="PATH", help="write here instead of stdout")


def _goal_model(args) -> tuple[str, GoalProbabilities, dict]:
    """Return (kind, probabilities, description) for the goal flags."""
    D = args.depth
    if D is None or D < 0:
        raise UsageError("--depth must be >= 0")
    sgl = args.goal_level is not None or args.goal_prob is not None
    gauss = args.mu is not None or args.sigma2 is not None
    explicit = args.probs is not None
    if sgl + gauss + explicit != 1:
        raise UsageError("give exactly one of --goal-level/--goal-prob, --mu/--sigma2 or --probs")
    if sgl:
        if args.goal_level is None or args.goal_prob is None:
            raise UsageError("--goal-level and --goal-prob go together")
        if not 0 <= args.goal_level <= D:
            raise UsageError(f"--goal-level must lie in [0, {D}]")
        if not 0 < args.goal_prob <= 1:
            raise UsageError("--goal-prob must lie in (0, 1]")
        probs = GoalProbabilities.single_level(D, args.goal_level, args.goal_prob)
        return "sgl", probs, {"goal_level": args.goal_level, "goal_prob": args.goal_prob}
    if gauss:
        if args.mu is None or args.sigma2 is None:
            raise UsageError("--mu and --sigma2 go together")
        if not 0 <= args.mu <= D or not args.sigma2 > 0:
            raise UsageError(f"need 0 <= --mu <= {D} and --sigma2 > 0")
        probs = gaussian_goal_vector(D, GaussianGoalParams(args.mu, args.sigma2))
        return "gaussian", probs, {"mu": args.mu, "sigma2": args.sigma2}
    try:
        values = [float(x) for x in args.probs.split(",")]
    except ValueError:
        raise UsageError("--probs must be comma-separated numbers")
    if len(values) != D + 1:
        raise UsageError(f"--probs needs {D + 1} values for depth {D}, got {len(values)}")
    try:
        probs = GoalProbabilities(values, allow_zero=True)
    except ValueError as exc:
        raise UsageError(str(exc))
    return "mgl", probs, {"probs": values}


def _check_model(args):
    if args.model != "tree" and args.branching != 2:
        raise UsageError("--branching only applies to --model tree")
    if args.branching < 2:
        raise UsageError("--branching must be >= 2")


def _counter(args) -> DescendantCounter:
    if args.model == "binary-grammar":
        return DescendantCounter.binary_grammar(args.depth)
    return DescendantCounter.full_grammar(args.depth)


# --- estimate ---------------------------------------------------------------


def _estimate(args, goal_part: bool = True) -> dict:
    """Analytical report for the model flags.

    For multi-level trees without ``--conditioned`` the BFS figure is
    ``E[X; goal]`` (as in the tables) unless ``goal_part`` is off, in which
    case it is the plain unconditioned expectation.
    """
    _check_model(args)
    kind, probs, goal_desc = _goal_model(args)
    D = args.depth
    cond = args.conditioned
    out = {"model": args.model, "depth": D, **goal_desc, "conditioned": cond}
    if args.model == "tree":
        model = TreeModel(D, args.branching)
        out["branching"] = args.branching
        if kind == "sgl":
            g, p = args.goal_level, args.goal_prob
            bfs, dfs = bfs_sgl(model, g, p, cond), dfs_sgl(model, g, p, cond)
            verdict = sgl_decision(model, g, p)
            out["gamma"] = sgl_gamma(model, g, p)
            out["formula"] = {"bfs": "bfs_sgl", "dfs": "dfs_sgl", "verdict": "sgl_decision"}
            recommendation = verdict.value
            if verdict is Verdict.BAND:
                recommendation = winner_of(bfs.mean, dfs.mean)
            out["verdict"] = verdict.value
        else:
            if cond or goal_part:
                bfs = bfs_mgl(model, probs, conditioned=True, renormalize=cond)
            else:
                bfs = bfs_mgl(model, probs)
            dfs = dfs_mgl(model, probs)
            recommendation = mgl_decision(model, probs).value
            out["bfs_unconditioned"] = bfs_mgl(model, probs).mean
            out["formula"] = {
                "bfs": ("bfs_mgl (E[X | goal])" if cond
                        else "bfs_mgl (E[X; goal])" if goal_part else "bfs_mgl"),
                "dfs": "dfs_mgl (unconditioned)",
                "verdict": "mgl_decision",
            }
            out["verdict"] = recommendation
    else:
        L = _counter(args)
        if kind == "sgl":
            bfs = bfs_cb_sgl(args.goal_level, args.goal_prob, L, cond)
            out["formula"] = {"bfs": "bfs_cb_sgl", "dfs": "dfs_cb"}
        else:
            bfs = bfs_cb(probs, L, cond)
            out["formula"] = {"bfs": "bfs_cb", "dfs": "dfs_cb"}
        dfs = dfs_cb(D, probs, L, cond)
        recommendation = winner_of(bfs.mean, dfs.mean)
        out["formula"]["verdict"] = "compare bfs mean with dfs mean"
        out["verdict"] = recommendation
    out["bfs"] = bfs.as_dict()
    out["dfs"] = dfs.as_dict()
    out["recommendation"] = recommendation
    return out


def _fmt_est(est: dict) -> str:
    if est["lower"] == est["upper"]:
        return f"{est['mean']:.2f}"
    return f"{est['mean']:.2f}  [{est['lower']:.2f}, {est['upper']:.2f}]"


def cmd_estimate(args) -> int:
    report = _estimate(args)
    params = {k: v for k, v in vars(args).items() if k not in ("func", "format", "out", "command")}
    with _sink(args.out) as fh:
        if args.format == "json":
            fh.write(to_json({"params": params, "result": report, "meta": _meta(args)}))
        elif args.format == "csv":
            rows = [{"method": m, **report[m.lower()], "formula": report["formula"][m.lower()]}
                    for m in ("BFS", "DFS")]
            for row in rows:
                row["recommendation"] = report["recommendation"]
            fh.write(to_csv(("method", "lower", "mean", "upper", "conditioned_on_goal", "formula",
                             "recommendation"), rows))
        else:
            head = f"model: {report['model']}, D={report['depth']}"
            if "branching" in report:
                head += f", b={report['branching']}"
            lines = [head]
            goal = {k: report[k] for k in ("goal_level", "goal_prob", "mu", "sigma2", "probs") if k in report}
            lines.append("goals: " + ", ".join(f"{k}={v}" for k, v in goal.items()))
            lines.append(f"BFS: {_fmt_est(report['bfs'])}   ({report['formula']['bfs']})")
            lines.append(f"DFS: {_fmt_est(report['dfs'])}   ({report['formula']['dfs']})")
            verdict = report["verdict"]
            if verdict != report["recommendation"]:
                verdict += f" -> {report['recommendation']} by comparing means"
            lines.append(f"verdict: {verdict}")
            fh.write("\n".join(lines) + "\n")
    return EXIT_OK


# --- table ------------------------------------------------------------------

TABLE_COLUMNS = ("method", "analytical", "lower", "upper", "empirical", "stderr", "trials_kept", "error_pct", "blank")


def cmd_table(args) -> int:
    if args.trials < 0:
        raise UsageError("--trials must be >= 0 (0 = analytical only)")
    table = run_table(args.which, args.trials, args.seed)
    cells = []
    for c in table.cells:
        d = c.as_dict()
        d[table.row_name] = d.pop("row")
        d[table.col_name] = d.pop("col")
        cells.append(d)
    with _sink(args.out) as fh:
        if args.format == "json":
            params = {"table": table.which, "depth": table.depth, "rows": table.row_name, "cols": table.col_name}
            fh.write(to_json({"params": params, "cells": cells, "meta": _meta(args, args.trials)}))
        else:
            fh.write(to_csv((table.row_name, table.col_name) + TABLE_COLUMNS, cells))
    return EXIT_OK


# --- boundary ---------------------------------------------------------------

BOUNDARY_COLUMNS = ("section", "index", "depth", "g", "p_g", "log10_p_g", "mu", "sigma2", "log10_sigma2",
                    "verdict", "bfs", "dfs", "predicted", "bfs_time", "dfs_time", "winner", "correct")


def cmd_boundary(args) -> int:
    if args.samples < 0:
        raise UsageError("--samples must be >= 0")
    if args.grid_points < 2:
        raise UsageError("--grid-points must be >= 2")
    result = run_boundary(args.which, args.samples, args.seed, args.grid_points)
    samples = []
    for s in result.samples:
        d = s.as_dict()
        d.update(d.pop("params"))
        samples.append(d)
    accuracy = result.accuracy if result.samples else None
    print(f"{args.which}: boundary accuracy {accuracy} on {len(samples)} samples", file=sys.stderr)
    with _sink(args.out) as fh:
        if args.format == "json":
            params = {"figure": args.which, "samples": args.samples, "grid_points": args.grid_points}
            payload = {"params": params, "grid": result.grid, "rows": samples, "accuracy": accuracy,
                       "meta": _meta(args, args.samples)}
            fh.write(to_json(payload))
        else:
            rows = [{"section": "grid", **g} for g in result.grid]
            rows += [{"section": "sample", **s} for s in samples]
            rows.append({"section": "accuracy", "correct": accuracy})
            fh.write(to_csv(BOUNDARY_COLUMNS, rows))
    return EXIT_OK


# --- dataset ----------------------------------------------------------------


def cmd_dataset(args) -> int:
    if args.count < 1:
        raise UsageError("--count must be >= 1")
    rows = [r.as_dict() for r in iter_dataset(args.count, args.seed)]
    dfs_share = sum(r["winner"] == "DFS" for r in rows) / len(rows)
    print(f"dataset: {len(rows)} rows, DFS won {dfs_share:.3f}", file=sys.stderr)
    with _sink(args.out) as fh:
        if args.format == "json":
            params = {"count": args.count, "tie_rule": TIE_NOTE}
            fh.write(to_json({"params": params, "rows": rows, "meta": _meta(args)}))
        else:
            fh.write(to_csv(DATASET_COLUMNS, rows, comments=[TIE_NOTE, f"seed={args.seed}"]))
    return EXIT_OK


# --- simulate ---------------------------------------------------------------


def _graph_for(args):
    if args.model == "tree":
        return build_complete_tree(args.branching, args.depth)
    if args.model == "binary-grammar":
        return build_binary_grammar(args.depth, labels=False)
    # the full-grammar analysis lets any node be a goal
    return build_full_grammar(args.depth, labels=False).with_goal_eligible(True)


def _oracle(graph, probs, method, conditioned) -> float | None:
    if graph.node_count > ORACLE_NODE_LIMIT:
        return None
    value = exact_expected_runtime(search_order(graph, method), graph, probs)
    if not conditioned:
        return value
    p = node_probs(graph, probs)
    if (p >= 1.0).any():
        return value
    p_none = math.exp(float(np.log1p(-p).sum()))
    if p_none >= 1.0:
        return None
    return (value - (graph.node_count + 1) * p_none) / (1.0 - p_none)


def cmd_simulate(args) -> int:
    _check_model(args)
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    kind, probs, goal_desc = _goal_model(args)
    cond = args.condition_on_goal or args.conditioned
    method = Method(args.method)
    graph = _graph_for(args)
    stats = monte_carlo(Problem(graph, probs), method, args.trials, args.seed, cond, args.workers)
    args.conditioned = cond
    analytical = _estimate(args, goal_part=False)[method.value]
    oracle = _oracle(graph, probs, method, cond)
    report = {
        "model": args.model, "depth": args.depth, **goal_desc, "method": method.value,
        "condition_on_goal": cond, "stats": stats.as_dict(), "analytical": analytical, "oracle": oracle,
    }
    with _sink(args.out) as fh:
        if args.format == "json":
            params = {k: v for k, v in vars(args).items() if k not in ("func", "format", "out", "command")}
            fh.write(to_json({"params": params, "result": report, "meta": _meta(args, args.trials)}))
        elif args.format == "csv":
            row = {**stats.as_dict(), "analytical_lower": analytical["lower"], "analytical_mean": analytical["mean"],
                   "analytical_upper": analytical["upper"], "oracle": oracle}
            fh.write(to_csv(tuple(row), [row]))
        else:
            fh.write(f"{method.value.upper()} on {args.model}, D={args.depth}: "
                     f"mean {stats.mean:.3f} +- {stats.stderr:.3f} "
                     f"({stats.trials_kept}/{stats.trials_total} trials kept)\n")
            fh.write(f"analytical: {_fmt_est(analytical)}\n")
            fh.write(f"oracle: {'n/a (graph too large)' if oracle is None else f'{oracle:.3f}'}\n")
    return EXIT_OK


# --- export-graph -----------------------------------------------------------


def cmd_export_graph(args) -> int:
    if args.model == "tree":
        graph = build_complete_tree(args.branching, args.depth)
    elif args.branching != 2:
        raise UsageError("--branching only applies to --model tree")
    elif args.model == "binary-grammar":
        graph = build_binary_grammar(args.depth)
    elif args.model == "full-grammar":
        graph = build_full_grammar(args.depth)
    else:
        if not args.rules:
            raise UsageError("--model random-grammar needs --rules")
        names = [r.strip() for r in args.rules.split(",") if r.strip()]
        unknown = sorted(set(names) - set(ALL_RULES))
        if unknown:
            raise UsageError(f"unknown rules {unknown}; choose from {', '.join(ALL_RULES)}")
        graph = build_random_grammar(GrammarRules.from_names(n for n in names if n != ERASE), args.depth)
    legend = ", ".join(f"{i}={name}" for i, name in enumerate(graph.rule_names))
    print(f"{graph.node_count} nodes, {graph.edge_count} edges; rule ids: {legend}", file=sys.stderr)
    with _sink(args.out) as fh:
        write_graph(graph, fh)
    return EXIT_OK


# --- entry point ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="searchtime", description="Expected BFS/DFS runtime estimates, simulations and reproductions.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="analytical BFS/DFS runtime and a recommendation")
    _model_flags(p)
    p.add_argument("--conditioned", "--condition-on-goal", dest="conditioned", action="store_true",
                   help="condition on at least one goal existing")
    _output_flags(p, "text", text=True)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("table", help="D=14 runtime table: analytical vs Monte Carlo")
    p.add_argument("which", choices=TABLES)
    p.add_argument("--trials", type=int, default=1000, help="Monte Carlo trials per cell; 0 = analytical only")
    p.add_argument("--seed", type=int, default=0)
    _output_flags(p, "csv")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("boundary", help="decision boundary grid and its accuracy on sampled races")
    p.add_argument("which", choices=BOUNDARIES)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid-points", type=int, default=41, help="points along the continuous axis")
    _output_flags(p, "csv")
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("dataset", help="labelled random-grammar races with graph features")
    p.add_argument("--count", type=int, default=1827)
    p.add_argument("--seed", type=int, default=0)
    _output_flags(p, "csv")
    p.set_defaults(func=cmd_dataset)

    p = sub.add_parser("simulate", help="Monte Carlo runtime next to the analytical and exact values")
    _model_flags(p)
    p.add_argument("--method", choices=[m.value for m in Method], default="bfs")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--condition-on-goal", action="store_true")
    p.add_argument("--conditioned", action="store_true", help=argparse.SUPPRESS)
    p.add_argument("--workers", type=int, default=1)
    _output_flags(p, "text", text=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("export-graph", help="write a search graph as node and edge lines")
    p.add_argument("--model", choices=MODELS + ("random-grammar",), default="binary-grammar")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--branching", type=int, default=2)
    p.add_argument("--rules", help="comma-separated rules for random-grammar, e.g. 'S->Sa,Sa->aS'")
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_export_graph)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OverflowError, RuntimeError, MemoryError, AllTrialsGoalless) as exc:
        print(f"{parser.prog} {args.command}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
