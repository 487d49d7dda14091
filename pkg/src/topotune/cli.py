"""Command-line harness for tuning runs, comparisons, and diagnostics.

Subcommands:

* ``tune``       -- one algorithm, one objective, one seed; writes a JSONL
                    trial log and prints the best configuration found.
* ``bench``      -- every (algorithm x seed) cell; writes per-run logs, a
                    summary CSV, and a plot-ready convergence-curves CSV.
* ``sweep``      -- bench over a grid of mutation rates and parent counts
                    (OpEvo only), summary keyed by the grid point.
* ``exact-dist`` -- exact stopping distribution of the mutation walk on one
                    declared parameter, as JSON rows.
* ``spaces``     -- size, per-parameter cardinalities, and degree statistics
                    of a declared search space.

Exit codes: 0 on success, 2 for usage/configuration errors, 3 when an
external evaluator program cannot be spawned.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .baselines import GbfsConfig, SaConfig, greedy_bfs, random_search, simulated_annealing
from .benchmarks import make_objective, operator_space, parse_operator
from .engine import EngineConfig, run
from .external import DEFAULT_TIMEOUT_MS, EvaluatorSpawnError, ExternalEvaluator
from .logs import write_trial_log
from .reporting import curve_rows, summarize, summary_row_dict, write_curves_csv, write_summary_csv
from .spaces import DEFAULT_ENUMERATION_CAP, SearchSpace, build_graph
from .walk import walk_distribution

ALGORITHMS = ("opevo", "random", "sa", "gbfs")
SEED_ENV_VAR = "TOPO_TUNE_SEED"
DEFAULT_SEED_COUNT = 5


class UsageError(Exception):
    """Bad flags or configuration; maps to exit code 2."""


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}") from None


def _parse_int_list(text: str, flag: str) -> list[int]:
    try:
        values = [int(x) for x in text.split(",") if x != ""]
    except ValueError:
        raise UsageError(f"{flag} expects comma-separated integers, got {text!r}") from None
    if not values:
        raise UsageError(f"{flag} is empty")
    return values


def _parse_float_list(text: str, flag: str) -> list[float]:
    try:
        values = [float(x) for x in text.split(",") if x != ""]
    except ValueError:
        raise UsageError(f"{flag} expects comma-separated numbers, got {text!r}") from None
    if not values:
        raise UsageError(f"{flag} is empty")
    return values


def _resolve_space(args) -> tuple[str, SearchSpace, object]:
    """(space id, search space, operator spec or None) from --operator/--space."""
    if getattr(args, "operator", None) and getattr(args, "space", None):
        raise UsageError("--operator and --space are mutually exclusive")
    if getattr(args, "operator", None):
        try:
            spec = parse_operator(args.operator)
        except ValueError as err:
            raise UsageError(str(err)) from None
        return spec.id(), operator_space(spec), spec
    if getattr(args, "space", None):
        try:
            space = SearchSpace.from_file(args.space)
        except (OSError, ValueError, json.JSONDecodeError) as err:
            raise UsageError(f"cannot load space file {args.space!r}: {err}") from None
        return f"space:{Path(args.space).stem}", space, None
    raise UsageError("one of --operator or --space is required")


def _resolve_objective(args, space: SearchSpace, spec):
    if getattr(args, "objective_cmd", None):
        return ExternalEvaluator(args.objective_cmd, space, args.timeout_ms)
    if spec is None:
        raise UsageError(
            "a --space file has no built-in objective; pass --objective-cmd "
            "or use --operator for the synthetic cost model"
        )
    return make_objective(spec, space)[1]


def _seed_list(args) -> list[int]:
    if getattr(args, "seeds", None):
        return _parse_int_list(args.seeds, "--seeds")
    if getattr(args, "seed", None) is not None:
        return [args.seed]
    base = default_seed()
    return list(range(base, base + DEFAULT_SEED_COUNT))


def _algorithm_list(args) -> list[str]:
    names = [a for a in args.algo.split(",") if a != ""]
    if not names:
        raise UsageError("--algo is empty")
    for name in names:
        if name not in ALGORITHMS:
            raise UsageError(f"unknown algorithm {name!r}; choose from {ALGORITHMS}")
    return names


def _check_budget(args, parents: int) -> None:
    if args.budget < max(parents, 1):
        raise UsageError(f"--budget {args.budget} is below the parent count {parents}")


def _run_algorithm(algorithm: str, args, space, objective, seed: int,
                   parents: int | None = None, mutation_rate: float | None = None):
    budget = args.budget
    try:
        if algorithm == "opevo":
            cfg = EngineConfig(
                parents=parents if parents is not None else args.parents,
                offspring=args.offspring,
                mutation_rate=mutation_rate if mutation_rate is not None else args.q,
                budget=budget,
                seed=seed,
                retry_cap=args.retry_cap,
            )
            return run(space, cfg, objective, concurrency=args.concurrency)
        if algorithm == "random":
            return random_search(space, budget, seed, objective)
        if algorithm == "sa":
            sa = SaConfig(
                initial_temp=args.sa_t0,
                cooling=args.sa_alpha,
                moves_per_temp=args.sa_moves,
            )
            return simulated_annealing(space, sa, budget, seed, objective)
        if algorithm == "gbfs":
            return greedy_bfs(space, GbfsConfig(pool_size=args.pool), budget, seed, objective)
    except ValueError as err:
        raise UsageError(str(err)) from None
    raise UsageError(f"unknown algorithm {algorithm!r}")


def _log_path(outdir: Path, algorithm: str, seed: int) -> Path:
    return outdir / f"trials_{algorithm}_seed{seed}.jsonl"


def cmd_tune(args) -> int:
    space_id, space, spec = _resolve_space(args)
    objective = _resolve_objective(args, space, spec)
    seed = args.seed if args.seed is not None else default_seed()
    if args.algo not in ALGORITHMS:
        raise UsageError(f"unknown algorithm {args.algo!r}; choose from {ALGORITHMS}")
    if args.algo == "opevo":
        _check_budget(args, args.parents)
    best, records = _run_algorithm(args.algo, args, space, objective, seed)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    path = _log_path(outdir, args.algo, seed)
    write_trial_log(str(path), records)
    print(json.dumps({
        "space": space_id,
        "algorithm": args.algo,
        "seed": seed,
        "trials": len(records),
        "best_fitness": best.fitness,
        "best_config": space.config_to_json(best.config),
        "log": str(path),
    }))
    return 0


def cmd_bench(args) -> int:
    space_id, space, spec = _resolve_space(args)
    objective = _resolve_objective(args, space, spec)
    algorithms = _algorithm_list(args)
    seeds = _seed_list(args)
    if "opevo" in algorithms:
        _check_budget(args, args.parents)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)

    summary_dicts = []
    curves = []
    failures = []
    for algorithm in algorithms:
        logs = []
        for seed in seeds:
            try:
                _, records = _run_algorithm(algorithm, args, space, objective, seed)
            except EvaluatorSpawnError:
                raise
            except UsageError:
                raise
            except Exception as err:  # record the cell, keep the grid going
                failures.append((algorithm, seed, str(err)))
                continue
            write_trial_log(str(_log_path(outdir, algorithm, seed)), records)
            logs.append(records)
        if logs:
            summary_dicts.append(summary_row_dict(summarize(algorithm, space_id, logs)))
            curves.extend(curve_rows(algorithm, logs, args.budget))
    if summary_dicts:
        write_summary_csv(str(outdir / "summary.csv"), summary_dicts)
        write_curves_csv(str(outdir / "curves.csv"), curves)
    for algorithm, seed, message in failures:
        print(f"cell failed: {algorithm} seed {seed}: {message}", file=sys.stderr)
    print(json.dumps({
        "space": space_id,
        "algorithms": algorithms,
        "seeds": seeds,
        "cells_ok": len(algorithms) * len(seeds) - len(failures),
        "cells_failed": len(failures),
        "summary": str(outdir / "summary.csv"),
        "curves": str(outdir / "curves.csv"),
    }))
    return 0 if not failures else 1


def cmd_sweep(args) -> int:
    space_id, space, spec = _resolve_space(args)
    objective = _resolve_objective(args, space, spec)
    seeds = _seed_list(args)
    rate_grid = (
        _parse_float_list(args.q_grid, "--q-grid") if args.q_grid is not None else [args.q]
    )
    parent_grid = (
        _parse_int_list(args.lambda_grid, "--lambda-grid")
        if args.lambda_grid is not None
        else [args.parents]
    )
    _check_budget(args, max(parent_grid))
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)

    summary_dicts = []
    for rate in rate_grid:
        for parents in parent_grid:
            cell_dir = outdir / f"q{rate}_lambda{parents}"
            cell_dir.mkdir(parents=True, exist_ok=True)
            logs = []
            for seed in seeds:
                _, records = _run_algorithm(
                    "opevo", args, space, objective, seed,
                    parents=parents, mutation_rate=rate,
                )
                write_trial_log(str(_log_path(cell_dir, "opevo", seed)), records)
                logs.append(records)
            row = summarize("opevo", space_id, logs)
            summary_dicts.append(summary_row_dict(row, q=rate, parents=parents))
    write_summary_csv(str(outdir / "sweep_summary.csv"), summary_dicts)
    print(json.dumps({
        "space": space_id,
        "grid_rows": len(summary_dicts),
        "seeds": seeds,
        "summary": str(outdir / "sweep_summary.csv"),
    }))
    return 0


def cmd_exact_dist(args) -> int:
    _, space, _ = _resolve_space(args)
    if args.param is not None:
        if args.param not in space.names:
            raise UsageError(f"unknown parameter {args.param!r}; have {space.names}")
        param = space.spaces[space.names.index(args.param)]
    elif len(space) == 1:
        param = space.spaces[0]
    else:
        raise UsageError(f"space has {len(space)} parameters; pick one with --param")
    try:
        start = param.value_from_json(json.loads(args.start))
    except (ValueError, json.JSONDecodeError) as err:
        raise UsageError(f"bad --start value: {err}") from None
    if not 0.0 <= args.q < 1.0:
        raise UsageError(f"--q must satisfy 0 <= q < 1, got {args.q}")
    try:
        graph = build_graph(param, cap=args.cap)
    except ValueError as err:
        raise UsageError(str(err)) from None
    dist = walk_distribution(graph, graph.index_of(start), args.q)
    order = sorted(range(len(graph)), key=lambda i: (-dist[i], i))
    for i in order:
        print(json.dumps({
            "value": param.value_to_json(graph.vertices[i]),
            "probability": float(dist[i]),
        }))
    print(json.dumps({"sum": float(dist.sum())}))
    return 0


def cmd_spaces(args) -> int:
    space_id, space, _ = _resolve_space(args)
    params = []
    for name, param in zip(space.names, space.spaces):
        entry: dict = {"name": name, "kind": param.kind, "size": param.size()}
        if param.size() <= args.cap:
            degrees = build_graph(param, cap=args.cap).degrees()
            entry["degree_min"] = min(degrees)
            entry["degree_max"] = max(degrees)
            entry["degree_mean"] = sum(degrees) / len(degrees)
        params.append(entry)
    print(json.dumps({
        "space": space_id,
        "parameters": params,
        "total_size": space.size(),
    }))
    return 0


def _add_space_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--operator", metavar="KIND:DIMS",
                        help="operator spec, e.g. matmul:8,8,8 or conv2d:B,Cin,Hin,Win,Cout,Kh,Kw,S,P")
    parser.add_argument("--space", metavar="FILE.json",
                        help="search-space declaration file")


def _add_objective_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--objective-cmd", metavar="CMD",
                        help="external evaluator command (JSON config on stdin, fitness on stdout)")
    parser.add_argument("--timeout-ms", type=int, default=DEFAULT_TIMEOUT_MS,
                        help="external evaluation timeout in milliseconds")
    parser.add_argument("--concurrency", type=int, default=1,
                        help="concurrent evaluations within one batch")


def _add_algo_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--budget", type=int, default=500, help="objective evaluation budget")
    parser.add_argument("--q", type=float, default=0.5, help="mutation rate (walk continuation probability)")
    parser.add_argument("--lambda", dest="parents", type=int, default=8, help="parent count")
    parser.add_argument("--rho", dest="offspring", type=int, default=8, help="offspring per generation")
    parser.add_argument("--retry-cap", type=int, default=64, help="mutation retries before substitution")
    parser.add_argument("--sa-t0", type=float, default=None,
                        help="annealing start temperature (default: warmup-calibrated)")
    parser.add_argument("--sa-alpha", type=float, default=0.95, help="annealing cooling factor")
    parser.add_argument("--sa-moves", type=int, default=1, help="annealing moves per temperature")
    parser.add_argument("--pool", type=int, default=5, help="greedy-bfs expansion pool size")
    parser.add_argument("--out", default="out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topotune",
        description="Topology-aware combinatorial black-box optimization harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_tune = sub.add_parser("tune", help="run one algorithm once")
    _add_space_flags(p_tune)
    _add_objective_flags(p_tune)
    _add_algo_flags(p_tune)
    p_tune.add_argument("--algo", default="opevo", help=f"one of {'|'.join(ALGORITHMS)}")
    p_tune.add_argument("--seed", type=int, default=None,
                        help=f"rng seed (default: ${SEED_ENV_VAR} or 0)")
    p_tune.set_defaults(func=cmd_tune)

    p_bench = sub.add_parser("bench", help="compare algorithms over seeds")
    _add_space_flags(p_bench)
    _add_objective_flags(p_bench)
    _add_algo_flags(p_bench)
    p_bench.add_argument("--algo", default=",".join(ALGORITHMS),
                         help="comma-separated algorithms")
    p_bench.add_argument("--seed", type=int, default=None, help="single seed")
    p_bench.add_argument("--seeds", default=None, help="comma-separated seeds")
    p_bench.set_defaults(func=cmd_bench)

    p_sweep = sub.add_parser("sweep", help="hyperparameter grid for opevo")
    _add_space_flags(p_sweep)
    _add_objective_flags(p_sweep)
    _add_algo_flags(p_sweep)
    p_sweep.add_argument("--q-grid", default=None, help="comma-separated mutation rates")
    p_sweep.add_argument("--lambda-grid", default=None, help="comma-separated parent counts")
    p_sweep.add_argument("--seed", type=int, default=None, help="single seed")
    p_sweep.add_argument("--seeds", default=None, help="comma-separated seeds")
    p_sweep.set_defaults(func=cmd_sweep)

    p_dist = sub.add_parser("exact-dist", help="exact mutation-walk distribution")
    _add_space_flags(p_dist)
    p_dist.add_argument("--param", default=None, help="parameter name within the space")
    p_dist.add_argument("--start", required=True, help="start value as JSON")
    p_dist.add_argument("--q", type=float, default=0.5, help="walk continuation probability")
    p_dist.add_argument("--cap", type=int, default=DEFAULT_ENUMERATION_CAP,
                        help="enumeration cap")
    p_dist.set_defaults(func=cmd_exact_dist)

    p_spaces = sub.add_parser("spaces", help="inspect a declared search space")
    _add_space_flags(p_spaces)
    p_spaces.add_argument("--cap", type=int, default=DEFAULT_ENUMERATION_CAP,
                          help="cap for degree statistics")
    p_spaces.set_defaults(func=cmd_spaces)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.func(args)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except EvaluatorSpawnError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
