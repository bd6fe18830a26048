"""Command line entry point: ``orgraph {gen,learn,experiment,audit,plot}``.

Exit codes: 0 success, 2 invalid config, 3 infeasible instance, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import itertools
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .cgt import COST_MODELS, CostModel
from .graph import GraphFormatError, InfeasibleInstanceError, read_graph, write_graph
from .harness import (
    ALGORITHMS,
    FAMILIES,
    ROW_FIELDS,
    ConfigError,
    TrialConfig,
    concentration_audit,
    fit_scaling,
    make_graph,
    raw_records,
    read_csv,
    run_learner,
    speedup_crossover,
    split_seed,
    sweep,
    write_csv,
)
from .plot import write_loglog_svg

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_IO = 0, 2, 3, 4

log = logging.getLogger("orgraph")

# grid keys in the order their cartesian product is expanded
GRID_KEYS = ("family", "algorithm", "cost_model", "cost_scale", "const_scale", "d", "m", "n", "n_per_m")


def _fraction(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def cmd_gen(args: argparse.Namespace) -> int:
    config = TrialConfig(args.family, args.n, args.m, args.d, seed=args.seed)
    graph = make_graph(config)
    write_graph(graph, args.out, d=max(config.degree_promise(), graph.d_max))
    log.info("wrote %s (n=%d m=%d d_max=%d)", args.out, graph.n, graph.m, graph.d_max)
    return EXIT_OK


def cmd_learn(args: argparse.Namespace) -> int:
    graph, d = read_graph(args.graph)
    family = "matching" if args.algorithm == "learn_matching" else "file"
    config = TrialConfig(family, graph.n, graph.m, max(d, 1), CostModel(args.cost_model, args.cost_scale),
                         args.const_scale, args.seed, args.algorithm)
    if args.algorithm == "learn_matching" and graph.d_max > 1:
        raise InfeasibleInstanceError("learn_matching needs a matching (max degree <= 1)")
    report = run_learner(graph, config, split_seed(args.seed)[1])
    text = report.to_text(include_elapsed=args.timing)
    if args.report:
        Path(args.report).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _as_list(value: Any) -> list[Any]:
    return list(value) if isinstance(value, list) else [value]


def load_experiment(path: str | Path) -> tuple[list[TrialConfig], dict[str, Any]]:
    """Read a TOML experiment file into a grid of trial configs and run options."""
    try:
        data = tomllib.loads(Path(path).read_text())
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    grid_spec = data.get("grid")
    if not isinstance(grid_spec, dict):
        raise ConfigError("experiment config needs a [grid] table")
    unknown = set(grid_spec) - set(GRID_KEYS)
    if unknown:
        raise ConfigError(f"unknown grid keys: {sorted(unknown)}")
    if "n" in grid_spec and "n_per_m" in grid_spec:
        raise ConfigError("give either n or n_per_m, not both")
    if "n" not in grid_spec and "n_per_m" not in grid_spec:
        raise ConfigError("grid needs n or n_per_m")
    defaults = {"algorithm": "find_edges", "cost_model": "belovs", "cost_scale": "1",
                "const_scale": "1", "d": 1, "m": 0}
    axes = [(k, _as_list(grid_spec.get(k, defaults.get(k)))) for k in GRID_KEYS if k in grid_spec or k in defaults]
    seed = data.get("seed", 0)
    grid = []
    for combo in itertools.product(*(vals for _, vals in axes)):
        point = dict(zip((k for k, _ in axes), combo))
        n = point["n"] if "n" in point else int(point["n_per_m"]) * int(point["m"])
        try:
            model = CostModel(str(point["cost_model"]), Fraction(str(point["cost_scale"])))
            grid.append(TrialConfig(
                str(point["family"]), int(n), int(point["m"]), int(point["d"]), model,
                Fraction(str(point["const_scale"])), int(seed), str(point["algorithm"]),
            ))
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"bad grid point {point}: {exc}") from exc
    options = {
        "trials_per_point": int(data.get("trials_per_point", 100)),
        "workers": int(data.get("workers", 1)),
        "raw_out": data.get("raw_out"),
    }
    return grid, options


def cmd_experiment(args: argparse.Namespace) -> int:
    grid, options = load_experiment(args.config)
    trials = args.trials or options["trials_per_point"]
    result = sweep(grid, trials, workers=args.workers or options["workers"])
    write_csv(args.out, result.rows, ROW_FIELDS)
    raw_out = args.raw or options["raw_out"]
    if raw_out:
        write_csv(raw_out, raw_records(result))
    feasible = [r for r in result.rows if not r["infeasible"]]
    for algorithm in sorted({str(r["algorithm"]) for r in feasible}):
        rows = [r for r in feasible if r["algorithm"] == algorithm]
        column = "classical_median" if algorithm == "classical_only" else "quantum_median"
        if len({r["m"] for r in rows}) >= 3 and all(float(r[column]) > 0 for r in rows):
            fit = fit_scaling(rows, "m", column)
            print(f"{algorithm}: slope of {column} vs m = {fit.slope:.4f} (r^2 {fit.r2:.4f})")
    crossover = speedup_crossover(feasible)
    if any(r["algorithm"] == "classical_only" for r in feasible):
        print(f"speedup crossover m: {crossover if crossover is not None else 'none in grid'}")
    flagged = len(result.rows) - len(feasible)
    if flagged:
        print(f"{flagged} grid point(s) flagged infeasible", file=sys.stderr)
    return EXIT_OK


def cmd_audit(args: argparse.Namespace) -> int:
    summary = concentration_audit(args.family, args.n, args.m, args.d, args.seeds, args.base_seed)
    write_csv(args.out, [summary.row()])
    print(f"part violation rate {summary.part_violation_rate:.4f}, "
          f"pair violation rate {summary.pair_violation_rate:.4f} over {summary.seeds} seeds")
    return EXIT_OK


def cmd_plot(args: argparse.Namespace) -> int:
    rows = read_csv(args.inp)
    for cond in args.where or ():
        key, _, value = cond.partition("=")
        rows = [r for r in rows if r.get(key) == value]
    if rows and (args.x not in rows[0] or args.y not in rows[0]):
        raise ConfigError(f"columns {args.x!r} and {args.y!r} must exist in {args.inp}")
    rows = [r for r in rows if r.get("infeasible", "0") in ("0", "")]
    write_loglog_svg(args.out, rows, args.x, args.y, args.title or "")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="orgraph", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a hidden graph file")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("learn", help="learn a graph file through the oracle and report counts")
    p.add_argument("--graph", required=True)
    p.add_argument("--algorithm", choices=ALGORITHMS, required=True)
    p.add_argument("--cost-model", choices=COST_MODELS, default="belovs")
    p.add_argument("--cost-scale", type=_fraction, default=Fraction(1))
    p.add_argument("--const-scale", type=_fraction, default=Fraction(1))
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--report", help="write the key=value report here instead of stdout")
    p.add_argument("--timing", action="store_true", help="include wall time in the report")
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("experiment", help="run a sweep from a TOML config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--raw", help="also dump one CSV row per trial")
    p.add_argument("--trials", type=int, help="override trials_per_point")
    p.add_argument("--workers", type=int, help="process pool size")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("audit", help="concentration audit of the random partitions")
    p.add_argument("--family", choices=("matching", "bounded_degree", "regular_ish"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--seeds", type=int, default=1000)
    p.add_argument("--base-seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("plot", help="log-log SVG plot of two CSV columns")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--where", action="append", metavar="COL=VALUE", help="keep only matching rows")
    p.add_argument("--title")
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InfeasibleInstanceError as exc:
        print(f"infeasible instance: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ConfigError, GraphFormatError, ValueError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O failure: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
