"""Command-line entry point: ``bpodc run | schedule | oracle``."""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import logging
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .core import RngStream
from .dynamics import (ALGORITHMS, BudgetSchedule, EvalPolicy, InvalidBounds, gen_schedule,
                       read_schedule, run_dynamic, summarize, write_schedule)
from .oracle import (InstanceTooLarge, brute_force_opt, exact_ic_expectation,
                     exact_submodularity_ratio, min_marginal_cost)
from .problems import (CoverageInstance, CoverageProblem, GraphFormatError, ICModel,
                       InfluenceProblem, LinearCost, build_im_costs, build_mc_costs,
                       build_mc_sets, read_graph)

log = logging.getLogger("bpodc")

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_ORACLE = 0, 2, 3, 4

RUN_COLUMNS = ["run_id", "algorithm", "seed", "change_index", "budget", "evals_used",
               "best_f", "best_cost", "archive_size"]
SUMMARY_COLUMNS = ["algorithm", "change_index", "budget", "mean_best_f", "std_best_f", "n_runs"]


class ConfigError(ValueError):
    pass


class DataLoadError(RuntimeError):
    pass


def _bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


# key -> (parser, default); default None means required
_KEYS = {
    "problem": (str, None),
    "graph": (str, None),
    "directed": (_bool, True),
    "edge_probability": (float, 0.05),
    "n_simulations": (int, 500),
    "cost_model": (str, ""),
    "q": (int, 6),
    "cost_seed": (int, 0),
    "schedule_file": (str, ""),
    "initial": (float, 300.0),
    "changes": (int, 100),
    "delta": (float, 10.0),
    "low": (float, 100.0),
    "high": (float, 500.0),
    "schedule_seed": (int, 0),
    "algorithms": (str, "bpodc,pomc,eamc,gga,agga"),
    "t_initial": (float, 0.25),
    "t_change": (float, 0.25),
    "warm_up_fraction": (float, 1.0),
    "repeats": (int, 30),
    "seed": (int, 0),
    "out": (str, "."),
}


@dataclass
class RunConfig:
    values: dict
    base_dir: Path = Path(".")
    text: str = ""
    algorithms: list = field(default_factory=list)

    def __getattr__(self, name):
        try:
            return self.__dict__["values"][name]
        except KeyError:
            raise AttributeError(name) from None

    @classmethod
    def parse(cls, text: str, base_dir=".") -> "RunConfig":
        raw = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            s = line.split("#", 1)[0].strip()
            if not s:
                continue
            if "=" not in s:
                raise ConfigError(f"line {lineno}: expected 'key = value'")
            key, val = (x.strip() for x in s.split("=", 1))
            if key not in _KEYS:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            raw[key] = val
        values = {}
        for key, (conv, default) in _KEYS.items():
            if key in raw:
                try:
                    values[key] = conv(raw[key])
                except ValueError as exc:
                    raise ConfigError(f"{key}: {exc}") from None
            elif default is None:
                raise ConfigError(f"missing required key {key!r}")
            else:
                values[key] = default
        cfg = cls(values, Path(base_dir), text)
        cfg._validate()
        return cfg

    def _validate(self):
        v = self.values
        if v["problem"] not in ("im", "mc"):
            raise ConfigError("problem must be 'im' or 'mc'")
        v["cost_model"] = v["cost_model"] or v["problem"]
        if v["cost_model"] not in ("im", "mc"):
            raise ConfigError("cost_model must be 'im' or 'mc'")
        algs = [a.strip() for a in v["algorithms"].split(",") if a.strip()]
        bad = [a for a in algs if a not in ALGORITHMS]
        if not algs or bad:
            raise ConfigError(f"unknown algorithm(s) {bad}; choose from {', '.join(ALGORITHMS)}")
        self.algorithms = algs
        if v["t_initial"] < 0 or v["t_change"] < 0:
            raise ConfigError("evaluation fractions must be non-negative")
        if v["repeats"] < 1:
            raise ConfigError("repeats must be at least 1")
        if not 0.0 <= v["edge_probability"] <= 1.0:
            raise ConfigError("edge_probability must lie in [0, 1]")
        if v["n_simulations"] < 1:
            raise ConfigError("n_simulations must be positive")
        if not 0.0 <= v["warm_up_fraction"] <= 1.0:
            raise ConfigError("warm_up_fraction must lie in [0, 1]")

    def path(self, key) -> Path:
        p = Path(self.values[key])
        return p if p.is_absolute() else self.base_dir / p

    def digest(self) -> str:
        canon = "\n".join(f"{k}={self.values[k]!r}" for k in sorted(self.values))
        return hashlib.sha256(canon.encode()).hexdigest()


def derive_seed(master: int, algorithm: str, repeat: int) -> int:
    h = hashlib.blake2b(f"{master}:{algorithm}:{repeat}".encode(), digest_size=8)
    return int.from_bytes(h.digest(), "little")


def build_problem(cfg: RunConfig):
    gpath = cfg.path("graph")
    try:
        graph = read_graph(gpath, directed=cfg.directed)
    except OSError as exc:
        raise DataLoadError(f"cannot read graph file {gpath}: {exc.strerror}") from None
    except GraphFormatError as exc:
        raise DataLoadError(f"bad graph file {gpath}: {exc}") from None
    if cfg.cost_model == "im":
        costs = build_im_costs(graph, RngStream(cfg.cost_seed, ("im-costs",)))
    else:
        costs = build_mc_costs(graph, cfg.q)
    if cfg.problem == "im":
        return InfluenceProblem(ICModel(graph, cfg.edge_probability, cfg.n_simulations), costs)
    return CoverageProblem(build_mc_sets(graph), costs)


def build_schedule(cfg: RunConfig) -> BudgetSchedule:
    if cfg.schedule_file:
        spath = cfg.path("schedule_file")
        try:
            return read_schedule(spath)
        except OSError as exc:
            raise DataLoadError(f"cannot read schedule file {spath}: {exc.strerror}") from None
        except ValueError as exc:
            raise DataLoadError(f"bad schedule file {spath}: {exc}") from None
    try:
        return gen_schedule(cfg.initial, cfg.changes, cfg.delta, (cfg.low, cfg.high),
                            RngStream(cfg.schedule_seed, ("schedule",)))
    except InvalidBounds as exc:
        raise ConfigError(str(exc)) from None


def _fmt(x) -> str:
    if isinstance(x, float):
        return "nan" if math.isnan(x) else repr(x)
    return str(x)


def _run_task(args):
    problem, schedule, policy, algorithm, repeat, seed, warm = args
    trace = run_dynamic(algorithm, problem, schedule, policy, seed, warm_up_fraction=warm)
    return algorithm, repeat, trace


def cmd_run(cfg: RunConfig, out_dir: Path, jobs: int = 1, quiet: bool = False) -> int:
    problem = build_problem(cfg)
    schedule = build_schedule(cfg)
    policy = EvalPolicy.from_fractions(problem.n, cfg.t_initial, cfg.t_change)
    tasks = [(problem, schedule, policy, a, r, derive_seed(cfg.seed, a, r), cfg.warm_up_fraction)
             for a in cfg.algorithms for r in range(cfg.repeats)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_task, tasks))
    else:
        results = []
        for t in tasks:
            results.append(_run_task(t))
            if not quiet:
                log.info("finished %s repeat %d", t[3], t[4])
    order = {a: i for i, a in enumerate(cfg.algorithms)}
    results.sort(key=lambda x: (order[x[0]], x[1]))

    out_dir.mkdir(parents=True, exist_ok=True)
    header = [f"# config_sha256={cfg.digest()}", f"# master_seed={cfg.seed}",
              f"# version={__version__}", f"# problem={problem.name} n={problem.n}",
              "# degree=out-degree of the (expanded) digraph",
              f"# t_initial={policy.t_initial} t_change={policy.t_change}",
              f"# n_simulations={cfg.n_simulations}"]
    buf = io.StringIO()
    buf.write("\n".join(header) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RUN_COLUMNS)
    for algorithm, repeat, trace in results:
        for r in trace.records:
            w.writerow([f"{algorithm}-{repeat}", algorithm, trace.seed, r.change_index,
                        _fmt(r.budget), r.evals_consumed, _fmt(r.best_f), _fmt(r.best_cost),
                        r.archive_size])
    (out_dir / "runs.csv").write_text(buf.getvalue())

    buf = io.StringIO()
    buf.write("\n".join(header) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_COLUMNS)
    for algorithm in cfg.algorithms:
        for row in summarize([t for a, _, t in results if a == algorithm]):
            w.writerow([_fmt(row[c]) for c in SUMMARY_COLUMNS])
    (out_dir / "summary.csv").write_text(buf.getvalue())
    if not quiet:
        log.info("wrote %s and %s", out_dir / "runs.csv", out_dir / "summary.csv")
    return EXIT_OK


def cmd_schedule(initial, changes, delta, low, high, seed, out) -> int:
    schedule = gen_schedule(initial, changes, delta, (low, high), RngStream(seed, ("schedule",)))
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_schedule(schedule, out)
    with open(out.with_suffix(".cumulative.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["change_index", "budget", "cumulative_change"])
        for k, b in enumerate(schedule.all_budgets()):
            w.writerow([k, _fmt(b), _fmt(b - schedule.initial_budget)])
    return EXIT_OK


def _int_list(s: str) -> list:
    return [int(x) for x in s.split(",") if x.strip()]


def _parse_sets(s: str) -> CoverageInstance:
    groups = [_int_list(g) for g in s.split(";")]
    universe = max((max(g) for g in groups if g), default=-1) + 1
    return CoverageInstance(universe, tuple(groups))


def _oracle_problem(args):
    if args.sets:
        inst = _parse_sets(args.sets)
        costs = [float(x) for x in args.costs.split(",")] if args.costs else [1.0] * inst.n
        return CoverageProblem(inst, costs)
    if not args.graph:
        raise ConfigError("either --sets or --graph is required")
    graph = _load_graph(args)
    if args.problem == "im":
        costs = build_im_costs(graph, RngStream(args.cost_seed, ("im-costs",)))
        return InfluenceProblem(ICModel(graph, args.p, 1), costs)
    return CoverageProblem(build_mc_sets(graph), build_mc_costs(graph, args.q))


def _load_graph(args):
    try:
        return read_graph(args.graph, directed=not args.undirected)
    except OSError as exc:
        raise DataLoadError(f"cannot read graph file {args.graph}: {exc.strerror}") from None
    except GraphFormatError as exc:
        raise DataLoadError(f"bad graph file {args.graph}: {exc}") from None


def _num(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def cmd_oracle(args, out=None) -> int:
    out = out if out is not None else sys.stdout
    if args.what == "opt":
        problem = _oracle_problem(args)
        res = brute_force_opt(problem, args.budget)
        items = ",".join(str(i) for i in np.flatnonzero(res.opt_subset))
        print(f"opt={_num(res.opt_value)}", file=out)
        print(f"subset={items}", file=out)
        print(f"enumerated={res.enumerated_count}", file=out)
    elif args.what == "ic":
        graph = _load_graph(args)
        model = ICModel(graph, args.p, 1)
        seeds = np.zeros(graph.n_vertices, dtype=bool)
        seeds[_int_list(args.seeds)] = True
        print(f"expectation={exact_ic_expectation(model, seeds)!r}", file=out)
    elif args.what == "alpha":
        problem = _oracle_problem(args)
        print(f"alpha_f={exact_submodularity_ratio(problem, problem.n)!r}", file=out)
    elif args.what == "delta":
        if args.costs:
            cost = LinearCost([float(x) for x in args.costs.split(",")])
        else:
            cost = _oracle_problem(args).costs
        print(f"delta_c={min_marginal_cost(cost)!r}", file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bpodc", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--quiet", action="store_true", help="suppress progress messages")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", parents=[common],
                         help="execute a dynamic-budget experiment from a config file")
    run.add_argument("--config", required=True, help="key = value config file")
    run.add_argument("--out", help="output directory (overrides config 'out')")
    run.add_argument("--jobs", type=int, default=1)
    run.add_argument("--seed", type=int, help="master seed (overrides config)")

    sch = sub.add_parser("schedule", parents=[common], help="generate a budget schedule file")
    sch.add_argument("--initial", type=float, default=300.0)
    sch.add_argument("--changes", type=int, default=100)
    sch.add_argument("--delta", type=float, default=10.0)
    sch.add_argument("--low", type=float, default=100.0)
    sch.add_argument("--high", type=float, default=500.0)
    sch.add_argument("--seed", type=int, default=0)
    sch.add_argument("--out", required=True)

    orc = sub.add_parser("oracle", parents=[common], help="exact answers for small instances")
    orc.add_argument("what", choices=["opt", "ic", "alpha", "delta"])
    orc.add_argument("--sets", help="coverage sets, e.g. '0,1;1,2;3'")
    orc.add_argument("--costs", help="comma-separated item costs")
    orc.add_argument("--graph", help="edge-list file")
    orc.add_argument("--undirected", action="store_true")
    orc.add_argument("--problem", choices=["im", "mc"], default="mc")
    orc.add_argument("--q", type=int, default=6)
    orc.add_argument("--cost-seed", type=int, default=0)
    orc.add_argument("--p", type=float, default=0.05)
    orc.add_argument("--seeds", default="", help="seed vertices for 'ic'")
    orc.add_argument("--budget", type=float, default=0.0)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(message)s", stream=sys.stderr)
    try:
        if args.command == "run":
            path = Path(args.config)
            try:
                text = path.read_text()
            except OSError as exc:
                raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
            cfg = RunConfig.parse(text, path.parent)
            if args.seed is not None:
                cfg.values["seed"] = args.seed
            out = Path(args.out) if args.out else cfg.path("out")
            return cmd_run(cfg, out, args.jobs, args.quiet)
        if args.command == "schedule":
            return cmd_schedule(args.initial, args.changes, args.delta, args.low, args.high,
                                args.seed, args.out)
        return cmd_oracle(args)
    except (ConfigError, InvalidBounds) as exc:
        print(f"bpodc: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataLoadError as exc:
        print(f"bpodc: {exc}", file=sys.stderr)
        return EXIT_DATA
    except InstanceTooLarge as exc:
        print(f"bpodc: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except ValueError as exc:
        print(f"bpodc: invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
