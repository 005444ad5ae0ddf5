"""Experiment runner: flat YAML config in, CSV traces and summaries out.

Config keys (all top-level scalars or lists)::

    experiment    degree-sweep | method-compare-kriging | method-compare-sdd
                  | time-varying-sweep | custom             (required)
    seed          master seed, int >= 0                      (default 0)
    n             number of agents / unknowns
    m             even degree of the circulant graph, or a list of degrees
    R             communication radius, or a list of radii (kriging grid)
    box           half-width of the square holding the sensors
    gamma         list of edge-sampling fractions in (0, 1]
    methods       subset of [dfix-jor, harnessing, projection]
    tol           residual tolerance                         (default 1e-4)
    max_iter      iteration cap                              (default 200000)
    theta         JOR safety factor in (0, 1]                (default 0.999)
    repetitions   independent problem draws
    system_file   path to a custom system (custom only)

Repetition ``r`` draws its problem from ``default_rng(seed + r)``; sampled
graph sequences use the stream ``(seed + r, k)`` at round ``k``.

Exit codes: 0 all runs converged, 1 some run did not, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import yaml

from .errors import ConfigError, InvalidParameterError
from .fixedpoint import DEFAULT_THETA, jor_map, paper_relaxation
from .graph import GraphSequence, make_geometric_graph, make_regular_graph
from .problems import (grid_positions, load_system, make_kriging_system, make_sdd_system,
                       uniform_positions)
from .solvers import (CONVERGED, DEFAULT_MAX_ITER, DEFAULT_TOL, run_dfix, run_harnessing,
                      run_projection)

log = logging.getLogger("dfix")

EXPERIMENTS = ("degree-sweep", "method-compare-kriging", "method-compare-sdd",
               "time-varying-sweep", "custom")
METHOD_NAMES = ("dfix-jor", "harnessing", "projection")
ALL_METHODS = list(METHOD_NAMES)

SUMMARY_COLUMNS = ["experiment", "method", "param", "repetition", "iterations",
                   "total_flops", "total_traffic", "status"]
AVERAGE_COLUMNS = ["experiment", "method", "param", "runs", "converged", "avg_iterations",
                   "avg_total_flops", "avg_total_traffic"]

DEFAULTS = {
    "degree-sweep": {"n": 100, "m": list(range(2, 51, 2)), "box": 30.0,
                     "methods": ["dfix-jor"], "repetitions": 1},
    "method-compare-kriging": {"n": 100, "R": [0.7, 1.0, 1.5, 2.0, 2.5], "box": 3.0,
                               "methods": ALL_METHODS, "repetitions": 1},
    "method-compare-sdd": {"n": 100, "m": [8], "methods": ALL_METHODS, "repetitions": 10},
    "time-varying-sweep": {"n": 100, "m": [8], "methods": ALL_METHODS, "repetitions": 1,
                           "gamma": [round(0.1 * i, 1) for i in range(1, 11)]},
    "custom": {"m": [4], "methods": ALL_METHODS, "repetitions": 1},
}

DEMOS = {
    "degree-sweep": {"experiment": "degree-sweep", "m": list(range(2, 21, 2))},
    "method-compare-kriging": {"experiment": "method-compare-kriging", "R": [0.7, 1.0, 1.5, 2.0]},
    "method-compare-sdd": {"experiment": "method-compare-sdd", "repetitions": 3},
    "time-varying-sweep": {"experiment": "time-varying-sweep", "n": 50,
                           "gamma": [0.3, 0.5, 0.8, 1.0]},
}

# sensors in the degree sweep are far apart, so the target sits next to one of them
TARGET_JITTER = 0.5


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    seed: int = 0
    n: int | None = None
    m: tuple[int, ...] = ()
    R: tuple[float, ...] = ()
    box: float | None = None
    gamma: tuple[float, ...] = ()
    methods: tuple[str, ...] = ()
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    theta: float = DEFAULT_THETA
    repetitions: int = 1
    system_file: str | None = None


_KEYS = {f for f in ExperimentConfig.__dataclass_fields__}


def _int(key, v, lo=None):
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(key, f"expected an integer, got {v!r}")
    if lo is not None and v < lo:
        raise ConfigError(key, f"must be >= {lo}, got {v}")
    return v


def _float(key, v):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(key, f"expected a number, got {v!r}")
    return float(v)


def _as_list(v):
    return list(v) if isinstance(v, (list, tuple)) else [v]


def parse_config(text: str) -> ExperimentConfig:
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(None, f"malformed config: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError(None, "config must be a flat key: value mapping")
    return config_from_dict(raw)


def config_from_dict(raw: dict) -> ExperimentConfig:
    unknown = sorted(set(raw) - _KEYS)
    if unknown:
        raise ConfigError(unknown[0], "unknown key")
    if "experiment" not in raw:
        raise ConfigError("experiment", "missing required key")
    exp = raw["experiment"]
    if exp not in EXPERIMENTS:
        raise ConfigError("experiment", f"expected one of {EXPERIMENTS}, got {exp!r}")
    merged = {**DEFAULTS[exp], **raw}

    seed = _int("seed", merged.get("seed", 0), lo=0)
    tol = _float("tol", merged.get("tol", DEFAULT_TOL))
    if not tol > 0:
        raise ConfigError("tol", f"must be positive, got {tol}")
    max_iter = _int("max_iter", merged.get("max_iter", DEFAULT_MAX_ITER), lo=1)
    theta = _float("theta", merged.get("theta", DEFAULT_THETA))
    if not 0 < theta <= 1:
        raise ConfigError("theta", f"must lie in (0, 1], got {theta}")
    reps = _int("repetitions", merged["repetitions"], lo=1)

    methods = _as_list(merged["methods"])
    if not methods:
        raise ConfigError("methods", "at least one method is required")
    for meth in methods:
        if meth not in METHOD_NAMES:
            raise ConfigError("methods", f"unknown method {meth!r}; expected {METHOD_NAMES}")
    methods = tuple(dict.fromkeys(methods))

    system_file = merged.get("system_file")
    if exp == "custom":
        if system_file is None:
            raise ConfigError("system_file", "missing required key for custom experiments")
        try:
            n = load_system(system_file).n
        except (OSError, InvalidParameterError) as exc:
            raise ConfigError("system_file", str(exc)) from None
    else:
        if system_file is not None:
            raise ConfigError("system_file", "only valid for custom experiments")
        n = _int("n", merged["n"], lo=2)

    box = None
    if "box" in merged:
        box = _float("box", merged["box"])
        if not box > 0:
            raise ConfigError("box", f"must be positive, got {box}")

    ms = ()
    if exp != "method-compare-kriging":
        ms = tuple(_int("m", v) for v in _as_list(merged["m"]))
        if not ms:
            raise ConfigError("m", "at least one degree is required")
        for v in ms:
            if v <= 0 or v >= n or v % 2:
                raise ConfigError("m", f"degree must be even with 0 < m < n={n}, got {v}")

    radii = ()
    if exp == "method-compare-kriging":
        side = math.isqrt(n)
        if side * side != n:
            raise ConfigError("n", f"kriging grid needs a perfect square, got {n}")
        radii = tuple(_float("R", v) for v in _as_list(merged["R"]))
        if not radii:
            raise ConfigError("R", "at least one radius is required")
        spacing = 2 * box / (side - 1)
        for r in radii:
            if not r > spacing:
                raise ConfigError("R", f"radius {r} leaves the grid (spacing {spacing:.4g}) disconnected")

    gammas = ()
    if exp == "time-varying-sweep":
        gammas = tuple(_float("gamma", v) for v in _as_list(merged["gamma"]))
        if not gammas:
            raise ConfigError("gamma", "at least one fraction is required")
        for gmm in gammas:
            if not 0 < gmm <= 1:
                raise ConfigError("gamma", f"fractions must lie in (0, 1], got {gmm}")
        if len(ms) != 1:
            raise ConfigError("m", "time-varying sweeps use a single base degree")

    return ExperimentConfig(exp, seed, n, ms, radii, box, gammas, methods, tol, max_iter,
                            theta, reps, system_file)


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(None, f"cannot read config: {exc}") from None
    return parse_config(text)


def _solve(method, system, schedule, cfg):
    if method == "dfix-jor":
        fp = jor_map(system, paper_relaxation(system, cfg.theta))
        return run_dfix(system, fp, schedule, tol=cfg.tol, max_iter=cfg.max_iter,
                        certify=cfg.theta < 1)
    if method == "harnessing":
        return run_harnessing(system, schedule, tol=cfg.tol, max_iter=cfg.max_iter)
    return run_projection(system, schedule, tol=cfg.tol, max_iter=cfg.max_iter)


def _cases(cfg: ExperimentConfig):
    """Yield ``(param, repetition, system, schedule)`` in a fixed order."""
    for rep in range(cfg.repetitions):
        stream = cfg.seed + rep
        rng = np.random.default_rng(stream)
        exp = cfg.experiment
        if exp == "degree-sweep":
            pos = uniform_positions(cfg.n, cfg.box, rng)
            anchor = pos[rng.integers(cfg.n)]
            target = anchor + rng.uniform(-TARGET_JITTER, TARGET_JITTER, size=2)
            system = make_kriging_system(pos, target)
            for m in cfg.m:
                yield m, rep, system, make_regular_graph(cfg.n, m)
        elif exp == "method-compare-kriging":
            pos = grid_positions(math.isqrt(cfg.n), cfg.box)
            target = rng.uniform(-cfg.box, cfg.box, size=2)
            system = make_kriging_system(pos, target)
            for r in cfg.R:
                yield r, rep, system, make_geometric_graph(pos, r)
        elif exp == "method-compare-sdd":
            system = make_sdd_system(cfg.n, rng)
            for m in cfg.m:
                yield m, rep, system, make_regular_graph(cfg.n, m)
        elif exp == "time-varying-sweep":
            system = make_sdd_system(cfg.n, rng)
            base = make_regular_graph(cfg.n, cfg.m[0])
            for gmm in cfg.gamma:
                yield gmm, rep, system, GraphSequence.sampled(base, gmm, stream)
        else:
            system = load_system(cfg.system_file)
            for m in cfg.m:
                yield m, rep, system, make_regular_graph(system.n, m)


def _fmt_param(p):
    # repr is the shortest string that round-trips; used for names and console output
    return repr(p)


@dataclass
class ExperimentResult:
    summary: list[dict]
    averages: list[dict]

    @property
    def all_converged(self) -> bool:
        return all(r["status"] == CONVERGED for r in self.summary)

    @property
    def exit_code(self) -> int:
        return 0 if self.all_converged else 1


def run_experiment(cfg: ExperimentConfig, out_dir) -> ExperimentResult:
    out = Path(out_dir)
    traces = out / "traces"
    traces.mkdir(parents=True, exist_ok=True)
    summary = []
    for param, rep, system, schedule in _cases(cfg):
        for method in cfg.methods:
            tr = _solve(method, system, schedule, cfg)
            name = f"{cfg.experiment}__{method}__{_fmt_param(param)}__r{rep}.csv"
            tr.write_csv(traces / name)
            log.info("%s %s param=%s rep=%d: %s after %d iterations", cfg.experiment, method,
                     _fmt_param(param), rep, tr.status, tr.iterations)
            summary.append({"experiment": cfg.experiment, "method": method, "param": param,
                            "repetition": rep, "iterations": tr.iterations,
                            "total_flops": tr.total_flops, "total_traffic": tr.total_traffic,
                            "status": tr.status})

    averages = []
    keys = dict.fromkeys((r["method"], r["param"]) for r in summary)
    for method, param in keys:
        rows = [r for r in summary if r["method"] == method and r["param"] == param]
        averages.append({
            "experiment": cfg.experiment, "method": method, "param": param, "runs": len(rows),
            "converged": sum(r["status"] == CONVERGED for r in rows),
            "avg_iterations": float(np.mean([r["iterations"] for r in rows])),
            "avg_total_flops": float(np.mean([r["total_flops"] for r in rows])),
            "avg_total_traffic": float(np.mean([r["total_traffic"] for r in rows])),
        })

    _write_csv(out / "summary.csv", SUMMARY_COLUMNS, summary)
    _write_csv(out / "averages.csv", AVERAGE_COLUMNS, averages)
    return ExperimentResult(summary, averages)


def _cell(v):
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _write_csv(path, columns, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_cell(r[c]) for c in columns])


def _print_averages(result: ExperimentResult, stream=None):
    stream = sys.stdout if stream is None else stream
    print(f"{'method':<12} {'param':>8} {'conv':>6} {'iters':>10} {'flops':>14} {'traffic':>14}",
          file=stream)
    for a in result.averages:
        print(f"{a['method']:<12} {_fmt_param(a['param']):>8} {a['converged']:>3}/{a['runs']:<2} "
              f"{a['avg_iterations']:>10.1f} {a['avg_total_flops']:>14.4g} "
              f"{a['avg_total_traffic']:>14.4g}", file=stream)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="dfix", description="Distributed linear-solver experiments.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log every run")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config")
    p_run.add_argument("--out-dir", default="dfix-out")
    p_val = sub.add_parser("validate", help="parse a config and print it with defaults applied")
    p_val.add_argument("config")
    p_demo = sub.add_parser("demo", help="run a built-in desk-scale experiment")
    p_demo.add_argument("name", choices=sorted(DEMOS))
    p_demo.add_argument("--out-dir", default=None)
    p_demo.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s", stream=sys.stderr)
    try:
        if args.command == "demo":
            cfg = config_from_dict({**DEMOS[args.name], "seed": args.seed})
            out_dir = args.out_dir or f"dfix-out/{args.name}"
        else:
            cfg = load_config(args.config)
            out_dir = getattr(args, "out_dir", None)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    if args.command == "validate":
        print(yaml.safe_dump({k: list(v) if isinstance(v, tuple) else v
                              for k, v in asdict(cfg).items()}, sort_keys=False), end="")
        return 0

    result = run_experiment(cfg, out_dir)
    _print_averages(result)
    print(f"wrote {len(result.summary)} runs to {out_dir}")
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
