"""Command-line front end: single runs, benchmark tables, and method listing.

Configuration precedence is flags > config file > built-in defaults. The
config file is JSON with the flat key schema of :mod:`swarm_spsa.defaults`
(c1, c2, omega, kappa, phi1, phi2, vmax, a, c, A, alpha, gamma,
refine_steps, refine_scope, noise_sigma, max_iter, cutoff, swarm_size) and
is located by --config or the SWARM_SPSA_CONFIG environment variable.

Exit codes: 0 success, 2 usage error (unknown ids, bad flags), 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .defaults import DEFAULTS
from .harness import (
    METHODS,
    build_spec,
    export_results,
    run_experiment,
    single_run,
    spec_config_dict,
    write_trace_csv,
)
from .objective import FunctionId, TABLE_BOUNDS
from .spsa import SpsaParams, validate_params

CONFIG_ENV_VAR = "SWARM_SPSA_CONFIG"

# The eight columns of the benchmark tables; "spsa" can be requested
# explicitly with --methods.
TABLE_METHODS = [m for m in METHODS if m != "spsa"]
FUNCTIONS = [f.value for f in FunctionId]
TABLE_DIMS = [20, 50, 80]

_USAGE_ERROR = 2
_IO_ERROR = 3


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("algorithm parameters (override config file and defaults)")
    g.add_argument("--swarm-size", type=int, dest="swarm_size")
    g.add_argument("--c1", type=float)
    g.add_argument("--c2", type=float)
    g.add_argument("--omega", type=float, help="fixed inertia weight (default: linear 0.9 -> 0.4)")
    g.add_argument("--kappa", type=float)
    g.add_argument("--phi1", type=float)
    g.add_argument("--phi2", type=float)
    g.add_argument("--vmax", help='velocity limit, or "auto" for 20%% of the range')
    g.add_argument("--spsa-a", type=float, dest="a")
    g.add_argument("--spsa-c", type=float, dest="c")
    g.add_argument("--spsa-A", type=float, dest="A")
    g.add_argument("--alpha", type=float)
    g.add_argument("--gamma", type=float)
    g.add_argument("--refine-steps", type=int, dest="refine_steps")
    g.add_argument("--refine-scope", choices=["all", "gbest"], dest="refine_scope")
    g.add_argument("--noise-sigma", type=float, dest="noise_sigma")
    g.add_argument("--max-iter", type=int, dest="max_iter")
    g.add_argument("--cutoff", type=float, help="termination threshold on best fitness (inf disables)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swarm-spsa",
        description="Derivative-free optimization benchmarks: PSO, SPSA, and SPSA-PSO hybrids.",
    )
    parser.add_argument("--config", help=f"JSON config file (default: ${CONFIG_ENV_VAR})")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="one seeded run, optionally with a trace CSV")
    run.add_argument("--method", required=True)
    run.add_argument("--function", required=True)
    run.add_argument("--dim", type=int, required=True)
    run.add_argument("--seed", type=int, default=DEFAULTS["seed"])
    run.add_argument("--trace", metavar="PATH", help="write the per-iteration trace CSV here")
    _add_param_flags(run)

    bench = sub.add_parser("bench", help="method x function x dimension grid with summary CSV")
    bench.add_argument("--methods", default=",".join(TABLE_METHODS), help="comma-separated method ids")
    bench.add_argument("--functions", default=",".join(FUNCTIONS))
    bench.add_argument("--dims", default=",".join(str(d) for d in TABLE_DIMS))
    bench.add_argument("--runs", type=int, default=DEFAULTS["runs"])
    bench.add_argument("--seed", type=int, default=DEFAULTS["seed"], help="base seed; run i uses seed+i")
    bench.add_argument("--parallel", type=int, default=1, metavar="N", help="concurrent runs per experiment")
    bench.add_argument("--format", choices=["csv", "json"], default="csv")
    bench.add_argument("--out", default="-", help="output path ('-' for stdout)")
    _add_param_flags(bench)

    sub.add_parser("list", help="print available methods, functions, and defaults")
    return parser


_OVERRIDE_KEYS = [
    "swarm_size", "c1", "c2", "omega", "kappa", "phi1", "phi2", "vmax",
    "a", "c", "A", "alpha", "gamma", "refine_steps", "refine_scope",
    "noise_sigma", "max_iter", "cutoff",
]


def _load_config_file(path: str | None) -> dict:
    path = path or os.environ.get(CONFIG_ENV_VAR)
    if not path:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as e:
        raise OSError(f"cannot read config file {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ValueError(f"config file {path} is not valid JSON: {e}") from e
    unknown = set(cfg) - set(_OVERRIDE_KEYS)
    if unknown:
        raise ValueError(f"config file {path} has unknown keys: {', '.join(sorted(unknown))}")
    return cfg


def _collect_overrides(args: argparse.Namespace, file_cfg: dict) -> dict:
    overrides = dict(file_cfg)
    for key in _OVERRIDE_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    if "vmax" in overrides and overrides["vmax"] != "auto":
        overrides["vmax"] = float(overrides["vmax"])
    return overrides


def _check_ids(methods: list[str], functions: list[str]) -> None:
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}; known: {', '.join(METHODS)}")
    for f in functions:
        if f not in FUNCTIONS:
            raise ValueError(f"unknown function {f!r}; known: {', '.join(FUNCTIONS)}")


def cmd_run(args: argparse.Namespace) -> int:
    overrides = _collect_overrides(args, _load_config_file(args.config))
    _check_ids([args.method], [args.function])
    spec = build_spec(
        args.method, args.function, args.dim,
        runs=1, base_seed=args.seed, overrides=overrides,
    )
    record = single_run(spec, 0)
    config = spec_config_dict(spec)
    print(f"config: {json.dumps(config, sort_keys=True)}")
    print(f"final_true_fitness: {record.final_true_fitness:.17g}")
    print(f"eval_count: {record.trace[-1][2] if record.trace else 0}")
    print(f"terminated_by: {record.terminated_by.value}")
    if args.trace:
        write_trace_csv([record.trace], args.trace, config=config)
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    overrides = _collect_overrides(args, _load_config_file(args.config))
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    functions = [f.strip() for f in args.functions.split(",") if f.strip()]
    dims = [int(d) for d in args.dims.split(",") if d.strip()]
    _check_ids(methods, functions)
    if args.runs < 1:
        raise ValueError(f"--runs must be positive, got {args.runs}")
    if args.parallel < 1:
        raise ValueError(f"--parallel must be positive, got {args.parallel}")
    results = []
    for function in functions:
        for dim in dims:
            for method in methods:
                spec = build_spec(method, function, dim, runs=args.runs,
                                  base_seed=args.seed, overrides=overrides)
                results.append(run_experiment(spec, n_jobs=args.parallel))
    if args.out == "-":
        export_results(results, fmt=args.format, destination=sys.stdout)
    else:
        export_results(results, fmt=args.format, destination=args.out)
    return 0


def cmd_list() -> int:
    print("methods:")
    for method in METHODS:
        print(f"  {method}")
    print("functions:")
    for function in FUNCTIONS:
        b = TABLE_BOUNDS[FunctionId(function)]
        print(f"  {function}  range [{b.lower:g}, {b.upper:g}]")
    print("defaults:")
    for key, value in DEFAULTS.items():
        print(f"  {key} = {value}")
    violations = validate_params(SpsaParams(a=1.0, c=1.0, A=DEFAULTS["A"],
                                            alpha=DEFAULTS["alpha"], gamma=DEFAULTS["gamma"]))
    print(f"spsa gain constraints: {'ok' if not violations else '; '.join(violations)}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "bench":
            return cmd_bench(args)
        return cmd_list()
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return _IO_ERROR
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return _USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
