"""Multi-run experiment driver with seeded reproducibility and CSV/JSON export.

An experiment is ``runs`` independent seeded runs of one method on one
function/dimension/noise setting; run i always uses seed base_seed + i, so
any single run can be reproduced in isolation. Aggregation reports the mean
and sample standard deviation of the final noiseless fitness values.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import IO, Iterable, Union

import numpy as np

from .defaults import DEFAULTS, SPSA_TUNING
from .hybrid import HybridVariant, VariantKind, run_hybrid
from .objective import FunctionId, make_objective, sample_uniform_position
from .spsa import SpsaParams, run_spsa
from .swarm import (
    Constriction,
    FixedInertia,
    LinearInertia,
    PsoParams,
    RunRecord,
    Termination,
    run_pso,
)

__all__ = [
    "METHODS",
    "ExperimentSpec",
    "ExperimentResult",
    "build_spec",
    "single_run",
    "run_experiment",
    "summarize",
    "downsample_trace",
    "export_results",
    "write_trace_csv",
    "SUMMARY_HEADER",
    "TRACE_HEADER",
]

SUMMARY_HEADER = "method,function,dimension,noise_sigma,runs,mu,sigma,mean_evals,cutoff_hits"
TRACE_HEADER = "run,iteration,best_fitness,eval_count"

# method id -> (runner kind, constriction mode). The -chi ids mirror the
# eight benchmark-table columns; "spsa" is the standalone optimizer.
METHODS: dict[str, tuple[str, bool]] = {
    "bpso": ("pso", False),
    "bpso-chi": ("pso", True),
    "spsa": ("spsa", False),
    "spsa-pso-1": (VariantKind.GBEST_REFINE, False),
    "spsa-pso-1-chi": (VariantKind.GBEST_REFINE, True),
    "spsa-pso-2": (VariantKind.AGB_REFINE, False),
    "spsa-pso-2-chi": (VariantKind.AGB_REFINE, True),
    "spsa-pso-3": (VariantKind.SWARM_REFINE, False),
    "spsa-pso-3-chi": (VariantKind.SWARM_REFINE, True),
}


@dataclass
class ExperimentSpec:
    """Fully resolved description of one experiment (prefer :func:`build_spec`)."""

    method: str
    function: str
    dimension: int
    noise_sigma: float = 0.0
    runs: int = DEFAULTS["runs"]
    base_seed: int = DEFAULTS["seed"]
    pso: PsoParams = field(default_factory=PsoParams)
    spsa: SpsaParams | None = None
    refine_scope: str = "all"


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    finals: list[float]            # per-run final noiseless fitness
    mu: float
    sigma: float
    eval_totals: list[int]
    terminated_by: list[str]
    traces: list[list[tuple[int, float, int]]]  # downsampled, <= 1000 rows/run


def build_spec(
    method: str,
    function: str,
    dimension: int,
    *,
    noise_sigma: float = 0.0,
    runs: int = DEFAULTS["runs"],
    base_seed: int = DEFAULTS["seed"],
    overrides: dict | None = None,
) -> ExperimentSpec:
    """Resolve method/function ids plus config overrides into a spec.

    Override keys follow the flat config schema (swarm_size, c1, c2, omega,
    kappa, phi1, phi2, vmax, max_iter, cutoff, a, c, A, alpha, gamma,
    refine_steps, refine_scope). Setting ``omega`` switches a non-chi method
    to fixed inertia; otherwise inertia decreases linearly over max_iter.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; known: {', '.join(METHODS)}")
    fid = FunctionId(function)
    cfg = dict(DEFAULTS)
    cfg.update(overrides or {})

    _, constricted = METHODS[method]
    if constricted:
        inertia = Constriction(kappa=float(cfg["kappa"]), phi1=float(cfg["phi1"]), phi2=float(cfg["phi2"]))
    elif "omega" in cfg:
        inertia = FixedInertia(omega=float(cfg["omega"]))
    else:
        inertia = LinearInertia(start=float(cfg["omega_start"]), end=float(cfg["omega_end"]))

    vmax = cfg["vmax"]
    pso = PsoParams(
        swarm_size=int(cfg["swarm_size"]),
        c1=float(cfg["c1"]),
        c2=float(cfg["c2"]),
        inertia=inertia,
        v_max=vmax if vmax == "auto" else float(vmax),
        max_iter=int(cfg["max_iter"]),
        cutoff_error=float(cfg["cutoff"]),
    )
    a_default, c_default = SPSA_TUNING[fid.value]
    spsa = SpsaParams(
        a=float(cfg.get("a", a_default)),
        c=float(cfg.get("c", c_default)),
        A=float(cfg["A"]),
        alpha=float(cfg["alpha"]),
        gamma=float(cfg["gamma"]),
        steps=int(cfg.get("steps", pso.max_iter)),
        refine_steps=int(cfg["refine_steps"]),
    )
    return ExperimentSpec(
        method=method,
        function=fid.value,
        dimension=int(dimension),
        noise_sigma=float((overrides or {}).get("noise_sigma", noise_sigma)),
        runs=int(runs),
        base_seed=int(base_seed),
        pso=pso,
        spsa=spsa,
        refine_scope=str(cfg["refine_scope"]),
    )


def single_run(spec: ExperimentSpec, run_index: int) -> RunRecord:
    """Execute run ``run_index`` of the experiment (seed = base_seed + index).

    The algorithm RNG and the objective's noise stream are independent
    children of the run seed, so noise realizations do not shift when the
    optimizer consumes a different number of draws.
    """
    seed = spec.base_seed + run_index
    alg_ss, noise_ss = np.random.SeedSequence(seed).spawn(2)
    rng = np.random.default_rng(alg_ss)
    obj = make_objective(
        spec.function,
        spec.dimension,
        noise_sigma=spec.noise_sigma,
        noise_rng=np.random.default_rng(noise_ss),
    )
    kind, _ = METHODS[spec.method]
    if kind == "pso":
        return run_pso(spec.pso, obj, rng, seed=seed)
    if kind == "spsa":
        if spec.spsa is None:
            raise ValueError("standalone spsa requires spsa parameters")
        theta0 = sample_uniform_position(obj.bounds, obj.dimension, rng)
        return run_spsa(theta0, spec.spsa, obj, rng, cutoff_error=spec.pso.cutoff_error, seed=seed)
    variant = HybridVariant(kind=kind, pso=spec.pso, spsa=spec.spsa, refine_scope=spec.refine_scope)
    return run_hybrid(variant, obj, rng, seed=seed)


def summarize(finals: Iterable[float]) -> tuple[float, float]:
    """Arithmetic mean and sample standard deviation (n-1 divisor; n=1 -> 0)."""
    values = np.asarray(list(finals), dtype=float)
    if values.size == 0:
        raise ValueError("cannot summarize an empty list")
    mu = float(np.mean(values))
    sigma = 0.0 if values.size == 1 else float(np.std(values, ddof=1))
    return mu, sigma


def downsample_trace(
    trace: list[tuple[int, float, int]], max_rows: int = 1000
) -> list[tuple[int, float, int]]:
    """Uniform-stride thinning to at most ``max_rows`` rows, keeping the last."""
    if len(trace) <= max_rows:
        return list(trace)
    stride = -(-len(trace) // max_rows)  # ceil division
    rows = trace[::stride]
    if rows[-1] != trace[-1]:
        rows.append(trace[-1])
    return rows


def run_experiment(spec: ExperimentSpec, n_jobs: int = 1) -> ExperimentResult:
    """All runs of the experiment; a pure function of (spec, base_seed).

    Runs are independent and may execute in parallel (``n_jobs`` > 1); results
    are keyed by run index so the aggregate is identical for any job count.
    """
    if spec.runs < 1:
        raise ValueError(f"runs must be positive, got {spec.runs}")
    if n_jobs == 1:
        records = [single_run(spec, i) for i in range(spec.runs)]
    else:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            records = list(pool.map(single_run, [spec] * spec.runs, range(spec.runs)))
    finals = [r.final_true_fitness for r in records]
    mu, sigma = summarize(finals)
    return ExperimentResult(
        spec=spec,
        finals=finals,
        mu=mu,
        sigma=sigma,
        eval_totals=[r.trace[-1][2] if r.trace else 0 for r in records],
        terminated_by=[r.terminated_by.value for r in records],
        traces=[downsample_trace(r.trace) for r in records],
    )


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def spec_config_dict(spec: ExperimentSpec) -> dict:
    """JSON-serializable echo of the effective configuration."""
    inertia = asdict(spec.pso.inertia)
    inertia["mode"] = type(spec.pso.inertia).__name__.lower().replace("inertia", "")
    cfg = {
        "method": spec.method,
        "function": spec.function,
        "dimension": spec.dimension,
        "noise_sigma": spec.noise_sigma,
        "runs": spec.runs,
        "base_seed": spec.base_seed,
        "pso": {**asdict(spec.pso), "inertia": inertia},
        "spsa": asdict(spec.spsa) if spec.spsa is not None else None,
        "refine_scope": spec.refine_scope,
    }
    return cfg


def _open_dest(destination: Union[str, Path, IO[str]], mode: str = "w"):
    if hasattr(destination, "write"):
        return destination, False
    try:
        return open(destination, mode, newline=""), True
    except OSError as e:
        raise OSError(f"cannot write {destination}: {e}") from e


def export_results(
    results: ExperimentResult | list[ExperimentResult],
    fmt: str = "csv",
    destination: Union[str, Path, IO[str]] = "-",
) -> None:
    """Write summary rows as CSV (pinned header) or JSON.

    Trailing ``#`` lines of the CSV embed the full effective configuration of
    every experiment, so any published number is regenerable from the file.
    Identical results always serialize to identical bytes.
    """
    if isinstance(results, ExperimentResult):
        results = [results]
    if fmt not in ("csv", "json"):
        raise ValueError(f'format must be "csv" or "json", got {fmt!r}')
    handle, owned = _open_dest(destination)
    try:
        if fmt == "csv":
            handle.write(SUMMARY_HEADER + "\n")
            for r in results:
                cutoff_hits = sum(t == Termination.CUTOFF.value for t in r.terminated_by)
                mean_evals = float(np.mean(r.eval_totals))
                handle.write(
                    f"{r.spec.method},{r.spec.function},{r.spec.dimension},"
                    f"{_fmt(r.spec.noise_sigma)},{r.spec.runs},{_fmt(r.mu)},{_fmt(r.sigma)},"
                    f"{_fmt(mean_evals)},{cutoff_hits}\n"
                )
            for r in results:
                cfg = json.dumps(spec_config_dict(r.spec), sort_keys=True)
                handle.write(f"# config {r.spec.method}/{r.spec.function}/d{r.spec.dimension}: {cfg}\n")
        else:
            payload = [
                {
                    "config": spec_config_dict(r.spec),
                    "mu": r.mu,
                    "sigma": r.sigma,
                    "mean_evals": float(np.mean(r.eval_totals)),
                    "cutoff_hits": sum(t == Termination.CUTOFF.value for t in r.terminated_by),
                    "finals": r.finals,
                    "eval_totals": r.eval_totals,
                    "terminated_by": r.terminated_by,
                }
                for r in results
            ]
            json.dump(payload, handle, sort_keys=True, indent=2)
            handle.write("\n")
    except OSError as e:
        raise OSError(f"cannot write {destination}: {e}") from e
    finally:
        if owned:
            handle.close()


def write_trace_csv(
    traces: list[list[tuple[int, float, int]]],
    destination: Union[str, Path, IO[str]],
    config: dict | None = None,
) -> None:
    """Per-iteration best-so-far traces, one block of rows per run index."""
    handle, owned = _open_dest(destination)
    try:
        handle.write(TRACE_HEADER + "\n")
        for run_index, trace in enumerate(traces):
            for iteration, best, evals in trace:
                handle.write(f"{run_index},{iteration},{_fmt(best)},{evals}\n")
        if config is not None:
            handle.write(f"# config: {json.dumps(config, sort_keys=True)}\n")
    except OSError as e:
        raise OSError(f"cannot write {destination}: {e}") from e
    finally:
        if owned:
            handle.close()
