"""Three ways of splicing SPSA refinement into the swarm loop.

Variant 1 pushes the global best downhill with a few SPSA steps and adopts
the result unconditionally. Variant 2 assembles an artificial global best
from the best per-dimension components across all personal bests, refines
it, and adopts it only if it measures strictly better than the incumbent.
Variant 3 applies the SPSA refinement to every particle position after the
swarm moves. All variants reset the SPSA gain index to 0 on every invocation
so the inner step sizes stay locally meaningful late in the run.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .objective import Objective, component_scores
from .spsa import SpsaParams, spsa_step, spsa_step_many, validate_params
from .swarm import PsoParams, RunRecord, SwarmState, run_pso

__all__ = [
    "VariantKind",
    "HybridVariant",
    "refine_gbest",
    "form_agb",
    "refine_with_agb",
    "refine_swarm",
    "run_hybrid",
]


class VariantKind(str, Enum):
    GBEST_REFINE = "gbest-refine"   # unconditional gbest replacement
    AGB_REFINE = "agb-refine"       # artificial global best + guarded replacement
    SWARM_REFINE = "swarm-refine"   # per-particle refinement


@dataclass
class HybridVariant:
    kind: VariantKind
    pso: PsoParams = field(default_factory=PsoParams)
    spsa: SpsaParams = field(default_factory=lambda: SpsaParams(a=0.5, c=1.0))
    # "gbest" refines only the particle currently holding the global best (a
    # single stable scout; the default); "all" refines every particle each
    # iteration, which multiplies the measurement cost by the swarm size and
    # in practice keeps the swarm too hot to exploit.
    refine_scope: str = "gbest"


def _adopt_as_gbest(state: SwarmState, obj: Objective, position: np.ndarray, fitness: float) -> None:
    """Install ``position`` as the swarm's global best.

    gbest is re-derived from personal bests at every refresh, so the point
    must be written through to the holding particle's pbest or it would be
    forgotten one iteration later.
    """
    i = state.gbest_index
    state.pbest_positions[i] = position
    state.pbest_fitness[i] = fitness
    state.gbest_position = np.array(position, dtype=float, copy=True)
    state.gbest_fitness = float(fitness)
    state.record_best_ever(position, obj.true_value(position))


def refine_gbest(
    state: SwarmState, spsa: SpsaParams, obj: Objective, rng: np.random.Generator
) -> SwarmState:
    """Run ``refine_steps`` SPSA steps from the global best and adopt the result.

    The replacement is unconditional: SPSA exploits local convexity around the
    incumbent and the swarm follows it, for better or worse; only the best-ever
    record is guaranteed monotone. Consumes 2*refine_steps + 1 measurements
    (zero when refine_steps = 0, which makes the hybrid collapse to plain PSO).
    """
    n = spsa.refine_steps
    if n == 0:
        return state
    theta = state.gbest_position.copy()
    for k in range(n):
        theta = spsa_step(theta, k, spsa, obj, rng)
    fitness = obj.evaluate(theta)
    _adopt_as_gbest(state, obj, theta, fitness)
    return state


def form_agb(state: SwarmState, obj: Objective) -> np.ndarray:
    """Assemble the artificial global best from per-dimension pbest components.

    For every dimension, pick the personal-best component with the lowest
    dimensional score (scored in that particle's own pbest context for the
    coupled rosenbrock terms; ties go to the lowest particle index). Costs no
    measurements — the scores are formula evaluations, not measurements.
    """
    scores = component_scores(obj, state.pbest_positions)
    winners = np.argmin(scores, axis=0)
    return state.pbest_positions[winners, np.arange(obj.dimension)].copy()


def refine_with_agb(
    state: SwarmState, spsa: SpsaParams, obj: Objective, rng: np.random.Generator
) -> SwarmState:
    """Form the aGB, refine it with SPSA, replace gbest only if strictly better.

    The refined candidate is measured once and competes against the incumbent
    gbest's measured fitness; on a loss the candidate is discarded entirely.
    Consumes 2*refine_steps + 1 measurements (zero when refine_steps = 0).
    """
    n = spsa.refine_steps
    if n == 0:
        return state
    theta = form_agb(state, obj)
    for k in range(n):
        theta = spsa_step(theta, k, spsa, obj, rng)
    fitness = obj.evaluate(theta)
    if fitness < state.gbest_fitness:
        _adopt_as_gbest(state, obj, theta, fitness)
    return state


def refine_swarm(
    state: SwarmState,
    spsa: SpsaParams,
    obj: Objective,
    rng: np.random.Generator,
    scope: str = "all",
) -> SwarmState:
    """Move particle positions with SPSA steps and re-measure them.

    scope="all" refines every particle (batched, rows in particle order, so
    the RNG stream order is fixed); scope="gbest" refines only the particle
    holding the global best. Each refined position is re-measured and the
    particle's pbest updated on strict improvement. Consumes
    S*(2*refine_steps + 1) measurements for scope="all", 2*refine_steps + 1
    for scope="gbest" (zero when refine_steps = 0).
    """
    n = spsa.refine_steps
    if n == 0:
        return state
    if scope == "all":
        thetas = state.positions
        for k in range(n):
            thetas = spsa_step_many(thetas, k, spsa, obj, rng)
        state.positions = thetas
        fitness = obj.evaluate_many(thetas)
        improved = fitness < state.pbest_fitness
        state.pbest_positions[improved] = thetas[improved]
        state.pbest_fitness[improved] = fitness[improved]
    elif scope == "gbest":
        i = state.gbest_index
        theta = state.positions[i].copy()
        for k in range(n):
            theta = spsa_step(theta, k, spsa, obj, rng)
        state.positions[i] = theta
        fitness = obj.evaluate(theta)
        if fitness < state.pbest_fitness[i]:
            state.pbest_positions[i] = theta
            state.pbest_fitness[i] = fitness
    else:
        raise ValueError(f'refine_scope must be "all" or "gbest", got {scope!r}')
    return state


def run_hybrid(
    variant: HybridVariant,
    obj: Objective,
    rng: np.random.Generator,
    seed: int | None = None,
) -> RunRecord:
    """One full hybrid run: the PSO loop plus the variant's per-iteration step."""
    violations = validate_params(variant.spsa)
    if violations:
        raise ValueError("invalid SPSA parameters: " + "; ".join(violations))
    if variant.refine_scope not in ("all", "gbest"):
        raise ValueError(f'refine_scope must be "all" or "gbest", got {variant.refine_scope!r}')

    kind = variant.kind
    if kind is VariantKind.GBEST_REFINE:
        def extra(state, obj_, rng_):
            refine_gbest(state, variant.spsa, obj_, rng_)
    elif kind is VariantKind.AGB_REFINE:
        def extra(state, obj_, rng_):
            refine_with_agb(state, variant.spsa, obj_, rng_)
    elif kind is VariantKind.SWARM_REFINE:
        def extra(state, obj_, rng_):
            refine_swarm(state, variant.spsa, obj_, rng_, scope=variant.refine_scope)
    else:
        raise ValueError(f"unknown hybrid variant {kind!r}")

    return run_pso(variant.pso, obj, rng, seed=seed, extra_step=extra)
