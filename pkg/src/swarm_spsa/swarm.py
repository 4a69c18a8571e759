"""Global-best particle swarm optimization with inertia and constriction modes.

The swarm is stored struct-of-arrays for vectorized updates: one velocity
update call per iteration handles all particles. The run loop is shared with
the SPSA-PSO hybrids through an optional per-iteration hook, which keeps the
plain and hybrid trajectories bitwise comparable when the hook does nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Union

import numpy as np

from .objective import Objective, sample_uniform_position

__all__ = [
    "FixedInertia",
    "LinearInertia",
    "Constriction",
    "PsoParams",
    "Particle",
    "SwarmState",
    "Termination",
    "RunRecord",
    "constriction_coefficient",
    "resolve_v_max",
    "effective_coefficients",
    "init_swarm",
    "velocity_update",
    "position_update",
    "refresh_bests",
    "run_pso",
]


@dataclass(frozen=True)
class FixedInertia:
    omega: float = 0.7


@dataclass(frozen=True)
class LinearInertia:
    """Inertia decreasing linearly from ``start`` at iteration 1 to ``end``
    at iteration ``max_iter`` (the classic companion of c1 = c2 = 2)."""

    start: float = 0.9
    end: float = 0.4


@dataclass(frozen=True)
class Constriction:
    """Clerc-Kennedy damped mode; requires phi1 + phi2 > 4."""

    kappa: float = 1.0
    phi1: float = 2.05
    phi2: float = 2.05


InertiaMode = Union[FixedInertia, LinearInertia, Constriction]


@dataclass
class PsoParams:
    swarm_size: int = 50
    c1: float = 2.0
    c2: float = 2.0
    inertia: InertiaMode = field(default_factory=LinearInertia)
    v_max: float | str = "auto"
    max_iter: int = 10000
    cutoff_error: float = 1e-4


def _require_valid(params: PsoParams) -> None:
    if params.swarm_size < 1:
        raise ValueError(f"swarm_size must be positive, got {params.swarm_size}")
    if params.c1 < 0 or params.c2 < 0:
        raise ValueError(f"c1, c2 must be non-negative, got {params.c1}, {params.c2}")
    if params.max_iter < 1:
        raise ValueError(f"max_iter must be positive, got {params.max_iter}")
    if params.cutoff_error < 0:
        raise ValueError(f"cutoff_error must be non-negative, got {params.cutoff_error}")
    if isinstance(params.inertia, Constriction):
        kappa = params.inertia.kappa
        if not 0.0 <= kappa <= 1.0:
            raise ValueError(f"kappa must lie in [0, 1], got {kappa}")
        constriction_coefficient(kappa, params.inertia.phi1, params.inertia.phi2)
    if not (params.v_max == "auto" or (isinstance(params.v_max, (int, float)) and params.v_max > 0)):
        raise ValueError(f'v_max must be positive or "auto", got {params.v_max!r}')


def constriction_coefficient(kappa: float, phi1: float, phi2: float) -> float:
    """chi = 2*kappa / (phi - 2 + sqrt(phi^2 - 4*phi)) with phi = phi1 + phi2.

    Defined only for phi > 4, where the square root is real and the swarm
    dynamics provably converge.
    """
    phi = phi1 + phi2
    if phi <= 4.0:
        raise ValueError(f"constriction requires phi1 + phi2 > 4, got {phi}")
    return 2.0 * kappa / (phi - 2.0 + math.sqrt(phi * phi - 4.0 * phi))


def resolve_v_max(params: PsoParams, obj: Objective) -> float:
    """Velocity limit: explicit value, or 20% of the search range."""
    if params.v_max == "auto":
        return 0.2 * obj.bounds.width
    return float(params.v_max)


def effective_coefficients(params: PsoParams, iteration: int) -> tuple[float, float, float]:
    """(omega, c1, c2) to use at 1-based ``iteration``.

    Constriction mode maps to the algebraically equivalent standard form
    omega = chi, c_i = chi*phi_i, so both modes run the same update kernel
    and the equivalence is exact, not approximate.
    """
    mode = params.inertia
    if isinstance(mode, FixedInertia):
        return mode.omega, params.c1, params.c2
    if isinstance(mode, LinearInertia):
        if params.max_iter > 1:
            frac = (iteration - 1) / (params.max_iter - 1)
        else:
            frac = 0.0
        return mode.start + (mode.end - mode.start) * frac, params.c1, params.c2
    chi = constriction_coefficient(mode.kappa, mode.phi1, mode.phi2)
    return chi, chi * mode.phi1, chi * mode.phi2


@dataclass
class Particle:
    """Read-only snapshot of one swarm member (see :meth:`SwarmState.particle`)."""

    position: np.ndarray
    velocity: np.ndarray
    pbest_position: np.ndarray
    pbest_fitness: float


@dataclass
class SwarmState:
    """Struct-of-arrays swarm: row i of each array belongs to particle i."""

    positions: np.ndarray        # (S, d)
    velocities: np.ndarray       # (S, d)
    pbest_positions: np.ndarray  # (S, d)
    pbest_fitness: np.ndarray    # (S,) measured values
    gbest_index: int
    gbest_position: np.ndarray   # (d,)
    gbest_fitness: float         # measured value
    best_ever_position: np.ndarray
    best_ever_fitness: float     # noiseless value, non-increasing
    iteration: int = 0

    @property
    def swarm_size(self) -> int:
        return self.positions.shape[0]

    def particle(self, i: int) -> Particle:
        return Particle(
            position=self.positions[i].copy(),
            velocity=self.velocities[i].copy(),
            pbest_position=self.pbest_positions[i].copy(),
            pbest_fitness=float(self.pbest_fitness[i]),
        )

    def record_best_ever(self, position: np.ndarray, true_fitness: float) -> None:
        """Running minimum over noiseless values; used for all reporting."""
        if true_fitness < self.best_ever_fitness:
            self.best_ever_fitness = float(true_fitness)
            self.best_ever_position = np.array(position, dtype=float, copy=True)


class Termination(str, Enum):
    MAX_ITER = "max_iter"
    CUTOFF = "cutoff"


@dataclass
class RunRecord:
    """Outcome of one optimization run.

    ``trace`` rows are (iteration, best_ever_true_fitness, cumulative
    eval_count), one per completed iteration; the fitness column is a running
    minimum of noiseless values.
    """

    final_position: np.ndarray
    final_true_fitness: float
    trace: list[tuple[int, float, int]]
    terminated_by: Termination
    seed: int | None = None


def init_swarm(params: PsoParams, obj: Objective, rng: np.random.Generator) -> SwarmState:
    """Uniform random positions, zero velocities, pbest = start; S measurements."""
    _require_valid(params)
    S = params.swarm_size
    positions = sample_uniform_position(obj.bounds, obj.dimension, rng, count=S)
    velocities = np.zeros_like(positions)
    fitness = obj.evaluate_many(positions)
    gbest_index = int(np.argmin(fitness))
    state = SwarmState(
        positions=positions,
        velocities=velocities,
        pbest_positions=positions.copy(),
        pbest_fitness=fitness.copy(),
        gbest_index=gbest_index,
        gbest_position=positions[gbest_index].copy(),
        gbest_fitness=float(fitness[gbest_index]),
        best_ever_position=positions[gbest_index].copy(),
        best_ever_fitness=np.inf,
        iteration=0,
    )
    state.best_ever_fitness = obj.true_value(state.gbest_position)
    return state


def velocity_update(
    velocity: np.ndarray,
    position: np.ndarray,
    pbest_position: np.ndarray,
    gbest_position: np.ndarray,
    *,
    omega: float,
    c1: float,
    c2: float,
    v_max: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """v' = omega*v + c1*r1*(pbest - x) + c2*r2*(gbest - x), clamped to +-v_max.

    r1, r2 are drawn componentwise uniform in [0, 1] from ``rng`` (one array
    each, matching the position shape, so a whole (S, d) swarm consumes the
    stream in a single fixed order). Accepts (d,) vectors or (S, d) arrays.
    """
    velocity = np.asarray(velocity, dtype=float)
    position = np.asarray(position, dtype=float)
    if velocity.shape != position.shape:
        raise ValueError(f"velocity shape {velocity.shape} != position shape {position.shape}")
    r1 = rng.uniform(size=position.shape)
    r2 = rng.uniform(size=position.shape)
    v_new = (
        omega * velocity
        + c1 * r1 * (pbest_position - position)
        + c2 * r2 * (gbest_position - position)
    )
    return np.clip(v_new, -v_max, v_max)


def position_update(position: np.ndarray, velocity: np.ndarray) -> np.ndarray:
    """x' = x + v', exactly; positions are deliberately not clamped to bounds."""
    position = np.asarray(position, dtype=float)
    velocity = np.asarray(velocity, dtype=float)
    if position.shape != velocity.shape:
        raise ValueError(f"position shape {position.shape} != velocity shape {velocity.shape}")
    return position + velocity


def refresh_bests(state: SwarmState, obj: Objective) -> SwarmState:
    """Measure all current positions and update personal/global/ever bests.

    pbest moves only on strict improvement of the *measured* value (under
    noise this is deliberately a noisy comparison); gbest is re-derived as the
    min over pbests with ties going to the lowest particle index; the best-ever
    record takes the noiseless value at the new gbest.
    """
    fitness = obj.evaluate_many(state.positions)
    improved = fitness < state.pbest_fitness
    state.pbest_positions[improved] = state.positions[improved]
    state.pbest_fitness[improved] = fitness[improved]
    gbest_index = int(np.argmin(state.pbest_fitness))
    state.gbest_index = gbest_index
    state.gbest_position = state.pbest_positions[gbest_index].copy()
    state.gbest_fitness = float(state.pbest_fitness[gbest_index])
    state.record_best_ever(state.gbest_position, obj.true_value(state.gbest_position))
    return state


def run_pso(
    params: PsoParams,
    obj: Objective,
    rng: np.random.Generator,
    seed: int | None = None,
    extra_step: Callable[[SwarmState, Objective, np.random.Generator], None] | None = None,
) -> RunRecord:
    """Full swarm run: init, then refresh -> move each iteration.

    Terminates at ``max_iter`` or as soon as the best-ever noiseless fitness
    reaches ``cutoff_error``; a cutoff of ``math.inf`` means disabled.
    ``extra_step``, if given, runs after the position updates of every
    iteration; the hybrid variants plug in there.
    """
    _require_valid(params)
    v_max = resolve_v_max(params, obj)
    cutoff_enabled = not math.isinf(params.cutoff_error)
    state = init_swarm(params, obj, rng)
    trace: list[tuple[int, float, int]] = []
    terminated = Termination.MAX_ITER
    for k in range(1, params.max_iter + 1):
        refresh_bests(state, obj)
        state.iteration = k
        if cutoff_enabled and state.best_ever_fitness <= params.cutoff_error:
            trace.append((k, state.best_ever_fitness, obj.eval_count))
            terminated = Termination.CUTOFF
            break
        omega, c1, c2 = effective_coefficients(params, k)
        state.velocities = velocity_update(
            state.velocities,
            state.positions,
            state.pbest_positions,
            state.gbest_position,
            omega=omega,
            c1=c1,
            c2=c2,
            v_max=v_max,
            rng=rng,
        )
        state.positions = position_update(state.positions, state.velocities)
        if extra_step is not None:
            extra_step(state, obj, rng)
        trace.append((k, state.best_ever_fitness, obj.eval_count))
    return RunRecord(
        final_position=state.best_ever_position.copy(),
        final_true_fitness=state.best_ever_fitness,
        trace=trace,
        terminated_by=terminated,
        seed=seed,
    )
