"""Simultaneous perturbation stochastic approximation.

Gradient-free descent that estimates the full gradient from exactly two
measurements per step, regardless of dimension: perturb all coordinates at
once with a random +-1 vector, take the two-sided difference, divide back by
the perturbation. Gain sequences a_k (step size) and c_k (perturbation size)
decay so that steps shrink while the estimate stays informative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .objective import Objective
from .swarm import RunRecord, Termination

__all__ = [
    "SpsaParams",
    "validate_params",
    "gains",
    "sample_perturbation",
    "estimate_gradient",
    "estimate_gradient_many",
    "spsa_step",
    "spsa_step_many",
    "run_spsa",
]


@dataclass
class SpsaParams:
    """Gain-sequence constants and iteration budgets.

    a, c are problem-specific and worth tuning; A, alpha, gamma keep the
    standard recommended values. ``steps`` budgets a standalone run;
    ``refine_steps`` budgets each inner refinement inside the hybrids.
    Construction never raises — use :func:`validate_params` to collect
    violations.
    """

    a: float
    c: float
    A: float = 200.0
    alpha: float = 0.602
    gamma: float = 0.101
    steps: int = 10000
    refine_steps: int = 1


def validate_params(params: SpsaParams) -> list[str]:
    """Return every violated constraint (empty list means valid).

    The decay exponents must satisfy 0 < gamma < alpha <= 1 and alpha > 2*gamma,
    which is sufficient for sum(a_k) = inf, c_k -> 0, and
    sum(a_k^2 / c_k^2) < inf.
    """
    violations = []
    if not params.a > 0:
        violations.append(f"a must be positive, got {params.a}")
    if not params.c > 0:
        violations.append(f"c must be positive, got {params.c}")
    if not params.A >= 0:
        violations.append(f"A must be non-negative, got {params.A}")
    if not 0 < params.gamma:
        violations.append(f"gamma must be positive, got {params.gamma}")
    if not params.gamma < params.alpha:
        violations.append(f"gamma must be < alpha, got gamma={params.gamma}, alpha={params.alpha}")
    if not params.alpha <= 1:
        violations.append(f"alpha must be <= 1, got {params.alpha}")
    if not params.alpha > 2 * params.gamma:
        violations.append(
            f"alpha must exceed 2*gamma for square-summability, got alpha={params.alpha}, gamma={params.gamma}"
        )
    if params.steps < 0:
        violations.append(f"steps must be non-negative, got {params.steps}")
    if params.refine_steps < 0:
        violations.append(f"refine_steps must be non-negative, got {params.refine_steps}")
    return violations


def _require_valid(params: SpsaParams) -> None:
    violations = validate_params(params)
    if violations:
        raise ValueError("invalid SPSA parameters: " + "; ".join(violations))


def gains(k: int, params: SpsaParams) -> tuple[float, float]:
    """Step and perturbation sizes at iteration k (0-based, so c_0 = c)."""
    a_k = params.a / (k + 1 + params.A) ** params.alpha
    c_k = params.c / (k + 1) ** params.gamma
    return a_k, c_k


def sample_perturbation(
    dimension: int, rng: np.random.Generator, count: int | None = None
) -> np.ndarray:
    """I.i.d. symmetric +-1 components, shape (d,) or (count, d).

    Bernoulli +-1 keeps 1/delta_i bounded (a Gaussian or uniform perturbation
    would not) and makes the componentwise inverse exact: 1/delta_i = delta_i.
    """
    size = (dimension,) if count is None else (count, dimension)
    return rng.integers(0, 2, size=size).astype(float) * 2.0 - 1.0


def estimate_gradient(
    obj: Objective, theta: np.ndarray, c_k: float, delta: np.ndarray
) -> np.ndarray:
    """Two-measurement gradient estimate at ``theta``.

    g_i = [y(theta + c_k*delta) - y(theta - c_k*delta)] / (2 * c_k * delta_i).
    Exact for 1-D quadratics; unbiased up to O(c_k^2) in general.
    """
    if c_k <= 0:
        raise ValueError(f"c_k must be positive, got {c_k}")
    theta = np.asarray(theta, dtype=float)
    delta = np.asarray(delta, dtype=float)
    y_plus = obj.evaluate(theta + c_k * delta)
    y_minus = obj.evaluate(theta - c_k * delta)
    return (y_plus - y_minus) / (2.0 * c_k * delta)


def estimate_gradient_many(
    obj: Objective, thetas: np.ndarray, c_k: float, deltas: np.ndarray
) -> np.ndarray:
    """Batched estimate for (n, d) points; still 2 measurements per point."""
    if c_k <= 0:
        raise ValueError(f"c_k must be positive, got {c_k}")
    thetas = np.asarray(thetas, dtype=float)
    deltas = np.asarray(deltas, dtype=float)
    y_plus = obj.evaluate_many(thetas + c_k * deltas)
    y_minus = obj.evaluate_many(thetas - c_k * deltas)
    return (y_plus - y_minus)[:, None] / (2.0 * c_k * deltas)


def spsa_step(
    theta: np.ndarray, k: int, params: SpsaParams, obj: Objective, rng: np.random.Generator
) -> np.ndarray:
    """One descent step from ``theta``, clamped to the objective bounds."""
    a_k, c_k = gains(k, params)
    delta = sample_perturbation(obj.dimension, rng)
    g_hat = estimate_gradient(obj, theta, c_k, delta)
    return obj.bounds.clip(theta - a_k * g_hat)


def spsa_step_many(
    thetas: np.ndarray, k: int, params: SpsaParams, obj: Objective, rng: np.random.Generator
) -> np.ndarray:
    """One step for each of n independent iterates (rows of ``thetas``)."""
    a_k, c_k = gains(k, params)
    deltas = sample_perturbation(obj.dimension, rng, count=thetas.shape[0])
    g_hat = estimate_gradient_many(obj, thetas, c_k, deltas)
    return obj.bounds.clip(thetas - a_k * g_hat)


def run_spsa(
    theta0: np.ndarray,
    params: SpsaParams,
    obj: Objective,
    rng: np.random.Generator,
    cutoff_error: float = 1e-4,
    seed: int | None = None,
) -> RunRecord:
    """Standalone SPSA run with best-so-far tracking.

    Iterates ``params.steps`` steps (2 measurements each) or stops early once
    the best noiseless value seen on the iterate path drops to
    ``cutoff_error`` (``math.inf`` disables the cutoff). The trace and the
    reported final point follow the running best, not the last iterate.
    """
    _require_valid(params)
    cutoff_enabled = not math.isinf(cutoff_error)
    theta = np.asarray(theta0, dtype=float).copy()
    if theta.shape != (obj.dimension,):
        raise ValueError(f"theta0 must have shape ({obj.dimension},), got {theta.shape}")
    if np.any(theta < obj.bounds.lower) or np.any(theta > obj.bounds.upper):
        raise ValueError("theta0 must lie within the objective bounds")

    best_theta = theta.copy()
    best_true = obj.true_value(theta)
    trace: list[tuple[int, float, int]] = []
    terminated = Termination.MAX_ITER
    for k in range(params.steps):
        theta = spsa_step(theta, k, params, obj, rng)
        t = obj.true_value(theta)
        if t < best_true:
            best_true = t
            best_theta = theta.copy()
        trace.append((k + 1, best_true, obj.eval_count))
        if cutoff_enabled and best_true <= cutoff_error:
            terminated = Termination.CUTOFF
            break
    return RunRecord(
        final_position=best_theta,
        final_true_fitness=best_true,
        trace=trace,
        terminated_by=terminated,
        seed=seed,
    )
