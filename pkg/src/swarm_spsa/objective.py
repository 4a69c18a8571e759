"""Benchmark objective functions with measurement noise and call counting.

Three classic test functions (sphere, rosenbrock, rastrigin) on box-bounded
domains, wrapped in an :class:`Objective` that adds optional Gaussian
measurement noise, counts every measurement, and keeps a noise stream that is
independent of the optimizer's RNG. Per-dimension component scoring supports
the artificial-global-best assembly in :mod:`swarm_spsa.hybrid`.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

__all__ = [
    "Bounds",
    "FunctionId",
    "Objective",
    "DEFAULT_NOISE_SIGMA",
    "TABLE_BOUNDS",
    "sphere",
    "rosenbrock",
    "rastrigin",
    "make_objective",
    "dimensional_score",
    "component_scores",
    "sample_uniform_position",
]

# Canonical magnitude for the "+ noise" benchmark rows. Constructors default
# to 0.0 (noiseless); pass this explicitly to reproduce noisy settings.
DEFAULT_NOISE_SIGMA = 1.0


class FunctionId(str, Enum):
    SPHERE = "sphere"
    ROSENBROCK = "rosenbrock"
    RASTRIGIN = "rastrigin"


@dataclass(frozen=True)
class Bounds:
    """Uniform box bounds, identical in every dimension."""

    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError(f"bounds require lower < upper, got [{self.lower}, {self.upper}]")

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def clip(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lower, self.upper)


#: Search ranges per function (the rosenbrock range is asymmetric on purpose).
TABLE_BOUNDS: dict[FunctionId, Bounds] = {
    FunctionId.SPHERE: Bounds(-150.0, 150.0),
    FunctionId.ROSENBROCK: Bounds(-50.0, 25.0),
    FunctionId.RASTRIGIN: Bounds(-150.0, 150.0),
}


def sphere(x: np.ndarray) -> np.ndarray | float:
    """Sum of squares; optimum 0 at the origin. Works on (d,) or (n, d)."""
    x = np.asarray(x, dtype=float)
    return np.sum(x * x, axis=-1)


def rosenbrock(x: np.ndarray) -> np.ndarray | float:
    """Banana valley; optimum 0 at all-ones, requires d >= 2.

    Coupled terms 100*(x[i+1] - x[i]^2)^2 + (x[i] - 1)^2 for i < d-1, plus a
    final (x[d-1] - 1)^2 term so that each dimension owns exactly one additive
    contribution (see :func:`dimensional_score`).
    """
    x = np.asarray(x, dtype=float)
    head = x[..., :-1]
    tail = x[..., 1:]
    coupled = 100.0 * (tail - head * head) ** 2 + (head - 1.0) ** 2
    return np.sum(coupled, axis=-1) + (x[..., -1] - 1.0) ** 2


def rastrigin(x: np.ndarray) -> np.ndarray | float:
    """Highly multimodal; optimum 0 at the origin."""
    x = np.asarray(x, dtype=float)
    return np.sum(10.0 + x * x - 10.0 * np.cos(2.0 * np.pi * x), axis=-1)


_FUNCTIONS: dict[FunctionId, Callable] = {
    FunctionId.SPHERE: sphere,
    FunctionId.ROSENBROCK: rosenbrock,
    FunctionId.RASTRIGIN: rastrigin,
}


class Objective:
    """Measurement wrapper around a scalar test function.

    Every call to :meth:`evaluate` / :meth:`evaluate_many` is a *measurement*:
    it draws additive N(0, noise_sigma^2) noise from the objective's own
    stream and increments ``eval_count`` once per point. :meth:`true_value`
    bypasses both and is for reporting only.

    One instance belongs to one run; share across runs only by constructing
    a new instance per run (the counter and noise stream are mutable).
    """

    def __init__(
        self,
        fn: Callable[[np.ndarray], np.ndarray],
        dimension: int,
        bounds: Bounds,
        noise_sigma: float = 0.0,
        noise_rng: np.random.Generator | int | None = None,
        function_id: FunctionId | None = None,
    ):
        if dimension < 1:
            raise ValueError(f"dimension must be positive, got {dimension}")
        if function_id is FunctionId.ROSENBROCK and dimension < 2:
            raise ValueError("rosenbrock couples x[i] and x[i+1]; dimension must be >= 2")
        if noise_sigma < 0:
            raise ValueError(f"noise_sigma must be non-negative, got {noise_sigma}")
        self._fn = fn
        self.function_id = function_id
        self.dimension = int(dimension)
        self.bounds = bounds
        self.noise_sigma = float(noise_sigma)
        if isinstance(noise_rng, np.random.Generator):
            self._noise_rng = noise_rng
        else:
            self._noise_rng = np.random.default_rng(noise_rng)
        self.eval_count = 0

    def _check(self, x: np.ndarray, batch: bool) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if batch:
            if x.ndim != 2 or x.shape[1] != self.dimension:
                raise ValueError(f"expected shape (n, {self.dimension}), got {x.shape}")
        elif x.shape != (self.dimension,):
            raise ValueError(f"expected shape ({self.dimension},), got {x.shape}")
        if not np.all(np.isfinite(x)):
            raise ValueError("position contains non-finite components")
        return x

    def evaluate(self, x: np.ndarray) -> float:
        """One noisy measurement at ``x``; increments ``eval_count`` by 1."""
        x = self._check(x, batch=False)
        value = float(self._fn(x))
        self.eval_count += 1
        if self.noise_sigma > 0.0:
            value += self.noise_sigma * float(self._noise_rng.standard_normal())
        return value

    def evaluate_many(self, xs: np.ndarray) -> np.ndarray:
        """Noisy measurements for an (n, d) batch; counts n measurements."""
        xs = self._check(xs, batch=True)
        values = np.asarray(self._fn(xs), dtype=float)
        n = xs.shape[0]
        self.eval_count += n
        if self.noise_sigma > 0.0:
            values = values + self.noise_sigma * self._noise_rng.standard_normal(n)
        return values

    def true_value(self, x: np.ndarray) -> float:
        """Noiseless value; does not count as a measurement."""
        x = self._check(x, batch=False)
        return float(self._fn(x))

    def true_value_many(self, xs: np.ndarray) -> np.ndarray:
        xs = self._check(xs, batch=True)
        return np.asarray(self._fn(xs), dtype=float)


def make_objective(
    function: FunctionId | str,
    dimension: int,
    noise_sigma: float = 0.0,
    noise_rng: np.random.Generator | int | None = None,
) -> Objective:
    """Build one of the three benchmark objectives with its table bounds."""
    fid = FunctionId(function)
    return Objective(
        _FUNCTIONS[fid],
        dimension,
        TABLE_BOUNDS[fid],
        noise_sigma=noise_sigma,
        noise_rng=noise_rng,
        function_id=fid,
    )


def dimensional_score(obj: Objective, dim_index: int, component: float, context: np.ndarray) -> float:
    """Additive contribution of one component to the (noiseless) objective.

    ``context`` is a full candidate position; only the coupled rosenbrock
    terms read it. Summing the scores of all dimensions of ``x`` (with ``x``
    itself as context) reproduces the noiseless objective value exactly.
    """
    if obj.function_id is None:
        raise ValueError("per-dimension scoring is only defined for the benchmark functions")
    if not 0 <= dim_index < obj.dimension:
        raise IndexError(f"dim_index {dim_index} out of range for dimension {obj.dimension}")
    c = float(component)
    if obj.function_id is FunctionId.SPHERE:
        return c * c
    if obj.function_id is FunctionId.RASTRIGIN:
        return 10.0 + c * c - 10.0 * float(np.cos(2.0 * np.pi * c))
    # rosenbrock: dimension i owns term i; the last dimension has no coupled
    # successor and contributes only its (c - 1)^2 part.
    if dim_index == obj.dimension - 1:
        return (c - 1.0) ** 2
    context = np.asarray(context, dtype=float)
    if context.shape != (obj.dimension,):
        raise ValueError(f"context must have shape ({obj.dimension},), got {context.shape}")
    return 100.0 * (float(context[dim_index + 1]) - c * c) ** 2 + (c - 1.0) ** 2


def component_scores(obj: Objective, positions: np.ndarray) -> np.ndarray:
    """Per-dimension scores for a whole population at once.

    ``positions`` is (n, d); returns an (n, d) matrix where row i scores the
    components of position i against its own coupling context. Row sums equal
    the noiseless objective values.
    """
    if obj.function_id is None:
        raise ValueError("per-dimension scoring is only defined for the benchmark functions")
    p = np.asarray(positions, dtype=float)
    if p.ndim != 2 or p.shape[1] != obj.dimension:
        raise ValueError(f"expected shape (n, {obj.dimension}), got {p.shape}")
    if obj.function_id is FunctionId.SPHERE:
        return p * p
    if obj.function_id is FunctionId.RASTRIGIN:
        return 10.0 + p * p - 10.0 * np.cos(2.0 * np.pi * p)
    scores = np.empty_like(p)
    scores[:, :-1] = 100.0 * (p[:, 1:] - p[:, :-1] ** 2) ** 2 + (p[:, :-1] - 1.0) ** 2
    scores[:, -1] = (p[:, -1] - 1.0) ** 2
    return scores


def sample_uniform_position(
    bounds: Bounds,
    dimension: int,
    rng: np.random.Generator,
    count: int | None = None,
) -> np.ndarray:
    """Draw a position (or ``count`` of them, shape (count, d)) uniformly."""
    if dimension < 1:
        raise ValueError(f"dimension must be positive, got {dimension}")
    size = (dimension,) if count is None else (count, dimension)
    return rng.uniform(bounds.lower, bounds.upper, size=size)
