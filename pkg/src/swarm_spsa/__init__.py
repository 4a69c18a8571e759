"""Derivative-free stochastic optimization: PSO, SPSA, and their hybrids.

Quick start::

    import numpy as np
    from swarm_spsa import PsoParams, make_objective, run_pso

    obj = make_objective("sphere", dimension=20)
    record = run_pso(PsoParams(max_iter=2000), obj, np.random.default_rng(1))
    print(record.final_true_fitness, record.terminated_by)

See demos/ for narrative walkthroughs of each capability and the
``swarm-spsa`` command line for single runs and benchmark tables.
"""

from .objective import (
    DEFAULT_NOISE_SIGMA,
    Bounds,
    FunctionId,
    Objective,
    TABLE_BOUNDS,
    component_scores,
    dimensional_score,
    make_objective,
    rastrigin,
    rosenbrock,
    sample_uniform_position,
    sphere,
)
from .swarm import (
    Constriction,
    FixedInertia,
    LinearInertia,
    Particle,
    PsoParams,
    RunRecord,
    SwarmState,
    Termination,
    constriction_coefficient,
    effective_coefficients,
    init_swarm,
    position_update,
    refresh_bests,
    resolve_v_max,
    run_pso,
    velocity_update,
)
from .spsa import (
    SpsaParams,
    estimate_gradient,
    estimate_gradient_many,
    gains,
    run_spsa,
    sample_perturbation,
    spsa_step,
    spsa_step_many,
    validate_params,
)
from .hybrid import (
    HybridVariant,
    VariantKind,
    form_agb,
    refine_gbest,
    refine_swarm,
    refine_with_agb,
    run_hybrid,
)
from .harness import (
    METHODS,
    ExperimentResult,
    ExperimentSpec,
    build_spec,
    downsample_trace,
    export_results,
    run_experiment,
    single_run,
    summarize,
    write_trace_csv,
)

__version__ = "0.1.0"
