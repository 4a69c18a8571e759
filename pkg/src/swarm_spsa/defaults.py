"""Built-in default configuration.

Values shared by the CLI, the experiment harness, and the demos. The SPSA
gain numerators are per-function: they were tuned once with seeded
calibration runs (see tests/test_acceptance.py for the checks that pin the
resulting behavior) and are deliberately committed here rather than guessed
at call sites.
"""

from __future__ import annotations

DEFAULTS: dict = {
    # swarm
    "swarm_size": 50,
    "c1": 2.0,
    "c2": 2.0,
    "omega_start": 0.9,
    "omega_end": 0.4,
    "kappa": 1.0,
    "phi1": 2.05,
    "phi2": 2.05,
    "vmax": "auto",  # 0.2 * search range
    "max_iter": 10000,
    "cutoff": 1e-4,
    # spsa
    "A": 200.0,
    "alpha": 0.602,
    "gamma": 0.101,
    "refine_steps": 1,
    "refine_scope": "gbest",
    # experiments
    "noise_sigma": 0.0,
    "runs": 100,
    "seed": 0,
}

# Per-function SPSA gain numerators (a, c). The rastrigin perturbation size
# c = 1.0 is load-bearing: a +-1 perturbation is period-aligned with the
# cos(2*pi*x) term, so the two-sided difference cancels the oscillation and
# the estimator sees only the convex quadratic envelope. The rosenbrock step
# numerator is tiny because its gradient spans seven orders of magnitude over
# the box; gradient-proportional steps can only be a gentle local polish
# there (pass a larger --spsa-a for standalone SPSA runs on rosenbrock).
SPSA_TUNING: dict[str, tuple[float, float]] = {
    "sphere": (0.6, 1.0),
    "rosenbrock": (1e-5, 0.5),
    "rastrigin": (2.4, 1.0),
}
