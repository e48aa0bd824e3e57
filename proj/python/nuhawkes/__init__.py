"""Nearly unstable Hawkes processes: simulation, resolvents and scaling limits."""

from ._core import (
    Kernel,
    __version__,
    exchangeable_moment,
    holder_exponent,
    ks_distance,
    resolvent_grid,
    run_experiment,
    simulate_cluster,
    simulate_thinning,
    solve_cir,
    stability,
    validate_config,
    wasserstein1,
)

__all__ = [
    "Kernel",
    "__version__",
    "exchangeable_moment",
    "holder_exponent",
    "ks_distance",
    "resolvent_grid",
    "run_experiment",
    "simulate_cluster",
    "simulate_thinning",
    "solve_cir",
    "stability",
    "validate_config",
    "wasserstein1",
]
