"""Ghost-projection simulation and planning toolkit."""

from ._core import (
    BasisSpec,
    CorrelationStats,
    DistributionMoments,
    FilterSelection,
    NonNegBasis,
    RandomBasis,
    RunResult,
    __version__,
    approx_optimal_x,
    correlation_stats,
    cutoff_a,
    filter_basis,
    moments,
    optimal_cutoff_x,
    phantom,
    pseudo_correlation,
    run_experiment,
    set_thread_count,
    solve_optimal_x,
)

__all__ = [
    "BasisSpec",
    "CorrelationStats",
    "DistributionMoments",
    "FilterSelection",
    "NonNegBasis",
    "RandomBasis",
    "RunResult",
    "__version__",
    "approx_optimal_x",
    "correlation_stats",
    "cutoff_a",
    "filter_basis",
    "moments",
    "optimal_cutoff_x",
    "phantom",
    "pseudo_correlation",
    "run_experiment",
    "set_thread_count",
    "solve_optimal_x",
]
