"""Pattern search for coordinate partially separable problems."""

from ._core import (
    RunRecord,
    analyze,
    converged,
    data_profile,
    documented_stats,
    evaluate,
    fit_quadratic,
    list_problems,
    load_records,
    performance_profile,
    problem_dims,
    problem_info,
    problem_set,
    reference_value,
    run_variant,
    save_record,
    solve,
    structure_stats,
    update_radius,
)

__all__ = [
    "RunRecord",
    "analyze",
    "converged",
    "data_profile",
    "documented_stats",
    "evaluate",
    "fit_quadratic",
    "list_problems",
    "load_records",
    "performance_profile",
    "problem_dims",
    "problem_info",
    "problem_set",
    "reference_value",
    "run_variant",
    "save_record",
    "solve",
    "structure_stats",
    "update_radius",
]
