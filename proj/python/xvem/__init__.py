from ._core import (
    ConfigError,
    ErrorReport,
    Mesh,
    MeshError,
    RunConfig,
    SolverError,
    XvemError,
    cartesian_fractured_mesh,
    cartesian_lshape_mesh,
    emit_report,
    fit_rates,
    hexagonal_lshape_mesh,
    min_star_ratio,
    read_mesh,
    run_convergence_study,
    run_single,
    to_csv,
    write_mesh,
)

__all__ = [
    "ConfigError",
    "ErrorReport",
    "Mesh",
    "MeshError",
    "RunConfig",
    "SolverError",
    "XvemError",
    "cartesian_fractured_mesh",
    "cartesian_lshape_mesh",
    "emit_report",
    "fit_rates",
    "hexagonal_lshape_mesh",
    "min_star_ratio",
    "read_mesh",
    "run_convergence_study",
    "run_single",
    "to_csv",
    "write_mesh",
]
