"""Solvers for the selective pickup-and-delivery TSP."""

from ._pdstsp import (
    ConfigError,
    Error,
    InfeasibleRoute,
    Instance,
    InvalidVertex,
    Route,
    SizeError,
    StructuralError,
    basin_csv,
    bench_csv,
    bi_lns,
    exact_solve,
    generate,
    greedy_search,
    hill_climb,
    is_k_attractor,
    milp_lp,
    mslns,
    multi_start_greedy,
    read_instances,
    repair,
    solve,
    two_opt,
    validate_route,
    write_instances,
)

__all__ = [name for name in dir() if not name.startswith("_")]
