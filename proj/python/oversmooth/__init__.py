"""Oversmoothing dynamics of graph layers."""

from ._core import (
    ContractError,
    ConvergenceError,
    DegenerateColumnError,
    DomainError,
    Error,
    Graph,
    Nonlinearity,
    Operator,
    OperatorKind,
    ParseError,
    SetupError,
    batch_norm,
    build_operator,
    center_operator,
    centered_eig,
    check_centering_effect,
    check_prop1,
    check_prop2,
    check_prop3,
    check_prop4,
    check_prop5,
    check_prop6,
    check_prop7,
    check_vanilla,
    cli,
    col_distance,
    col_projection_distance,
    dirichlet,
    graph_norm,
    krylov_basis,
    mu,
    numerical_rank,
    pair_norm,
    prop2_epsilon,
    prop2_probability,
    quotient,
    random_features,
    run_trajectory,
    subspace_distance,
    symmetric_eig,
    wl_refine,
)

__version__ = "0.1.0"
