"""ADMM mesh denoiser with the TGV (or TV) of the normal as regularizer."""

from .lagrangian import (
    InvalidTrialMesh,
    LagrangianBreakdown,
    MeshProblem,
    augmented_lagrangian,
    constraint_values,
    explicit_lagrangian,
    lagrangian,
    primal_residuals,
)
from .newton import NewtonInfo, newton_mesh_step, truncated_newton_direction
from .solver import IterationRecord, RunResult, admm_iteration, run
from .state import DEFAULT_PENALTY_KAPPA, AdmmState, SolverConfig, scaled_penalties
from .subproblems import (
    assemble_w_system,
    conjugate_gradient,
    linear_maps,
    shrink,
    solve_d_subproblems,
    solve_w_subproblem,
    transport_state,
    update_multipliers,
)

__all__ = [
    "AdmmState",
    "DEFAULT_PENALTY_KAPPA",
    "InvalidTrialMesh",
    "IterationRecord",
    "LagrangianBreakdown",
    "MeshProblem",
    "NewtonInfo",
    "RunResult",
    "SolverConfig",
    "admm_iteration",
    "assemble_w_system",
    "augmented_lagrangian",
    "conjugate_gradient",
    "constraint_values",
    "explicit_lagrangian",
    "lagrangian",
    "linear_maps",
    "newton_mesh_step",
    "primal_residuals",
    "run",
    "scaled_penalties",
    "shrink",
    "solve_d_subproblems",
    "solve_w_subproblem",
    "transport_state",
    "truncated_newton_direction",
    "update_multipliers",
]
