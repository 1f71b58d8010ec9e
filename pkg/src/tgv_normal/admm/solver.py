"""Outer ADMM loop."""

from dataclasses import dataclass, field
import logging
import time

import numpy as np

from ..mesh import fidelity, mean_edge_length
from ..regularizers import RegularizerWeights, tgv_objective
from ..trt import TrtField
from .lagrangian import MeshProblem, augmented_lagrangian, primal_residuals
from .newton import newton_mesh_step
from .state import AdmmState
from .subproblems import (
    solve_d_subproblems,
    solve_w_subproblem,
    transport_state,
    update_multipliers,
)

logger = logging.getLogger(__name__)


@dataclass
class IterationRecord:
    iteration: int
    lagrangian_before_newton: float
    lagrangian_after_newton: float
    augmented_lagrangian: float
    fidelity: float
    tgv: dict
    residuals: tuple
    newton_accepted: int
    cg_iterations: int
    wall_time: float

    def as_dict(self):
        return {
            "iteration": self.iteration,
            "lagrangian_before_newton": self.lagrangian_before_newton,
            "lagrangian_after_newton": self.lagrangian_after_newton,
            "augmented_lagrangian": self.augmented_lagrangian,
            "fidelity": self.fidelity,
            "tgv": self.tgv,
            "residuals": list(self.residuals),
            "newton_accepted": self.newton_accepted,
            "cg_iterations": self.cg_iterations,
            "wall_time": self.wall_time,
        }


@dataclass
class RunResult:
    mesh: object
    state: AdmmState
    log: list = field(default_factory=list)
    converged: bool = False

    @property
    def iterations(self):
        return len(self.log)


def admm_iteration(state, config, data):
    """One sweep: splits, ``W``, Newton, transport, multipliers.

    Returns ``(new_state, record_fields)``.
    """
    d0, D1, d2 = solve_d_subproblems(state, config)
    state = state.copy(d0=d0, D1=D1, d2=d2)
    coeffs, cg_info = solve_w_subproblem(state, config)
    state = state.copy(W=TrtField(state.mesh, coeffs))

    problem = MeshProblem.from_state(state, config, data)
    old_mesh = state.mesh
    new_mesh, ninfo = newton_mesh_step(state, config, data, problem=problem)
    state = transport_state(state, old_mesh, new_mesh)
    lam0, Lam1, lam2 = update_multipliers(state, config)
    state = state.copy(lambda0=lam0, Lambda1=Lam1, lambda2=lam2, iteration=state.iteration + 1)
    return state, ninfo, cg_info


def run(noisy_mesh, config, data=None, callback=None):
    """Denoise ``noisy_mesh``; ``data`` defaults to its own vertices.

    ``callback(record)`` is called after every iteration.
    """
    data = noisy_mesh.vertices.copy() if data is None else np.asarray(data, dtype=np.float64)
    state = AdmmState.initial(noisy_mesh)
    tol = config.primal_tol if config.primal_tol is not None else 1e-6 * mean_edge_length(noisy_mesh)
    if config.tv_mode:
        weights = RegularizerWeights(alpha0=0.0, alpha1=config.beta)
    else:
        weights = RegularizerWeights(alpha0=config.alpha0, alpha1=config.alpha1)
    result = RunResult(noisy_mesh, state)
    for k in range(config.max_outer_iters):
        t0 = time.perf_counter()
        state, ninfo, cg_info = admm_iteration(state, config, data)
        res = primal_residuals(state, config)
        W = TrtField.zeros(state.mesh) if config.tv_mode else state.W
        rec = IterationRecord(
            iteration=k,
            lagrangian_before_newton=ninfo.value_before,
            lagrangian_after_newton=ninfo.value_after,
            augmented_lagrangian=augmented_lagrangian(state, config, data).total,
            fidelity=fidelity(state.mesh, data),
            tgv=tgv_objective(state.mesh, W, weights).as_dict(),
            residuals=res,
            newton_accepted=ninfo.accepted_steps,
            cg_iterations=cg_info["iterations"],
            wall_time=time.perf_counter() - t0,
        )
        result.log.append(rec)
        if callback is not None:
            callback(rec)
        logger.debug("iteration %d: L=%.6e res=%s", k, rec.augmented_lagrangian, res)
        if max(res) < tol:
            result.converged = True
            break
    result.mesh = state.mesh
    result.state = state
    return result
