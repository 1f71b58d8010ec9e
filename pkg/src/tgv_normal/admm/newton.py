"""Globalized truncated Newton for the vertex update."""

from dataclasses import dataclass
import logging

import numpy as np

from ..errors import LineSearchFailure
from ..mesh import mean_edge_length
from .lagrangian import InvalidTrialMesh, MeshProblem, compute_frames, edge_angle, lagrangian

logger = logging.getLogger(__name__)

# Bending angles above this are treated as folds by the step retry.
FOLD_ANGLE = 0.9 * np.pi


@dataclass
class NewtonInfo:
    accepted_steps: int = 0
    attempted_steps: int = 0
    value_before: float = float("nan")
    value_after: float = float("nan")
    hessian_shift: float = 0.0
    cg_iterations: int = 0
    line_search_failures: int = 0
    frozen_vertices: int = 0


def _hessian_vector(problem, x, g, eps_abs):
    def hv(v):
        nv = np.max(np.abs(v))
        if nv == 0.0:
            return np.zeros_like(v)
        eps = eps_abs / nv
        # central difference of the analytic gradient
        gp = lagrangian(x + eps * v, problem)[1]
        gm = lagrangian(x - eps * v, problem)[1]
        return (gp - gm) / (2.0 * eps)
    return hv


def truncated_newton_direction(hv, g, max_iters, shift=0.0, max_restarts=20):
    """Approximately solve ``(H + shift I) p = -g`` by CG.

    Whenever a direction of nonpositive curvature shows up the shift grows
    and CG restarts.  Returns ``(p, shift, iterations)``.
    """
    gnorm = np.linalg.norm(g)
    eta = min(0.5, np.sqrt(gnorm))
    total = 0
    for _ in range(max_restarts + 1):
        p = np.zeros_like(g)
        r = -g.copy()
        d = r.copy()
        rr = r.ravel() @ r.ravel()
        ok = True
        for _ in range(max_iters):
            Hd = hv(d) + shift * d
            total += 1
            curv = d.ravel() @ Hd.ravel()
            dd = d.ravel() @ d.ravel()
            if curv <= 1e-12 * dd:
                shift = max(2.0 * shift, 1e-3) - curv / dd
                ok = False
                break
            step = rr / curv
            p += step * d
            r -= step * Hd
            rr_new = r.ravel() @ r.ravel()
            if np.sqrt(rr_new) <= eta * gnorm:
                break
            d = r + (rr_new / rr) * d
            rr = rr_new
        if ok:
            return p, shift, total
    return -g, shift, total


def newton_mesh_step(state, config, reference_vertices, problem=None):
    """Run ``config.newton_steps_per_outer`` globalized Newton steps on the
    vertex positions with everything else frozen.

    Returns ``(new_mesh, info)``.  A failed line search keeps the current
    iterate and is logged, never raised.
    """
    if problem is None:
        problem = MeshProblem.from_state(state, config, reference_vertices)
    mesh = state.mesh
    x = mesh.vertices.copy()
    info = NewtonInfo()
    f, g = lagrangian(x, problem)
    info.value_before = f
    eps_abs = 1e-6 * mean_edge_length(mesh)
    for _ in range(config.newton_steps_per_outer):
        info.attempted_steps += 1
        if not np.all(np.isfinite(g)) or np.linalg.norm(g) == 0.0:
            break
        try:
            p, shift, it = truncated_newton_direction(
                _hessian_vector(problem, x, g, eps_abs), g, config.newton_cg_max_iters
            )
        except InvalidTrialMesh:
            p, shift, it = -g, 0.0, 0
        info.hessian_shift = max(info.hessian_shift, shift)
        info.cg_iterations += it
        try:
            x, f, g = _armijo(problem, x, f, g, p, config)
            info.accepted_steps += 1
            continue
        except LineSearchFailure:
            pass
        # Edges close to the antipodal set block every step that touches
        # them; retry with the vertices around them held fixed.
        frozen = fold_vertices(problem, x)
        if frozen.any():
            info.frozen_vertices = int(frozen.sum())
            p = np.where(frozen[:, None], 0.0, p)
            g_free = np.where(frozen[:, None], 0.0, g)
            try:
                x, f, g = _armijo(problem, x, f, g_free, p, config)
                info.accepted_steps += 1
                continue
            except LineSearchFailure:
                pass
        info.line_search_failures += 1
        logger.warning("Newton step rejected after %d halvings", config.max_halvings)
        break
    info.value_after = f
    return mesh.with_vertices(x), info


def fold_vertices(problem, x, threshold=FOLD_ANGLE):
    """Boolean mask of vertices on triangles adjacent to an edge whose
    bending angle exceeds ``threshold`` in magnitude."""
    mesh = problem.mesh
    fr = compute_frames(x, mesh.triangles)
    bad = np.abs(edge_angle(fr, mesh)[0]) > threshold
    mask = np.zeros(len(x), dtype=bool)
    mask[mesh.triangles[mesh.edge_tris[bad]].ravel()] = True
    return mask


def _armijo(problem, x, f, g, p, config):
    # ``g`` may be restricted to a subspace; the full gradient is returned
    slope = g.ravel() @ p.ravel()
    if not slope < 0:
        p = -g
        slope = -(g.ravel() @ g.ravel())
    s = 1.0
    for _ in range(config.max_halvings + 1):
        xt = x + s * p
        try:
            ft = lagrangian(xt, problem, need_grad=False)
        except InvalidTrialMesh:
            ft = np.inf
        if ft <= f + config.armijo_c * s * slope:
            ft, gt = lagrangian(xt, problem)
            return xt, ft, gt
        s *= 0.5
    raise LineSearchFailure(f"no sufficient decrease after {config.max_halvings} halvings")
