"""Discrete TV and second-order TGV of the normal field."""

from dataclasses import dataclass

import numpy as np

from . import trt
from .mesh import edge_frame, edge_frames, fidelity  # noqa: F401  (re-export)
from .sphere import geodesic_distance, log_map, _check_not_antipodal


@dataclass(frozen=True)
class RegularizerWeights:
    alpha0: float = 0.0
    alpha1: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if min(self.alpha0, self.alpha1, self.beta) < 0:
            raise ValueError("regularization weights must be nonnegative")


@dataclass(frozen=True)
class TgvBreakdown:
    """Unweighted sums of the three parts and the weighted total."""

    alpha1_term: float
    jacobian_term: float
    jump_term: float
    total: float

    def as_dict(self):
        return {
            "alpha1_term": self.alpha1_term,
            "jacobian_term": self.jacobian_term,
            "jump_term": self.jump_term,
            "total": self.total,
        }


def signed_bending(frames):
    """``sign(<n-, mu+>) dist(n+, n-)``, i.e. ``<mu+, log(n+, n-)>``."""
    _check_not_antipodal(np.einsum("ei,ei->e", frames.n_plus, frames.n_minus))
    s = np.sign(np.einsum("ei,ei->e", frames.n_minus, frames.mu_plus))
    return s * geodesic_distance(frames.n_plus, frames.n_minus)


def tv_normal(mesh):
    """``sum_E |E| dist(n+, n-)``."""
    fr = edge_frames(mesh)
    _check_not_antipodal(np.einsum("ei,ei->e", fr.n_plus, fr.n_minus))
    return float(np.sum(fr.length * geodesic_distance(fr.n_plus, fr.n_minus)))


def _plus_conormal_values(W, fr):
    """``mu+^T W|_{E+}(m_E) mu+`` for all edges."""
    mesh = W.mesh
    g = mesh.geometry
    tp = mesh.edge_tris[:, 0]
    v = trt.triangle_vectors(mesh, W.coefficients)[tp]  # (E, 3, 3)
    P = mesh.vertices[mesh.triangles[tp]]  # (E, 3, 3)
    off = np.einsum("eki,ei->ek", fr.midpoint[:, None, :] - P, fr.mu_plus)
    Wmu = np.einsum("eki,ek->ei", v, off) / g.A2[tp][:, None]
    return np.einsum("ei,ei->e", fr.mu_plus, Wmu)


def alpha1_edge_terms(mesh, W):
    """``|E| |<mu+, log(n+, n-) + h_E W|_{E+} mu+>|`` for all edges."""
    fr = edge_frames(mesh)
    return fr.length * np.abs(signed_bending(fr) + fr.h * _plus_conormal_values(W, fr))


def tgv_alpha1_edge(mesh, W, edge_id):
    """The first-order coupling term on a single edge."""
    fr = edge_frame(mesh, edge_id)
    tp = mesh.edge_tris[edge_id, 0]
    lg = log_map(fr.n_plus, fr.n_minus)
    Wp = trt.eval_field(W, tp, fr.midpoint)
    return float(fr.length * abs(fr.mu_plus @ (lg + fr.h * (Wp @ fr.mu_plus))))


def tgv_objective(mesh, W, weights):
    """Discrete TGV of the normal for a fixed field ``W``.

    ``alpha1 * sum_E (coupling) + alpha0 * (sum_T |T| |D W_T|_F +
    sum_E |E|/2 (|[W](X_1)| + |[W](X_2)|))``.
    """
    if W.mesh is not mesh:
        W = W.rebind(mesh)
    a1 = float(np.sum(alpha1_edge_terms(mesh, W)))
    if not np.any(W.coefficients):
        jac = 0.0
        jmp = 0.0
    else:
        g = mesh.geometry
        D = trt.jacobians(W)
        jac = float(np.sum(g.area * np.sqrt(np.einsum("fijk,fijk->f", D, D))))
        J = trt.jumps(W)
        fr_len = g.L[mesh.edge_tris[:, 0], mesh.edge_local[:, 0]]
        jmp = float(np.sum(0.5 * fr_len * np.linalg.norm(J, axis=2).sum(axis=1)))
    total = weights.alpha1 * a1 + weights.alpha0 * (jac + jmp)
    return TgvBreakdown(a1, jac, jmp, total)
