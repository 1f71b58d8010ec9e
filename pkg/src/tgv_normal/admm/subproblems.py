"""Closed-form and quadratic subproblems of one ADMM sweep."""

import logging

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .. import trt
from ..errors import CgNoConvergence
from ..sphere import parallel_transport, transport_tensor
from .lagrangian import (
    compute_frames,
    constraint_values,
    edge_angle,
    edge_h_over_length,
    edge_lengths,
    tangent_trace,
)

logger = logging.getLogger(__name__)


def shrink(x, kappa, axis=None):
    """Soft thresholding ``x/|x| * max(|x| - kappa, 0)``.

    ``axis=None`` treats ``x`` as one vector; otherwise norms are taken over
    ``axis`` (an int or tuple) and the rest are independent instances.
    """
    if kappa < 0:
        raise ValueError("kappa must be nonnegative")
    x = np.asarray(x, dtype=np.float64)
    nrm = np.sqrt(np.sum(x * x, axis=axis, keepdims=axis is not None))
    with np.errstate(invalid="ignore", divide="ignore"):
        factor = np.where(nrm > kappa, 1.0 - kappa / nrm, 0.0)
    return factor * x


def solve_d_subproblems(state, config):
    """Exact minimizers of the three split problems for fixed ``W`` and mesh.

    Returns ``(d0, D1, d2)``; in TV mode ``D1`` and ``d2`` are returned
    unchanged.
    """
    r0, D, J = constraint_values(state.mesh, state.W, config.tv_mode)
    d0 = shrink(r0 + state.lambda0 / config.rho0, config.edge_weight / config.rho0, axis=())
    if config.tv_mode:
        return d0, state.D1, state.d2
    D1 = shrink(D + state.Lambda1 / config.rho1, config.alpha0 / config.rho1, axis=(1, 2, 3))
    d2 = shrink(J + state.lambda2 / config.rho2, config.alpha0 / config.rho2, axis=2)
    return d0, D1, d2


# --------------------------------------------------------------------------
# W subproblem
# --------------------------------------------------------------------------

def linear_maps(mesh):
    """Sparse maps from the coefficient vector ``c`` (length 2E, interleaved
    ``c_{E,1}, c_{E,2}``) to the constrained quantities.

    Returns ``(B0, B1, B2)`` with ``r0 = theta + B0 c``, ``a = B1 c`` (the
    Jacobian vectors, 3 rows per triangle) and ``J = B2 c`` (6 rows per edge,
    endpoint-major).
    """
    fr = compute_frames(mesh.vertices, mesh.triangles)
    E, F = mesh.n_edges, mesh.n_triangles
    hl = edge_h_over_length(fr, mesh)
    B0 = sp.csr_matrix((hl, (np.arange(E), 2 * np.arange(E))), shape=(E, 2 * E))

    # a_T = sum_k c1_k mu_k + sigma_k c2_k eh_k
    sig = mesh.tri_edge_sign.astype(np.float64)
    te = mesh.tri_edges
    rows = np.broadcast_to(3 * np.arange(F)[:, None, None] + np.arange(3)[None, None, :], (F, 3, 3))
    cols1 = np.broadcast_to(2 * te[:, :, None], (F, 3, 3))
    vals1 = fr.mu
    vals2 = sig[:, :, None] * fr.eh
    B1 = sp.csr_matrix(
        (
            np.concatenate([vals1.ravel(), vals2.ravel()]),
            (np.concatenate([rows.ravel(), rows.ravel()]),
             np.concatenate([cols1.ravel(), (cols1 + 1).ravel()])),
        ),
        shape=(3 * F, 2 * E),
    )

    # half-edge values w[T, j, m] = (1/A2) sum_k v_k Q[T, j, m, k]
    Q = trt.halfedge_offsets(fr.P, fr.eh) / fr.A2[:, None, None, None]
    tp, tm = mesh.edge_tris.T
    kp, km = mesh.edge_local.T
    spn, smn, mp, mm = trt.edge_endpoint_maps(mesh)
    mu_p = fr.mu[tp, kp]
    mu_m = fr.mu[tm, km]
    Ptr = np.eye(3)[None] - (mu_m + mu_p)[:, :, None] * mu_m[:, None, :]  # (E, 3, 3)
    blocks_r, blocks_c, blocks_v = [], [], []
    for side, (T, k, s, m) in enumerate(((tp, kp, spn, mp), (tm, km, smn, mm))):
        q = Q[T[:, None], k[:, None], m]  # (E, i, k')
        bmu = fr.mu[T]  # (E, k', 3)
        beh = sig[T][:, :, None] * fr.eh[T]
        if side == 1:
            bmu = np.einsum("eab,ekb->eka", Ptr, bmu)
            beh = np.einsum("eab,ekb->eka", Ptr, beh)
            coef = s
        else:
            coef = -s
        v1 = coef[:, None, None, None] * q[..., None] * bmu[:, None]  # (E, i, k', 3)
        v2 = coef[:, None, None, None] * q[..., None] * beh[:, None]
        r = 6 * np.arange(E)[:, None, None, None] + 3 * np.arange(2)[None, :, None, None] \
            + np.arange(3)[None, None, None, :]
        r = np.broadcast_to(r, v1.shape)
        ce = np.broadcast_to(2 * te[T][:, None, :, None], v1.shape)
        blocks_r += [r.ravel(), r.ravel()]
        blocks_c += [ce.ravel(), (ce + 1).ravel()]
        blocks_v += [v1.ravel(), v2.ravel()]
    B2 = sp.csr_matrix(
        (np.concatenate(blocks_v), (np.concatenate(blocks_r), np.concatenate(blocks_c))),
        shape=(6 * E, 2 * E),
    )
    return B0, B1, B2, fr


def assemble_w_system(state, config):
    """Normal equations ``A c = b`` of the W subproblem (A sparse SPD)."""
    mesh = state.mesh
    B0, B1, B2, fr = linear_maps(mesh)
    lenE = edge_lengths(fr, mesh)
    theta = edge_angle(fr, mesh)[0]
    w0 = config.rho0 * lenE
    w1 = np.repeat(config.rho1 / fr.A2, 3)
    w2 = np.repeat(0.5 * config.rho2 * lenE, 6)
    A = (B0.T @ sp.diags(w0) @ B0 + B1.T @ sp.diags(w1) @ B1 + B2.T @ sp.diags(w2) @ B2).tocsr()
    b = B0.T @ (lenE * (config.rho0 * (state.d0 - theta) - state.lambda0))
    yL = tangent_trace(state.Lambda1, fr.n)
    yD = tangent_trace(state.D1, fr.n)
    b -= 0.5 * (B1.T @ (yL - config.rho1 * yD).ravel())
    half = np.repeat(0.5 * lenE, 6)
    b += B2.T @ (half * (config.rho2 * state.d2.ravel() - state.lambda2.ravel()))
    return A, b


def conjugate_gradient(A, b, x0, rtol, maxiter):
    """Jacobi-preconditioned CG; stops when ``|r| <= rtol * |r_0|``.

    Returns ``(x, iterations, final_residual_norm, initial_residual_norm)``.
    """
    r0 = np.linalg.norm(b - A @ x0)
    if r0 == 0.0:
        return x0.copy(), 0, 0.0, 0.0
    diag = A.diagonal()
    M = sp.diags(np.where(diag > 0, 1.0 / diag, 1.0))
    count = [0]

    def cb(_):
        count[0] += 1

    x, info = spla.cg(A, b, x0=x0, rtol=0.0, atol=rtol * r0, maxiter=maxiter, M=M, callback=cb)
    res = np.linalg.norm(b - A @ x)
    if info != 0 and res > rtol * r0:
        raise CgNoConvergence(
            f"CG stopped after {count[0]} iterations with relative residual {res / r0:.3e}"
        )
    return x, count[0], res, r0


def solve_w_subproblem(state, config):
    """Minimize the augmented Lagrangian over the coefficients of ``W``.

    Warm-started at the current coefficients.  Returns
    ``(coefficients, info)`` with CG statistics in ``info``.
    """
    E = state.mesh.n_edges
    if config.tv_mode:
        return np.zeros((E, 2)), {"iterations": 0, "residual": 0.0, "initial_residual": 0.0}
    A, b = assemble_w_system(state, config)
    maxiter = config.cg_max_iters or 10 * 2 * E
    c, it, res, r0 = conjugate_gradient(A, b, state.W.coefficients.ravel(), config.cg_tol, maxiter)
    return c.reshape(E, 2), {"iterations": it, "residual": res, "initial_residual": r0}


# --------------------------------------------------------------------------
# transport and multipliers
# --------------------------------------------------------------------------

def transport_state(state, old_mesh, new_mesh):
    """Move ``D1, Lambda1`` (triangle normals) and ``d2, lambda2`` (``n+``)
    from the tangent spaces of ``old_mesh`` to those of ``new_mesh``."""
    n_old = old_mesh.geometry.n
    n_new = new_mesh.geometry.n
    tp = new_mesh.edge_tris[:, 0]
    p_old = n_old[tp][:, None, :]
    p_new = n_new[tp][:, None, :]
    return state.copy(
        mesh=new_mesh,
        W=state.W.rebind(new_mesh),
        D1=transport_tensor(state.D1, n_old, n_new),
        Lambda1=transport_tensor(state.Lambda1, n_old, n_new),
        d2=parallel_transport(p_old, p_new, state.d2),
        lambda2=parallel_transport(p_old, p_new, state.lambda2),
    )


def update_multipliers(state, config):
    """``lambda += rho * (constraint - split)`` on the current mesh."""
    r0, D, J = constraint_values(state.mesh, state.W, config.tv_mode)
    lam0 = state.lambda0 + config.rho0 * (r0 - state.d0)
    if config.tv_mode:
        return lam0, state.Lambda1, state.lambda2
    Lam1 = state.Lambda1 + config.rho1 * (D - state.D1)
    lam2 = state.lambda2 + config.rho2 * (J - state.d2)
    return lam0, Lam1, lam2
