"""Augmented Lagrangian of the denoising problem and its vertex gradient.

For the mesh update the coefficients of ``W``, the scalars ``d0, lambda0``
and the tangent-space variables ``D1, Lambda1, d2, lambda2`` are frozen.
The tangent-space variables stay attached to the normals they were created
at (``ref_tri_normals`` / ``ref_plus_normals``) and are parallel transported
to the normals of every trial mesh.

Because transport is an isometry between tangent planes, the transported
variables enter only through two vectors per element::

    triangle:  M_T z_T,   z_T = (Lambda1 - rho1 D1) contracted over its last two axes
    edge:      M_E g_i,   g_i = lambda2_i - rho2 d2_i

and every remaining quantity (norms and mutual inner products of the frozen
variables) is a constant per element that is multiplied by ``|T|`` or
``|E|/2``.  :func:`explicit_lagrangian` evaluates the same function with
explicit tensor transport and serves as a cross-check.
"""

from dataclasses import dataclass

import numpy as np

from .. import _kernels, trt
from . import _fused
from ..errors import AntipodalPoints, DegenerateTriangle
from ..mesh import DEGENERACY_RATIO
from ..sphere import ANTIPODAL_TOL, transport_matrix, transport_tensor, parallel_transport

_NEXT = np.array([1, 2, 0])
_PREV = np.array([2, 0, 1])


def _dot(a, b):
    return np.einsum("...i,...i->...", a, b)


# --------------------------------------------------------------------------
# geometry shared by the forward pass and the subproblems
# --------------------------------------------------------------------------

@dataclass(eq=False)
class Frames:
    P: np.ndarray
    A2: np.ndarray
    n: np.ndarray
    L: np.ndarray
    eh: np.ndarray
    mu: np.ndarray
    cot: np.ndarray


def compute_frames(x, triangles):
    P = np.ascontiguousarray(x[triangles])
    return Frames(P, *_kernels.triangle_frames(P))


def edge_angle(fr, mesh):
    """Signed bending angle ``atan2(<n-, mu+>, <n-, n+>)`` plus the pieces
    needed for its derivative."""
    tp, tm = mesh.edge_tris.T
    kp = mesh.edge_local[:, 0]
    s = _dot(fr.n[tm], fr.mu[tp, kp])
    c = _dot(fr.n[tm], fr.n[tp])
    return np.arctan2(s, c), s, c


def edge_h_over_length(fr, mesh):
    """``h_E / |E| = (cot a+ + cot a-) / 2`` with ``a+-`` the angles opposite E."""
    tp, tm = mesh.edge_tris.T
    kp, km = mesh.edge_local.T
    return 0.5 * (fr.cot[tp, kp] + fr.cot[tm, km])


def edge_lengths(fr, mesh):
    return fr.L[mesh.edge_tris[:, 0], mesh.edge_local[:, 0]]


def triangle_vectors_from(fr, mesh, coefficients):
    ce = coefficients[mesh.tri_edges]
    c1 = ce[..., 0]
    c2 = mesh.tri_edge_sign * ce[..., 1]
    return c1[..., None] * fr.mu + c2[..., None] * fr.eh, c1, c2


def gather_jumps(fr, mesh, w):
    """Jumps from half-edge values ``w`` (F, 3, 2, 3); see :func:`trt.assemble_jumps`."""
    tp, tm = mesh.edge_tris.T
    kp, km = mesh.edge_local.T
    sp, sm, mp, mm = trt.edge_endpoint_maps(mesh)
    wp = sp[:, None, None] * w[tp[:, None], kp[:, None], mp]
    wm = sm[:, None, None] * w[tm[:, None], km[:, None], mm]
    mu_p = fr.mu[tp, kp]
    mu_m = fr.mu[tm, km]
    alpha = np.einsum("eij,ej->ei", wm, mu_m)
    J = wm - alpha[..., None] * (mu_m + mu_p)[:, None, :] - wp
    return J, wp, wm, mu_p, mu_m, alpha


def tangent_trace(X, n):
    """``y_i = sum_jk X_ijk (I - n n^T)_jk`` for (F, 3, 3, 3) tensors."""
    Pn = np.eye(3) - n[:, :, None] * n[:, None, :]
    return np.einsum("fijk,fjk->fi", X, Pn)


# --------------------------------------------------------------------------
# frozen data of a mesh update
# --------------------------------------------------------------------------

@dataclass(eq=False)
class MeshProblem:
    """Everything the augmented Lagrangian needs besides vertex positions."""

    mesh: object
    data: np.ndarray
    tau: float
    edge_weight: float
    alpha0: float
    rho0: float
    rho1: float
    rho2: float
    tv_mode: bool
    coefficients: np.ndarray
    d0: np.ndarray
    lambda0: np.ndarray
    ref_tri_normals: np.ndarray
    ref_plus_normals: np.ndarray
    ref_theta: np.ndarray  # bending angles where the update started
    z_tri: np.ndarray  # (F, 3)
    k_tri: np.ndarray  # (F,)
    g_edge: np.ndarray  # (E, 2, 3)
    k_edge: np.ndarray  # (E, 2)
    # untransported originals, kept for the explicit cross-check
    D1: np.ndarray
    Lambda1: np.ndarray
    d2: np.ndarray
    lambda2: np.ndarray

    @classmethod
    def from_state(cls, state, config, data):
        mesh = state.mesh
        g = mesh.geometry
        n_plus = g.n[mesh.edge_tris[:, 0]]
        a0, r1, r2 = config.alpha0, config.rho1, config.rho2
        if config.tv_mode:
            F, E = mesh.n_triangles, mesh.n_edges
            z_tri = np.zeros((F, 3))
            k_tri = np.zeros(F)
            g_edge = np.zeros((E, 2, 3))
            k_edge = np.zeros((E, 2))
        else:
            D1, L1, d2, l2 = state.D1, state.Lambda1, state.d2, state.lambda2
            z_tri = tangent_trace(L1 - r1 * D1, g.n)
            nD1 = np.einsum("fijk,fijk->f", D1, D1)
            k_tri = a0 * np.sqrt(nD1) - np.einsum("fijk,fijk->f", L1, D1) + 0.5 * r1 * nD1
            g_edge = l2 - r2 * d2
            nd2 = np.einsum("eij,eij->ei", d2, d2)
            k_edge = a0 * np.sqrt(nd2) - np.einsum("eij,eij->ei", l2, d2) + 0.5 * r2 * nd2
        return cls(
            mesh=mesh,
            data=np.asarray(data, dtype=np.float64),
            tau=config.tau,
            edge_weight=config.edge_weight,
            alpha0=a0,
            rho0=config.rho0,
            rho1=r1,
            rho2=r2,
            tv_mode=config.tv_mode,
            coefficients=np.zeros((mesh.n_edges, 2)) if config.tv_mode else state.W.coefficients,
            d0=state.d0,
            lambda0=state.lambda0,
            ref_tri_normals=g.n.copy(),
            ref_plus_normals=n_plus.copy(),
            ref_theta=edge_angle(compute_frames(mesh.vertices, mesh.triangles), mesh)[0],
            z_tri=z_tri,
            k_tri=k_tri,
            g_edge=g_edge,
            k_edge=k_edge,
            D1=state.D1,
            Lambda1=state.Lambda1,
            d2=state.d2,
            lambda2=state.lambda2,
        )


class InvalidTrialMesh(Exception):
    """Trial vertices leave the domain (degenerate, antipodal or folded)."""


# Largest change of a bending angle accepted within one mesh update.  Steps
# that jump across the antipodal set wrap atan2 and are caught here.
MAX_TURN = 0.5 * np.pi


def _validate(fr, problem):
    mesh = problem.mesh
    scale = np.mean(fr.L**2)
    if not np.all(0.5 * fr.A2 >= DEGENERACY_RATIO * scale):
        raise InvalidTrialMesh("degenerate triangle")
    tp, tm = mesh.edge_tris.T
    lo = -1.0 + ANTIPODAL_TOL
    if np.any(_dot(fr.n[tp], fr.n[tm]) < lo):
        raise InvalidTrialMesh("antipodal adjacent normals")
    if np.any(np.abs(edge_angle(fr, mesh)[0] - problem.ref_theta) > MAX_TURN):
        raise InvalidTrialMesh("fold")
    if not problem.tv_mode:
        if np.any(_dot(fr.n, problem.ref_tri_normals) < lo) or np.any(
            _dot(fr.n[tp], problem.ref_plus_normals) < lo
        ):
            raise InvalidTrialMesh("antipodal transport")


# --------------------------------------------------------------------------
# forward / backward
# --------------------------------------------------------------------------

def lagrangian(x, problem, need_grad=True, use_numba=None):
    """Value (and vertex gradient) of the augmented Lagrangian at ``x``.

    Raises :class:`InvalidTrialMesh` when ``x`` is outside the domain.
    ``use_numba`` overrides the process-wide kernel choice.
    """
    if use_numba is None:
        use_numba = _kernels.USE_NUMBA
    if use_numba and _fused.fused_lagrangian is not None:
        return _lagrangian_fused(x, problem, need_grad)
    return _lagrangian_numpy(x, problem, need_grad)


def _lagrangian_fused(x, problem, need_grad):
    mesh = problem.mesh
    status, val, grad = _fused.fused_lagrangian(
        np.ascontiguousarray(x, dtype=np.float64), problem.data, mesh.triangles,
        mesh.edge_tris, mesh.edge_local, mesh.tri_edge_sign.astype(np.float64),
        mesh.tri_edges, mesh.plus_tangent_sign.astype(np.float64),
        np.ascontiguousarray(problem.coefficients, dtype=np.float64),
        problem.d0, problem.lambda0, problem.ref_tri_normals, problem.ref_plus_normals,
        problem.z_tri, problem.k_tri, np.ascontiguousarray(problem.g_edge), problem.k_edge,
        problem.ref_theta, MAX_TURN,
        float(problem.tau), float(problem.edge_weight), float(problem.rho0),
        float(problem.rho1), float(problem.rho2), bool(problem.tv_mode), bool(need_grad),
        DEGENERACY_RATIO, ANTIPODAL_TOL,
    )
    if status == _fused.DEGENERATE:
        raise InvalidTrialMesh("degenerate triangle")
    if status == _fused.ANTIPODAL:
        raise InvalidTrialMesh("antipodal normals")
    if status == _fused.FOLD:
        raise InvalidTrialMesh("fold")
    if not need_grad:
        return float(val)
    return float(val), grad


def _lagrangian_numpy(x, problem, need_grad=True):
    mesh = problem.mesh
    tri = mesh.triangles
    tp, tm = mesh.edge_tris.T
    kp, km = mesh.edge_local.T
    fr = compute_frames(x, tri)
    _validate(fr, problem)
    A2, n, L, eh, mu, cot, P = fr.A2, fr.n, fr.L, fr.eh, fr.mu, fr.cot, fr.P
    c = problem.coefficients
    c1 = c[:, 0]

    diff = x - problem.data
    val = 0.5 * np.sum(diff * diff) + problem.tau * np.sum(2.0 / A2)

    lenE = L[tp, kp]
    theta, s_, c_ = edge_angle(fr, mesh)
    hl = 0.5 * (cot[tp, kp] + cot[tm, km])
    R0 = theta + c1 * hl - problem.d0
    edge_bracket = (
        problem.edge_weight * np.abs(problem.d0)
        + problem.lambda0 * R0
        + 0.5 * problem.rho0 * R0 * R0
    )
    val += np.sum(lenE * edge_bracket)

    if not problem.tv_mode:
        v, tc1, tc2 = triangle_vectors_from(fr, mesh, c)
        a = v.sum(axis=1)
        nref = problem.ref_tri_normals
        zT = problem.z_tri
        uT = n + nref
        rT = 1.0 + _dot(n, nref)
        qT = _dot(n, zT)
        Mz = zT - uT * (qT / rT)[:, None]
        aa = _dot(a, a)
        val += np.sum(0.5 * _dot(a, Mz) + 0.5 * problem.rho1 * aa / A2 + 0.5 * A2 * problem.k_tri)

        Q = trt.halfedge_offsets(P, eh)
        w = trt.halfedge_values(v, Q, A2)
        J, wp, wm, mu_p, mu_m, alpha = gather_jumps(fr, mesh, w)
        nplus = n[tp]
        uE = nplus + problem.ref_plus_normals
        rE = 1.0 + _dot(nplus, problem.ref_plus_normals)
        y = problem.g_edge
        qE = np.einsum("ei,eji->ej", nplus, y)
        gE = y - uE[:, None, :] * (qE / rE[:, None])[..., None]
        JJ = np.einsum("eij,eij->ei", J, J)
        jump_bracket = np.einsum("eij,eij->ei", gE, J) + 0.5 * problem.rho2 * JJ + problem.k_edge
        val += np.sum(0.5 * lenE * jump_bracket.sum(axis=1))

    if not need_grad:
        return float(val)

    # ---- backward -------------------------------------------------------
    g_A2 = -2.0 * problem.tau / A2**2
    g_n = np.zeros_like(n)
    g_L = np.zeros_like(L)
    g_eh = np.zeros_like(eh)
    g_mu = np.zeros_like(mu)
    g_cot = np.zeros_like(cot)
    g_P = np.zeros_like(P)

    g_len = edge_bracket.copy()
    g_r0 = lenE * (problem.lambda0 + problem.rho0 * R0)
    den = s_ * s_ + c_ * c_
    g_s = g_r0 * c_ / den
    g_c = -g_r0 * s_ / den
    n_p, n_m, mu_pe = n[tp], n[tm], mu[tp, kp]
    # per half-edge accumulators, summed over the local edge index later
    hn = np.zeros((len(tri), 3, 3))
    hn[tm, km] += g_s[:, None] * mu_pe + g_c[:, None] * n_p
    hn[tp, kp] += g_c[:, None] * n_m
    g_mu[tp, kp] += g_s[:, None] * n_m
    g_cot[tp, kp] += 0.5 * g_r0 * c1
    g_cot[tm, km] += 0.5 * g_r0 * c1

    if not problem.tv_mode:
        g_a = 0.5 * Mz + (problem.rho1 / A2)[:, None] * a
        g_A2 += -0.5 * problem.rho1 * aa / A2**2 + 0.5 * problem.k_tri
        g_out = 0.5 * a
        go_u = _dot(g_out, uT)
        g_n += -g_out * (qT / rT)[:, None] - zT * (go_u / rT)[:, None] + nref * (go_u * qT / rT**2)[:, None]
        g_v = np.repeat(g_a[:, None, :], 3, axis=1)

        g_J = (0.5 * lenE)[:, None, None] * (gE + problem.rho2 * J)
        g_gE = (0.5 * lenE)[:, None, None] * J
        g_len += 0.5 * jump_bracket.sum(axis=1)
        # transport of g_edge to n+
        go_u = np.einsum("eij,ej->ei", g_gE, uE)
        gn_plus = (
            -np.einsum("eij,ei->ej", g_gE, qE / rE[:, None])
            - np.einsum("ei,eij->ej", go_u / rE[:, None], y)
            + problem.ref_plus_normals * (np.sum(go_u * qE, axis=1) / rE**2)[:, None]
        )
        hn[tp, kp] += gn_plus
        # co-normal transport inside the jump
        S = np.einsum("eij,ej->ei", g_J, mu_m + mu_p)
        g_wp = -g_J
        g_wm = g_J - S[..., None] * mu_m[:, None, :]
        g_mu_m = -np.einsum("ei,eij->ej", alpha, g_J) - np.einsum("ei,eij->ej", S, wm)
        g_mu_p = -np.einsum("ei,eij->ej", alpha, g_J)
        g_mu[tm, km] += g_mu_m
        g_mu[tp, kp] += g_mu_p
        sp, sm, mp, mm = trt.edge_endpoint_maps(mesh)
        g_w = np.zeros_like(w)
        g_w[tp[:, None], kp[:, None], mp] = sp[:, None, None] * g_wp
        g_w[tm[:, None], km[:, None], mm] = sm[:, None, None] * g_wm
        # w = einsum(v, Q) / A2
        g_v += np.einsum("fjmi,fjmk->fki", g_w, Q) / A2[:, None, None]
        g_Q = np.einsum("fjmi,fki->fjmk", g_w, v) / A2[:, None, None, None]
        g_A2 -= np.einsum("fjmi,fjmi->f", g_w, w) / A2
        # Q[f, j, m, k] = (ends[f, j, m] - P[f, k]) . eh[f, j]
        ends = np.stack([P[:, _NEXT], P[:, _PREV]], axis=2)
        qsum = g_Q.sum(axis=3)  # (F, j, m)
        g_ends = qsum[..., None] * eh[:, :, None, :]
        g_P[:, _NEXT] += g_ends[:, :, 0]
        g_P[:, _PREV] += g_ends[:, :, 1]
        g_P -= np.einsum("fjmk,fji->fki", g_Q, eh)
        g_eh += np.einsum("fjm,fjmi->fji", qsum, ends) - np.einsum("fjmk,fki->fji", g_Q, P)
        # v_k = c1 mu_k + sigma c2 eh_k
        g_mu += tc1[..., None] * g_v
        g_eh += tc2[..., None] * g_v

    g_n += hn.sum(axis=1)
    g_L[tp, kp] += g_len

    return float(val), _frames_backward(fr, tri, len(x), g_A2, g_n, g_L, g_eh, g_mu, g_cot, g_P) + diff


def _frames_backward(fr, tri, n_vertices, g_A2, g_n, g_L, g_eh, g_mu, g_cot, g_P):
    A2, n, L, eh, mu, cot, P = fr.A2, fr.n, fr.L, fr.eh, fr.mu, fr.cot, fr.P
    g_n = g_n.copy()
    g_A2 = g_A2.copy()
    g_P = g_P.copy()
    # mu = eh x n
    g_eh = g_eh + np.cross(n[:, None, :], g_mu)
    g_n += np.cross(g_mu, eh).sum(axis=1)
    # cot_k = (P_{k+1} - P_k) . (P_{k+2} - P_k) / A2
    u = P[:, _NEXT] - P
    w = P[:, _PREV] - P
    gc = (g_cot / A2[:, None])[..., None]
    g_P[:, _NEXT] += gc * w
    g_P[:, _PREV] += gc * u
    g_P -= gc * (u + w)
    g_A2 -= np.sum(g_cot * cot, axis=1) / A2
    # eh = e / L, e_k = P_{k+2} - P_{k+1}
    g_e = (g_eh - eh * _dot(eh, g_eh)[..., None]) / L[..., None] + eh * g_L[..., None]
    g_P[:, _PREV] += g_e
    g_P[:, _NEXT] -= g_e
    # n = N / A2
    g_N = (g_n - n * _dot(n, g_n)[:, None]) / A2[:, None] + n * g_A2[:, None]
    U = P[:, 1] - P[:, 0]
    V = P[:, 2] - P[:, 0]
    g_U = np.cross(V, g_N)
    g_V = np.cross(g_N, U)
    g_P[:, 1] += g_U
    g_P[:, 2] += g_V
    g_P[:, 0] -= g_U + g_V
    return _kernels.scatter_corners(tri, np.ascontiguousarray(g_P), n_vertices)


# --------------------------------------------------------------------------
# explicit evaluation (reference)
# --------------------------------------------------------------------------

def explicit_lagrangian(x, problem):
    """Same value as :func:`lagrangian`, with every frozen tangent variable
    transported explicitly (axis-wise for tensors) to the trial normals."""
    mesh = problem.mesh.with_vertices(x)
    fr = compute_frames(x, mesh.triangles)
    _validate(fr, problem)
    lenE = edge_lengths(fr, mesh)
    theta = edge_angle(fr, mesh)[0]
    r0 = theta + problem.coefficients[:, 0] * edge_h_over_length(fr, mesh)
    R0 = r0 - problem.d0
    diff = x - problem.data
    val = 0.5 * np.sum(diff * diff) + problem.tau * np.sum(2.0 / fr.A2)
    val += np.sum(lenE * (problem.edge_weight * np.abs(problem.d0) + problem.lambda0 * R0
                          + 0.5 * problem.rho0 * R0**2))
    if problem.tv_mode:
        return float(val)
    W = trt.TrtField(mesh, problem.coefficients)
    D = trt.jacobians(W)
    J = trt.jumps(W)
    D1 = transport_tensor(problem.D1, problem.ref_tri_normals, fr.n)
    L1 = transport_tensor(problem.Lambda1, problem.ref_tri_normals, fr.n)
    nplus = fr.n[mesh.edge_tris[:, 0]]
    d2 = parallel_transport(problem.ref_plus_normals[:, None], nplus[:, None], problem.d2)
    l2 = parallel_transport(problem.ref_plus_normals[:, None], nplus[:, None], problem.lambda2)
    area = 0.5 * fr.A2
    a0, r1, r2 = problem.alpha0, problem.rho1, problem.rho2
    RD = D - D1
    val += np.sum(area * (a0 * np.sqrt(np.einsum("fijk,fijk->f", D1, D1))
                          + np.einsum("fijk,fijk->f", L1, RD)
                          + 0.5 * r1 * np.einsum("fijk,fijk->f", RD, RD)))
    RJ = J - d2
    val += np.sum(0.5 * lenE[:, None] * (a0 * np.linalg.norm(d2, axis=2)
                                        + np.einsum("eij,eij->ei", l2, RJ)
                                        + 0.5 * r2 * np.einsum("eij,eij->ei", RJ, RJ)))
    return float(val)


# --------------------------------------------------------------------------
# state-level evaluation
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LagrangianBreakdown:
    fidelity: float
    barrier: float
    regularizer: float
    multiplier: float
    penalty: float
    total: float

    def as_dict(self):
        return dict(self.__dict__)


def constraint_values(mesh, W, tv_mode=False):
    """``(r0, D, J)``: the quantities constrained to equal ``(d0, D1, d2)``."""
    fr = compute_frames(mesh.vertices, mesh.triangles)
    r0 = edge_angle(fr, mesh)[0]
    if tv_mode:
        return r0, None, None
    r0 = r0 + W.coefficients[:, 0] * edge_h_over_length(fr, mesh)
    W = W if W.mesh is mesh else W.rebind(mesh)
    return r0, trt.jacobians(W), trt.jumps(W)


def augmented_lagrangian(state, config, reference_vertices):
    """Augmented Lagrangian at the state's own mesh, split into its parts."""
    mesh = state.mesh
    g = mesh.geometry
    for c in (np.einsum("ei,ei->e", g.n[mesh.edge_tris[:, 0]], g.n[mesh.edge_tris[:, 1]]),):
        if np.any(c < -1.0 + ANTIPODAL_TOL):
            raise AntipodalPoints("adjacent normals are antipodal")
    if np.any(g.A2 <= 0):
        raise DegenerateTriangle("zero-area triangle")
    ref = np.asarray(reference_vertices, dtype=np.float64)
    diff = mesh.vertices - ref
    fid = 0.5 * float(np.sum(diff * diff))
    bar = float(config.tau * np.sum(1.0 / g.area))
    lenE = g.L[mesh.edge_tris[:, 0], mesh.edge_local[:, 0]]
    r0, D, J = constraint_values(mesh, state.W, config.tv_mode)
    R0 = r0 - state.d0
    reg = config.edge_weight * float(np.sum(lenE * np.abs(state.d0)))
    mult = float(np.sum(lenE * state.lambda0 * R0))
    pen = 0.5 * config.rho0 * float(np.sum(lenE * R0**2))
    if not config.tv_mode:
        RD = D - state.D1
        RJ = J - state.d2
        reg += config.alpha0 * float(
            np.sum(g.area * np.sqrt(np.einsum("fijk,fijk->f", state.D1, state.D1)))
            + np.sum(0.5 * lenE[:, None] * np.linalg.norm(state.d2, axis=2))
        )
        mult += float(np.sum(g.area * np.einsum("fijk,fijk->f", state.Lambda1, RD)))
        mult += float(np.sum(0.5 * lenE[:, None] * np.einsum("eij,eij->ei", state.lambda2, RJ)))
        pen += 0.5 * config.rho1 * float(np.sum(g.area * np.einsum("fijk,fijk->f", RD, RD)))
        pen += 0.5 * config.rho2 * float(
            np.sum(0.5 * lenE[:, None] * np.einsum("eij,eij->ei", RJ, RJ))
        )
    total = fid + bar + reg + mult + pen
    return LagrangianBreakdown(fid, bar, reg, mult, pen, total)


def primal_residuals(state, config):
    """Weighted RMS norms of ``r0 - d0``, ``D - D1`` and ``J - d2``."""
    mesh = state.mesh
    g = mesh.geometry
    lenE = g.L[mesh.edge_tris[:, 0], mesh.edge_local[:, 0]]
    r0, D, J = constraint_values(mesh, state.W, config.tv_mode)
    res0 = float(np.sqrt(np.sum(lenE * (r0 - state.d0) ** 2) / np.sum(lenE)))
    if config.tv_mode:
        return res0, 0.0, 0.0
    RD = D - state.D1
    RJ = J - state.d2
    res1 = float(np.sqrt(np.sum(g.area * np.einsum("fijk,fijk->f", RD, RD)) / np.sum(g.area)))
    res2 = float(np.sqrt(np.sum(lenE[:, None] * np.einsum("eij,eij->ei", RJ, RJ))
                         / (2.0 * np.sum(lenE))))
    return res0, res1, res2


__all__ = [
    "MeshProblem",
    "InvalidTrialMesh",
    "lagrangian",
    "explicit_lagrangian",
    "augmented_lagrangian",
    "LagrangianBreakdown",
    "constraint_values",
    "primal_residuals",
    "compute_frames",
    "transport_matrix",
]
