"""Tangential Raviart-Thomas space on a closed triangle mesh.

Every edge ``E`` carries two basis functions.  On the adjacent triangle
``T_{E+-}`` with opposite vertex ``p_{E+-}``::

    Phi_{E,1}(x) =  mu_{E+-} (x - p_{E+-})^T / (2|T_{E+-}|)
    Phi_{E,2}(x) = +- t_E    (x - p_{E+-})^T / (2|T_{E+-}|)

and both vanish elsewhere.  Inside a triangle ``T`` with local edges ``k``
(opposite corner ``P_k``) a field therefore reads

    W|_T(x) = (1/A2) sum_k v_k (x - P_k)^T,
    v_k = c_{k,1} mu_k + sigma_k c_{k,2} eh_k,

where ``A2 = 2|T|`` and ``sigma_k = tri_edge_sign[T, k]`` converts the local
edge direction ``eh_k`` into ``+-t_E``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import PointOutsideTriangle, SizeMismatch
from .mesh import edge_frame
from .sphere import parallel_transport

INSIDE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class TrtField:
    """Coefficients ``(c_{E,1}, c_{E,2})`` per edge, bound to ``mesh``.

    Rebinding to a deformed mesh (same connectivity) keeps the coefficients
    and uses the deformed basis.
    """

    mesh: object
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=np.float64)
        if c.shape != (self.mesh.n_edges, 2):
            raise SizeMismatch(
                f"expected coefficients of shape ({self.mesh.n_edges}, 2), got {c.shape}"
            )
        object.__setattr__(self, "coefficients", c)

    @classmethod
    def zeros(cls, mesh):
        return cls(mesh, np.zeros((mesh.n_edges, 2)))

    @classmethod
    def basis(cls, mesh, edge_id, which):
        """The single basis function ``Phi_{E,which}`` as a field."""
        if which not in (1, 2):
            raise ValueError("which must be 1 or 2")
        c = np.zeros((mesh.n_edges, 2))
        c[edge_id, which - 1] = 1.0
        return cls(mesh, c)

    def rebind(self, mesh):
        return TrtField(mesh, self.coefficients)


# --- per-triangle representation ------------------------------------------

def triangle_vectors(mesh, coefficients):
    """``v[T, k] = c_{k,1} mu_k + sigma_k c_{k,2} eh_k`` with shape (F, 3, 3)."""
    g = mesh.geometry
    ce = coefficients[mesh.tri_edges]
    c2 = mesh.tri_edge_sign * ce[..., 1]
    return ce[..., 0, None] * g.mu + c2[..., None] * g.eh


def jacobian_vectors(mesh, coefficients):
    """``a_T = sum_k v[T, k]``; the Jacobian on ``T`` is ``a_T (x) (I - n n^T) / A2``."""
    return triangle_vectors(mesh, coefficients).sum(axis=1)


def _check_inside(mesh, tri, x):
    P = mesh.vertices[mesh.triangles[tri]]
    u = P[1] - P[0]
    w = P[2] - P[0]
    N = np.cross(u, w)
    A2 = np.linalg.norm(N)
    r = x - P[0]
    scale = max(np.max(np.abs(P - P.mean(axis=0))), 1e-300)
    if abs(r @ N) / A2 > INSIDE_TOL * scale:
        raise PointOutsideTriangle(f"point is off the plane of triangle {tri}")
    b1 = np.cross(r, w) @ N / A2**2
    b2 = np.cross(u, r) @ N / A2**2
    if min(b1, b2, 1.0 - b1 - b2) < -INSIDE_TOL:
        raise PointOutsideTriangle(f"point lies outside triangle {tri}")


def eval_basis(mesh, edge_id, which, x, triangle_id):
    """Value of ``Phi_{E,which}`` at ``x`` inside ``triangle_id`` (3x3)."""
    x = np.asarray(x, dtype=np.float64)
    _check_inside(mesh, triangle_id, x)
    return _eval(TrtField.basis(mesh, edge_id, which), triangle_id, x)


def eval_field(W, triangle_id, x):
    """Value of ``W`` at ``x`` inside ``triangle_id`` (3x3)."""
    x = np.asarray(x, dtype=np.float64)
    _check_inside(W.mesh, triangle_id, x)
    return _eval(W, triangle_id, x)


def _eval(W, tri, x):
    mesh = W.mesh
    g = mesh.geometry
    c = W.coefficients[mesh.tri_edges[tri]]
    v = c[:, 0, None] * g.mu[tri] + (mesh.tri_edge_sign[tri] * c[:, 1])[:, None] * g.eh[tri]
    P = mesh.vertices[mesh.triangles[tri]]
    return np.einsum("ki,kj->ij", v, x - P) / g.A2[tri]


def dof_values(W, edge_id):
    """``(int_E mu+^T W mu+ dS, int_E t_E^T W mu+ dS)``.

    Both integrands are constant along ``E``: midpoint value times ``|E|``.
    """
    fr = edge_frame(W.mesh, edge_id)
    tp = W.mesh.edge_tris[edge_id, 0]
    Wm = _eval(W, tp, fr.midpoint)
    Wmu = Wm @ fr.mu_plus
    return fr.length * float(fr.mu_plus @ Wmu), fr.length * float(fr.t @ Wmu)


def jacobian(W, triangle_id):
    """Constant order-3 tensor ``D[i, j, l] = dW_ij / dx_l`` on the triangle,
    restricted to in-plane directions."""
    g = W.mesh.geometry
    c = W.coefficients[W.mesh.tri_edges[triangle_id]]
    v = (
        c[:, 0, None] * g.mu[triangle_id]
        + (W.mesh.tri_edge_sign[triangle_id] * c[:, 1])[:, None] * g.eh[triangle_id]
    )
    a = v.sum(axis=0)
    n = g.n[triangle_id]
    Pn = np.eye(3) - np.outer(n, n)
    return np.einsum("i,jl->ijl", a, Pn) / g.A2[triangle_id]


def jacobians(W):
    """All triangle Jacobians, shape (F, 3, 3, 3)."""
    g = W.mesh.geometry
    a = jacobian_vectors(W.mesh, W.coefficients)
    Pn = np.eye(3) - g.n[:, :, None] * g.n[:, None, :]
    return a[:, :, None, None] * Pn[:, None, :, :] / g.A2[:, None, None, None]


def jump(W, edge_id):
    """Intrinsic jump ``P_{n- -> n+}(W|_{E-} t_E) - W|_{E+} t_E`` at the two
    endpoints ``X_{E,1}, X_{E,2}``; shape (2, 3)."""
    mesh = W.mesh
    fr = edge_frame(mesh, edge_id)
    tp, tm = mesh.edge_tris[edge_id]
    out = np.empty((2, 3))
    for i, X in enumerate((fr.x1, fr.x2)):
        wp = _eval(W, tp, X) @ fr.t
        wm = _eval(W, tm, X) @ fr.t
        out[i] = parallel_transport(fr.n_minus, fr.n_plus, wm) - wp
    return out


# --- batched jump on half-edges -----------------------------------------------

_NEXT = np.array([1, 2, 0])
_PREV = np.array([2, 0, 1])


def halfedge_offsets(P, eh):
    """``Q[T, j, m, k] = (P_{j+1+m} - P_k) . eh_j``: offsets of the two
    endpoints of local edge ``j`` from each corner, along that edge."""
    ends = np.stack([P[:, _NEXT], P[:, _PREV]], axis=2)  # (F, j, m, 3)
    diff = ends[:, :, :, None, :] - P[:, None, None, :, :]  # (F, j, m, k, 3)
    return np.einsum("fjmki,fji->fjmk", diff, eh)


def halfedge_values(v, Q, A2):
    """``w[T, j, m] = W|_T(P_{j+1+m}) eh_j``, shape (F, 3, 2, 3)."""
    return np.einsum("fki,fjmk->fjmi", v, Q) / A2[:, None, None, None]


def edge_endpoint_maps(mesh):
    """Index maps gathering half-edge values into edge endpoint order.

    Returns ``(sp, sm, mp, mm)``: signs and endpoint slots such that
    ``W|_{E+}(X_i) t_E = sp * w[T+, k+, mp[:, i]]`` and likewise for ``E-``.
    """
    s = mesh.plus_tangent_sign.astype(np.float64)
    i = np.arange(2)[None, :]
    mp = np.where(s[:, None] > 0, i, 1 - i)
    mm = np.where(s[:, None] < 0, i, 1 - i)
    return s, -s, mp, mm


def jumps(W):
    """Intrinsic jumps on all edges at both endpoints, shape (E, 2, 3)."""
    mesh = W.mesh
    g = mesh.geometry
    P = mesh.vertices[mesh.triangles]
    w = halfedge_values(triangle_vectors(mesh, W.coefficients), halfedge_offsets(P, g.eh), g.A2)
    return assemble_jumps(mesh, w)[0]


def assemble_jumps(mesh, w):
    """Combine half-edge values into jumps using the co-normal transport form.

    Returns ``(J, wp, wm, mu_p, mu_m)`` with ``wp, wm`` the (E, 2, 3) one-sided
    values ``W|_{E+-}(X_i) t_E``.
    """
    g = mesh.geometry
    tp, tm = mesh.edge_tris.T
    kp, km = mesh.edge_local.T
    sp, sm, mp, mm = edge_endpoint_maps(mesh)
    wp = sp[:, None, None] * w[tp[:, None], kp[:, None], mp]
    wm = sm[:, None, None] * w[tm[:, None], km[:, None], mm]
    mu_p = g.mu[tp, kp]
    mu_m = g.mu[tm, km]
    alpha = np.einsum("eij,ej->ei", wm, mu_m)
    J = wm - alpha[..., None] * (mu_m + mu_p)[:, None, :] - wp
    return J, wp, wm, mu_p, mu_m
