"""Closed, oriented triangle meshes and their per-edge geometry."""

from dataclasses import dataclass, field, replace
from functools import cached_property
import logging

import numpy as np

from . import _kernels
from .errors import (
    DegenerateTriangle,
    InconsistentOrientation,
    NonManifoldEdge,
    SizeMismatch,
)

logger = logging.getLogger(__name__)

DEGENERACY_RATIO = 1e-14


@dataclass(frozen=True, eq=False)
class TriGeometry:
    """Per-triangle quantities; local edge ``k`` is opposite corner ``k``."""

    A2: np.ndarray  # twice the area, (F,)
    n: np.ndarray  # unit normals, (F, 3)
    L: np.ndarray  # edge lengths, (F, 3)
    eh: np.ndarray  # unit edge directions (corner k+1 -> k+2), (F, 3, 3)
    mu: np.ndarray  # outward co-normals, (F, 3, 3)
    cot: np.ndarray  # cotangent of the corner angle, (F, 3)

    @property
    def area(self):
        return 0.5 * self.A2


def triangle_geometry(vertices, triangles):
    P = np.ascontiguousarray(vertices[triangles], dtype=np.float64)
    return TriGeometry(*_kernels.triangle_frames(P))


@dataclass(frozen=True, eq=False)
class TriMesh:
    """Vertex coordinates plus validated, oriented edge topology.

    Edge ``E`` runs from ``edges[E, 0]`` (X_{E,1}) to ``edges[E, 1]``
    (X_{E,2}); its unit tangent ``t_E`` points the same way.  ``edge_tris[E]``
    holds ``(T+, T-)``, ``edge_local[E]`` the local index of ``E`` inside each
    of them and ``edge_opposite[E]`` the opposite vertices ``(p+, p-)``.

    ``tri_edge_sign[T, k]`` is ``+1`` when the tangential basis function of
    local edge ``k`` enters triangle ``T`` with the local edge direction
    ``eh[T, k]`` and ``-1`` otherwise.  It combines the E+/E- side sign with
    the agreement of ``t_E`` and the triangle's traversal direction.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    edges: np.ndarray
    edge_tris: np.ndarray
    edge_local: np.ndarray
    edge_opposite: np.ndarray
    tri_edges: np.ndarray
    tri_edge_sign: np.ndarray
    plus_tangent_sign: np.ndarray = field(repr=False)

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_triangles(self):
        return len(self.triangles)

    @property
    def n_edges(self):
        return len(self.edges)

    @cached_property
    def geometry(self):
        return triangle_geometry(self.vertices, self.triangles)

    def with_vertices(self, vertices):
        """Same connectivity and orientation, new coordinates."""
        vertices = np.asarray(vertices, dtype=np.float64)
        if vertices.shape != self.vertices.shape:
            raise SizeMismatch(
                f"expected vertices of shape {self.vertices.shape}, got {vertices.shape}"
            )
        return replace(self, vertices=vertices)

    def euler_characteristic(self):
        return self.n_vertices - self.n_edges + self.n_triangles


def build_topology(vertices, triangles):
    """Build a :class:`TriMesh` with the default edge orientation.

    For an edge with vertex indices ``a < b`` the tangent points from ``a``
    to ``b`` and ``T+`` is the triangle whose boundary runs ``a -> b``.  The
    choice depends on indices only, never on coordinates.
    """
    vertices = np.array(vertices, dtype=np.float64)
    triangles = np.array(triangles, dtype=np.int64)
    if vertices.ndim != 2 or vertices.shape[1] != 3:
        raise ValueError("vertices must have shape (V, 3)")
    if triangles.ndim != 2 or triangles.shape[1] != 3 or len(triangles) == 0:
        raise ValueError("triangles must be a nonempty (F, 3) index array")
    V = len(vertices)
    if triangles.min() < 0 or triangles.max() >= V:
        raise ValueError("triangle vertex index out of range")
    if np.any(triangles[:, 0] == triangles[:, 1]) or np.any(
        triangles[:, 1] == triangles[:, 2]
    ) or np.any(triangles[:, 0] == triangles[:, 2]):
        raise DegenerateTriangle("triangle with repeated vertex index")

    F = len(triangles)
    # half-edge (f, k) runs from corner k+1 to corner k+2
    tail = triangles[:, [1, 2, 0]].ravel()
    head = triangles[:, [2, 0, 1]].ravel()
    lo = np.minimum(tail, head)
    hi = np.maximum(tail, head)
    key = lo * V + hi
    order = np.argsort(key, kind="stable")
    skey = key[order]
    uniq, start, counts = np.unique(skey, return_index=True, return_counts=True)
    if np.any(counts != 2):
        bad = uniq[counts != 2][0]
        c = counts[counts != 2][0]
        raise NonManifoldEdge(
            f"edge ({bad // V}, {bad % V}) has {c} adjacent triangle(s), expected 2"
        )
    h0 = order[start]
    h1 = order[start + 1]
    forward0 = tail[h0] < head[h0]
    forward1 = tail[h1] < head[h1]
    if np.any(forward0 == forward1):
        i = np.flatnonzero(forward0 == forward1)[0]
        raise InconsistentOrientation(
            f"edge ({lo[h0[i]]}, {hi[h0[i]]}) is traversed in the same direction by both triangles"
        )
    hp = np.where(forward0, h0, h1)
    hm = np.where(forward0, h1, h0)
    E = len(uniq)
    edges = np.stack([lo[hp], hi[hp]], axis=1)
    edge_tris = np.stack([hp // 3, hm // 3], axis=1)
    edge_local = np.stack([hp % 3, hm % 3], axis=1)
    edge_opposite = np.stack(
        [triangles[hp // 3, hp % 3], triangles[hm // 3, hm % 3]], axis=1
    )
    tri_edges = np.empty(3 * F, dtype=np.int64)
    tri_edges[hp] = np.arange(E)
    tri_edges[hm] = np.arange(E)
    mesh = TriMesh(
        vertices=vertices,
        triangles=triangles,
        edges=edges,
        edge_tris=edge_tris,
        edge_local=edge_local,
        edge_opposite=edge_opposite,
        tri_edges=tri_edges.reshape(F, 3),
        tri_edge_sign=np.ones((F, 3), dtype=np.int64),
        plus_tangent_sign=np.ones(E, dtype=np.int64),
    )
    check_nondegenerate(mesh)
    return mesh


def reorient(mesh, swap_sides=None, flip_tangents=None):
    """Return ``mesh`` with E+/E- exchanged and/or ``t_E`` reversed per edge.

    ``swap_sides`` and ``flip_tangents`` are boolean masks over edges (or
    ``True`` for all edges).  Under either change the coefficient of the
    second tangential basis function of that edge changes sign.
    """
    E = mesh.n_edges
    swap = np.broadcast_to(np.asarray(False if swap_sides is None else swap_sides), (E,))
    flip = np.broadcast_to(np.asarray(False if flip_tangents is None else flip_tangents), (E,))
    edges = np.where(flip[:, None], mesh.edges[:, ::-1], mesh.edges)
    edge_tris = np.where(swap[:, None], mesh.edge_tris[:, ::-1], mesh.edge_tris)
    edge_local = np.where(swap[:, None], mesh.edge_local[:, ::-1], mesh.edge_local)
    edge_opposite = np.where(swap[:, None], mesh.edge_opposite[:, ::-1], mesh.edge_opposite)
    # traversal sign of the (new) plus triangle relative to the (new) tangent
    plus_sign = mesh.plus_tangent_sign * np.where(swap, -1, 1) * np.where(flip, -1, 1)
    change = np.where(swap ^ flip, -1, 1)
    tri_edge_sign = mesh.tri_edge_sign * change[mesh.tri_edges]
    return replace(
        mesh,
        edges=edges,
        edge_tris=edge_tris,
        edge_local=edge_local,
        edge_opposite=edge_opposite,
        tri_edge_sign=tri_edge_sign,
        plus_tangent_sign=plus_sign,
    )


def check_nondegenerate(mesh, ratio=DEGENERACY_RATIO):
    """Raise :class:`DegenerateTriangle` if any area is below ``ratio`` times
    the mean squared edge length."""
    g = _plain_geometry(mesh.vertices, mesh.triangles)
    area, L = g
    scale = np.mean(L**2)
    bad = ~(area >= ratio * scale)
    if np.any(bad):
        f = int(np.flatnonzero(bad)[0])
        raise DegenerateTriangle(f"triangle {f} has area {area[f]:.3e}")


def _plain_geometry(vertices, triangles):
    P = vertices[triangles]
    N = np.cross(P[:, 1] - P[:, 0], P[:, 2] - P[:, 0])
    area = 0.5 * np.linalg.norm(N, axis=1)
    L = np.linalg.norm(P[:, [2, 0, 1]] - P[:, [1, 2, 0]], axis=2)
    return area, L


def normals(mesh):
    """Unit normal of every triangle (right-hand rule)."""
    area, _ = _plain_geometry(mesh.vertices, mesh.triangles)
    if np.any(area <= 0.0):
        raise DegenerateTriangle("zero-area triangle")
    return mesh.geometry.n


def areas(mesh):
    return mesh.geometry.area


def mean_edge_length(mesh):
    d = mesh.vertices[mesh.edges[:, 1]] - mesh.vertices[mesh.edges[:, 0]]
    return float(np.mean(np.linalg.norm(d, axis=1)))


def barrier(mesh, tau):
    """``tau * sum_T 1/|T|``."""
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    area, _ = _plain_geometry(mesh.vertices, mesh.triangles)
    if np.any(area <= 0.0):
        raise DegenerateTriangle("zero-area triangle in barrier")
    if tau == 0:
        return 0.0
    return float(tau * np.sum(1.0 / area))


def fidelity(mesh, reference_vertices):
    """``1/2 sum_V |x_V - x_V^data|^2``."""
    ref = np.asarray(reference_vertices, dtype=np.float64)
    if ref.shape != mesh.vertices.shape:
        raise SizeMismatch(f"{ref.shape} vs {mesh.vertices.shape}")
    d = mesh.vertices - ref
    return 0.5 * float(np.sum(d * d))


def circumcenters(vertices, triangles):
    P = vertices[triangles]
    a = P[:, 0] - P[:, 2]
    b = P[:, 1] - P[:, 2]
    axb = np.cross(a, b)
    num = np.cross(
        np.sum(a * a, axis=1)[:, None] * b - np.sum(b * b, axis=1)[:, None] * a, axb
    )
    return P[:, 2] + num / (2.0 * np.sum(axb * axb, axis=1))[:, None]


@dataclass(frozen=True, eq=False)
class EdgeFrame:
    """Geometric frame of one edge (arrays of shape (3,)) or of all edges
    (arrays with a leading edge axis)."""

    n_plus: np.ndarray
    n_minus: np.ndarray
    mu_plus: np.ndarray
    mu_minus: np.ndarray
    t: np.ndarray
    length: np.ndarray
    h: np.ndarray
    midpoint: np.ndarray
    circumcenter_plus: np.ndarray
    circumcenter_minus: np.ndarray
    x1: np.ndarray
    x2: np.ndarray


def edge_frames(mesh):
    """Frames of all edges at once."""
    g = mesh.geometry
    if np.any(g.A2 <= 0.0):
        raise DegenerateTriangle("zero-area triangle")
    tp, tm = mesh.edge_tris.T
    kp, km = mesh.edge_local.T
    x1 = mesh.vertices[mesh.edges[:, 0]]
    x2 = mesh.vertices[mesh.edges[:, 1]]
    d = x2 - x1
    length = np.linalg.norm(d, axis=1)
    t = d / length[:, None]
    mid = 0.5 * (x1 + x2)
    cc = circumcenters(mesh.vertices, mesh.triangles)
    mu_p = g.mu[tp, kp]
    mu_m = g.mu[tm, km]
    h = np.einsum("ei,ei->e", mu_p, mid - cc[tp]) + np.einsum(
        "ei,ei->e", mu_m, mid - cc[tm]
    )
    if np.any(h <= 0):
        logger.debug(
            "%d edge(s) with nonpositive circumcenter distance h_E", int(np.sum(h <= 0))
        )
    return EdgeFrame(
        n_plus=g.n[tp],
        n_minus=g.n[tm],
        mu_plus=mu_p,
        mu_minus=mu_m,
        t=t,
        length=length,
        h=h,
        midpoint=mid,
        circumcenter_plus=cc[tp],
        circumcenter_minus=cc[tm],
        x1=x1,
        x2=x2,
    )


def edge_frame(mesh, e):
    """Frame of the single edge ``e``."""
    g = mesh.geometry
    tp, tm = mesh.edge_tris[e]
    kp, km = mesh.edge_local[e]
    if g.A2[tp] <= 0 or g.A2[tm] <= 0:
        raise DegenerateTriangle(f"edge {e} touches a zero-area triangle")
    x1 = mesh.vertices[mesh.edges[e, 0]]
    x2 = mesh.vertices[mesh.edges[e, 1]]
    length = float(np.linalg.norm(x2 - x1))
    t = (x2 - x1) / length
    mid = 0.5 * (x1 + x2)
    cc = circumcenters(mesh.vertices, mesh.triangles[[tp, tm]])
    h = float(g.mu[tp, kp] @ (mid - cc[0]) + g.mu[tm, km] @ (mid - cc[1]))
    if h <= 0:
        logger.debug("edge %d has nonpositive circumcenter distance h_E = %g", e, h)
    return EdgeFrame(
        n_plus=g.n[tp],
        n_minus=g.n[tm],
        mu_plus=g.mu[tp, kp],
        mu_minus=g.mu[tm, km],
        t=t,
        length=length,
        h=h,
        midpoint=mid,
        circumcenter_plus=cc[0],
        circumcenter_minus=cc[1],
        x1=x1,
        x2=x2,
    )
