"""Hot per-element kernels.

Every kernel exists twice: a numba ``@njit`` loop version and a vectorized
numpy version.  The numba path is used when numba imports and the environment
variable ``TGV_NORMAL_DISABLE_NUMBA`` is unset (or ``0``).  Both paths return
identical results up to floating point reassociation; ``benchmarks/`` times
them against each other.
"""

import os

import numpy as np

try:  # pragma: no cover - exercised implicitly
    import numba
except ImportError:  # pragma: no cover
    numba = None

_flag = os.environ.get("TGV_NORMAL_DISABLE_NUMBA", "0").strip().lower()
USE_NUMBA = numba is not None and _flag in ("", "0", "false", "no")

_NEXT = np.array([1, 2, 0])
_PREV = np.array([2, 0, 1])


# --------------------------------------------------------------------------
# numpy implementations
# --------------------------------------------------------------------------

def triangle_frames_numpy(P):
    """Per-triangle geometry from corner coordinates ``P`` of shape (F, 3, 3).

    Local edge ``k`` is the edge opposite corner ``k``, traversed from corner
    ``k+1`` to corner ``k+2``.  Returns ``(A2, n, L, eh, mu, cot)`` with
    ``A2`` twice the area, ``n`` the unit normal, ``L`` edge lengths, ``eh``
    unit edge directions, ``mu`` outward co-normals and ``cot`` the cotangent
    of the angle at each corner.
    """
    e = P[:, _PREV, :] - P[:, _NEXT, :]
    N = np.cross(P[:, 1] - P[:, 0], P[:, 2] - P[:, 0])
    A2 = np.sqrt(np.einsum("fi,fi->f", N, N))
    n = N / A2[:, None]
    L = np.sqrt(np.einsum("fki,fki->fk", e, e))
    eh = e / L[:, :, None]
    mu = np.cross(eh, n[:, None, :])
    u = P[:, _NEXT, :] - P
    w = P[:, _PREV, :] - P
    cot = np.einsum("fki,fki->fk", u, w) / A2[:, None]
    return A2, n, L, eh, mu, cot


def scatter_corners_numpy(triangles, values, n_vertices):
    """Sum per-corner 3-vectors ``values`` (F, 3, 3) onto vertices."""
    idx = triangles.ravel()
    flat = values.reshape(-1, 3)
    out = np.empty((n_vertices, 3))
    for c in range(3):
        out[:, c] = np.bincount(idx, weights=flat[:, c], minlength=n_vertices)
    return out


def transport_tensors_numpy(M, X):
    """Apply ``M`` (F, 3, 3) to every axis of ``X`` (F, 3, 3, 3)."""
    return np.einsum("fia,fjb,fkc,fabc->fijk", M, M, M, X, optimize=True)


def transport_tensors_vjp_numpy(M, X, G):
    """Gradient wrt ``M`` of ``sum(G * transport_tensors(M, X))``."""
    Y = np.einsum("fjb,fkc,fabc->fajk", M, M, X, optimize=True)
    g = np.einsum("fijk,fajk->fia", G, Y, optimize=True)
    Y = np.einsum("fia,fkc,fabc->fibk", M, M, X, optimize=True)
    g += np.einsum("fijk,fibk->fjb", G, Y, optimize=True)
    Y = np.einsum("fia,fjb,fabc->fijc", M, M, X, optimize=True)
    g += np.einsum("fijk,fijc->fkc", G, Y, optimize=True)
    return g


# --------------------------------------------------------------------------
# numba implementations
# --------------------------------------------------------------------------

if numba is not None:

    @numba.njit(cache=True)
    def triangle_frames_numba(P):
        F = P.shape[0]
        A2 = np.empty(F)
        n = np.empty((F, 3))
        L = np.empty((F, 3))
        eh = np.empty((F, 3, 3))
        mu = np.empty((F, 3, 3))
        cot = np.empty((F, 3))
        for f in range(F):
            ux = P[f, 1, 0] - P[f, 0, 0]
            uy = P[f, 1, 1] - P[f, 0, 1]
            uz = P[f, 1, 2] - P[f, 0, 2]
            wx = P[f, 2, 0] - P[f, 0, 0]
            wy = P[f, 2, 1] - P[f, 0, 1]
            wz = P[f, 2, 2] - P[f, 0, 2]
            Nx = uy * wz - uz * wy
            Ny = uz * wx - ux * wz
            Nz = ux * wy - uy * wx
            a2 = np.sqrt(Nx * Nx + Ny * Ny + Nz * Nz)
            A2[f] = a2
            nx = Nx / a2
            ny = Ny / a2
            nz = Nz / a2
            n[f, 0] = nx
            n[f, 1] = ny
            n[f, 2] = nz
            for k in range(3):
                k1 = (k + 1) % 3
                k2 = (k + 2) % 3
                ex = P[f, k2, 0] - P[f, k1, 0]
                ey = P[f, k2, 1] - P[f, k1, 1]
                ez = P[f, k2, 2] - P[f, k1, 2]
                ln = np.sqrt(ex * ex + ey * ey + ez * ez)
                L[f, k] = ln
                ex /= ln
                ey /= ln
                ez /= ln
                eh[f, k, 0] = ex
                eh[f, k, 1] = ey
                eh[f, k, 2] = ez
                mu[f, k, 0] = ey * nz - ez * ny
                mu[f, k, 1] = ez * nx - ex * nz
                mu[f, k, 2] = ex * ny - ey * nx
                d = 0.0
                for i in range(3):
                    d += (P[f, k1, i] - P[f, k, i]) * (P[f, k2, i] - P[f, k, i])
                cot[f, k] = d / a2
        return A2, n, L, eh, mu, cot

    @numba.njit(cache=True)
    def scatter_corners_numba(triangles, values, n_vertices):
        out = np.zeros((n_vertices, 3))
        for f in range(triangles.shape[0]):
            for k in range(3):
                v = triangles[f, k]
                for i in range(3):
                    out[v, i] += values[f, k, i]
        return out

    @numba.njit(cache=True)
    def transport_tensors_numba(M, X):
        F = X.shape[0]
        out = np.zeros((F, 3, 3, 3))
        tmp1 = np.empty((3, 3, 3))
        tmp2 = np.empty((3, 3, 3))
        for f in range(F):
            # contract one axis at a time: 3 * 81 multiply-adds instead of 729
            for i in range(3):
                for b in range(3):
                    for c in range(3):
                        s = 0.0
                        for a in range(3):
                            s += M[f, i, a] * X[f, a, b, c]
                        tmp1[i, b, c] = s
            for i in range(3):
                for j in range(3):
                    for c in range(3):
                        s = 0.0
                        for b in range(3):
                            s += M[f, j, b] * tmp1[i, b, c]
                        tmp2[i, j, c] = s
            for i in range(3):
                for j in range(3):
                    for k in range(3):
                        s = 0.0
                        for c in range(3):
                            s += M[f, k, c] * tmp2[i, j, c]
                        out[f, i, j, k] = s
        return out

    @numba.njit(cache=True)
    def transport_tensors_vjp_numba(M, X, G):
        F = X.shape[0]
        g = np.zeros((F, 3, 3))
        for f in range(F):
            for i in range(3):
                for j in range(3):
                    for k in range(3):
                        gijk = G[f, i, j, k]
                        if gijk == 0.0:
                            continue
                        for a in range(3):
                            for b in range(3):
                                for c in range(3):
                                    x = X[f, a, b, c]
                                    if x == 0.0:
                                        continue
                                    t = gijk * x
                                    mia = M[f, i, a]
                                    mjb = M[f, j, b]
                                    mkc = M[f, k, c]
                                    g[f, i, a] += t * mjb * mkc
                                    g[f, j, b] += t * mia * mkc
                                    g[f, k, c] += t * mia * mjb
        return g

else:  # pragma: no cover
    triangle_frames_numba = None
    scatter_corners_numba = None
    transport_tensors_numba = None
    transport_tensors_vjp_numba = None


if USE_NUMBA:
    triangle_frames = triangle_frames_numba
    scatter_corners = scatter_corners_numba
    transport_tensors = transport_tensors_numba
    transport_tensors_vjp = transport_tensors_vjp_numba
else:
    triangle_frames = triangle_frames_numpy
    scatter_corners = scatter_corners_numpy
    transport_tensors = transport_tensors_numpy
    transport_tensors_vjp = transport_tensors_vjp_numpy
