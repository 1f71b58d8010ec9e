"""Shared test meshes and random-instance helpers."""

import numpy as np
import pytest

from tgv_normal.mesh import build_topology, reorient
from tgv_normal.trt import TrtField
from tgv_normal.admm import AdmmState

GOLDEN = (1 + 5**0.5) / 2

ICO_VERTICES = np.array(
    [[-1, GOLDEN, 0], [1, GOLDEN, 0], [-1, -GOLDEN, 0], [1, -GOLDEN, 0],
     [0, -1, GOLDEN], [0, 1, GOLDEN], [0, -1, -GOLDEN], [0, 1, -GOLDEN],
     [GOLDEN, 0, -1], [GOLDEN, 0, 1], [-GOLDEN, 0, -1], [-GOLDEN, 0, 1]],
    dtype=float,
)
ICO_FACES = np.array(
    [[0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11], [1, 5, 9], [5, 11, 4],
     [11, 10, 2], [10, 7, 6], [7, 1, 8], [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8],
     [3, 8, 9], [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1]]
)

TETRA_VERTICES = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float)
TETRA_FACES = np.array([[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]])

CUBE_VERTICES = np.array(
    [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0], [0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1]],
    dtype=float,
)
CUBE_FACES = np.array(
    [[0, 2, 1], [0, 3, 2], [4, 5, 6], [4, 6, 7], [0, 1, 5], [0, 5, 4],
     [1, 2, 6], [1, 6, 5], [2, 3, 7], [2, 7, 6], [3, 0, 4], [3, 4, 7]]
)


def tetra():
    return build_topology(TETRA_VERTICES, TETRA_FACES)


def cube():
    return build_topology(CUBE_VERTICES, CUBE_FACES)


def icosahedron():
    return build_topology(ICO_VERTICES, ICO_FACES)


def icosphere_arrays(subdivisions):
    """Loop-style midpoint subdivision of the icosahedron, projected to the unit sphere."""
    V = [v / np.linalg.norm(v) for v in ICO_VERTICES]
    F = [tuple(f) for f in ICO_FACES]
    for _ in range(subdivisions):
        cache = {}

        def mid(a, b):
            key = (min(a, b), max(a, b))
            if key not in cache:
                m = V[a] + V[b]
                V.append(m / np.linalg.norm(m))
                cache[key] = len(V) - 1
            return cache[key]

        F2 = []
        for a, b, c in F:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            F2 += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        F = F2
    return np.array(V), np.array(F)


def random_closed_mesh(rng, subdivisions=None, noise=0.08, reorient_edges=True):
    """Radially perturbed icosphere with random size/offset and, optionally,
    random E+/E- and tangent choices."""
    if subdivisions is None:
        subdivisions = int(rng.integers(0, 3))
    V, F = icosphere_arrays(subdivisions)
    r = 1.0 + noise * rng.uniform(-1, 1, size=len(V))
    V = V * r[:, None] * rng.uniform(0.5, 2.0) + rng.normal(size=3)
    mesh = build_topology(V, F)
    if reorient_edges:
        E = mesh.n_edges
        mesh = reorient(mesh, rng.random(E) < 0.5, rng.random(E) < 0.5)
    return mesh


def random_field(mesh, rng, scale=1.0):
    return TrtField(mesh, scale * rng.normal(size=(mesh.n_edges, 2)))


def tangent_tensors(n, rng):
    X = rng.normal(size=(len(n), 3, 3, 3))
    P = np.eye(3) - n[:, :, None] * n[:, None, :]
    return np.einsum("fia,fjb,fkc,fabc->fijk", P, P, P, X)


def tangent_vectors(n, rng, count=2):
    X = rng.normal(size=(len(n), count, 3))
    return X - np.einsum("eij,ej->ei", X, n)[..., None] * n[:, None, :]


def random_state(mesh, rng):
    """ADMM state with random W, splits and multipliers, all tangent where required."""
    g = mesh.geometry
    n_plus = g.n[mesh.edge_tris[:, 0]]
    E = mesh.n_edges
    st = AdmmState.initial(mesh)
    return st.copy(
        W=random_field(mesh, rng, 0.3),
        d0=rng.normal(size=E),
        lambda0=rng.normal(size=E),
        D1=tangent_tensors(g.n, rng),
        Lambda1=tangent_tensors(g.n, rng),
        d2=tangent_vectors(n_plus, rng),
        lambda2=tangent_vectors(n_plus, rng),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def hull_mesh(rng, n_vertices=50, noise=0.1):
    """Closed mesh on ``n_vertices`` random points near the unit sphere
    (convex hull connectivity, outward orientation)."""
    from scipy.spatial import ConvexHull

    P = rng.normal(size=(n_vertices, 3))
    P /= np.linalg.norm(P, axis=1, keepdims=True)
    hull = ConvexHull(P)
    F = hull.simplices.copy()
    N = np.cross(P[F[:, 1]] - P[F[:, 0]], P[F[:, 2]] - P[F[:, 0]])
    inward = np.einsum("ij,ij->i", N, P[F].mean(axis=1)) < 0
    F[inward] = F[inward][:, ::-1]
    P = P * (1 + noise * rng.uniform(-1, 1, size=(n_vertices, 1)))
    return build_topology(P, F)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
