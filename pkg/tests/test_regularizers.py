import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tgv_normal.mesh import build_topology, edge_frame, reorient
from tgv_normal.regularizers import (
    RegularizerWeights,
    alpha1_edge_terms,
    tgv_alpha1_edge,
    tgv_objective,
    tv_normal,
)
from tgv_normal.trt import TrtField

from conftest import cube, icosahedron, random_closed_mesh, random_field, tetra
from test_mesh_core import hinge

W_DEF = RegularizerWeights(alpha0=3e-5, alpha1=3.5e-3)


def flat_box():
    """Thin closed box: the top face is a planar 2x2 grid of triangles."""
    top = [[x, y, 0.0] for y in (0, 0.5, 1) for x in (0, 0.5, 1)]
    bot = [[0, 0, -1.0], [1, 0, -1.0], [1, 1, -1.0], [0, 1, -1.0]]
    V = np.array(top + bot)
    F = []
    for j in range(2):
        for i in range(2):
            a = 3 * j + i
            F += [[a, a + 1, a + 4], [a, a + 4, a + 3]]
    F += [[9, 11, 10], [9, 12, 11]]
    ring = [0, 1, 2, 5, 8, 7, 6, 3]
    corner = {0: 9, 2: 10, 8: 11, 6: 12}
    for k in range(8):
        a, b = ring[k], ring[(k + 1) % 8]
        ca = corner.get(a) or corner[ring[k - 1]]
        cb = corner.get(b) or ca
        F.append([b, a, ca] if ca == cb else [b, a, ca])
        if ca != cb:
            F.append([b, ca, cb])
    return build_topology(V, np.array(F))


def test_cube_total_variation():
    assert tv_normal(cube()) == pytest.approx(6 * np.pi, abs=1e-10)


def test_planar_part_contributes_nothing():
    m = flat_box()
    top = np.all(m.vertices[m.edges][:, :, 2] == 0, axis=1) & np.all(
        m.vertices[m.edge_opposite][:, :, 2] == 0, axis=1
    )
    assert top.sum() == 8  # interior edges of the 2x2 grid
    terms = alpha1_edge_terms(m, TrtField.zeros(m))
    assert np.allclose(terms[top], 0.0, atol=1e-15)


def test_collapse_identity_on_test_meshes(rng):
    meshes = [tetra(), cube(), icosahedron(), flat_box()] + [random_closed_mesh(rng) for _ in range(5)]
    for m in meshes:
        tv = tv_normal(m)
        b = tgv_objective(m, TrtField.zeros(m), W_DEF)
        assert b.jacobian_term == 0.0 and b.jump_term == 0.0
        assert abs(b.total - W_DEF.alpha1 * tv) <= 1e-14 * max(1.0, W_DEF.alpha1 * tv)
        assert b.alpha1_term == pytest.approx(tv, rel=1e-14)


def test_alpha1_edge_examples():
    m, e = hinge([0, 1, 0], [0, 0, -1])
    fr = edge_frame(m, e)
    assert tgv_alpha1_edge(m, TrtField.zeros(m), e) == pytest.approx(fr.length * np.pi / 2)
    # coplanar hinge: log vanishes, mu+^T W mu+ = c1/|E|
    s = np.sqrt(3) / 2
    m, e = hinge([0.4, s, 0], [0.55, -s, 0])
    fr = edge_frame(m, e)
    c = np.zeros((m.n_edges, 2))
    c[e] = [-0.7, 0.3]
    c[(e + 1) % m.n_edges] = [5.0, 2.0]
    val = tgv_alpha1_edge(m, TrtField(m, c), e)
    assert val == pytest.approx(fr.h * 0.7, rel=1e-12)


def test_single_edge_matches_batched_terms(rng):
    m = random_closed_mesh(rng)
    W = random_field(m, rng)
    terms = alpha1_edge_terms(m, W)
    for e in range(0, m.n_edges, 9):
        assert tgv_alpha1_edge(m, W, e) == pytest.approx(terms[e], rel=1e-11, abs=1e-14)


def _flip_all(m, W):
    r = reorient(m, swap_sides=True)
    c = W.coefficients.copy()
    c[:, 1] *= -1
    return r, TrtField(r, c)


def test_orientation_invariance(rng):
    for _ in range(20):
        m = random_closed_mesh(rng)
        W = random_field(m, rng, 0.2)
        r, Wr = _flip_all(m, W)
        a = tgv_objective(m, W, W_DEF)
        b = tgv_objective(r, Wr, W_DEF)
        assert abs(a.total - b.total) < 1e-9
        for name in ("alpha1_term", "jacobian_term", "jump_term"):
            assert getattr(a, name) == pytest.approx(getattr(b, name), rel=1e-10)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_arbitrary_reorientation_invariance(seed):
    rng = np.random.default_rng(seed)
    m = random_closed_mesh(rng, reorient_edges=False)
    W = random_field(m, rng, 0.2)
    swap = rng.random(m.n_edges) < 0.5
    flip = rng.random(m.n_edges) < 0.5
    r = reorient(m, swap, flip)
    c = W.coefficients.copy()
    c[swap ^ flip, 1] *= -1
    a = tgv_objective(m, W, W_DEF).total
    b = tgv_objective(r, TrtField(r, c), W_DEF).total
    assert abs(a - b) < 1e-9 * max(1.0, abs(a))


def test_scaling_behaviour(rng):
    """Coefficients are dimensionless: under uniform scaling by s the
    first-order term scales by s, the second-order terms are invariant."""
    m = random_closed_mesh(rng, reorient_edges=False)
    W = random_field(m, rng)
    s = 2.5
    ms = build_topology(s * m.vertices, m.triangles)
    assert tv_normal(ms) == pytest.approx(s * tv_normal(m), rel=1e-12)
    a = tgv_objective(m, W, RegularizerWeights(1.0, 1.0))
    b = tgv_objective(ms, TrtField(ms, W.coefficients), RegularizerWeights(1.0, 1.0))
    assert b.alpha1_term == pytest.approx(s * a.alpha1_term, rel=1e-11)
    assert b.jacobian_term == pytest.approx(a.jacobian_term, rel=1e-11)
    assert b.jump_term == pytest.approx(a.jump_term, rel=1e-11)


def test_weights_validation():
    with pytest.raises(ValueError):
        RegularizerWeights(alpha0=-1.0)


def test_tgv_nonnegative_and_weighted_sum(rng):
    m = random_closed_mesh(rng)
    W = random_field(m, rng)
    b = tgv_objective(m, W, W_DEF)
    assert min(b.alpha1_term, b.jacobian_term, b.jump_term) >= 0
    assert b.total == pytest.approx(W_DEF.alpha1 * b.alpha1_term
                                    + W_DEF.alpha0 * (b.jacobian_term + b.jump_term))
