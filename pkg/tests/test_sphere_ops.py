import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from tgv_normal.errors import AntipodalPoints
from tgv_normal.mesh import build_topology, edge_frame
from tgv_normal.sphere import (
    conormal_identity_residuals,
    geodesic_distance,
    log_map,
    log_via_conormal,
    log_via_conormal_minus,
    parallel_transport,
    parallel_transport_via_log,
    signed_angle,
    transport_matrix,
    transport_tensor,
)

from test_mesh_core import hinge

Z = np.array([0.0, 0, 1])
X = np.array([1.0, 0, 0])

vec3 = arrays(np.float64, 3, elements=st.floats(-1, 1, allow_nan=False))


def _unit_or_skip(v):
    n = np.linalg.norm(v)
    if n < 1e-3:
        v, n = np.array([0.3, -0.2, 0.9]), np.linalg.norm([0.3, -0.2, 0.9])
    return v / n


def random_pairs(rng, n, margin=1e-3):
    a = rng.normal(size=(n, 3))
    b = rng.normal(size=(n, 3))
    a /= np.linalg.norm(a, axis=1, keepdims=True)
    b /= np.linalg.norm(b, axis=1, keepdims=True)
    keep = np.einsum("ij,ij->i", a, b) > -1 + margin
    return a[keep], b[keep]


def test_geodesic_distance_examples():
    assert geodesic_distance(Z, Z) == 0.0
    assert geodesic_distance(Z, X) == pytest.approx(np.pi / 2)
    # the inner product rounds above one; must clamp, not return nan
    a = np.array([0.6, 0.8, 0.0])
    b = a * (1 + 1e-16)
    assert geodesic_distance(a, b) == pytest.approx(0.0, abs=2e-8)
    assert geodesic_distance(np.array([1.0, 0, 0]), np.array([1.0 + 2e-16, 0, 0])) == 0.0


def test_log_map_examples():
    assert np.array_equal(log_map(Z, Z), np.zeros(3))
    assert np.allclose(log_map(Z, X), [np.pi / 2, 0, 0], atol=1e-15)
    with pytest.raises(AntipodalPoints):
        log_map(Z, -Z)


def test_transport_examples(rng):
    xi = np.array([0.2, -0.7, 0.0])
    assert np.allclose(parallel_transport(Z, Z, xi), xi, atol=1e-15)
    assert np.allclose(parallel_transport(Z, X, X), [0, 0, -1], atol=1e-15)
    M = transport_matrix(Z, X)
    assert np.allclose(M @ X, [0, 0, -1])
    with pytest.raises(AntipodalPoints):
        parallel_transport(Z, -Z, xi)


def test_log_map_properties_batch(rng):
    a, b = random_pairs(rng, 1000)
    L = log_map(a, b)
    assert np.allclose(np.linalg.norm(L, axis=1), geodesic_distance(a, b), atol=1e-12, rtol=0)
    assert np.allclose(np.einsum("ij,ij->i", L, a), 0, atol=1e-12)


def test_transport_round_trip_batch(rng):
    a, b = random_pairs(rng, 1000)
    xi = rng.normal(size=a.shape)
    xi -= np.einsum("ij,ij->i", xi, a)[:, None] * a
    there = parallel_transport(a, b, xi)
    back = parallel_transport(b, a, there)
    assert np.allclose(back, xi, atol=1e-12, rtol=0)
    assert np.allclose(np.linalg.norm(there, axis=1), np.linalg.norm(xi, axis=1), atol=1e-12)
    assert np.allclose(np.einsum("ij,ij->i", there, b), 0, atol=1e-12)
    assert np.allclose(parallel_transport_via_log(a, b, xi), there, atol=1e-10)


def test_transport_maps_log_to_minus_log(rng):
    a, b = random_pairs(rng, 200, margin=1e-2)
    assert np.allclose(parallel_transport(a, b, log_map(a, b)), -log_map(b, a), atol=1e-12)


@settings(max_examples=200, deadline=None)
@given(vec3, vec3, vec3)
def test_transport_isometry_property(u, v, w):
    a, b = _unit_or_skip(u), _unit_or_skip(v)
    if a @ b < -1 + 1e-3:
        b = _unit_or_skip(b + 0.5 * np.array([1.0, 2.0, 3.0]) + a)
    xi = w - (w @ a) * a
    out = parallel_transport(a, b, xi)
    assert abs(out @ b) < 1e-12
    assert np.linalg.norm(out) == pytest.approx(np.linalg.norm(xi), abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(vec3, vec3)
def test_log_length_property(u, v):
    a, b = _unit_or_skip(u), _unit_or_skip(v)
    if a @ b < -1 + 1e-6:
        return
    L = log_map(a, b)
    assert np.linalg.norm(L) == pytest.approx(geodesic_distance(a, b), abs=1e-12)


def test_conormal_log_examples():
    s = np.sqrt(3) / 2
    mesh, e = hinge([0.5, s, 0], [0.5, -s, 0])
    assert np.allclose(log_via_conormal(edge_frame(mesh, e)), 0, atol=1e-15)

    mesh, e = hinge([0, 1, 0], [0, 0, -1])  # convex fold
    fr = edge_frame(mesh, e)
    assert np.allclose(log_via_conormal(fr), np.pi / 2 * fr.mu_plus, atol=1e-12)
    assert np.allclose(log_via_conormal(fr), log_map(fr.n_plus, fr.n_minus), atol=1e-12)

    mesh, e = hinge([0, 1, 0], [0, 0, 1])  # concave fold
    fr = edge_frame(mesh, e)
    assert np.allclose(log_via_conormal(fr), -np.pi / 2 * fr.mu_plus, atol=1e-12)
    assert np.allclose(log_via_conormal(fr), log_map(fr.n_plus, fr.n_minus), atol=1e-12)
    assert signed_angle(fr) == pytest.approx(-np.pi / 2)


def random_hinges(rng, n):
    """Random two-triangle configurations around the edge (0,0,0)-(1,0,0)."""
    for _ in range(n):
        a = rng.uniform(-0.95, 0.95) * np.pi
        p2 = [rng.uniform(-0.5, 1.5), rng.uniform(0.3, 2), 0]
        r = rng.uniform(0.3, 2)
        p3 = [rng.uniform(-0.5, 1.5), -r * np.cos(a), r * np.sin(a)]
        yield hinge(p2, p3)


def test_lemma_conormal_equivalence(rng):
    worst = 0.0
    for mesh, e in random_hinges(rng, 300):
        fr = edge_frame(mesh, e)
        d = log_via_conormal(fr) - log_map(fr.n_plus, fr.n_minus)
        d2 = log_via_conormal_minus(fr) - log_map(fr.n_minus, fr.n_plus)
        worst = max(worst, np.abs(d).max(), np.abs(d2).max())
        res = conormal_identity_residuals(fr)
        assert max(res.values()) < 1e-12
    assert worst < 1e-12


def test_conormal_identities_examples():
    for p3 in ([0.5, -np.sqrt(3) / 2, 0], [0, 0, 1]):
        mesh, e = hinge([0, 1, 0] if p3[2] else [0.5, np.sqrt(3) / 2, 0], p3)
        fr = edge_frame(mesh, e)
        assert np.allclose(parallel_transport(fr.n_minus, fr.n_plus, fr.mu_minus), -fr.mu_plus,
                           atol=1e-12)
        assert np.allclose(parallel_transport(fr.n_plus, fr.n_minus, fr.mu_plus), -fr.mu_minus,
                           atol=1e-12)
        assert np.allclose(parallel_transport(fr.n_plus, fr.n_minus, fr.t), fr.t, atol=1e-12)


def test_transport_tensor_examples(rng):
    n = np.array([0.0, 0.6, 0.8])
    P = np.eye(3) - np.outer(n, n)
    D = np.einsum("ia,jb,kc,abc->ijk", P, P, P, rng.normal(size=(3, 3, 3)))
    assert np.allclose(transport_tensor(D, n, n), D, atol=1e-15)
    m = np.array([0.48, 0.0, 0.6])
    m /= np.linalg.norm(m)
    xi = P @ rng.normal(size=3)
    R = np.einsum("i,j,k->ijk", xi, xi, xi)
    Pxi = parallel_transport(n, m, xi)
    assert np.allclose(transport_tensor(R, n, m), np.einsum("i,j,k->ijk", Pxi, Pxi, Pxi),
                       atol=1e-14)


def test_transport_tensor_batch_matches_single(rng):
    a, b = random_pairs(rng, 20)
    D = rng.normal(size=(len(a), 3, 3, 3))
    batch = transport_tensor(D, a, b)
    for i in range(len(a)):
        assert np.allclose(batch[i], transport_tensor(D[i], a[i], b[i]), atol=1e-13)


def test_build_antipodal_hinge_raises():
    # folded completely flat: n- = -n+
    V = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0.2, 1.3, 0]], float)
    m = build_topology(V, [[0, 1, 2], [1, 0, 3], [0, 2, 3], [1, 3, 2]])
    e = int(np.flatnonzero((m.edges == [0, 1]).all(axis=1))[0])
    with pytest.raises(AntipodalPoints):
        log_via_conormal(edge_frame(m, e))
