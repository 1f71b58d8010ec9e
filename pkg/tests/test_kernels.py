import os
import subprocess
import sys

import numpy as np
import pytest

from tgv_normal import _kernels as K

numba_only = pytest.mark.skipif(K.triangle_frames_numba is None, reason="numba not installed")


def _corners(rng, F=200):
    return rng.normal(size=(F, 3, 3))


@numba_only
def test_triangle_frames_agree(rng):
    P = _corners(rng)
    for a, b in zip(K.triangle_frames_numpy(P), K.triangle_frames_numba(P)):
        assert np.allclose(a, b, rtol=1e-12, atol=1e-12)


@numba_only
def test_scatter_agrees(rng):
    T = rng.integers(0, 50, size=(120, 3))
    vals = rng.normal(size=(120, 3, 3))
    a = K.scatter_corners_numpy(T, vals, 50)
    b = K.scatter_corners_numba(T, vals, 50)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-12)
    assert np.allclose(a.sum(axis=0), vals.reshape(-1, 3).sum(axis=0))


@numba_only
def test_transport_kernels_agree(rng):
    M = rng.normal(size=(40, 3, 3))
    X = rng.normal(size=(40, 3, 3, 3))
    G = rng.normal(size=(40, 3, 3, 3))
    assert np.allclose(K.transport_tensors_numpy(M, X), K.transport_tensors_numba(M, X), atol=1e-12)
    ga = K.transport_tensors_vjp_numpy(M, X, G)
    gb = K.transport_tensors_vjp_numba(M, X, G)
    assert np.allclose(ga, gb, atol=1e-11)


def test_transport_vjp_is_adjoint(rng):
    """<G, d/dM T(M) . dM> matches the vector-Jacobian product."""
    M = rng.normal(size=(5, 3, 3))
    X = rng.normal(size=(5, 3, 3, 3))
    G = rng.normal(size=(5, 3, 3, 3))
    dM = rng.normal(size=M.shape)
    h = 1e-6
    fd = (K.transport_tensors_numpy(M + h * dM, X) - K.transport_tensors_numpy(M - h * dM, X)) / (2 * h)
    lhs = np.sum(G * fd)
    rhs = np.sum(K.transport_tensors_vjp_numpy(M, X, G) * dM)
    assert lhs == pytest.approx(rhs, rel=1e-8)


def test_disable_flag_selects_numpy():
    code = ("from tgv_normal import _kernels as K; "
            "print(K.USE_NUMBA, K.triangle_frames is K.triangle_frames_numpy)")
    env = dict(os.environ, TGV_NORMAL_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True).stdout.split()
    assert out == ["False", "True"]


def test_newton_step_same_on_both_paths(monkeypatch):
    """Identical inputs give the same Newton step whichever kernels evaluate
    the augmented Lagrangian.  Whole runs are not compared: truncated CG on
    the ill-conditioned vertex Hessian amplifies last-bit differences."""
    import sys as _sys

    from tgv_normal.admm import AdmmState, MeshProblem, SolverConfig, newton_mesh_step
    from tgv_normal.admm import scaled_penalties, solve_d_subproblems, solve_w_subproblem
    from tgv_normal.synthetic import add_noise, generate_hemisphere_grid
    from tgv_normal.trt import TrtField

    newton = _sys.modules["tgv_normal.admm.newton"]
    base = newton.lagrangian
    clean = generate_hemisphere_grid(resolutions=0.03)
    noisy = add_noise(clean, 0.2, seed=1)
    cfg = SolverConfig(newton_steps_per_outer=1, **scaled_penalties(clean))
    st = AdmmState.initial(noisy)
    st = st.copy(**dict(zip(("d0", "D1", "d2"), solve_d_subproblems(st, cfg))))
    st = st.copy(W=TrtField(noisy, solve_w_subproblem(st, cfg)[0]))
    pb = MeshProblem.from_state(st, cfg, noisy.vertices)
    out = []
    for flag in (True, False):
        monkeypatch.setattr(newton, "lagrangian",
                            lambda x, p, need_grad=True, use_numba=None, _f=flag: base(x, p, need_grad, _f))
        mesh, info = newton_mesh_step(st, cfg, noisy.vertices, problem=pb)
        assert info.accepted_steps == 1
        out.append(mesh.vertices)
    step = np.abs(out[0] - noisy.vertices).max()
    assert np.abs(out[0] - out[1]).max() < 1e-6 * step
