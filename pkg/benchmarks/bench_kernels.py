"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--resolution 0.01] [--repeat 20]

The numba versions are compiled (and cached) before timing.  The last line
runs a short denoising job once per kernel path in separate processes and
reports wall time and the largest vertex difference.
"""

import argparse
import os
import subprocess
import sys
import tempfile
import timeit

import numpy as np

from tgv_normal import _kernels as K
from tgv_normal.admm import AdmmState, MeshProblem, SolverConfig, lagrangian, scaled_penalties
from tgv_normal.admm import solve_d_subproblems, solve_w_subproblem
from tgv_normal.synthetic import add_noise, generate_hemisphere_grid
from tgv_normal.trt import TrtField

RUN = """
import sys, time, numpy as np
from tgv_normal.synthetic import generate_hemisphere_grid, add_noise
from tgv_normal.admm import run, SolverConfig, scaled_penalties
c = generate_hemisphere_grid(resolutions={res})
n = add_noise(c, 0.2, seed=1)
t = time.perf_counter()
r = run(n, SolverConfig(max_outer_iters={iters}, **scaled_penalties(c)))
print(time.perf_counter() - t)
np.save(sys.argv[1], r.mesh.vertices)
"""


def bench(label, fn_numpy, fn_numba, repeat):
    fn_numba()  # compile
    t_np = min(timeit.repeat(fn_numpy, number=1, repeat=repeat))
    t_nb = min(timeit.repeat(fn_numba, number=1, repeat=repeat))
    print(f"{label:<28} numpy {1e3 * t_np:9.3f} ms   numba {1e3 * t_nb:9.3f} ms   "
          f"speed-up {t_np / t_nb:6.1f}x")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--resolution", type=float, default=0.01)
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--run-iters", type=int, default=10, help="0 skips the end-to-end run")
    args = ap.parse_args()
    if K.triangle_frames_numba is None:
        sys.exit("numba is not installed; nothing to compare")

    clean = generate_hemisphere_grid(resolutions=args.resolution)
    noisy = add_noise(clean, 0.2, seed=1)
    print(f"mesh: {noisy.n_vertices} vertices, {noisy.n_triangles} triangles, {noisy.n_edges} edges")
    rng = np.random.default_rng(0)
    P = np.ascontiguousarray(noisy.vertices[noisy.triangles])
    T = noisy.triangles
    vals = rng.normal(size=(len(T), 3, 3))
    M = rng.normal(size=(len(T), 3, 3))
    X = rng.normal(size=(len(T), 3, 3, 3))
    G = rng.normal(size=X.shape)
    nv = noisy.n_vertices
    r = args.repeat
    bench("triangle_frames", lambda: K.triangle_frames_numpy(P), lambda: K.triangle_frames_numba(P), r)
    bench("scatter_corners", lambda: K.scatter_corners_numpy(T, vals, nv),
          lambda: K.scatter_corners_numba(T, vals, nv), r)
    bench("transport_tensors", lambda: K.transport_tensors_numpy(M, X),
          lambda: K.transport_tensors_numba(M, X), r)
    bench("transport_tensors_vjp", lambda: K.transport_tensors_vjp_numpy(M, X, G),
          lambda: K.transport_tensors_vjp_numba(M, X, G), r)

    cfg = SolverConfig(**scaled_penalties(clean))
    st = AdmmState.initial(noisy)
    st = st.copy(**dict(zip(("d0", "D1", "d2"), solve_d_subproblems(st, cfg))))
    st = st.copy(W=TrtField(noisy, solve_w_subproblem(st, cfg)[0]))
    pb = MeshProblem.from_state(st, cfg, noisy.vertices)
    x = noisy.vertices
    bench("lagrangian value+gradient", lambda: lagrangian(x, pb, use_numba=False),
          lambda: lagrangian(x, pb, use_numba=True), r)

    if args.run_iters:
        with tempfile.TemporaryDirectory() as d:
            res = {}
            for flag in ("1", "0"):
                path = os.path.join(d, f"{flag}.npy")
                env = dict(os.environ, TGV_NORMAL_DISABLE_NUMBA=flag)
                code = RUN.format(res=args.resolution, iters=args.run_iters)
                out = subprocess.run([sys.executable, "-c", code, path], env=env, check=True,
                                     capture_output=True, text=True).stdout
                res[flag] = (float(out.split()[-1]), np.load(path))
        diff = np.abs(res["0"][1] - res["1"][1]).max()
        print(f"{args.run_iters}-iteration run        numpy {res['1'][0]:9.2f} s    numba "
              f"{res['0'][0]:9.2f} s    speed-up {res['1'][0] / res['0'][0]:6.1f}x   "
              f"max vertex difference {diff:.2e}")


if __name__ == "__main__":
    main()
