import json

import numpy as np
import pytest

from tgv_normal.cli import build_parser, main
from tgv_normal.errors import ParseError, SizeMismatch, UnsupportedFormat
from tgv_normal.io import load_mesh, read_arrays, save_mesh
from tgv_normal.mesh import build_topology, mean_edge_length
from tgv_normal.metrics import angular_errors_deg, compute_metrics
from tgv_normal.synthetic import add_noise, generate_halfcylinder_grid, generate_hemisphere_grid

from conftest import TETRA_FACES, TETRA_VERTICES, icosahedron, random_closed_mesh

TETRA_OBJ = """# regular tetrahedron
o tetra
v 1 1 1
v 1 -1 -1
v -1 1 -1
v -1 -1 1
vn 0 0 1
f 1 2 3
f 1/1 3/2 4/3
f 1//1 4//1 2//1
f -3 -1 -2
"""


@pytest.fixture(scope="module")
def hemisphere():
    return generate_hemisphere_grid()


# --- files ---------------------------------------------------------------------

def test_load_tetra_obj(tmp_path):
    p = tmp_path / "tetra.obj"
    p.write_text(TETRA_OBJ)
    m = load_mesh(p)
    assert (m.n_vertices, m.n_triangles, m.n_edges) == (4, 4, 6)
    assert np.array_equal(m.triangles, TETRA_FACES)
    assert np.array_equal(m.vertices, TETRA_VERTICES)


@pytest.mark.parametrize("ext", [".obj", ".off", ".OBJ"])
def test_round_trip(tmp_path, rng, ext):
    m = random_closed_mesh(rng, reorient_edges=False)
    p = tmp_path / ("mesh" + ext)
    save_mesh(m, p)
    back = load_mesh(p)
    assert np.array_equal(back.triangles, m.triangles)
    assert np.abs(back.vertices - m.vertices).max() <= 1e-15
    assert np.array_equal(back.vertices, m.vertices)  # 17 digits are exact for doubles


def test_quad_face_is_rejected(tmp_path):
    p = tmp_path / "quad.obj"
    p.write_text("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n")
    with pytest.raises(ParseError, match="non-triangular face") as exc:
        read_arrays(p)
    assert exc.value.line == 5
    q = tmp_path / "quad.off"
    q.write_text("OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n")
    with pytest.raises(ParseError, match="non-triangular face"):
        read_arrays(q)


@pytest.mark.parametrize("text, line", [
    ("v 0 0\nf 1 2 3\n", 1),
    ("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n", 4),
    ("v 0 0 x\n", 1),
    ("v 0 0 0\n", 1),
])
def test_obj_parse_errors(tmp_path, text, line):
    p = tmp_path / "bad.obj"
    p.write_text(text)
    with pytest.raises(ParseError) as exc:
        read_arrays(p)
    assert exc.value.line == line
    assert f"line {line}" in str(exc.value)


def test_off_parse_errors(tmp_path):
    p = tmp_path / "bad.off"
    p.write_text("PLY\n")
    with pytest.raises(ParseError, match="header"):
        read_arrays(p)
    p.write_text("OFF\n4 4 0\n0 0 0\n")
    with pytest.raises(ParseError, match="ends"):
        read_arrays(p)


def test_off_header_with_counts(tmp_path):
    p = tmp_path / "t.off"
    body = "\n".join(" ".join(map(str, v)) for v in TETRA_VERTICES)
    faces = "\n".join("3 " + " ".join(map(str, f)) for f in TETRA_FACES)
    p.write_text(f"OFF 4 4 6\n# comment\n{body}\n{faces}\n")
    assert load_mesh(p).n_edges == 6


def test_unsupported_format(tmp_path):
    with pytest.raises(UnsupportedFormat):
        load_mesh(tmp_path / "mesh.ply")
    with pytest.raises(UnsupportedFormat):
        save_mesh(icosahedron(), tmp_path / "mesh.stl")


# --- generators and noise -------------------------------------------------------

def test_hemisphere_generator(hemisphere):
    m = hemisphere
    assert m.euler_characteristic() == 2
    assert 1500 <= m.n_vertices <= 2500
    V = m.vertices
    center = np.array([0.5 * np.ptp(V[:, 0]) + V[:, 0].min(), 0.5 * np.ptp(V[:, 1]) + V[:, 1].min(), 0])
    up = np.all(V[m.triangles][:, :, 2] > 1e-9, axis=1)
    c = V[m.triangles[up]].mean(axis=1)
    assert np.allclose(np.linalg.norm(V[m.triangles[up]] - center, axis=2), 0.12, atol=1e-12)
    analytic = (c - center) / np.linalg.norm(c - center, axis=1)[:, None]
    err = np.degrees(np.arccos(np.clip(np.einsum("ij,ij->i", analytic, m.geometry.n[up]), -1, 1)))
    assert err.max() < 2.0


def test_generator_grid_layout():
    m = generate_hemisphere_grid(rows=2, cols=2, radii=[0.05, 0.07], resolutions=[0.02, 0.015])
    assert m.euler_characteristic() == 2
    assert np.isclose(m.vertices[:, 2].max(), 0.07)
    c = generate_halfcylinder_grid(radii=0.05, resolutions=0.02)
    assert c.euler_characteristic() == 2
    assert np.isclose(c.vertices[:, 2].max(), 0.05)
    with pytest.raises(ValueError):
        generate_hemisphere_grid(rows=0)


def test_noise_zero_and_determinism(hemisphere):
    assert np.array_equal(add_noise(hemisphere, 0.0, seed=3).vertices, hemisphere.vertices)
    a = add_noise(hemisphere, 0.2, seed=7).vertices
    b = add_noise(hemisphere, 0.2, seed=7).vertices
    assert a.tobytes() == b.tobytes()
    assert not np.array_equal(a, add_noise(hemisphere, 0.2, seed=8).vertices)
    with pytest.raises(ValueError):
        add_noise(hemisphere, -0.1)


def test_noise_statistics():
    V = np.zeros((34000, 3))
    V[:, 0] = np.arange(len(V))
    m = icosahedron()
    big = m.with_vertices(np.repeat(m.vertices, 1, axis=0))
    sigma = 0.2 * mean_edge_length(big)
    samples = np.concatenate(
        [(add_noise(big, 0.2, seed=s).vertices - big.vertices).ravel() for s in range(300)]
    )
    assert len(samples) >= 1e4
    assert np.std(samples) == pytest.approx(sigma, rel=0.02)
    assert abs(np.mean(samples)) < 0.02 * sigma


# --- metrics ---------------------------------------------------------------------

def test_metrics_self_and_translation(hemisphere):
    r = compute_metrics(hemisphere, hemisphere)
    assert r.mean_angular_normal_error_deg == 0 and r.rms_vertex_distance == 0
    assert r.max_vertex_distance == 0
    d = np.array([0.3, -0.4, 1.2])
    moved = hemisphere.with_vertices(hemisphere.vertices + d)
    r = compute_metrics(moved, hemisphere)
    assert r.rms_vertex_distance == pytest.approx(np.linalg.norm(d), rel=1e-12)
    assert r.mean_angular_normal_error_deg < 1e-10  # rounding of translated edge vectors
    assert compute_metrics(hemisphere, moved).rms_vertex_distance == r.rms_vertex_distance


def test_metrics_noisy_baseline(hemisphere):
    noisy = add_noise(hemisphere, 0.2, seed=1)
    r = compute_metrics(noisy, hemisphere)
    assert r.mean_angular_normal_error_deg > 0
    # frozen baseline for the denoising ratio (seed 1)
    assert r.mean_angular_normal_error_deg == pytest.approx(27.405941842985, rel=1e-9)
    errs = angular_errors_deg(noisy, hemisphere)
    assert errs.min() >= 0 and errs.max() <= 180
    assert r.tv_normal > 0 and r.tgv["total"] == 0.0


def test_metrics_size_mismatch(hemisphere):
    with pytest.raises(SizeMismatch):
        compute_metrics(icosahedron(), hemisphere)
    ico = icosahedron()
    other = build_topology(ico.vertices, np.roll(ico.triangles, 1, axis=0))
    with pytest.raises(SizeMismatch):
        compute_metrics(ico, other)


# --- command line ------------------------------------------------------------------

def test_missing_input_is_usage_error(capsys):
    assert main(["denoise", "--iters", "1"]) == 2
    err = capsys.readouterr().err
    assert "usage:" in err and "--input" in err


def test_tv_needs_beta(capsys, tmp_path):
    p = tmp_path / "m.obj"
    save_mesh(icosahedron(), p)
    assert main(["denoise", "--input", str(p), "--tv"]) == 2
    assert "--beta" in capsys.readouterr().err


def test_unknown_flag_and_bad_file(capsys, tmp_path):
    assert main(["denoise", "--bogus"]) == 2
    assert main(["denoise", "--input", str(tmp_path / "missing.obj")]) == 1
    assert "error" in capsys.readouterr().err
    bad = tmp_path / "bad.obj"
    bad.write_text("v 0 0 0\nf 1 2 3 4\n")
    assert main(["denoise", "--input", str(bad)]) == 1
    assert "line 2" in capsys.readouterr().err


def test_metrics_need_reference(tmp_path):
    p = tmp_path / "m.obj"
    save_mesh(icosahedron(), p)
    assert main(["denoise", "--input", str(p), "--metrics", str(tmp_path / "x.json")]) == 2


def test_parser_defaults():
    a = build_parser().parse_args(["denoise", "--input", "x.obj"])
    assert (a.alpha0, a.alpha1, a.tau, a.iters, a.newton_steps) == (3e-5, 3.5e-3, 1e-12, 300, 3)
    assert (a.rho0, a.rho1, a.rho2) == (1.0, 1.0, 1.0)


def test_cli_end_to_end(tmp_path, capsys, rng):
    clean = random_closed_mesh(rng, subdivisions=2, reorient_edges=False)
    noisy = add_noise(clean, 0.2, seed=4)
    cp, nq = tmp_path / "clean.obj", tmp_path / "noisy.off"
    save_mesh(clean, cp)
    save_mesh(noisy, nq)
    out, met, log = tmp_path / "out.obj", tmp_path / "out.json", tmp_path / "log.jsonl"
    argv = ["denoise", "--input", str(nq), "--reference", str(cp), "--alpha0", "3e-5",
            "--alpha1", "3.5e-3", "--iters", "4", "--output", str(out), "--metrics", str(met),
            "--log", str(log)]
    assert main(argv) == 0
    assert "mean angular error" in capsys.readouterr().out
    assert load_mesh(out).n_vertices == clean.n_vertices
    rep = json.loads(met.read_text())
    for key in ("mean_angular_normal_error_deg", "rms_vertex_distance", "max_vertex_distance",
                "tv_normal", "tgv", "runtime", "iterations", "alpha0", "alpha1", "rho0",
                "rho1", "rho2", "seed", "noise_sigma", "input_mean_angular_normal_error_deg"):
        assert key in rep
    assert rep["iterations"] == 4 and rep["alpha1"] == 3.5e-3
    lines = log.read_text().splitlines()
    assert len(lines) == 4 and json.loads(lines[0])["iteration"] == 0

    argv = ["denoise", "--input", str(nq), "--reference", str(cp), "--tv", "--beta", "2e-2",
            "--iters", "2", "--metrics", str(met)]
    assert main(argv) == 0
    rep = json.loads(met.read_text())
    assert rep["tv_mode"] is True and rep["beta"] == 2e-2


def test_cli_generate(tmp_path):
    met = tmp_path / "g.json"
    noisy = tmp_path / "noisy.obj"
    argv = ["denoise", "--generate", "spheres", "--resolutions", "0.03", "--noise-sigma", "0.2",
            "--seed", "5", "--iters", "2", "--auto-rho", "--metrics", str(met),
            "--save-noisy", str(noisy)]
    assert main(argv) == 0
    rep = json.loads(met.read_text())
    assert rep["seed"] == 5 and rep["noise_sigma"] == 0.2
    assert rep["rho0"] != 1.0
    assert load_mesh(noisy).euler_characteristic() == 2
    assert main(["denoise", "--generate", "spheres", "--rows", "2", "--radii", "1,2,3"]) == 2
