"""Error metrics of a denoised mesh against a clean reference."""

from dataclasses import asdict, dataclass

import numpy as np

from .errors import SizeMismatch
from .regularizers import RegularizerWeights, tgv_objective, tv_normal
from .trt import TrtField


@dataclass(frozen=True)
class MetricsReport:
    mean_angular_normal_error_deg: float
    rms_vertex_distance: float
    max_vertex_distance: float
    tv_normal: float
    tgv: dict
    runtime: float
    iterations: int

    def as_dict(self):
        return asdict(self)


def angular_errors_deg(mesh, reference):
    """Per-triangle geodesic distance between unit normals, in degrees.

    Evaluated as ``atan2(|a x b|, <a, b>)``, which stays accurate (and is
    exactly zero for equal normals) where ``arccos`` loses half the digits.
    """
    _check_same_topology(mesh, reference)
    a, b = mesh.geometry.n, reference.geometry.n
    s = np.linalg.norm(np.cross(a, b), axis=1)
    return np.degrees(np.arctan2(s, np.einsum("ij,ij->i", a, b)))


def _check_same_topology(a, b):
    if a.vertices.shape != b.vertices.shape or a.triangles.shape != b.triangles.shape:
        raise SizeMismatch(
            f"meshes differ in size: {len(a.vertices)}/{len(a.triangles)} vs "
            f"{len(b.vertices)}/{len(b.triangles)} vertices/triangles"
        )
    if not np.array_equal(a.triangles, b.triangles):
        raise SizeMismatch("meshes have different connectivity")


def compute_metrics(result, reference, weights=None, runtime=0.0, iterations=0):
    """Compare ``result`` with ``reference``.

    ``result`` is a mesh or a solver :class:`~tgv_normal.admm.RunResult`; in
    the latter case iterations and the final ``W`` come from the run.
    ``weights`` (default: zero) sets the TGV breakdown.
    """
    W = None
    if hasattr(result, "state") and hasattr(result, "log"):
        iterations = result.iterations
        runtime = runtime or float(sum(r.wall_time for r in result.log))
        W = result.state.W
        result = result.mesh
    _check_same_topology(result, reference)
    if W is None or W.mesh is not result:
        W = TrtField.zeros(result) if W is None else W.rebind(result)
    weights = weights or RegularizerWeights(alpha0=0.0, alpha1=0.0)
    d = np.linalg.norm(result.vertices - reference.vertices, axis=1)
    return MetricsReport(
        mean_angular_normal_error_deg=float(np.mean(angular_errors_deg(result, reference))),
        rms_vertex_distance=float(np.sqrt(np.mean(d * d))),
        max_vertex_distance=float(np.max(d)),
        tv_normal=float(tv_normal(result)),
        tgv=tgv_objective(result, W, weights).as_dict(),
        runtime=float(runtime),
        iterations=int(iterations),
    )
