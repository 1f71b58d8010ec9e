"""Geodesic calculus on the unit sphere S^2.

All functions broadcast over leading axes; points and tangent vectors are
plain ``(..., 3)`` arrays and order-3 tangent tensors are ``(..., 3, 3, 3)``.
"""

import numpy as np

from . import _kernels
from .errors import AntipodalPoints

ANTIPODAL_TOL = 1e-9
COINCIDENT_TOL = 1e-9


def _dot(a, b):
    return np.einsum("...i,...i->...", a, b)


def unit(v):
    """Normalize ``v`` along its last axis."""
    v = np.asarray(v, dtype=np.float64)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def project_tangent(n, v):
    """Orthogonal projection of ``v`` onto the tangent plane at ``n``."""
    return v - _dot(n, v)[..., None] * n


def _check_not_antipodal(c):
    if np.any(c < -1.0 + ANTIPODAL_TOL):
        raise AntipodalPoints("points are antipodal (inner product %.17g)" % np.min(c))


def geodesic_distance(n1, n2):
    """``arccos<n1, n2>`` with the inner product clamped to [-1, 1]."""
    c = np.clip(_dot(np.asarray(n1, float), np.asarray(n2, float)), -1.0, 1.0)
    return np.arccos(c)


def log_map(n1, n2):
    """Logarithmic map: tangent vector at ``n1`` pointing to ``n2``.

    Its length is the geodesic distance.  Raises :class:`AntipodalPoints`
    if ``n2`` is (numerically) ``-n1``.
    """
    n1 = np.asarray(n1, dtype=np.float64)
    n2 = np.asarray(n2, dtype=np.float64)
    c = _dot(n1, n2)
    _check_not_antipodal(c)
    dist = np.arccos(np.clip(c, -1.0, 1.0))
    v = n2 - c[..., None] * n1
    nv = np.linalg.norm(v, axis=-1)
    same = dist < COINCIDENT_TOL
    scale = np.where(same, 0.0, dist / np.where(same, 1.0, nv))
    return scale[..., None] * v


def transport_matrix(n1, n2):
    """Matrix of the parallel transport from ``T_{n1}S^2`` to ``T_{n2}S^2``:
    ``I - (n2 + n1) n2^T / (1 + <n2, n1>)``."""
    n1 = np.asarray(n1, dtype=np.float64)
    n2 = np.asarray(n2, dtype=np.float64)
    c = _dot(n1, n2)
    _check_not_antipodal(c)
    u = (n1 + n2) / (1.0 + c)[..., None]
    return np.eye(3) - u[..., :, None] * n2[..., None, :]


def parallel_transport(n1, n2, xi):
    """Transport the tangent vector ``xi`` at ``n1`` along the shortest
    geodesic to ``n2``."""
    n1 = np.asarray(n1, dtype=np.float64)
    n2 = np.asarray(n2, dtype=np.float64)
    xi = np.asarray(xi, dtype=np.float64)
    c = _dot(n1, n2)
    _check_not_antipodal(c)
    return xi - ((n1 + n2) * (_dot(n2, xi) / (1.0 + c))[..., None])


def parallel_transport_via_log(n1, n2, xi):
    """Same map as :func:`parallel_transport`, written through log maps.

    Kept as an independent route for testing.
    """
    n1 = np.asarray(n1, dtype=np.float64)
    n2 = np.asarray(n2, dtype=np.float64)
    xi = np.asarray(xi, dtype=np.float64)
    l12 = log_map(n1, n2)
    l21 = log_map(n2, n1)
    d2 = geodesic_distance(n1, n2) ** 2
    same = d2 < COINCIDENT_TOL**2
    coef = np.where(same, 0.0, _dot(xi, l12) / np.where(same, 1.0, d2))
    return xi - coef[..., None] * (l12 + l21)


def transport_tensor(D, n_old, n_new):
    """Transport an order-3 tangent tensor by applying the transport matrix
    to each of its axes."""
    D = np.asarray(D, dtype=np.float64)
    M = transport_matrix(n_old, n_new)
    if D.ndim == 3:
        return np.einsum("ia,jb,kc,abc->ijk", M, M, M, D, optimize=True)
    M = np.broadcast_to(M, D.shape[:-3] + (3, 3))
    flatD = np.ascontiguousarray(D.reshape(-1, 3, 3, 3))
    flatM = np.ascontiguousarray(M.reshape(-1, 3, 3))
    return _kernels.transport_tensors(flatM, flatD).reshape(D.shape)


# --- adjacent triangles -------------------------------------------------------

def signed_angle(frame):
    """``<mu+, log(n+, n-)>``, the signed bending angle across the edge.

    Equal to ``atan2(<n-, mu+>, <n-, n+>)``; smooth through the coplanar
    configuration.
    """
    return np.arctan2(_dot(frame.n_minus, frame.mu_plus), _dot(frame.n_minus, frame.n_plus))


def log_via_conormal(frame):
    """``log(n+, n-) = sign(<n-, mu+>) dist(n+, n-) mu+``."""
    c = _dot(frame.n_plus, frame.n_minus)
    _check_not_antipodal(c)
    s = np.sign(_dot(frame.n_minus, frame.mu_plus))
    return (s * geodesic_distance(frame.n_plus, frame.n_minus))[..., None] * frame.mu_plus


def log_via_conormal_minus(frame):
    """``log(n-, n+) = sign(<n-, mu+>) dist(n+, n-) mu-``."""
    c = _dot(frame.n_plus, frame.n_minus)
    _check_not_antipodal(c)
    s = np.sign(_dot(frame.n_minus, frame.mu_plus))
    return (s * geodesic_distance(frame.n_plus, frame.n_minus))[..., None] * frame.mu_minus


def transport_minus_to_plus(frame, xi):
    """Transport from ``T_{n-}`` to ``T_{n+}`` in co-normal form:
    ``(I - mu- mu-^T - mu+ mu-^T) xi``."""
    g = _dot(frame.mu_minus, xi)
    return xi - g[..., None] * (frame.mu_minus + frame.mu_plus)


def transport_plus_to_minus(frame, chi):
    g = _dot(frame.mu_plus, chi)
    return chi - g[..., None] * (frame.mu_plus + frame.mu_minus)


def conormal_identity_residuals(frame):
    """Residuals of the co-normal transport identities of an edge frame.

    Returns a dict of maximal absolute deviations:

    * ``mu_minus_to_plus``: ``|P_{n-->n+}(mu-) + mu+|``
    * ``mu_plus_to_minus``: ``|P_{n+->n-}(mu+) + mu-|``
    * ``tangent``: ``|P_{n+->n-}(t) - t|`` and the reverse
    * ``conormal_form``: general transport vs. co-normal form on ``mu-, t``
    """
    P_mp = lambda v: parallel_transport(frame.n_minus, frame.n_plus, v)  # noqa: E731
    P_pm = lambda v: parallel_transport(frame.n_plus, frame.n_minus, v)  # noqa: E731
    res = {
        "mu_minus_to_plus": np.max(np.abs(P_mp(frame.mu_minus) + frame.mu_plus)),
        "mu_plus_to_minus": np.max(np.abs(P_pm(frame.mu_plus) + frame.mu_minus)),
        "tangent": max(
            np.max(np.abs(P_pm(frame.t) - frame.t)), np.max(np.abs(P_mp(frame.t) - frame.t))
        ),
    }
    dev = 0.0
    for v in (frame.mu_minus, frame.t):
        dev = max(dev, np.max(np.abs(P_mp(v) - transport_minus_to_plus(frame, v))))
    for v in (frame.mu_plus, frame.t):
        dev = max(dev, np.max(np.abs(P_pm(v) - transport_plus_to_minus(frame, v))))
    res["conormal_form"] = dev
    return res
