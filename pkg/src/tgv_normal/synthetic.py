"""Synthetic test geometry: bumps on a flat base plate, closed into a box.

A bump is a *capsule*: the set of points within distance ``R`` of a
horizontal segment of length ``length`` lying on the plate, cut at the
plate.  ``length = 0`` gives a hemisphere; ``length > 0`` gives a
half-cylinder whose ends are quarter spheres.

Each grid cell is a square plate with one bump in its centre.  The bump
and two flat collar rings around it are meshed with structured rings that
are zipped together; the rest of the plate is a planar Delaunay
triangulation.  A wall strip and a coarse bottom close the box.
"""

import numpy as np
from scipy.spatial import Delaunay

from .mesh import build_topology, mean_edge_length

COLLAR_RINGS = 2


# --------------------------------------------------------------------------
# rings around a segment
# --------------------------------------------------------------------------

def _ring(center, half_len, radius, z, h, straight_x, min_arc):
    """Points of a stadium ring and their zipper parameters.

    The loop runs counter-clockwise seen from above: top straight part
    (x decreasing), left arc, bottom straight part, right arc.
    """
    cx, cy = center
    n_arc = max(min_arc, int(round(np.pi * radius / h)))
    ang_l = np.pi / 2 + np.pi * np.arange(1, n_arc) / n_arc
    ang_r = 3 * np.pi / 2 + np.pi * np.arange(1, n_arc) / n_arc
    xs_top = straight_x[::-1]
    xs_bot = straight_x
    ell = 2 * half_len
    pts, par = [], []
    for x in xs_top:
        pts.append((cx + x, cy + radius, z))
        par.append(half_len - x)
    for a in ang_l:
        pts.append((cx - half_len + radius * np.cos(a), cy + radius * np.sin(a), z))
        par.append(ell + (a - np.pi / 2))
    for x in xs_bot:
        pts.append((cx + x, cy - radius, z))
        par.append(ell + np.pi + (x + half_len))
    for a in ang_r:
        pts.append((cx + half_len + radius * np.cos(a), cy + radius * np.sin(a), z))
        par.append(2 * ell + np.pi + (a - 3 * np.pi / 2))
    return np.array(pts), np.array(par)


def _zipper(a_idx, a_par, b_idx, b_par, period):
    """Triangulate the band between two closed loops with sorted parameters."""
    na, nb = len(a_idx), len(b_idx)
    tris = []
    if na == 1:
        for j in range(nb):
            tris.append((a_idx[0], b_idx[j], b_idx[(j + 1) % nb]))
        return tris
    i = j = 0
    for _ in range(na + nb):
        an = a_par[(i + 1) % na] + period * ((i + 1) // na)
        bn = b_par[(j + 1) % nb] + period * ((j + 1) // nb)
        if i < na and (j >= nb or an <= bn):
            tris.append((a_idx[i % na], b_idx[j % nb], a_idx[(i + 1) % na]))
            i += 1
        else:
            tris.append((a_idx[i % na], b_idx[j % nb], b_idx[(j + 1) % nb]))
            j += 1
    return tris


def _bump(center, radius, length, h):
    """Structured mesh of a capsule bump plus flat collar rings.

    Returns ``(points, triangles, outer_ring_indices, outer_radius)``.
    """
    half = 0.5 * length
    n_straight = max(1, int(round(length / h))) if length > 0 else 0
    straight_x = (
        np.linspace(half, -half, n_straight + 1)[::-1] if length > 0 else np.array([0.0])
    )
    n_phi = max(2, int(round(0.5 * np.pi * radius / h)))
    min_arc = 2 if length == 0 else 1
    pts = []
    loops = []

    # ridge: the top line of the capsule (a point for a hemisphere)
    if length == 0:
        pts.append([[center[0], center[1], radius]])
        loops.append((np.array([0]), np.array([0.0])))
        count = 1
    else:
        ridge = np.column_stack([center[0] + straight_x, np.full_like(straight_x, center[1]),
                                 np.full_like(straight_x, radius)])
        pts.append(ridge)
        n = len(straight_x)
        # loop: top pass (x decreasing), bottom pass back (x increasing, interior)
        idx = np.concatenate([np.arange(n)[::-1], np.arange(1, n - 1)])
        par_top = half - straight_x[::-1]
        par_bot = 2 * half + np.pi + (straight_x[1:-1] + half)
        loops.append((idx, np.concatenate([par_top, par_bot])))
        count = n

    radii = []
    for j in range(1, n_phi + 1):
        phi = 0.5 * np.pi * j / n_phi
        radii.append((radius * np.sin(phi), radius * np.cos(phi)))
    for k in range(1, COLLAR_RINGS + 1):
        radii.append((radius + k * h, 0.0))
    for rho, z in radii:
        p, par = _ring(center, half, rho, z, h, straight_x, min_arc)
        if rho == radius:
            p[:, 2] = 0.0  # the equator lies exactly on the plate
        pts.append(p)
        loops.append((count + np.arange(len(p)), par))
        count += len(p)

    period = 2 * length + 2 * np.pi
    tris = []
    for (ai, ap), (bi, bp) in zip(loops[:-1], loops[1:]):
        tris += _zipper(ai, ap, bi, bp, period)
    return np.vstack(pts), np.array(tris), loops[-1][0], radius + COLLAR_RINGS * h


def _dist_to_segment(xy, center, half):
    dx = np.maximum(np.abs(xy[:, 0] - center[0]) - half, 0.0)
    dy = xy[:, 1] - center[1]
    return np.hypot(dx, dy)


def _side_points(p0, p1, spacing):
    n = max(1, int(np.ceil(np.linalg.norm(np.subtract(p1, p0)) / spacing - 1e-9)))
    t = np.linspace(0.0, 1.0, n + 1)
    return np.outer(1 - t, p0) + np.outer(t, p1)


def _cell(x0, y0, size, radius, length, h, side_spacing):
    """Top surface of one cell: bump + plate.  ``side_spacing`` gives the
    sample spacing of the (bottom, right, top, left) sides."""
    center = (x0 + 0.5 * size, y0 + 0.5 * size)
    bpts, btris, outer, r_out = _bump(center, radius, length, h)
    if 0.5 * length + r_out + 1.5 * h > 0.5 * size:
        raise ValueError("bump does not fit into its cell; enlarge the cell or shrink the radius")

    corners = [(x0, y0), (x0 + size, y0), (x0 + size, y0 + size), (x0, y0 + size)]
    side = []
    for s in range(4):
        side.append(_side_points(corners[s], corners[(s + 1) % 4], side_spacing[s])[:-1])
    boundary = np.vstack(side)

    n = max(2, int(round(size / h)))
    g = x0 + size * np.arange(1, n) / n
    gx, gy = np.meshgrid(g, y0 + size * np.arange(1, n) / n)
    grid = np.column_stack([gx.ravel(), gy.ravel()])
    grid = grid[_dist_to_segment(grid, center, 0.5 * length) >= r_out + 0.7 * h]

    ring_xy = bpts[outer, :2]
    plate_xy = np.vstack([ring_xy, boundary, grid])
    tri = Delaunay(plate_xy).simplices
    n_ring = len(ring_xy)
    tri = tri[~np.all(tri < n_ring, axis=1)]
    # Qhull may emit flat slivers along collinear boundary samples
    e1 = plate_xy[tri[:, 1]] - plate_xy[tri[:, 0]]
    e2 = plate_xy[tri[:, 2]] - plate_xy[tri[:, 0]]
    tri = tri[np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]) > 1e-9 * h * h]
    # every collar edge must survive, otherwise the hole is not sealed
    ring_edges = {tuple(sorted((i, (i + 1) % n_ring))) for i in range(n_ring)}
    present = set()
    for t in tri:
        for a, b in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
            if a < n_ring and b < n_ring:
                present.add(tuple(sorted((a, b))))
    if not ring_edges <= present:
        raise RuntimeError("plate triangulation does not respect the collar ring")

    plate_pts = np.column_stack([plate_xy, np.zeros(len(plate_xy))])
    # plate indices: ring points map back to the bump's outer ring
    offset = len(bpts)
    remap = np.concatenate([outer, offset + np.arange(len(plate_xy) - n_ring)])
    pts = np.vstack([bpts, plate_pts[n_ring:]])
    tris = np.vstack([btris, remap[tri]])
    return pts, tris


# --------------------------------------------------------------------------
# assembly
# --------------------------------------------------------------------------

def _merge(points, triangles, scale):
    key = np.round(points / (1e-9 * scale)).astype(np.int64)
    _, first, inverse = np.unique(key, axis=0, return_index=True, return_inverse=True)
    return points[first], inverse.ravel()[triangles]


def orient_consistently(triangles, vertices=None):
    """Flip triangles so that neighbours agree; then, if ``vertices`` is
    given, make the enclosed signed volume positive."""
    tris = np.array(triangles, dtype=np.int64)
    F = len(tris)
    edges = {}
    for f, t in enumerate(tris):
        for k in range(3):
            a, b = t[k], t[(k + 1) % 3]
            edges.setdefault((min(a, b), max(a, b)), []).append(f)
    flip = np.zeros(F, dtype=bool)
    seen = np.zeros(F, dtype=bool)
    for start in range(F):
        if seen[start]:
            continue
        seen[start] = True
        stack = [start]
        while stack:
            f = stack.pop()
            t = tris[f][::-1] if flip[f] else tris[f]
            for k in range(3):
                a, b = t[k], t[(k + 1) % 3]
                for g in edges[(min(a, b), max(a, b))]:
                    if g == f or seen[g]:
                        continue
                    u = tris[g]
                    same = any(u[m] == a and u[(m + 1) % 3] == b for m in range(3))
                    flip[g] = same  # neighbour must traverse b -> a
                    seen[g] = True
                    stack.append(g)
    tris[flip] = tris[flip][:, ::-1]
    if vertices is not None:
        P = vertices[tris]
        vol = np.einsum("fi,fi->f", P[:, 0], np.cross(P[:, 1], P[:, 2])).sum()
        if vol < 0:
            tris = tris[:, ::-1]
    return tris


def _walls_and_bottom(top_loop_xy, width, height, depth, spacing):
    """Wall strip and bottom for a rectangle ``[0, width] x [0, height]``.

    ``top_loop_xy`` are the boundary samples of the top (counter-clockwise
    from the origin).  Returns ``(points, triangles)`` where the first
    ``len(top_loop_xy)`` points are the top loop at ``z = 0``.
    """
    nx = max(1, int(round(width / spacing)))
    ny = max(1, int(round(height / spacing)))
    xs = np.linspace(0, width, nx + 1)
    ys = np.linspace(0, height, ny + 1)
    gx, gy = np.meshgrid(xs, ys)
    bottom = np.column_stack([gx.ravel(), gy.ravel(), np.full(gx.size, -depth)])
    idx = np.arange(gx.size).reshape(ny + 1, nx + 1)
    q = np.stack([idx[:-1, :-1], idx[:-1, 1:], idx[1:, 1:], idx[1:, :-1]], axis=-1).reshape(-1, 4)
    btris = np.vstack([q[:, [0, 1, 2]], q[:, [0, 2, 3]]])
    # bottom loop, counter-clockwise from the origin
    loop = np.concatenate([idx[0, :-1], idx[:-1, -1], idx[-1, :0:-1], idx[:0:-1, 0]])

    def perim(xy):
        x, y = xy[:, 0], xy[:, 1]
        on_b = np.isclose(y, 0) & ~np.isclose(x, 0)
        on_r = np.isclose(x, width) & ~np.isclose(y, 0)
        on_t = np.isclose(y, height) & ~np.isclose(x, width)
        return np.select(
            [on_b, on_r, on_t],
            [x, width + y, width + height + (width - x)],
            2 * width + height + (height - y),
        ) % (2 * (width + height))

    top_par = perim(top_loop_xy)
    order = np.argsort(top_par, kind="stable")
    n_top = len(top_loop_xy)
    top_pts = np.column_stack([top_loop_xy, np.zeros(n_top)])
    pts = np.vstack([top_pts, bottom])
    a_idx = order
    b_idx = n_top + loop
    wall = _zipper(a_idx, top_par[order], b_idx, perim(bottom[loop, :2]), 2 * (width + height))
    return pts, np.vstack([np.array(wall), n_top + btris])


def _grid_mesh(rows, cols, radii, resolutions, length, cell_size, depth, bottom_spacing):
    radii = np.broadcast_to(np.asarray(radii, dtype=float), (rows,))
    res = np.broadcast_to(np.asarray(resolutions, dtype=float), (cols,))
    if rows <= 0 or cols <= 0:
        raise ValueError("rows and cols must be positive")
    pts, tris, count = [], [], 0
    for r in range(rows):
        for c in range(cols):
            h = res[c]
            left = min(h, res[c - 1]) if c > 0 else h
            right = min(h, res[c + 1]) if c + 1 < cols else h
            sp = (h, right, h, left)
            p, t = _cell(c * cell_size, r * cell_size, cell_size, radii[r], length, h, sp)
            pts.append(p)
            tris.append(t + count)
            count += len(p)
    width, height = cols * cell_size, rows * cell_size
    P = np.vstack(pts)
    T = np.vstack(tris)
    # top boundary loop: plate points on the outer rectangle
    on_edge = (np.isclose(P[:, 2], 0) & (np.isclose(P[:, 0], 0) | np.isclose(P[:, 0], width)
               | np.isclose(P[:, 1], 0) | np.isclose(P[:, 1], height)))
    scale = max(width, height)
    key = np.round(P[on_edge, :2] / (1e-9 * scale)).astype(np.int64)
    _, first = np.unique(key, axis=0, return_index=True)
    loop_xy = P[on_edge][first, :2]
    wp, wt = _walls_and_bottom(loop_xy, width, height, depth, bottom_spacing)
    P = np.vstack([P, wp])
    T = np.vstack([T, wt + count])
    V, T = _merge(P, T, scale)
    T = orient_consistently(T, V)
    return build_topology(V, T)


def generate_hemisphere_grid(rows=1, cols=1, radii=0.12, resolutions=0.01, cell_size=None,
                             depth=None, bottom_spacing=None):
    """Grid of hemispheres on a flat base, closed into a box.

    Row ``r`` uses radius ``radii[r]``; column ``c`` uses target edge length
    ``resolutions[c]``.  Scalars broadcast.
    """
    rmax = float(np.max(radii))
    hmax = float(np.max(resolutions))
    cell = cell_size or 2 * (rmax + (COLLAR_RINGS + 3) * hmax)
    depth = depth or 2 * hmax
    return _grid_mesh(rows, cols, radii, resolutions, 0.0, cell, depth, bottom_spacing or 3 * hmax)


def generate_halfcylinder_grid(rows=1, cols=1, radii=0.12, resolutions=0.01, length=None,
                               cell_size=None, depth=None, bottom_spacing=None):
    """Grid of half-cylinders (axis along x, quarter-sphere ends) on a flat
    base, closed into a box."""
    rmax = float(np.max(radii))
    hmax = float(np.max(resolutions))
    length = 2.0 * rmax if length is None else float(length)
    cell = cell_size or length + 2 * (rmax + (COLLAR_RINGS + 3) * hmax)
    depth = depth or 2 * hmax
    return _grid_mesh(rows, cols, radii, resolutions, length, cell, depth, bottom_spacing or 3 * hmax)


def add_noise(mesh, sigma_factor, seed=0):
    """Add i.i.d. Gaussian noise with standard deviation ``sigma_factor``
    times the mean edge length to every vertex coordinate."""
    if sigma_factor < 0:
        raise ValueError("sigma_factor must be nonnegative")
    if sigma_factor == 0:
        return mesh.with_vertices(mesh.vertices.copy())
    rng = np.random.default_rng(seed)
    sigma = sigma_factor * mean_edge_length(mesh)
    return mesh.with_vertices(mesh.vertices + rng.normal(0.0, sigma, size=mesh.vertices.shape))
