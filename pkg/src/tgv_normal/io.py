"""ASCII Wavefront OBJ and OFF reading and writing (triangles only)."""

import os

import numpy as np

from .errors import ParseError, UnsupportedFormat
from .mesh import build_topology

_FORMATS = {".obj": "obj", ".off": "off"}


def _format_of(path):
    ext = os.path.splitext(str(path))[1].lower()
    try:
        return _FORMATS[ext]
    except KeyError:
        raise UnsupportedFormat(
            f"unsupported mesh format {ext or '(no extension)'!r}; use .obj or .off"
        ) from None


def _floats(tokens, lineno, what):
    try:
        return [float(t) for t in tokens]
    except ValueError:
        raise ParseError(f"malformed {what}", lineno) from None


def _parse_obj(lines):
    verts, faces = [], []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] == "v":
            if len(tok) < 4:
                raise ParseError("vertex needs three coordinates", lineno)
            verts.append(_floats(tok[1:4], lineno, "vertex"))
        elif tok[0] == "f":
            if len(tok) != 4:
                raise ParseError("non-triangular face", lineno)
            idx = []
            for t in tok[1:]:
                try:
                    i = int(t.split("/", 1)[0])
                except ValueError:
                    raise ParseError(f"malformed face index {t!r}", lineno) from None
                # negative indices count back from the latest vertex
                i = i - 1 if i > 0 else len(verts) + i
                if not 0 <= i < len(verts):
                    raise ParseError(f"face index {t} out of range", lineno)
                idx.append(i)
            faces.append(idx)
        # vn, vt, g, o, s, usemtl, mtllib ... are ignored
    return verts, faces


def _parse_off(lines):
    body = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            body.append((lineno, line))
    if not body or not body[0][1].startswith("OFF"):
        raise ParseError("missing OFF header", body[0][0] if body else 1)
    pos = 0
    lineno, header = body[0]
    rest = header[3:].split()
    if not rest:
        pos = 1
        if len(body) < 2:
            raise ParseError("missing element counts", lineno)
        lineno, counts = body[1]
        rest = counts.split()
    try:
        nv, nf = int(rest[0]), int(rest[1])
    except (ValueError, IndexError):
        raise ParseError("malformed element counts", lineno) from None
    pos += 1
    if len(body) < pos + nv + nf:
        raise ParseError("file ends before all elements were read", body[-1][0])
    verts = []
    for lineno, line in body[pos:pos + nv]:
        tok = line.split()
        if len(tok) < 3:
            raise ParseError("vertex needs three coordinates", lineno)
        verts.append(_floats(tok[:3], lineno, "vertex"))
    faces = []
    for lineno, line in body[pos + nv:pos + nv + nf]:
        tok = line.split()
        try:
            k = int(tok[0])
            idx = [int(t) for t in tok[1:1 + k]]
        except (ValueError, IndexError):
            raise ParseError("malformed face", lineno) from None
        if k != 3 or len(idx) != 3:
            raise ParseError("non-triangular face", lineno)
        if min(idx) < 0 or max(idx) >= nv:
            raise ParseError("face index out of range", lineno)
        faces.append(idx)
    return verts, faces


def read_arrays(path):
    """``(vertices, triangles)`` arrays from an OBJ or OFF file."""
    fmt = _format_of(path)
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    verts, faces = (_parse_obj if fmt == "obj" else _parse_off)(lines)
    if not faces:
        raise ParseError("no faces", len(lines))
    return np.array(verts, dtype=np.float64).reshape(-1, 3), np.array(faces, dtype=np.int64)


def load_mesh(path):
    """Load a closed triangle mesh; see :func:`tgv_normal.mesh.build_topology`."""
    return build_topology(*read_arrays(path))


def save_mesh(mesh, path):
    """Write vertices with 17 significant digits (exact round trip)."""
    fmt = _format_of(path)
    V, T = mesh.vertices, mesh.triangles
    with open(path, "w", encoding="utf-8") as fh:
        if fmt == "obj":
            fh.writelines("v %.17g %.17g %.17g\n" % tuple(v) for v in V)
            fh.writelines("f %d %d %d\n" % tuple(t + 1) for t in T)
        else:
            fh.write(f"OFF\n{len(V)} {len(T)} 0\n")
            fh.writelines("%.17g %.17g %.17g\n" % tuple(v) for v in V)
            fh.writelines("3 %d %d %d\n" % tuple(t) for t in T)
