"""Exception hierarchy."""


class TgvNormalError(Exception):
    """Base class for all errors raised by this package."""


class MeshError(TgvNormalError):
    pass


class NonManifoldEdge(MeshError):
    """An edge is not shared by exactly two triangles."""


class InconsistentOrientation(MeshError):
    """Two triangles traverse a shared edge in the same direction."""


class DegenerateTriangle(MeshError):
    """A triangle has (numerically) zero area."""


class AntipodalPoints(TgvNormalError, ValueError):
    """Two unit vectors are (nearly) antipodal; geodesics are not unique."""


class PointOutsideTriangle(TgvNormalError, ValueError):
    pass


class SizeMismatch(TgvNormalError, ValueError):
    pass


class CgNoConvergence(TgvNormalError, RuntimeError):
    """Conjugate gradients hit the iteration cap before reaching the tolerance."""


class LineSearchFailure(TgvNormalError, RuntimeError):
    pass


class ParseError(TgvNormalError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnsupportedFormat(TgvNormalError, ValueError):
    pass
