"""Exception hierarchy shared by the geometry, warping and fusion modules."""


class GeometryError(ValueError):
    """Base class for numeric/degenerate configuration failures."""


class DegenerateLine(GeometryError):
    pass


class ParallelLines(GeometryError):
    pass


class DegenerateQuad(GeometryError):
    pass


class DegenerateConfiguration(GeometryError):
    pass


class BehindCamera(GeometryError):
    pass


class FrameError(ValueError):
    """A cuboid was passed in the wrong coordinate frame."""


class DimensionMismatch(ValueError):
    pass


class ZeroVector(ValueError):
    pass


class NoPositives(ValueError):
    pass
