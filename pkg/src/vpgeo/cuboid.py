"""Projected 3D bounding boxes: vertex labeling, edge groups, faces and frames.

Labeling convention (every other module relies on it)::

        3 -------- 2          roof:   0 1 2 3
       /|         /|          bottom: 4 5 6 7, vertex i+4 below vertex i
      0 -------- 1 |
      | 7 -------|-6          F edges: 0-3 1-2 5-6 4-7  (vehicle length)
      |/         |/           S edges: 0-1 3-2 4-5 7-6  (vehicle width)
      4 -------- 5            R edges: 0-4 1-5 2-6 3-7  (vertical)

Face quads are named after the direction they face: Front holds the S and
vertical edges at the front end, Side holds the F and vertical edges.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateQuad, FrameError
from .projective import EPS_DEGENERATE


class Frame(str, enum.Enum):
    IMAGE = "image"
    ROI = "roi_relative"


class Direction(str, enum.Enum):
    F = "F"
    R = "R"
    S = "S"


class Face(str, enum.Enum):
    FRONT = "front"
    ROOF = "roof"
    SIDE = "side"


EDGES = {
    Direction.F: ((0, 3), (1, 2), (5, 6), (4, 7)),
    Direction.R: ((0, 4), (1, 5), (2, 6), (3, 7)),
    Direction.S: ((0, 1), (3, 2), (4, 5), (7, 6)),
}

FACES = {
    Face.ROOF: (0, 1, 2, 3),
    Face.FRONT: (0, 1, 5, 4),
    Face.SIDE: (1, 2, 6, 5),
}


@dataclass(frozen=True)
class Box2D:
    """Axis-aligned RoI, top-left corner plus size, in pixels."""

    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        vals = (self.x, self.y, self.w, self.h)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"non-finite box {vals}")
        if self.w <= 0 or self.h <= 0:
            raise ValueError(f"box must have positive size, got w={self.w}, h={self.h}")

    @classmethod
    def bounding(cls, points) -> "Box2D":
        pts = np.asarray(points, dtype=float)
        lo = pts.min(axis=0)
        hi = pts.max(axis=0)
        return cls(float(lo[0]), float(lo[1]), float(hi[0] - lo[0]), float(hi[1] - lo[1]))

    def as_list(self) -> list[float]:
        return [self.x, self.y, self.w, self.h]

    def contains(self, points, tol: float = 1e-9) -> bool:
        """Inclusive containment; ``tol`` absorbs rounding in ``x + w``."""
        pts = np.asarray(points, dtype=float)
        return bool(
            np.all(pts[:, 0] >= self.x - tol)
            and np.all(pts[:, 0] <= self.x + self.w + tol)
            and np.all(pts[:, 1] >= self.y - tol)
            and np.all(pts[:, 1] <= self.y + self.h + tol)
        )


class Cuboid2D:
    """Eight labeled image-plane vertices tagged with their coordinate frame."""

    __slots__ = ("vertices", "frame")

    def __init__(self, vertices, frame: Frame | str = Frame.IMAGE):
        v = np.array(vertices, dtype=np.float64).reshape(8, 2)
        if not np.all(np.isfinite(v)):
            raise ValueError("cuboid vertices must be finite")
        v.setflags(write=False)
        self.vertices = v
        self.frame = Frame(frame)

    def flat(self) -> np.ndarray:
        """The 16 coordinates, x then y per vertex."""
        return self.vertices.reshape(16).copy()

    def with_vertices(self, vertices) -> "Cuboid2D":
        return Cuboid2D(vertices, self.frame)

    def __eq__(self, other):
        if not isinstance(other, Cuboid2D):
            return NotImplemented
        return self.frame == other.frame and np.array_equal(self.vertices, other.vertices)

    def __repr__(self):
        return f"Cuboid2D(frame={self.frame.value!r}, vertices={self.vertices.tolist()!r})"


class DirectionGroup(NamedTuple):
    direction: Direction
    edges: tuple[tuple[int, int], ...]


class FaceQuad(NamedTuple):
    face: Face
    corners: np.ndarray  # (4, 2)


def direction_edges(direction: Direction | str) -> DirectionGroup:
    d = Direction(direction)
    return DirectionGroup(d, EDGES[d])


def face_quad(c: Cuboid2D, face: Face | str) -> FaceQuad:
    f = Face(face)
    corners = c.vertices[list(FACES[f])].copy()
    for i in range(4):
        for j in range(i + 1, 4):
            if math.hypot(*(corners[i] - corners[j])) <= EPS_DEGENERATE:
                raise DegenerateQuad(f"{f.value} face has coincident corners {FACES[f][i]} and {FACES[f][j]}")
    return FaceQuad(f, corners)


def to_roi_relative(c: Cuboid2D, b: Box2D) -> Cuboid2D:
    if c.frame is not Frame.IMAGE:
        raise FrameError("to_roi_relative expects an image-frame cuboid")
    v = c.vertices
    x = (v[:, 0] - b.x - b.w / 2) / b.w
    y = (v[:, 1] - b.y - b.h / 2) / b.h
    return Cuboid2D(np.stack([x, y], axis=1), Frame.ROI)


def from_roi_relative(c: Cuboid2D, b: Box2D) -> Cuboid2D:
    if c.frame is not Frame.ROI:
        raise FrameError("from_roi_relative expects a RoI-relative cuboid")
    v = c.vertices
    x = v[:, 0] * b.w + b.x + b.w / 2
    y = v[:, 1] * b.h + b.y + b.h / 2
    return Cuboid2D(np.stack([x, y], axis=1), Frame.IMAGE)
