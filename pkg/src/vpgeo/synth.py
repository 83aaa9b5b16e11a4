"""Pinhole-camera scenes with exactly known projected cuboids.

World and camera frames share the image convention: x right, y down,
z forward. "Up" is therefore -y; the roof of a box is its minimum-y face
and yaw turns the box about the vertical (y) axis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .cuboid import Box2D, Cuboid2D, Frame, face_quad, FACES
from .errors import BehindCamera, GeometryError

EPS_DEPTH = 1e-6
IMAGE_SIZE = 256

# (forward, lateral) footprint of vertices 0..3; 4..7 repeat it on the floor
_FOOTPRINT = np.array([[0.5, -0.5], [0.5, 0.5], [-0.5, 0.5], [-0.5, -0.5]])


@dataclass(frozen=True)
class Camera:
    focal: float
    principal: tuple[float, float] = (0.0, 0.0)
    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        rot = np.asarray(self.rotation, dtype=float).reshape(3, 3)
        object.__setattr__(self, "rotation", rot)
        object.__setattr__(self, "translation", np.asarray(self.translation, dtype=float).reshape(3))
        object.__setattr__(self, "principal", (float(self.principal[0]), float(self.principal[1])))
        if not self.focal > 0:
            raise ValueError("focal length must be positive")
        if not np.allclose(rot.T @ rot, np.eye(3), rtol=0, atol=1e-12):
            raise ValueError("rotation is not orthonormal")

    def to_camera(self, pts: np.ndarray) -> np.ndarray:
        return pts @ self.rotation.T + self.translation

    def to_dict(self) -> dict:
        return {
            "focal": self.focal,
            "principal": list(self.principal),
            "rotation": self.rotation.tolist(),
            "translation": self.translation.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Camera":
        return cls(d["focal"], tuple(d["principal"]), np.array(d["rotation"]), np.array(d["translation"]))


@dataclass(frozen=True)
class Box3D:
    center: np.ndarray
    dims: np.ndarray  # length (F), width (S), height (R)
    yaw: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float).reshape(3))
        object.__setattr__(self, "dims", np.asarray(self.dims, dtype=float).reshape(3))
        if not np.all(self.dims > 0):
            raise ValueError("box dimensions must be positive")

    def axes(self) -> np.ndarray:
        """World unit vectors of the F, S and R directions (rows)."""
        c, s = np.cos(self.yaw), np.sin(self.yaw)
        return np.array([[c, 0.0, s], [-s, 0.0, c], [0.0, 1.0, 0.0]])

    def corners(self) -> np.ndarray:
        """The 8 labeled world vertices, shape (8, 3)."""
        length, width, height = self.dims
        fwd, lat, down = self.axes()
        out = np.empty((8, 3))
        for i, (a, b) in enumerate(_FOOTPRINT):
            horiz = self.center + a * length * fwd + b * width * lat
            out[i] = horiz - 0.5 * height * down
            out[i + 4] = horiz + 0.5 * height * down
        return out

    def to_dict(self) -> dict:
        return {"center": self.center.tolist(), "dims": self.dims.tolist(), "yaw": self.yaw}

    @classmethod
    def from_dict(cls, d: dict) -> "Box3D":
        return cls(np.array(d["center"]), np.array(d["dims"]), float(d["yaw"]))


class Scene(NamedTuple):
    box: Box3D
    camera: Camera
    cuboid: Cuboid2D
    bbox: Box2D


def project_points(pts: np.ndarray, cam: Camera) -> np.ndarray:
    pc = cam.to_camera(np.asarray(pts, dtype=float))
    if np.any(pc[:, 2] <= EPS_DEPTH):
        raise BehindCamera(f"point with depth {pc[:, 2].min():.6g} is behind the camera")
    cx, cy = cam.principal
    return np.stack([cam.focal * pc[:, 0] / pc[:, 2] + cx, cam.focal * pc[:, 1] / pc[:, 2] + cy], axis=1)


def project_cuboid(b: Box3D, cam: Camera) -> Cuboid2D:
    return Cuboid2D(project_points(b.corners(), cam), Frame.IMAGE)


def vanishing_points(b: Box3D, cam: Camera) -> np.ndarray:
    """Homogeneous image vanishing points of the F, S and R directions, (3, 3).

    Rows are unit-norm; a third coordinate of 0 marks a point at infinity.
    """
    dirs = b.axes() @ cam.rotation.T
    cx, cy = cam.principal
    vp = np.stack([cam.focal * dirs[:, 0] + cx * dirs[:, 2], cam.focal * dirs[:, 1] + cy * dirs[:, 2], dirs[:, 2]], axis=1)
    return vp / np.linalg.norm(vp, axis=1, keepdims=True)


def _rot_x(t: float) -> np.ndarray:
    c, s = np.cos(t), np.sin(t)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def _rot_z(t: float) -> np.ndarray:
    c, s = np.cos(t), np.sin(t)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _acceptable(cub: Cuboid2D) -> bool:
    v = cub.vertices
    if np.any(v < 0) or np.any(v > IMAGE_SIZE):
        return False
    box = Box2D.bounding(v) if np.ptp(v[:, 0]) > 0 and np.ptp(v[:, 1]) > 0 else None
    if box is None or box.w < 16 or box.h < 16:
        return False
    # every edge and face must stay clearly non-degenerate in pixels
    edges = [(i, j) for q in FACES.values() for i, j in zip(q, q[1:] + q[:1])]
    edges += [(3, 7), (2, 6)]
    if min(np.hypot(*(v[i] - v[j])) for i, j in edges) < 2.0:
        return False
    try:
        for f in FACES:
            face_quad(cub, f)
    except GeometryError:
        return False
    return True


def random_scene(seed: int) -> Scene:
    """Deterministic scene for ``seed``: box in front of a tilted camera, inside a 256x256 image."""
    rng = np.random.default_rng(seed)
    while True:
        focal = rng.uniform(150.0, 400.0)
        # surveillance-style camera: pitched down, slight roll
        rotation = _rot_z(rng.uniform(-0.1, 0.1)) @ _rot_x(-rng.uniform(0.05, 0.6))
        cam = Camera(focal, (IMAGE_SIZE / 2, IMAGE_SIZE / 2), rotation, np.zeros(3))
        depth = rng.uniform(4.0, 20.0)
        half = IMAGE_SIZE / 2 / focal * depth
        center_cam = np.array([rng.uniform(-0.6, 0.6) * half, rng.uniform(-0.6, 0.6) * half, depth])
        dims = np.array([rng.uniform(1.0, 3.0), rng.uniform(1.0, 2.0), rng.uniform(1.0, 2.0)])
        box = Box3D(rotation.T @ (center_cam - cam.translation), dims, rng.uniform(0.0, 2 * np.pi))
        try:
            cub = project_cuboid(box, cam)
        except BehindCamera:
            continue
        if _acceptable(cub):
            return Scene(box, cam, cub, Box2D.bounding(cub.vertices))


def perturb(c: Cuboid2D, sigma: float, seed: int) -> Cuboid2D:
    """Add i.i.d. N(0, sigma^2) noise to every coordinate (in the cuboid's own units)."""
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    if sigma == 0:
        return c
    noise = np.random.default_rng(seed).normal(0.0, sigma, size=(8, 2))
    return c.with_vertices(c.vertices + noise)
