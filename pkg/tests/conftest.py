import numpy as np
import pytest

from vpgeo.cuboid import Cuboid2D, Frame, to_roi_relative
from vpgeo.synth import Box3D, Camera, perturb, project_cuboid, random_scene


def central_diff(fn, x, h=1e-6):
    """Central finite-difference gradient of a scalar function of a flat vector."""
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (fn(x + e) - fn(x - e)) / (2 * h)
    return g


def rel_err(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(a), np.linalg.norm(b), 1e-300)


def roi_of(scene):
    return to_roi_relative(scene.cuboid, scene.bbox)


def perturbed_roi(seed, sigma=0.05):
    return perturb(roi_of(random_scene(seed)), sigma, seed + 10_000)


@pytest.fixture
def s0_camera():
    return Camera(100.0)


@pytest.fixture
def s0_box():
    return Box3D([0.0, 0.0, 5.0], [1.0, 1.0, 1.0], 0.0)


@pytest.fixture
def s0(s0_box, s0_camera):
    return project_cuboid(s0_box, s0_camera)


@pytest.fixture
def prism():
    """Orthographic-looking drawing: every direction group is exactly parallel in 2D."""
    roof = np.array([[0.0, 0.0], [3.0, 1.0], [1.0, 2.0], [-2.0, 1.0]])
    return Cuboid2D(np.vstack([roof, roof + [0.0, 2.0]]), Frame.ROI)
