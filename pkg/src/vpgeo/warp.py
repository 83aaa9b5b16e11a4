"""Four-point homographies and feature extraction from quadrilateral regions.

Feature maps are ``(H, W, C)`` float64 arrays. Pixel ``(i, j)`` covers
``[j, j+1) x [i, i+1)`` so its center sits at ``(j + 0.5, i + 0.5)``.
Sampling points inside ``[0, W] x [0, H]`` are interpolated from the nearest
pixel centers (taps clamped to the border); points outside read as zero.
"""

from __future__ import annotations

import itertools

import numpy as np

from .cuboid import Box2D, FaceQuad
from .errors import DegenerateConfiguration

EPS_COLLINEAR = 1e-9
EPS_SINGULAR = 1e-12
DEFAULT_FACE_SIZE = (7, 7)


def _as_corners(pts) -> np.ndarray:
    if isinstance(pts, FaceQuad):
        pts = pts.corners
    a = np.asarray(pts, dtype=np.float64)
    if a.shape != (4, 2):
        raise ValueError(f"expected 4 corners, got shape {a.shape}")
    return a


def _check_no_collinear(pts: np.ndarray, name: str) -> None:
    for i, j, k in itertools.combinations(range(4), 3):
        u = pts[j] - pts[i]
        v = pts[k] - pts[i]
        if abs(u[0] * v[1] - u[1] * v[0]) / 2 <= EPS_COLLINEAR:
            raise DegenerateConfiguration(f"{name} corners {i}, {j}, {k} are collinear")


def dlt_homography(dst_corners, src_quad) -> np.ndarray:
    """Homography H with ``src ~ H @ (dst, 1)`` for four correspondences, ``H[2, 2] == 1``.

    ``dst_corners`` are the target-grid corners and ``src_quad`` the region
    in the source map, so H drives backward warping.
    """
    t = _as_corners(dst_corners)
    q = _as_corners(src_quad)
    _check_no_collinear(t, "target")
    _check_no_collinear(q, "source")
    a = np.zeros((8, 8))
    b = np.zeros(8)
    for i in range(4):
        tx, ty = t[i]
        qx, qy = q[i]
        a[2 * i] = [tx, ty, 1, 0, 0, 0, -tx * qx, -ty * qx]
        a[2 * i + 1] = [0, 0, 0, tx, ty, 1, -tx * qy, -ty * qy]
        b[2 * i] = qx
        b[2 * i + 1] = qy
    try:
        h = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise DegenerateConfiguration(f"singular DLT system: {exc}") from None
    hm = np.append(h, 1.0).reshape(3, 3)
    if not np.all(np.isfinite(hm)) or abs(np.linalg.det(hm)) <= EPS_SINGULAR:
        raise DegenerateConfiguration("homography is not invertible")
    return hm


def apply_homography(hm: np.ndarray, pts) -> np.ndarray:
    p = np.asarray(pts, dtype=np.float64).reshape(-1, 2)
    ph = p @ hm[:, :2].T + hm[:, 2]
    return ph[:, :2] / ph[:, 2:3]


def _sample(f: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Bilinear samples at arrays of points, shape ``xs.shape + (C,)``."""
    h, w, c = f.shape
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    inside = (xs >= 0) & (xs <= w) & (ys >= 0) & (ys <= h)
    u = np.clip(xs - 0.5, 0.0, w - 1.0)
    v = np.clip(ys - 0.5, 0.0, h - 1.0)
    x0 = np.floor(u).astype(np.intp)
    y0 = np.floor(v).astype(np.intp)
    fx = (u - x0)[..., None]
    fy = (v - y0)[..., None]
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    top = f[y0, x0] * (1 - fx) + f[y0, x1] * fx
    bottom = f[y1, x0] * (1 - fx) + f[y1, x1] * fx
    out = top * (1 - fy) + bottom * fy
    return np.where(inside[..., None], out, 0.0)


def bilinear_sample(f: np.ndarray, x: float, y: float, channel: int = 0) -> float:
    return float(_sample(f, np.array(x), np.array(y))[channel])


def _grid(out_h: int, out_w: int):
    if out_h < 1 or out_w < 1:
        raise ValueError("output size must be at least 1x1")
    jj, ii = np.meshgrid(np.arange(out_w) + 0.5, np.arange(out_h) + 0.5)
    return jj, ii


def perspective_roi(f: np.ndarray, quad, out_h: int = DEFAULT_FACE_SIZE[0], out_w: int = DEFAULT_FACE_SIZE[1]) -> np.ndarray:
    """Warp the quadrilateral ``quad`` of ``f`` onto an ``out_h x out_w`` grid.

    Corner k of ``quad`` lands on target corner k of
    ``(0, 0), (out_w, 0), (out_w, out_h), (0, out_h)``.
    """
    jj, ii = _grid(out_h, out_w)
    target = [(0.0, 0.0), (out_w, 0.0), (out_w, out_h), (0.0, out_h)]
    hm = dlt_homography(target, quad)
    src = apply_homography(hm, np.stack([jj.ravel(), ii.ravel()], axis=1))
    return _sample(f, src[:, 0], src[:, 1]).reshape(out_h, out_w, f.shape[2])


def roi_align(f: np.ndarray, box: Box2D, out_h: int = DEFAULT_FACE_SIZE[0], out_w: int = DEFAULT_FACE_SIZE[1]) -> np.ndarray:
    """Axis-aligned RoI pooling with one bilinear sample per output cell."""
    jj, ii = _grid(out_h, out_w)
    xs = box.x + jj * (box.w / out_w)
    ys = box.y + ii * (box.h / out_h)
    return _sample(f, xs, ys)


def box_quad(box: Box2D) -> np.ndarray:
    """The box corners in the order ``perspective_roi`` expects."""
    x0, y0 = box.x, box.y
    x1, y1 = box.x + box.w, box.y + box.h
    return np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]])
