"""Vanishing-point regularizer, smooth-L1 regression loss and their gradients.

All losses take RoI-relative cuboids and return a ``LossValue`` whose
gradient is laid out like ``Cuboid2D.flat()``: x0, y0, x1, y1, ..., y7.

For each direction group with ordered edges (e1, e2, e3, e4) the regularizer
adds ``det(e1, e2, e3)**2 + det(e1, e4, e3)**2`` over the unit-normalized
line coefficients. Derivatives are propagated through the normalization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cuboid import EDGES, Cuboid2D, Direction, Frame
from .errors import DegenerateLine, FrameError
from .projective import EPS_DEGENERATE

_DIRECTIONS = (Direction.F, Direction.R, Direction.S)
# edge k of direction d sits at row 4*d + k
_EDGE_A = np.array([e[0] for d in _DIRECTIONS for e in EDGES[d]])
_EDGE_B = np.array([e[1] for d in _DIRECTIONS for e in EDGES[d]])
# two triples per direction: (e1, e2, e3) and (e1, e4, e3)
_TRIPLES = np.array([[4 * d, 4 * d + k, 4 * d + 2] for d in range(3) for k in (1, 3)])
_ONEHOT = [np.eye(12)[_TRIPLES[:, j]].T for j in range(3)]  # (12, 6) each
_SCATTER = np.zeros((16, 48))
for _k in range(12):
    for _j, _ci in enumerate((2 * _EDGE_A[_k], 2 * _EDGE_A[_k] + 1, 2 * _EDGE_B[_k], 2 * _EDGE_B[_k] + 1)):
        _SCATTER[_ci, 4 * _k + _j] = 1.0


@dataclass(frozen=True)
class LossValue:
    value: float
    grad: np.ndarray

    def __add__(self, other: "LossValue") -> "LossValue":
        return LossValue(self.value + other.value, self.grad + other.grad)

    def scaled(self, k: float) -> "LossValue":
        return LossValue(k * self.value, k * self.grad)


@dataclass(frozen=True)
class LossWeights:
    """Multi-task weights for the 2D detector, 3D branch and classifier terms.

    Only the 3D branch term is computed in this package.
    """

    lambda1: float = 1.0
    lambda2: float = 0.1
    lambda3: float = 1.0

    def __post_init__(self):
        if min(self.lambda1, self.lambda2, self.lambda3) < 0:
            raise ValueError("loss weights must be non-negative")

    def total(self, l2d: float, l3d: float, lce: float) -> float:
        return self.lambda1 * l2d + self.lambda2 * l3d + self.lambda3 * lce


def _require_roi(c: Cuboid2D, what: str) -> None:
    if c.frame is not Frame.ROI:
        raise FrameError(f"{what} must be in the RoI-relative frame, got {c.frame.value}")


def _cross(a, b):
    return np.stack(
        [
            a[:, 1] * b[:, 2] - a[:, 2] * b[:, 1],
            a[:, 2] * b[:, 0] - a[:, 0] * b[:, 2],
            a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0],
        ],
        axis=1,
    )


def _evaluate(x, mask=None):
    """Determinants of the six triples and the gradient of sum(mask * D**2)."""
    v = np.asarray(x, dtype=np.float64).reshape(8, 2)
    px, py = v[_EDGE_A, 0], v[_EDGE_A, 1]
    qx, qy = v[_EDGE_B, 0], v[_EDGE_B, 1]
    m = py - qy
    n = qx - px
    r = np.hypot(m, n)
    if np.any(r <= EPS_DEGENERATE):
        k = int(np.flatnonzero(r <= EPS_DEGENERATE)[0])
        raise DegenerateLine(f"edge {_EDGE_A[k]}-{_EDGE_B[k]} has coincident endpoints")
    a = np.stack([m, n, px * qy - py * qx], axis=1)
    sr = np.where((m < 0) | ((m == 0) & (n < 0)), -1.0, 1.0) / r
    lines = a * sr[:, None]

    r1, r2, r3 = lines[_TRIPLES[:, 0]], lines[_TRIPLES[:, 1]], lines[_TRIPLES[:, 2]]
    c23 = _cross(r2, r3)
    # offset-column expansion keeps exactly parallel groups at exactly zero
    dets = r1[:, 2] * c23[:, 2] + r2[:, 2] * (r1[:, 1] * r3[:, 0] - r1[:, 0] * r3[:, 1]) + r3[:, 2] * (r1[:, 0] * r2[:, 1] - r1[:, 1] * r2[:, 0])
    w = 2.0 * dets if mask is None else 2.0 * dets * mask

    # reverse pass: rows -> lines -> raw coefficients -> endpoints
    g_lines = (
        _ONEHOT[0] @ (w[:, None] * c23)
        + _ONEHOT[1] @ (w[:, None] * _cross(r3, r1))
        + _ONEHOT[2] @ (w[:, None] * _cross(r1, r2))
    )
    # d(s*a/r)/da = (s/r) * (I - a (a0, a1, 0)^T / r^2)
    proj = np.einsum("ij,ij->i", a, g_lines) / (r * r)
    g0 = sr * (g_lines[:, 0] - a[:, 0] * proj)
    g1 = sr * (g_lines[:, 1] - a[:, 1] * proj)
    g2 = sr * g_lines[:, 2]
    g_ends = np.stack([-g1 + qy * g2, g0 - qx * g2, g1 - py * g2, -g0 + px * g2], axis=1)
    return dets, _SCATTER @ g_ends.ravel()


def determinants(c: Cuboid2D) -> dict[Direction, tuple[float, float]]:
    """The two concurrency determinants of each direction group."""
    dets, _ = _evaluate(c.vertices)
    return {d: (float(dets[2 * i]), float(dets[2 * i + 1])) for i, d in enumerate(_DIRECTIONS)}


def vp_loss_direction(c: Cuboid2D, direction: Direction | str) -> LossValue:
    _require_roi(c, "vp_loss_direction input")
    i = _DIRECTIONS.index(Direction(direction))
    mask = np.zeros(6)
    mask[2 * i : 2 * i + 2] = 1.0
    dets, grad = _evaluate(c.vertices, mask)
    d1, d2 = dets[2 * i], dets[2 * i + 1]
    return LossValue(float(d1 * d1 + d2 * d2), grad)


def vp_loss_flat(x) -> LossValue:
    """``vp_loss`` on a raw 16-vector, skipping frame checks (optimizer hot path)."""
    dets, grad = _evaluate(x)
    # per-direction sums first so the total matches summing vp_loss_direction
    sq = dets * dets
    value = 0.0
    for i in range(3):
        value += float(sq[2 * i] + sq[2 * i + 1])
    return LossValue(value, grad)


def vp_loss(c: Cuboid2D) -> LossValue:
    _require_roi(c, "vp_loss input")
    return vp_loss_flat(c.vertices)


def smooth_l1(pred, target) -> LossValue:
    """Mean smooth-L1 over coordinates, quadratic for |d| < 1."""
    p = np.asarray(pred.flat() if isinstance(pred, Cuboid2D) else pred, dtype=float).ravel()
    t = np.asarray(target.flat() if isinstance(target, Cuboid2D) else target, dtype=float).ravel()
    if p.shape != t.shape:
        raise ValueError(f"length mismatch: {p.size} vs {t.size}")
    d = p - t
    ad = np.abs(d)
    small = ad < 1.0
    phi = np.where(small, 0.5 * d * d, ad - 0.5)
    grad = np.where(small, d, np.sign(d)) / p.size
    return LossValue(float(phi.mean()), grad)


def loss_3dbranch(pred: Cuboid2D, target: Cuboid2D, vp_weight: float = 1.0) -> LossValue:
    """Regression loss of the 3D box branch: smooth-L1 to target plus VP term."""
    _require_roi(pred, "prediction")
    _require_roi(target, "target")
    return smooth_l1(pred, target) + vp_loss(pred).scaled(vp_weight)
