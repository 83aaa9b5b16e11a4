"""Homogeneous point and line algebra.

Lines are stored as ``(m, n, l)`` with ``m*x + n*y + l = 0``. ``line_through``
returns lines scaled so that ``hypot(m, n) == 1`` and the first nonzero of
``(m, n)`` is positive, which makes the result independent of point order.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Sequence

from .errors import DegenerateLine, ParallelLines

EPS_DEGENERATE = 1e-9
EPS_PARALLEL = 1e-12


class Point2(NamedTuple):
    x: float
    y: float


class Line2H(NamedTuple):
    m: float
    n: float
    l: float


def line_through(p: Sequence[float], q: Sequence[float]) -> Line2H:
    px, py = float(p[0]), float(p[1])
    qx, qy = float(q[0]), float(q[1])
    if math.hypot(px - qx, py - qy) <= EPS_DEGENERATE:
        raise DegenerateLine(f"points ({px}, {py}) and ({qx}, {qy}) coincide")
    # (px, py, 1) x (qx, qy, 1); swapping p and q negates every term exactly
    m = py - qy
    n = qx - px
    l = px * qy - py * qx
    r = math.hypot(m, n)
    if m < 0.0 or (m == 0.0 and n < 0.0):
        r = -r
    # + 0.0 folds negative zeros
    return Line2H(m / r + 0.0, n / r + 0.0, l / r + 0.0)


def concurrency_det(l1: Sequence[float], l2: Sequence[float], l3: Sequence[float]) -> float:
    """Determinant of the stacked line coefficients.

    Zero iff the three lines meet in one point, possibly at infinity.
    """
    m1, n1, c1 = l1
    m2, n2, c2 = l2
    m3, n3, c3 = l3
    # expanded along the offset column: lines sharing (m, n) give exactly 0
    return c1 * (m2 * n3 - n2 * m3) + c2 * (n1 * m3 - m1 * n3) + c3 * (m1 * n2 - n1 * m2)


def lines_intersection(l1: Sequence[float], l2: Sequence[float]) -> Point2:
    a, b, c = l1
    d, e, f = l2
    w = a * e - b * d
    if abs(w) < EPS_PARALLEL:
        raise ParallelLines("lines are parallel")
    return Point2((b * f - c * e) / w, (c * d - a * f) / w)
