import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from vpgeo.errors import DegenerateLine, ParallelLines
from vpgeo.projective import Line2H, concurrency_det, line_through, lines_intersection

coord = st.floats(-50, 50, allow_nan=False)
point = st.tuples(coord, coord)


def leibniz_det(rows):
    total = 0.0
    for perm in itertools.permutations(range(3)):
        inversions = sum(perm[i] > perm[j] for i in range(3) for j in range(i + 1, 3))
        total += (-1) ** inversions * math.prod(rows[i][perm[i]] for i in range(3))
    return total


def test_axes():
    assert line_through((0, 0), (1, 0)) == Line2H(0.0, 1.0, 0.0)
    assert line_through((0, 0), (0, 1)) == Line2H(1.0, 0.0, 0.0)


def test_general_line_matches_cross_product():
    ln = line_through((1, 1), (3, 2))
    ref = np.cross([1, 1, 1], [3, 2, 1]).astype(float)
    ref /= np.hypot(ref[0], ref[1])
    # canonical sign flips the raw cross product (-1, 2, -1)
    assert np.allclose(ln, -ref, rtol=0, atol=1e-15)
    for x, y in [(1, 1), (3, 2)]:
        assert abs(ln.m * x + ln.n * y + ln.l) <= 1e-12
    assert ln.m > 0


def test_coincident_points():
    with pytest.raises(DegenerateLine):
        line_through((1.0, 2.0), (1.0, 2.0 + 1e-10))


@given(point, point)
def test_order_independent_and_normalized(p, q):
    if math.hypot(p[0] - q[0], p[1] - q[1]) <= 1e-6:
        return
    a = line_through(p, q)
    assert a == line_through(q, p)
    assert math.hypot(a.m, a.n) == pytest.approx(1.0, abs=1e-15)
    assert a.m > 0 or (a.m == 0 and a.n > 0)
    scale = max(1.0, *map(abs, p + q))
    for x, y in (p, q):
        assert abs(a.m * x + a.n * y + a.l) <= 1e-12 * scale


def test_det_fixtures():
    pencil = [line_through((2, 3), (2 + math.cos(t), 3 + math.sin(t))) for t in (0.3, 1.1, 2.5)]
    assert abs(concurrency_det(*pencil)) <= 1e-12
    parallel = [Line2H(0.6, 0.8, l) for l in (-1.0, 0.5, 3.0)]
    assert concurrency_det(*parallel) == 0.0
    rows = [(1, 0, 0), (0, 1, 0), (1, 1, -1)]
    assert leibniz_det(rows) == -1
    assert concurrency_det(*rows) == -1


def test_det_unit_rows_against_leibniz():
    rows = [line_through((0, 0), (0, 1)), line_through((0, 0), (1, 0)), line_through((1, 0), (0, 1))]
    # x=0, y=0 and x+y=1 after normalization
    assert concurrency_det(*rows) == pytest.approx(leibniz_det(rows), abs=1e-15)
    assert abs(concurrency_det(*rows)) == pytest.approx(1 / math.sqrt(2), abs=1e-15)


@given(st.lists(st.tuples(coord, coord, coord), min_size=3, max_size=3))
def test_det_antisymmetric(rows):
    d = concurrency_det(*rows)
    tol = 1e-9 * max(1.0, max(abs(v) for r in rows for v in r)) ** 3
    assert concurrency_det(rows[1], rows[0], rows[2]) == pytest.approx(-d, abs=tol)
    assert concurrency_det(rows[0], rows[2], rows[1]) == pytest.approx(-d, abs=tol)
    assert d == pytest.approx(leibniz_det(rows), abs=tol)


@given(point, st.lists(st.floats(0, math.pi), min_size=3, max_size=3, unique=True), point)
def test_pencil_stays_concurrent_under_translation(center, angles, shift):
    if min(abs(a - b) for a, b in itertools.combinations(angles, 2)) < 1e-3:
        return
    def lines(off):
        cx, cy = center[0] + off[0], center[1] + off[1]
        return [line_through((cx, cy), (cx + 10 * math.cos(t), cy + 10 * math.sin(t))) for t in angles]
    scale = 1 + max(map(abs, center + shift))
    assert abs(concurrency_det(*lines((0, 0)))) <= 1e-12 * scale
    assert abs(concurrency_det(*lines(shift))) <= 1e-12 * scale


@given(point, point, point, point, point, point)
def test_abs_det_ignores_endpoint_order(a, b, c, d, e, f):
    pairs = [(a, b), (c, d), (e, f)]
    if any(math.hypot(p[0] - q[0], p[1] - q[1]) < 1e-6 for p, q in pairs):
        return
    fwd = [line_through(p, q) for p, q in pairs]
    rev = [line_through(q, p) for p, q in pairs]
    assert abs(concurrency_det(*fwd)) == abs(concurrency_det(*rev))


def test_intersections():
    assert lines_intersection(Line2H(1, 0, 0), Line2H(0, 1, 0)) == (0.0, 0.0)
    with pytest.raises(ParallelLines):
        lines_intersection(Line2H(0, 1, 0), Line2H(0, 1, -1))
    l1, l2 = Line2H(1, 1, -1), Line2H(1, -1, 0)
    ref = np.linalg.solve([[1, 1], [1, -1]], [1, 0])
    p = lines_intersection(l1, l2)
    assert np.allclose(p, ref, atol=1e-15)
    assert p == pytest.approx((0.5, 0.5))
    for ln in (l1, l2):
        assert abs(ln.m * p.x + ln.n * p.y + ln.l) <= 1e-9
