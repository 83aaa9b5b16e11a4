from collections import Counter

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from vpgeo.cuboid import (
    FACES,
    Box2D,
    Cuboid2D,
    Direction,
    Face,
    Frame,
    direction_edges,
    face_quad,
    from_roi_relative,
    to_roi_relative,
)
from vpgeo.errors import DegenerateQuad, FrameError

CUBE_EDGES = {
    frozenset(e)
    for e in [(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4), (0, 4), (1, 5), (2, 6), (3, 7)]
}


def test_direction_groups():
    assert direction_edges("F").edges == ((0, 3), (1, 2), (5, 6), (4, 7))
    assert direction_edges(Direction.R).edges == ((0, 4), (1, 5), (2, 6), (3, 7))
    assert direction_edges("S").edges == ((0, 1), (3, 2), (4, 5), (7, 6))


def test_groups_partition_cube_edges():
    all_edges = [frozenset(e) for d in Direction for e in direction_edges(d).edges]
    assert len(all_edges) == 12
    assert set(all_edges) == CUBE_EDGES
    degree = Counter(v for e in all_edges for v in e)
    assert all(degree[v] == 3 for v in range(8))
    for d in Direction:
        ends = [v for e in direction_edges(d).edges for v in e]
        assert sorted(ends) == list(range(8))


def test_face_indices(s0):
    assert np.array_equal(face_quad(s0, Face.ROOF).corners, s0.vertices[[0, 1, 2, 3]])
    assert np.array_equal(face_quad(s0, "front").corners, s0.vertices[[0, 1, 5, 4]])
    # three mutually adjacent faces share one corner and miss the opposite one
    membership = Counter(v for idx in FACES.values() for v in idx)
    assert membership[1] == 3
    assert membership[7] == 0
    assert all(membership[v] in (1, 2) for v in (0, 2, 3, 4, 5, 6))


def test_face_faces_its_direction():
    # front quad holds S and vertical edges, side quad holds F and vertical edges
    group_of = {frozenset(e): d for d in Direction for e in direction_edges(d).edges}
    for face, expected in [(Face.FRONT, {Direction.S, Direction.R}), (Face.SIDE, {Direction.F, Direction.R}), (Face.ROOF, {Direction.F, Direction.S})]:
        idx = FACES[face]
        dirs = {group_of[frozenset((idx[k], idx[(k + 1) % 4]))] for k in range(4)}
        assert dirs == expected


def test_s0_side_face(s0):
    # hand projection x' = f X / Z with f = 100, X, Y = +-0.5, Z = 5.5
    k = 100 * 0.5 / 5.5
    expected = np.array([[k, -k], [-k, -k], [-k, k], [k, k]])
    assert np.allclose(face_quad(s0, "side").corners, expected, atol=1e-12)


def test_degenerate_front():
    v = np.arange(16, dtype=float).reshape(8, 2)
    v[1] = v[0]
    with pytest.raises(DegenerateQuad):
        face_quad(Cuboid2D(v), "front")
    face_quad(Cuboid2D(v), "side")  # vertex 0 is not on the side face


def test_roi_transform_fixtures():
    b = Box2D(10, 20, 100, 50)
    c = Cuboid2D(np.tile([[60.0, 45.0]], (8, 1)))
    assert np.allclose(to_roi_relative(c, b).vertices, 0.0)
    c = Cuboid2D(np.tile([[10.0, 20.0]], (8, 1)))
    assert np.allclose(to_roi_relative(c, b).vertices, -0.5)
    back = from_roi_relative(Cuboid2D(np.zeros((8, 2)), Frame.ROI), b)
    assert np.allclose(back.vertices, [60, 45])
    corner = from_roi_relative(Cuboid2D(np.full((8, 2), -0.5), Frame.ROI), b)
    assert np.allclose(corner.vertices, [10, 20])


def test_frame_checks():
    b = Box2D(0, 0, 1, 1)
    with pytest.raises(FrameError):
        from_roi_relative(Cuboid2D(np.zeros((8, 2)), Frame.IMAGE), b)
    with pytest.raises(FrameError):
        to_roi_relative(Cuboid2D(np.zeros((8, 2)), Frame.ROI), b)
    with pytest.raises(ValueError):
        Box2D(0, 0, 0, 1)


finite = st.floats(-1e4, 1e4, allow_nan=False)


@given(
    arrays(np.float64, (8, 2), elements=finite),
    finite,
    finite,
    st.floats(1e-6, 1e4),
    st.floats(1e-6, 1e4),
)
def test_round_trip(v, bx, by, bw, bh):
    b = Box2D(bx, by, bw, bh)
    c = Cuboid2D(v)
    back = from_roi_relative(to_roi_relative(c, b), b)
    assert back.frame is Frame.IMAGE
    scale = max(1.0, np.abs(v).max(), abs(bx), abs(by), bw, bh)
    assert np.allclose(back.vertices, v, rtol=0, atol=1e-12 * scale)


@given(arrays(np.float64, (8, 2), elements=st.floats(0, 1)))
def test_inside_box_maps_to_unit_square(u):
    b = Box2D(-3.0, 7.0, 20.0, 5.0)
    c = Cuboid2D(u * [b.w, b.h] + [b.x, b.y])
    r = to_roi_relative(c, b).vertices
    assert np.all(r >= -0.5 - 1e-12) and np.all(r <= 0.5 + 1e-12)
