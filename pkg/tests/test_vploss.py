import numpy as np
import pytest

from conftest import central_diff, perturbed_roi, rel_err, roi_of
from vpgeo.cuboid import Box2D, Cuboid2D, Direction, Frame, direction_edges, to_roi_relative
from vpgeo.errors import DegenerateLine, FrameError
from vpgeo.projective import concurrency_det, line_through
from vpgeo.synth import random_scene
from vpgeo.vploss import LossWeights, determinants, loss_3dbranch, smooth_l1, vp_loss, vp_loss_direction, vp_loss_flat


def vp_value(x):
    return vp_loss_flat(x).value


def reference_vp(c):
    """Loss rebuilt from the scalar projective primitives."""
    v = c.vertices
    total = 0.0
    for d in Direction:
        e = direction_edges(d).edges
        lines = [line_through(v[a], v[b]) for a, b in e]
        total += concurrency_det(lines[0], lines[1], lines[2]) ** 2 + concurrency_det(lines[0], lines[3], lines[2]) ** 2
    return total


def s0_roi(s0):
    return to_roi_relative(s0, Box2D.bounding(s0.vertices))


def test_perfect_projection_is_zero(s0):
    c = s0_roi(s0)
    for d in Direction:
        assert vp_loss_direction(c, d).value <= 1e-12
    lv = vp_loss(c)
    assert lv.value <= 1e-12
    assert np.abs(lv.grad).max() <= 1e-6


def test_parallel_prism_exactly_zero(prism):
    assert vp_loss(prism).value == 0.0


def test_matches_scalar_primitives():
    for seed in range(20):
        c = perturbed_roi(seed)
        assert vp_loss(c).value == pytest.approx(reference_vp(c), rel=1e-12, abs=1e-20)
        dets = determinants(c)
        lines = [line_through(*c.vertices[list(e)]) for e in direction_edges("F").edges]
        assert dets[Direction.F][0] == pytest.approx(concurrency_det(lines[0], lines[1], lines[2]), abs=1e-15)


def test_s0_perturbed_vertex1(s0):
    c = s0_roi(s0)
    v = c.vertices.copy()
    v[1] += [0.02, 0.0]
    c = c.with_vertices(v)
    lv = vp_loss(c)
    assert lv.value > 0
    assert rel_err(lv.grad, central_diff(vp_value, c.flat())) <= 1e-6
    for d in Direction:
        part = vp_loss_direction(c, d)
        fd = central_diff(lambda x: vp_loss_direction(Cuboid2D(x, Frame.ROI), d).value, c.flat())
        if part.value > 0:
            assert rel_err(part.grad, fd) <= 1e-6
        else:
            assert np.abs(part.grad).max() <= 1e-12 and np.abs(fd).max() <= 1e-12


def test_total_is_sum_of_directions():
    for seed in range(10):
        c = perturbed_roi(seed)
        parts = [vp_loss_direction(c, d) for d in Direction]
        total = vp_loss(c)
        assert total.value == parts[0].value + parts[1].value + parts[2].value
        assert np.allclose(total.grad, sum(p.grad for p in parts), rtol=1e-13, atol=1e-15)


def test_gradient_random_cuboids():
    for seed in range(100):
        c = perturbed_roi(seed)
        assert rel_err(vp_loss(c).grad, central_diff(vp_value, c.flat())) <= 1e-6


def test_non_negative_and_zero_iff_determinants_vanish():
    for seed in range(30):
        c = perturbed_roi(seed, sigma=0.01)
        assert vp_loss(c).value > 0
        assert any(abs(d) > 1e-12 for pair in determinants(c).values() for d in pair)
        exact = roi_of(random_scene(seed))
        assert all(abs(d) <= 1e-12 for pair in determinants(exact).values() for d in pair)


def test_translation_invariance():
    rng = np.random.default_rng(3)
    for seed in range(30):
        c = perturbed_roi(seed)
        moved = c.with_vertices(c.vertices + rng.uniform(-2, 2, size=2))
        assert vp_loss(moved).value == pytest.approx(vp_loss(c).value, abs=1e-10)


# label permutations that fix a direction's e1, e3 and exchange e2 with e4
SWAP_D1_D2 = {
    Direction.F: [0, 4, 7, 3, 1, 5, 6, 2],
    Direction.R: [0, 3, 2, 1, 4, 7, 6, 5],
    Direction.S: [4, 5, 6, 7, 0, 1, 2, 3],
}


@pytest.mark.parametrize("direction", list(Direction))
def test_triple_exchange(direction):
    perm = SWAP_D1_D2[direction]
    for seed in range(10):
        c = perturbed_roi(seed)
        relabeled = c.with_vertices(c.vertices[perm])
        d1, d2 = determinants(c)[direction]
        e1, e2 = determinants(relabeled)[direction]
        assert abs(e1) == pytest.approx(abs(d2), rel=1e-12)
        assert abs(e2) == pytest.approx(abs(d1), rel=1e-12)
        assert vp_loss_direction(relabeled, direction).value == pytest.approx(vp_loss_direction(c, direction).value, rel=1e-12)


def test_degenerate_edge():
    v = np.random.default_rng(0).normal(size=(8, 2))
    v[3] = v[0]
    with pytest.raises(DegenerateLine):
        vp_loss(Cuboid2D(v, Frame.ROI))


def test_image_frame_rejected(s0):
    with pytest.raises(FrameError):
        vp_loss(s0)
    with pytest.raises(FrameError):
        loss_3dbranch(s0, s0)


def test_smooth_l1_closed_forms():
    z = np.zeros(16)
    lv = smooth_l1(z, z)
    assert lv.value == 0.0 and not lv.grad.any()
    p = z.copy()
    p[5] = 0.5
    assert smooth_l1(p, z).value == 0.0078125
    p[5] = 2.0
    lv = smooth_l1(p, z)
    assert lv.value == 0.09375
    assert lv.grad[5] == 1 / 16
    assert np.count_nonzero(lv.grad) == 1
    p[5] = -2.0
    assert smooth_l1(p, z).grad[5] == -1 / 16


def test_smooth_l1_gradient():
    rng = np.random.default_rng(1)
    t = rng.normal(size=16)
    x = t + rng.uniform(-3, 3, size=16)
    x[np.abs(x - t) - 1 < 1e-3] += 0.01  # keep clear of the kink
    assert rel_err(smooth_l1(x, t).grad, central_diff(lambda y: smooth_l1(y, t).value, x)) <= 1e-8


def test_branch_loss():
    for seed in range(20):
        gt = roi_of(random_scene(seed))
        assert loss_3dbranch(gt, gt).value <= 1e-12
        pred = perturbed_roi(seed)
        total = loss_3dbranch(pred, gt)
        assert total.value > 0
        assert total.value == smooth_l1(pred, gt).value + vp_loss(pred).value
        fd = central_diff(lambda x: loss_3dbranch(Cuboid2D(x, Frame.ROI), gt).value, pred.flat())
        assert rel_err(total.grad, fd) <= 1e-6


def test_loss_weights():
    w = LossWeights()
    assert (w.lambda1, w.lambda2, w.lambda3) == (1.0, 0.1, 1.0)
    assert w.total(2.0, 10.0, 3.0) == pytest.approx(6.0)
    with pytest.raises(ValueError):
        LossWeights(lambda2=-1)
