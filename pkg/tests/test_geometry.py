import numpy as np
import pytest

from jtm.errors import EmptyGridError
from jtm.geometry import (
    Plane,
    ViewAngles,
    ViewGrid,
    enumerate_views,
    identity_grid,
    project,
    rotate_point,
    rotate_sequence,
)
from jtm.skeleton import SkeletonSequence

from oracles import rotate_point_oracle


class TestRotatePoint:
    def test_identity_angles(self):
        rng = np.random.default_rng(1)
        for p in rng.normal(size=(50, 3)):
            out = rotate_point(p, ViewAngles(0.0, 0.0))
            assert np.max(np.abs(out - p)) < 1e-12

    def test_origin_fixed(self):
        out = rotate_point((0.0, 0.0, 0.0), ViewAngles(33.0, -71.0))
        assert np.max(np.abs(out)) < 1e-15

    def test_against_scalar_oracle(self):
        p = (1.0, 2.0, 3.0)
        expected = rotate_point_oracle(p, 30.0, -15.0)
        got = rotate_point(p, ViewAngles(30.0, -15.0))
        assert np.allclose(got, expected, rtol=1e-12, atol=0)

    def test_oracle_over_random_pairs(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            p = rng.normal(size=3) * 3
            th, ps = rng.uniform(-90, 90, size=2)
            got = rotate_point(p, ViewAngles(th, ps))
            exp = rotate_point_oracle(p, th, ps)
            assert np.allclose(got, exp, rtol=1e-9, atol=1e-12)

    def test_nonfinite_angles_rejected(self):
        with pytest.raises(ValueError):
            ViewAngles(float("nan"), 0.0)


class TestRotateSequence:
    def test_identity_returns_equal_sequence(self):
        rng = np.random.default_rng(3)
        seq = SkeletonSequence(rng.normal(size=(4, 5, 3)))
        out = rotate_sequence(seq, ViewAngles(0.0, 0.0))
        assert np.array_equal(out.data, seq.data)

    def test_single_joint_matches_rotate_point(self):
        seq = SkeletonSequence(np.array([[[0.3, -0.2, 2.0]]]))
        angles = ViewAngles(20.0, 35.0)
        out = rotate_sequence(seq, angles)
        assert np.allclose(out.data[0, 0], rotate_point((0.3, -0.2, 2.0), angles),
                           rtol=1e-12)

    def test_pointwise_oracle_on_random_sequence(self):
        rng = np.random.default_rng(4)
        seq = SkeletonSequence(rng.normal(size=(5, 7, 3)))
        angles = ViewAngles(15.0, 45.0)
        out = rotate_sequence(seq, angles)
        for i in range(5):
            for j in range(7):
                assert np.allclose(
                    out.data[i, j],
                    rotate_point(seq.data[i, j], angles),
                    rtol=1e-12, atol=1e-14,
                )

    def test_shape_and_finiteness_preserved(self):
        rng = np.random.default_rng(5)
        seq = SkeletonSequence(rng.normal(size=(6, 20, 3)) * 10)
        out = rotate_sequence(seq, ViewAngles(44.0, -44.0))
        assert out.data.shape == seq.data.shape
        assert np.isfinite(out.data).all()


class TestEnumerateViews:
    def test_default_grid_has_28_views(self):
        grid = enumerate_views()
        assert len(grid) == 28
        assert grid.views[0] == ViewAngles(0.0, -45.0)
        assert grid.views[-1] == ViewAngles(45.0, 45.0)

    def test_single_view_grid(self):
        grid = enumerate_views((0, 0), 15.0, (0, 0), 15.0)
        assert len(grid) == 1
        assert grid.views[0] == ViewAngles(0.0, 0.0)

    def test_coarse_grid_has_25_views(self):
        grid = enumerate_views((-45, 45), 22.5, (-45, 45), 22.5)
        assert len(grid) == 25

    def test_row_major_order_and_distinct(self):
        grid = enumerate_views((0, 30), 15.0, (0, 15), 15.0)
        pairs = [(v.theta, v.psi) for v in grid]
        assert pairs == [(0, 0), (0, 15), (15, 0), (15, 15), (30, 0), (30, 15)]
        assert len(set(pairs)) == len(pairs)

    def test_empty_range_rejected(self):
        with pytest.raises(EmptyGridError):
            enumerate_views((10, 0), 15.0, (0, 45), 15.0)

    def test_bad_step_rejected(self):
        with pytest.raises(ValueError):
            enumerate_views((0, 45), 0.0, (0, 45), 15.0)


class TestProject:
    @pytest.mark.parametrize(
        "plane,expected",
        [
            (Plane.FRONT, (1.0, 2.0)),
            (Plane.TOP, (1.0, 3.0)),
            (Plane.SIDE, (3.0, 2.0)),
        ],
    )
    def test_coordinate_drop(self, plane, expected):
        assert tuple(project((1.0, 2.0, 3.0), plane)) == expected

    def test_front_unchanged_by_z_offset(self):
        rng = np.random.default_rng(6)
        pts = rng.normal(size=(30, 3))
        shifted = pts + np.array([0.0, 0.0, 4.2])
        assert np.array_equal(project(pts, Plane.FRONT), project(shifted, Plane.FRONT))

    def test_array_projection_shape(self):
        pts = np.zeros((4, 6, 3))
        assert project(pts, Plane.TOP).shape == (4, 6, 2)


def test_grid_type_invariants():
    with pytest.raises(EmptyGridError):
        ViewGrid(())
    with pytest.raises(ValueError):
        ViewGrid((ViewAngles(0, 0), ViewAngles(0, 0)))
    assert len(identity_grid()) == 1
