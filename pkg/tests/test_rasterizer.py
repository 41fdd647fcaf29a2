import numpy as np
import pytest

from jtm.encoding import EncodingParams, Level
from jtm.errors import TooShortError
from jtm.geometry import Plane, ViewAngles, enumerate_views, identity_grid
from jtm.rasterizer import (
    JtmCanvas,
    NormalizationBox,
    RenderOptions,
    draw_segment,
    footprint,
    line_pixels,
    render_all,
    render_jtm,
    view_file_name,
    world_to_pixel,
)
from jtm.skeleton import SkeletonSequence
from jtm.synthetic import bundled_sample, gen_circle_cw

from oracles import line_pixels_oracle


class TestWorldToPixel:
    def test_box_min_corner(self):
        box = NormalizationBox(0.0, 1.0, 0.0, 1.0, margin=0.05)
        px, py = world_to_pixel((0.0, 0.0), box, 256, 256)
        margin_px = 0.05 * 256
        assert abs(px - margin_px) <= 1
        assert abs(py - (255 - margin_px)) <= 1

    def test_box_center_maps_to_canvas_center(self):
        box = NormalizationBox(-2.0, 4.0, 1.0, 9.0, margin=0.05)
        px, py = world_to_pixel((1.0, 5.0), box, 256, 256)
        assert abs(px - 127.5) <= 1
        assert abs(py - 127.5) <= 1

    def test_points_inside_box_land_inside_canvas(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            lo = rng.normal(size=2)
            hi = lo + rng.uniform(0.01, 5.0, size=2)
            box = NormalizationBox(lo[0], hi[0], lo[1], hi[1])
            p = rng.uniform(lo, hi)
            px, py = world_to_pixel(p, box, 256, 256)
            assert 0 <= px < 256
            assert 0 <= py < 256

    def test_y_axis_flipped(self):
        box = NormalizationBox(0.0, 1.0, 0.0, 1.0)
        _, py_low = world_to_pixel((0.5, 0.0), box, 64, 64)
        _, py_high = world_to_pixel((0.5, 1.0), box, 64, 64)
        assert py_high < py_low

    def test_degenerate_box(self):
        box = NormalizationBox(2.0, 2.0, 3.0, 3.0)
        px, py = world_to_pixel((2.0, 3.0), box, 64, 64)
        assert 0 <= px < 64 and 0 <= py < 64


class TestDrawSegment:
    def test_zero_length_paints_one_pixel(self):
        canvas = JtmCanvas.blank(16, 16, Plane.FRONT)
        draw_segment(canvas, (5, 5), (5, 5), (1.0, 0.0, 0.0))
        assert footprint(canvas) == {(5, 5)}

    def test_horizontal_line(self):
        canvas = JtmCanvas.blank(16, 16, Plane.FRONT)
        draw_segment(canvas, (2, 5), (9, 5), (0.0, 0.0, 0.0))
        assert footprint(canvas) == {(x, 5) for x in range(2, 10)}

    def test_known_diagonal_against_oracle(self):
        got = {tuple(p) for p in line_pixels(0, 0, 5, 3)}
        assert got == line_pixels_oracle(0, 0, 5, 3)

    def test_random_segments_match_rational_oracle(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            x0, y0, x1, y1 = rng.integers(0, 256, size=4)
            got = {tuple(p) for p in line_pixels(x0, y0, x1, y1)}
            assert got == line_pixels_oracle(int(x0), int(y0), int(x1), int(y1))

    def test_overwrite_semantics(self):
        canvas = JtmCanvas.blank(8, 8, Plane.FRONT)
        draw_segment(canvas, (0, 0), (7, 0), (1.0, 0.0, 0.0))
        draw_segment(canvas, (0, 0), (7, 0), (0.0, 1.0, 0.0))
        assert np.array_equal(canvas.pixels[0, 3], (0.0, 1.0, 0.0))

    def test_thickness_widens_footprint(self):
        thin = JtmCanvas.blank(16, 16, Plane.FRONT)
        thick = JtmCanvas.blank(16, 16, Plane.FRONT)
        draw_segment(thin, (2, 8), (13, 8), (0, 0, 0), thickness=1)
        draw_segment(thick, (2, 8), (13, 8), (0, 0, 0), thickness=3)
        assert len(footprint(thick)) > len(footprint(thin))


def one_joint_sweep(n=30):
    data = np.zeros((n, 1, 3))
    data[:, 0, 0] = np.linspace(0.0, 1.0, n)
    data[:, 0, 1] = 0.5
    data[:, 0, 2] = 2.0
    return SkeletonSequence(data)


class TestRenderJtm:
    def test_too_short(self):
        with pytest.raises(TooShortError):
            render_jtm(SkeletonSequence(np.zeros((1, 1, 3))), Plane.FRONT)

    def test_uniform_sweep_hue_monotone_left_to_right(self):
        from jtm.encoding import JET

        canvas = render_jtm(
            one_joint_sweep(),
            Plane.FRONT,
            params=EncodingParams(level=Level.HUE),
            options=RenderOptions(width=64, height=64),
        )
        jet_idx = {tuple(np.floor(e * 255 + 0.5).astype(int)): i
                   for i, e in enumerate(JET.entries)}
        cols = []
        img = canvas.to_8bit()
        for x in range(64):
            column = [tuple(img[y, x]) for y in range(64)
                      if tuple(img[y, x]) != (255, 255, 255)]
            if column:
                cols.append(max(jet_idx[c] for c in column))
        assert len(cols) > 10
        assert all(a <= b for a, b in zip(cols, cols[1:]))

    def test_static_sequence_renders_dots(self):
        rng = np.random.default_rng(2)
        frame = rng.normal(size=(1, 5, 3))
        seq = SkeletonSequence(np.tile(frame, (4, 1, 1)))
        params = EncodingParams(s_min=0.3, b_min=0.5, level=Level.FULL)
        canvas = render_jtm(seq, Plane.FRONT, params=params,
                            options=RenderOptions(width=64, height=64))
        fp = footprint(canvas)
        assert 1 <= len(fp) <= 5  # dots (coincident projections may merge)

    def test_direction_pair_footprints_equal_colors_differ(self):
        cw = SkeletonSequence(gen_circle_cw(24))
        ccw = cw.reversed()
        opts = RenderOptions(width=64, height=64)
        raw = EncodingParams(level=Level.RAW)
        hue = EncodingParams(level=Level.HUE)
        cw_raw = render_jtm(cw, Plane.FRONT, params=raw, options=opts)
        ccw_raw = render_jtm(ccw, Plane.FRONT, params=raw, options=opts)
        assert footprint(cw_raw) == footprint(ccw_raw)
        cw_hue = render_jtm(cw, Plane.FRONT, params=hue, options=opts)
        ccw_hue = render_jtm(ccw, Plane.FRONT, params=hue, options=opts)
        assert footprint(cw_hue) == footprint(ccw_hue)
        assert not np.array_equal(cw_hue.to_8bit(), ccw_hue.to_8bit())

    def test_determinism_byte_identical(self):
        seq = bundled_sample(n=20)
        a = render_jtm(seq, Plane.SIDE).to_png_bytes()
        b = render_jtm(seq, Plane.SIDE).to_png_bytes()
        assert a == b

    def test_translation_invariance(self):
        seq = bundled_sample(n=20)
        moved = seq.translated((0.5, -0.2, 1.0))
        for plane in Plane:
            assert (
                render_jtm(seq, plane).to_png_bytes()
                == render_jtm(moved, plane).to_png_bytes()
            )

    def test_plane_consistency_under_axis_offsets(self):
        seq = bundled_sample(n=15)
        cases = [
            (Plane.FRONT, (0.0, 0.0, 3.0)),
            (Plane.TOP, (0.0, 3.0, 0.0)),
            (Plane.SIDE, (3.0, 0.0, 0.0)),
        ]
        for plane, offset in cases:
            assert (
                render_jtm(seq, plane).to_png_bytes()
                == render_jtm(seq.translated(offset), plane).to_png_bytes()
            )

    def test_footprint_reversal_invariance(self):
        seq = bundled_sample(n=18)
        for level in (Level.RAW, Level.HUE, Level.FULL):
            params = EncodingParams(level=level)
            a = render_jtm(seq, Plane.FRONT, params=params)
            b = render_jtm(seq.reversed(), Plane.FRONT, params=params)
            assert footprint(a) == footprint(b)


class TestRenderAll:
    def test_default_grid_canvas_count(self):
        seq = one_joint_sweep(n=5)
        out = render_all(seq, enumerate_views(),
                         options=RenderOptions(width=16, height=16))
        total = sum(len(planes) for planes in out.values())
        assert len(out) == 28
        assert total == 84

    def test_identity_grid_matches_render_jtm(self):
        seq = bundled_sample(n=12)
        opts = RenderOptions(width=32, height=32)
        out = render_all(seq, identity_grid(), options=opts)
        view = ViewAngles(0.0, 0.0)
        for plane in Plane:
            direct = render_jtm(seq, plane, view, options=opts)
            assert np.array_equal(out[view][plane].pixels, direct.pixels)

    def test_thread_count_does_not_change_output(self):
        seq = bundled_sample(n=12)
        opts = RenderOptions(width=32, height=32)
        grid = enumerate_views((0, 15), 15.0, (0, 15), 15.0)
        a = render_all(seq, grid, options=opts, threads=1)
        b = render_all(seq, grid, options=opts, threads=8)
        for view in grid:
            for plane in Plane:
                assert a[view][plane].to_png_bytes() == b[view][plane].to_png_bytes()


class TestFootprint:
    def test_blank_canvas(self):
        assert footprint(JtmCanvas.blank(8, 8, Plane.TOP)) == set()

    def test_full_scan_oracle(self):
        canvas = render_jtm(bundled_sample(n=10), Plane.FRONT,
                            options=RenderOptions(width=48, height=48))
        fp = footprint(canvas)
        count = 0
        for y in range(48):
            for x in range(48):
                if tuple(canvas.pixels[y, x]) != (1.0, 1.0, 1.0):
                    count += 1
                    assert (x, y) in fp
        assert count == len(fp)


def test_view_file_name():
    assert (
        view_file_name("s01", ViewAngles(15.0, -30.0), Plane.TOP)
        == "s01__t15_p-30__top.png"
    )
