import numpy as np
import pytest

from podvs.errors import DimensionError
from podvs.grouping import (
    BorderOwnershipField,
    bo_masks,
    border_ownership,
    center_surround,
    complex_edges,
    correlate,
    grouping_activity,
    grouping_pyramid,
    von_mises_filter,
    von_mises_sum,
)
from podvs.kernels import THETAS, build_banks
from podvs.pyramid import ImagePyramid, build_hw_pyramid, nn_shift_resample


@pytest.fixture(scope="module")
def banks5():
    return build_banks(5)


def interior(map_, margin):
    return map_[margin:-margin, margin:-margin]


def naive_correlate(map_, kern):
    """Zero-padded correlation as an explicit quadruple loop."""
    h, w = map_.shape
    k = kern.shape[0]
    half = k // 2
    out = np.zeros_like(map_, dtype=np.float64)
    for y in range(h):
        for x in range(w):
            acc = 0.0
            for dy in range(k):
                for dx in range(k):
                    yy, xx = y + dy - half, x + dx - half
                    if 0 <= yy < h and 0 <= xx < w:
                        acc += kern[dy, dx] * map_[yy, xx]
            out[y, x] = acc
    return out


class TestCorrelate:
    def test_matches_naive(self, banks5):
        rng = np.random.default_rng(21)
        for _ in range(5):
            m = rng.random((9, 11))
            for kern in (banks5.edge.even[1], banks5.vm.left[2], banks5.cs.on):
                np.testing.assert_allclose(
                    correlate(m, kern), naive_correlate(m, kern), atol=1e-12
                )


class TestComplexEdges:
    def test_constant_map_silent_interior(self, banks5):
        edges = complex_edges(np.full((20, 20), 50.0), banks5.edge)
        for e in edges:
            assert np.max(np.abs(interior(e, 3))) < 1e-9

    def test_vertical_step_prefers_vertical_orientation(self, banks5):
        m = np.zeros((21, 21))
        m[:, 11:] = 100.0
        edges = complex_edges(m, banks5.edge)
        ti = THETAS.index(np.pi / 2)
        col = 10
        responses = [e[10, col] for e in edges]
        assert int(np.argmax(responses)) == ti

    def test_horizontal_step_prefers_horizontal_orientation(self, banks5):
        m = np.zeros((21, 21))
        m[11:, :] = 100.0
        edges = complex_edges(m, banks5.edge)
        responses = [e[10, 10] for e in edges]
        assert int(np.argmax(responses)) == THETAS.index(0.0)

    def test_polarity_invariant(self, banks5):
        rng = np.random.default_rng(22)
        m = rng.uniform(0, 200, size=(16, 16))
        a = complex_edges(m, banks5.edge)
        b = complex_edges(200.0 - m, banks5.edge)
        for ea, eb in zip(a, b):
            np.testing.assert_allclose(interior(ea, 3), interior(eb, 3), atol=1e-9)

    def test_map_smaller_than_kernel_rejected(self, banks5):
        with pytest.raises(DimensionError):
            complex_edges(np.zeros((3, 3)), banks5.edge)


class TestCenterSurround:
    def test_constant_map_silent_interior(self, banks5):
        on, off = center_surround(np.full((16, 16), 80.0), banks5.cs)
        assert np.max(interior(on, 3)) < 1e-9
        assert np.max(interior(off, 3)) < 1e-9

    def test_bright_dot_drives_on(self, banks5):
        m = np.zeros((15, 15))
        m[7, 7] = 100.0
        on, off = center_surround(m, banks5.cs)
        assert on[7, 7] > 0
        assert off[7, 7] == 0.0
        np.testing.assert_allclose(on[7, 7], (banks5.cs.on[2, 2] * 100.0), atol=1e-9)

    def test_dark_dot_drives_off(self, banks5):
        m = np.full((15, 15), 100.0)
        m[7, 7] = 0.0
        on, off = center_surround(m, banks5.cs)
        assert off[7, 7] > 0
        assert on[7, 7] == 0.0

    def test_off_is_inverted_on(self, banks5):
        rng = np.random.default_rng(23)
        m = rng.random((12, 12)) * 50
        on, off = center_surround(m, banks5.cs)
        resp = correlate(m, banks5.cs.on)
        np.testing.assert_allclose(on - off, resp, atol=1e-12)
        assert np.all((on == 0) | (off == 0))


class TestVonMisesSum:
    def test_single_level_identity(self):
        level = np.random.default_rng(24).random((8, 8))
        out = von_mises_sum([level])
        np.testing.assert_array_equal(out[0], level)

    def test_zero_coarse_level_identity_on_fine(self):
        rng = np.random.default_rng(25)
        fine = rng.random((8, 8))
        out = von_mises_sum([fine, np.zeros((5, 5))])
        np.testing.assert_allclose(out[0], fine, atol=1e-15)

    def test_constant_levels_closed_form(self):
        levels = [np.full((8, 8), 1.0), np.full((6, 6), 2.0), np.full((4, 4), 4.0)]
        out = von_mises_sum(levels)
        # weight 2**-(k-j): level 0 gets 1 + 2/2 + 4/4, level 1 gets 2 + 4/2
        np.testing.assert_allclose(out[0], 3.0, atol=1e-12)
        np.testing.assert_allclose(out[1], 4.0, atol=1e-12)
        np.testing.assert_allclose(out[2], 4.0, atol=1e-12)

    def test_custom_upsampler(self):
        levels = [np.zeros((60, 80)), np.arange(44 * 56, dtype=float).reshape(44, 56)]
        out = von_mises_sum(levels, upsample=nn_shift_resample)
        expected = 0.5 * nn_shift_resample(levels[1], 60, 80)
        np.testing.assert_allclose(out[0], expected, atol=1e-12)


class TestBorderOwnership:
    def _run(self, map_, banks):
        pyr = ImagePyramid((map_,))
        edges = [complex_edges(map_, banks.edge)]
        on, off = center_surround(map_, banks.cs)
        vm = [von_mises_filter(on, off, banks.vm)]
        summed = [dict(vm[0])]
        return edges, summed

    def test_zero_center_surround_means_zero_ownership(self, banks5):
        m = np.zeros((12, 12))
        edges = [complex_edges(m, banks5.edge)]
        silent = {
            (ti, side, pol): np.zeros((12, 12))
            for ti in range(4)
            for side in ("left", "right")
            for pol in ("on", "off")
        }
        field = border_ownership(edges, [silent])
        for maps in (*field.left[0], *field.right[0]):
            assert np.all(maps == 0.0)

    def test_light_square_left_border_owned_rightward(self, banks5):
        m = np.zeros((24, 24))
        m[6:18, 8:20] = 100.0
        edges, summed = self._run(m, banks5)
        field = border_ownership(edges, summed)
        ti = THETAS.index(np.pi / 2)
        # on the square's left border the object lies to the right
        y, x = 12, 8
        assert field.right[0][ti][y, x] > field.left[0][ti][y, x]
        # and on the right border, to the left
        x = 19
        assert field.left[0][ti][y, x] > field.right[0][ti][y, x]

    def test_polarity_swap_preserves_sums(self, banks5):
        rng = np.random.default_rng(26)
        m = rng.uniform(0, 100, size=(16, 16))
        edges = [complex_edges(m, banks5.edge)]
        on, off = center_surround(m, banks5.cs)
        vm_a = [von_mises_filter(on, off, banks5.vm)]
        vm_b = [von_mises_filter(off, on, banks5.vm)]
        fa = border_ownership(edges, vm_a)
        fb = border_ownership(edges, vm_b)
        for ti in range(4):
            np.testing.assert_allclose(fa.left[0][ti], fb.left[0][ti], atol=1e-9)
            np.testing.assert_allclose(fa.right[0][ti], fb.right[0][ti], atol=1e-9)


class TestMasks:
    def test_tie_goes_left(self):
        b = np.full((5, 5), 2.0)
        field = BorderOwnershipField(((b,),), ((b.copy(),),))
        masks_left, masks_right = bo_masks(field)
        assert np.all(masks_left[0][0] == 1.0)
        assert np.all(masks_right[0][0] == 0.0)

    def test_zero_left_loses_except_zero_ties(self):
        left = np.zeros((4, 4))
        right = np.zeros((4, 4))
        right[1:, :] = 3.0
        field = BorderOwnershipField(((left,),), ((right,),))
        masks_left, masks_right = bo_masks(field)
        assert np.all(masks_right[0][0][1:, :] == 1.0)
        assert np.all(masks_left[0][0][0, :] == 1.0)  # 0 >= 0 tie

    def test_partition(self):
        rng = np.random.default_rng(27)
        field = BorderOwnershipField(
            tuple((rng.random((6, 6)),) for _ in range(2)),
            tuple((rng.random((6, 6)),) for _ in range(2)),
        )
        masks_left, masks_right = bo_masks(field)
        for lvl in range(2):
            np.testing.assert_array_equal(
                masks_left[lvl][0] + masks_right[lvl][0], np.ones((6, 6))
            )


class TestGroupingActivity:
    def _field(self, rng, shape=(14, 14), levels=1):
        left = tuple(tuple(rng.random(shape) for _ in THETAS) for _ in range(levels))
        right = tuple(tuple(rng.random(shape) for _ in THETAS) for _ in range(levels))
        return BorderOwnershipField(left, right)

    def test_zero_field_zero_grouping(self, banks5):
        z = tuple((np.zeros((8, 8)),) * 4 for _ in range(1))
        field = BorderOwnershipField(z, z)
        out = grouping_activity(bo_masks(field), field, banks5.vm, w_p=1.0)
        assert np.all(out[0] == 0.0)

    def test_wp_zero_drops_inhibition(self, banks5):
        rng = np.random.default_rng(28)
        field = self._field(rng)
        masks = bo_masks(field)
        out = grouping_activity(masks, field, banks5.vm, w_p=0.0)
        masks_left, masks_right = masks
        expected = np.zeros((14, 14))
        for ti in range(4):
            expected += correlate(masks_left[0][ti] * field.left[0][ti], banks5.vm.right[ti])
            expected += correlate(masks_right[0][ti] * field.right[0][ti], banks5.vm.left[ti])
        np.testing.assert_allclose(out[0], np.maximum(expected, 0.0), atol=1e-12)

    def test_positive_scaling_covariance(self, banks5):
        rng = np.random.default_rng(29)
        field = self._field(rng)
        scaled = BorderOwnershipField(
            tuple(tuple(3.0 * b for b in lvl) for lvl in field.left),
            tuple(tuple(3.0 * b for b in lvl) for lvl in field.right),
        )
        a = grouping_activity(bo_masks(field), field, banks5.vm, w_p=1.0)
        b = grouping_activity(bo_masks(scaled), scaled, banks5.vm, w_p=1.0)
        np.testing.assert_allclose(b[0], 3.0 * a[0], atol=1e-9)

    def test_losing_side_contributes_only_inhibition(self, banks5):
        # where the left mask wins everywhere, the right response enters
        # only through the subtracted w_p term
        rng = np.random.default_rng(30)
        bl = rng.random((10, 10)) + 2.0
        br = rng.random((10, 10))  # strictly smaller
        field = BorderOwnershipField(((bl,) * 4,), ((br,) * 4,))
        masks = bo_masks(field)
        out_low = grouping_activity(masks, field, banks5.vm, w_p=0.0)[0]
        out_high = grouping_activity(masks, field, banks5.vm, w_p=1.0)[0]
        assert np.all(out_high <= out_low + 1e-12)


class TestGroupingPyramid:
    def test_isolated_square_peaks_inside(self, banks5):
        m = np.zeros((60, 80))
        m[22:38, 30:46] = 120.0
        pyr = ImagePyramid((m,))
        out = grouping_pyramid(pyr, banks5, w_p=1.0)
        y, x = np.unravel_index(np.argmax(out[0]), out[0].shape)
        assert 22 <= y < 38
        assert 30 <= x < 46

    def test_polarity_invariance_interior(self, banks5):
        rng = np.random.default_rng(31)
        m = rng.uniform(0, 120, size=(60, 80))
        pyr_a = build_hw_pyramid(m)
        pyr_b = build_hw_pyramid(120.0 - m)
        out_a = grouping_pyramid(pyr_a, banks5, 1.0, nn_shift_resample)
        out_b = grouping_pyramid(pyr_b, banks5, 1.0, nn_shift_resample)
        margin = 8
        for a, b in zip(out_a, out_b):
            np.testing.assert_allclose(
                interior(a, margin), interior(b, margin), atol=1e-6
            )
