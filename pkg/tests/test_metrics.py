import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import diffganpaint as dgp
from diffganpaint.imaging import Image, Mask
from diffganpaint.metrics import masked_mse, mean_fill, psnr
from diffganpaint.rng import Rng


def random_image(seed, c=3, h=16, w=16):
    u = Rng(seed).uniform(c * h * w).astype(np.float32).reshape(c, h, w)
    return Image(u * 2.0 - 1.0)


def const_image(value, c=3, h=16, w=16):
    return Image(np.full((c, h, w), value, np.float32))


def half_mask(h=16, w=16):
    grid = np.zeros((1, h, w), np.float32)
    grid[:, :, :w // 2] = 1.0
    return Mask(grid)


class TestPsnr:
    def test_identical_images_capped(self):
        img = random_image(1)
        assert psnr(img, img) == 99.0

    def test_constant_difference_closed_form(self):
        # 0.1 offset on the [0,1] scale is 0.2 on the [-1,1] scale
        a = const_image(0.0)
        b = const_image(0.2)
        assert psnr(a, b) == pytest.approx(20.0, abs=1e-4)

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 5000))
    def test_symmetry(self, seed):
        a, b = random_image(seed), random_image(seed + 1)
        assert psnr(a, b) == psnr(b, a)

    def test_dim_mismatch_rejected(self):
        with pytest.raises(ValueError, match="psnr"):
            psnr(random_image(1), random_image(2, h=8, w=8))

    def test_tiny_mse_still_capped(self):
        a = const_image(0.0)
        b = Image(np.full((3, 16, 16), 1e-7, np.float32))
        assert psnr(a, b) == 99.0


class TestMaskedMse:
    def test_full_mask_equals_plain_mse(self):
        a, b = random_image(3), random_image(4)
        full = Mask(np.ones((1, 16, 16), np.float32))
        plain = float(np.mean((a.values.astype(np.float64)
                               - b.values.astype(np.float64)) ** 2))
        assert masked_mse(a, b, full) == pytest.approx(plain, rel=1e-6)

    def test_identical_images_zero(self):
        img = random_image(5)
        assert masked_mse(img, img, half_mask()) == 0.0

    def test_half_mask_unit_difference(self):
        assert masked_mse(const_image(1.0), const_image(0.0), half_mask()) == 1.0

    def test_empty_mask_rejected(self):
        empty = Mask(np.zeros((1, 16, 16), np.float32))
        with pytest.raises(ValueError, match="empty mask region"):
            masked_mse(random_image(1), random_image(2), empty)

    def test_only_hole_pixels_count(self):
        a = random_image(6)
        b_vals = a.values.copy()
        b_vals[:, :, 8:] = np.clip(b_vals[:, :, 8:] + 0.5, -1, 1)  # damage known side
        assert masked_mse(a, Image(b_vals), half_mask()) == 0.0


class TestMeanFill:
    def test_known_region_untouched(self):
        img = random_image(7)
        mask = half_mask()
        out = mean_fill(img, mask)
        known = mask.values[0] == 0.0
        assert np.array_equal(out.values[:, known], img.values[:, known])

    def test_holes_get_per_channel_known_mean(self):
        img = random_image(8)
        mask = half_mask()
        out = mean_fill(img, mask)
        for c in range(3):
            expected = img.values[c, :, 8:].mean(dtype=np.float64)
            assert np.allclose(out.values[c, :, :8], np.float32(expected))

    def test_all_hole_mask_falls_back_to_gray(self):
        img = random_image(9)
        full = Mask(np.ones((1, 16, 16), np.float32))
        assert not mean_fill(img, full).values.any()

    def test_beats_nothing_on_constant_image(self):
        img = const_image(0.5)
        mask = half_mask()
        assert masked_mse(mean_fill(img, mask), img, mask) == 0.0


class TestAgainstBruteForce:
    def test_masked_mse_matches_loop_oracle(self):
        a, b = random_image(10), random_image(11)
        mask = dgp.gen_mask_bernoulli(Rng(12), 16, 16, 0.4)
        total, count = 0.0, 0
        for c in range(3):
            for y in range(16):
                for x in range(16):
                    if mask.values[0, y, x] == 1.0:
                        d = float(a.values[c, y, x]) - float(b.values[c, y, x])
                        total += d * d
                        count += 1
        assert masked_mse(a, b, mask) == pytest.approx(total / count, rel=1e-6)
