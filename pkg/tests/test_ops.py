import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from osteoseg.errors import DegenerateContrastWarning, ParameterError
from osteoseg.image import GrayImage
from osteoseg import ops

import oracles


def small_images():
    return arrays(
        np.float64,
        st.tuples(st.integers(4, 16), st.integers(4, 16)),
        elements=st.floats(0.0, 1.0, width=16),
    ).map(GrayImage)


class TestGaussianBlur:
    def test_constant_stays_constant(self):
        img = GrayImage(np.full((20, 20), 0.5))
        out = ops.gaussian_blur(img, 1.7)
        assert np.allclose(out.pixels, 0.5, atol=1e-12)

    def test_single_pixel_matches_kernel_center(self):
        img = np.zeros((15, 15))
        img[7, 7] = 1.0
        out = ops.gaussian_blur(GrayImage(img), 1.0)
        k = ops.gaussian_kernel(1.0)
        assert len(k) == 7  # truncation at +-3 sigma
        assert out.pixels[7, 7] == pytest.approx(k[3] ** 2, rel=1e-12)

    def test_matches_direct_convolution(self):
        rng = np.random.default_rng(3)
        img = rng.random((12, 10))
        out = ops.gaussian_blur(GrayImage(img), 1.3)
        direct = oracles.gaussian_direct(img, 1.3)
        assert np.allclose(out.pixels, direct, atol=1e-10)

    def test_step_edge_monotone_and_conserving(self):
        img = np.zeros((9, 60))
        img[:, 30:] = 1.0
        out = ops.gaussian_blur(GrayImage(img), 2.0)
        profile = out.pixels[4]
        assert np.all(np.diff(profile) >= -1e-12)
        # mass conserved away from the borders
        assert profile[10:50].sum() == pytest.approx(img[4, 10:50].sum(), abs=1e-6)

    def test_rejects_bad_sigma(self):
        img = GrayImage(np.zeros((5, 5)))
        with pytest.raises(ParameterError):
            ops.gaussian_blur(img, 0.0)
        with pytest.raises(ParameterError):
            ops.gaussian_blur(img, -1.0)

    def test_preserves_dimensions(self):
        img = GrayImage(np.random.default_rng(0).random((11, 17)))
        assert ops.gaussian_blur(img, 2.5).shape == (11, 17)


class TestGammaCorrect:
    def test_identity(self):
        img = GrayImage(np.random.default_rng(1).random((8, 8)))
        assert np.array_equal(ops.gamma_correct(img, 1.0).pixels, img.pixels)

    def test_known_values(self):
        img = GrayImage(np.array([[0.25, 0.5]]))
        assert ops.gamma_correct(img, 0.5).pixels[0, 0] == pytest.approx(0.5)
        assert ops.gamma_correct(img, 2.0).pixels[0, 1] == pytest.approx(0.25)

    def test_rejects_nonpositive(self):
        with pytest.raises(ParameterError):
            ops.gamma_correct(GrayImage(np.zeros((2, 2))), 0.0)

    @settings(max_examples=30, deadline=None)
    @given(small_images(), st.floats(0.1, 5.0))
    def test_monotone(self, img, gamma):
        out = ops.gamma_correct(img, gamma)
        flat_in = img.pixels.ravel()
        flat_out = out.pixels.ravel()
        order = np.argsort(flat_in)
        assert np.all(np.diff(flat_out[order]) >= -1e-12)


class TestContrastStretch:
    def test_full_range_unchanged(self):
        img = GrayImage(np.linspace(0, 1, 64).reshape(8, 8))
        out = ops.contrast_stretch(img, 0, 100)
        assert np.allclose(out.pixels, img.pixels, atol=1e-12)

    def test_ramp_remap(self):
        ramp = np.linspace(0, 1, 101).reshape(1, -1)
        out = ops.contrast_stretch(GrayImage(ramp), 25, 75)
        expected = np.clip((ramp - 0.25) * 2.0, 0.0, 1.0)
        assert np.allclose(out.pixels, expected, atol=1e-9)

    def test_constant_collapses_with_warning(self):
        img = GrayImage(np.full((6, 6), 0.4))
        with pytest.warns(DegenerateContrastWarning):
            out = ops.contrast_stretch(img, 2, 98)
        assert np.all(out.pixels == 0.0)

    def test_rejects_inverted_percentiles(self):
        with pytest.raises(ParameterError):
            ops.contrast_stretch(GrayImage(np.zeros((3, 3))), 90, 10)

    @settings(max_examples=30, deadline=None)
    @given(small_images())
    def test_monotone(self, img):
        try:
            with np.errstate(all="ignore"):
                import warnings

                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    out = ops.contrast_stretch(img, 5, 95)
        except ParameterError:
            return
        flat_in = img.pixels.ravel()
        flat_out = out.pixels.ravel()
        order = np.argsort(flat_in)
        assert np.all(np.diff(flat_out[order]) >= -1e-12)


class TestSharpen:
    def test_zero_amount_identity(self):
        img = GrayImage(np.random.default_rng(2).random((9, 9)))
        assert np.array_equal(ops.sharpen(img, amount=0.0).pixels, img.pixels)

    def test_constant_unchanged(self):
        img = GrayImage(np.full((10, 10), 0.3))
        assert np.allclose(ops.sharpen(img, 2.0, 1.5).pixels, 0.3, atol=1e-12)

    def test_step_edge_over_and_undershoot(self):
        img = np.full((9, 40), 0.3)
        img[:, 20:] = 0.7
        out = ops.sharpen(GrayImage(img), amount=1.0, sigma=1.0)
        blurred = ops.gaussian_blur(GrayImage(img), 1.0)
        expected = np.clip(img + (img - blurred.pixels), 0.0, 1.0)
        assert np.allclose(out.pixels, expected, atol=1e-12)
        row = out.pixels[4]
        assert row[18] < 0.3 and row[21] > 0.7

    def test_rejects_bad_params(self):
        img = GrayImage(np.zeros((4, 4)))
        with pytest.raises(ParameterError):
            ops.sharpen(img, amount=-1.0)
        with pytest.raises(ParameterError):
            ops.sharpen(img, sigma=0.0)


class TestClahe:
    def test_constant_stays_constant(self):
        img = GrayImage(np.full((32, 32), 0.5))
        out = ops.clahe(img, 2.0, 4, 4)
        assert np.allclose(out.pixels, 0.5, atol=1 / 255 + 1e-9)

    def test_two_tone_single_tile_equalization(self):
        img = np.full((16, 16), 0.25)
        img[:8] = 0.75
        out = ops.clahe(GrayImage(img), clip_limit=1e9, tiles_x=1, tiles_y=1)
        # hand-computed 256-bin CDF: 0.25 -> 0.5 (bin 64), 0.75 -> 1.0 (bin 191)
        assert np.allclose(out.pixels[img == 0.25], 0.5, atol=1e-12)
        assert np.allclose(out.pixels[img == 0.75], 1.0, atol=1e-12)

    def test_unclipped_single_tile_matches_global_equalization(self):
        rng = np.random.default_rng(5)
        img = rng.random((24, 24))
        out = ops.clahe(GrayImage(img), clip_limit=1e9, tiles_x=1, tiles_y=1)
        assert np.allclose(out.pixels, oracles.equalize_global(img), atol=1e-12)

    def test_rejects_tiles_larger_than_image(self):
        with pytest.raises(ParameterError):
            ops.clahe(GrayImage(np.zeros((8, 8))), 2.0, 8, 8)

    def test_preserves_dimensions_and_range(self):
        rng = np.random.default_rng(6)
        img = GrayImage(rng.random((40, 56)))
        out = ops.clahe(img, 2.0, 8, 8)
        assert out.shape == (40, 56)
        assert out.pixels.min() >= 0.0 and out.pixels.max() <= 1.0
