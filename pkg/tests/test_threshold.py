import numpy as np
import pytest

from osteoseg.errors import DegenerateInputError
from osteoseg.image import GrayImage
from osteoseg.threshold import multi_otsu, otsu_threshold

import oracles
from phantoms import tri_level


class TestOtsu:
    def test_bimodal(self):
        img = np.full((10, 10), 0.2)
        img[5:] = 0.8
        t, mask = otsu_threshold(GrayImage(img))
        assert 0.2 <= t < 0.8
        assert np.array_equal(mask.bits, img == 0.8)

    def test_trilevel_matches_brute_force(self):
        img = tri_level()
        t, _ = otsu_threshold(img)
        assert round(t * 255) == oracles.otsu_brute_force(img.pixels)

    def test_constant_raises(self):
        with pytest.raises(DegenerateInputError):
            otsu_threshold(GrayImage(np.full((6, 6), 0.3)))

    def test_random_suite_matches_brute_force(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            img = rng.integers(0, 256, size=(24, 24)) / 255.0
            t, _ = otsu_threshold(GrayImage(img))
            assert round(t * 255) == oracles.otsu_brute_force(img)


class TestMultiOtsu:
    def test_trilevel_exact_separation(self):
        img = tri_level()
        thresholds, class_map = multi_otsu(img, classes=3)
        assert thresholds[0] < 0.5 <= thresholds[1] < 0.9
        assert np.array_equal(class_map == 0, img.pixels == 0.1)
        assert np.array_equal(class_map == 1, img.pixels == 0.5)
        assert np.array_equal(class_map == 2, img.pixels == 0.9)

    def test_matches_exhaustive_pairwise_search(self):
        rng = np.random.default_rng(12)
        for _ in range(5):
            img = rng.integers(0, 256, size=(16, 16)) / 255.0
            thresholds, _ = multi_otsu(GrayImage(img), classes=3)
            cuts = tuple(round(t * 255) for t in thresholds)
            assert cuts == oracles.multi_otsu_brute_force(img, classes=3)

    def test_binary_image_raises(self):
        img = np.zeros((8, 8))
        img[4:] = 1.0
        with pytest.raises(DegenerateInputError):
            multi_otsu(GrayImage(img), classes=3)

    def test_four_classes(self):
        img = np.empty((8, 80))
        for i, level in enumerate((0.05, 0.35, 0.65, 0.95)):
            img[:, i * 20 : (i + 1) * 20] = level
        thresholds, class_map = multi_otsu(GrayImage(img), classes=4)
        assert len(thresholds) == 3
        assert sorted(np.unique(class_map)) == [0, 1, 2, 3]
        for i, level in enumerate((0.05, 0.35, 0.65, 0.95)):
            assert np.array_equal(class_map == i, img == level)

    def test_bad_class_count(self):
        with pytest.raises(DegenerateInputError):
            multi_otsu(tri_level(), classes=2)
