import numpy as np
import pytest

from osteoseg.errors import ParameterError
from osteoseg.image import BinaryMask, StructuringElement
from osteoseg.morphology import dilate, erode, morph_close, morph_open

import oracles


def test_footprint_symmetric_under_rotation():
    fp = StructuringElement(3).footprint()
    assert np.array_equal(fp, np.rot90(fp))


def test_radius_validation():
    with pytest.raises(ParameterError):
        StructuringElement(0)


def test_open_removes_small_components():
    bits = np.zeros((30, 30), dtype=bool)
    bits[4, 4] = True              # isolated pixel, smaller than the disk
    bits[10:25, 10:25] = True      # large block survives
    out = morph_open(BinaryMask(bits), StructuringElement(2))
    assert not out.bits[4, 4]
    assert out.bits[15, 15]


def test_close_fills_small_holes():
    bits = np.ones((30, 30), dtype=bool)
    bits[14, 14] = False
    out = morph_close(BinaryMask(bits), StructuringElement(2))
    assert out.bits[14, 14]


def test_open_close_on_solid_square_matches_minkowski_oracle():
    # A disk-opened square loses its extreme corner pixels (the disk cannot
    # reach into right-angle corners) and closing does not restore them; the
    # correct reference is the direct Minkowski composition.
    bits = np.zeros((40, 40), dtype=bool)
    bits[10:30, 10:30] = True
    se = StructuringElement(2)
    fp = se.footprint()
    out = morph_close(morph_open(BinaryMask(bits), se), se)
    expected = oracles.erode_minkowski(
        oracles.dilate_minkowski(
            oracles.dilate_minkowski(oracles.erode_minkowski(bits, fp), fp), fp
        ),
        fp,
    )
    assert np.array_equal(out.bits, expected)
    # interior of the square is untouched
    assert np.array_equal(out.bits[11:29, 11:29], bits[11:29, 11:29])


def test_matches_minkowski_oracle():
    rng = np.random.default_rng(8)
    bits = rng.random((20, 20)) > 0.6
    se = StructuringElement(2)
    fp = se.footprint()
    mask = BinaryMask(bits)
    assert np.array_equal(dilate(mask, se).bits, oracles.dilate_minkowski(bits, fp))
    assert np.array_equal(erode(mask, se).bits, oracles.erode_minkowski(bits, fp))


def test_open_and_close_idempotent():
    rng = np.random.default_rng(9)
    bits = rng.random((25, 25)) > 0.5
    se = StructuringElement(2)
    mask = BinaryMask(bits)
    opened = morph_open(mask, se)
    closed = morph_close(mask, se)
    assert morph_open(opened, se) == opened
    assert morph_close(closed, se) == closed


def test_element_larger_than_mask_rejected():
    mask = BinaryMask(np.ones((4, 4), dtype=bool))
    with pytest.raises(ParameterError):
        morph_open(mask, StructuringElement(2))
