"""Binary morphology with disk structuring elements.

Out-of-bounds pixels count as background for both erosion and dilation,
so erosion shrinks foreground touching the border.
"""

from __future__ import annotations

from scipy import ndimage

from .errors import ParameterError
from .image import BinaryMask, StructuringElement


def _check(mask: BinaryMask, se: StructuringElement):
    diameter = 2 * se.radius + 1
    if mask.width < diameter or mask.height < diameter:
        raise ParameterError(
            f"structuring element diameter {diameter} exceeds mask {mask.width}x{mask.height}"
        )


def erode(mask: BinaryMask, se: StructuringElement) -> BinaryMask:
    _check(mask, se)
    return BinaryMask(ndimage.binary_erosion(mask.bits, structure=se.footprint(), border_value=0))


def dilate(mask: BinaryMask, se: StructuringElement) -> BinaryMask:
    _check(mask, se)
    return BinaryMask(ndimage.binary_dilation(mask.bits, structure=se.footprint(), border_value=0))


def morph_open(mask: BinaryMask, se: StructuringElement) -> BinaryMask:
    """Erosion followed by dilation; removes components smaller than the disk."""
    return dilate(erode(mask, se), se)


def morph_close(mask: BinaryMask, se: StructuringElement) -> BinaryMask:
    """Dilation followed by erosion; fills holes smaller than the disk."""
    return erode(dilate(mask, se), se)
