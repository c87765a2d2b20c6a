"""Core raster types and 8-bit PNG I/O.

Intensities live in [0, 1] as float64; 8-bit sources are mapped by v/255
and written back with round(v*255).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from PIL import Image

from .errors import ParameterError

# ITU-R BT.601 luminance weights for RGB inputs
_LUMA = np.array([0.299, 0.587, 0.114])


@dataclass(frozen=True)
class GrayImage:
    """A 2-D grayscale raster with intensities in [0, 1].

    pixels is a (height, width) float64 array; the constructor validates
    range and shape.
    """

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels, dtype=np.float64)
        if arr.ndim != 2:
            raise ParameterError(f"expected a 2-D array, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ParameterError("image must be at least 1x1")
        if np.any(arr < 0.0) or np.any(arr > 1.0):
            raise ParameterError("intensities must lie in [0, 1]")
        object.__setattr__(self, "pixels", arr)

    @property
    def width(self):
        return self.pixels.shape[1]

    @property
    def height(self):
        return self.pixels.shape[0]

    @property
    def shape(self):
        return self.pixels.shape

    def is_constant(self):
        return bool(np.all(self.pixels == self.pixels.flat[0]))

    def to_u8(self):
        return np.rint(self.pixels * 255.0).astype(np.uint8)

    @classmethod
    def from_u8(cls, arr):
        return cls(np.asarray(arr, dtype=np.float64) / 255.0)


@dataclass(frozen=True)
class BinaryMask:
    """Boolean foreground mask; foreground count is cached at construction."""

    bits: np.ndarray
    foreground_count: int = field(init=False)

    def __post_init__(self):
        arr = np.asarray(self.bits, dtype=bool)
        if arr.ndim != 2:
            raise ParameterError(f"expected a 2-D array, got shape {arr.shape}")
        object.__setattr__(self, "bits", arr)
        object.__setattr__(self, "foreground_count", int(arr.sum()))

    @property
    def width(self):
        return self.bits.shape[1]

    @property
    def height(self):
        return self.bits.shape[0]

    @property
    def shape(self):
        return self.bits.shape

    def is_empty(self):
        return self.foreground_count == 0

    def __eq__(self, other):
        if not isinstance(other, BinaryMask):
            return NotImplemented
        return self.bits.shape == other.bits.shape and bool(
            np.array_equal(self.bits, other.bits)
        )


@dataclass(frozen=True)
class LabelMask:
    """Three-way labeling: 0=background, 1=tumor, 2=neighboring region."""

    labels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.labels, dtype=np.uint8)
        if arr.ndim != 2:
            raise ParameterError(f"expected a 2-D array, got shape {arr.shape}")
        if arr.max(initial=0) > 2:
            raise ParameterError("labels must be in {0, 1, 2}")
        object.__setattr__(self, "labels", arr)

    @property
    def width(self):
        return self.labels.shape[1]

    @property
    def height(self):
        return self.labels.shape[0]

    def present_labels(self):
        return sorted(int(v) for v in np.unique(self.labels))

    def is_degenerate(self):
        """True when everything collapsed into a single label."""
        return len(self.present_labels()) == 1

    def class_mask(self, label):
        return BinaryMask(self.labels == label)

    def __eq__(self, other):
        if not isinstance(other, LabelMask):
            return NotImplemented
        return self.labels.shape == other.labels.shape and bool(
            np.array_equal(self.labels, other.labels)
        )


@dataclass(frozen=True)
class StructuringElement:
    """Disk-shaped structuring element for binary morphology."""

    radius: int = 2

    def __post_init__(self):
        if self.radius < 1:
            raise ParameterError("structuring element radius must be >= 1")

    def footprint(self):
        r = self.radius
        y, x = np.ogrid[-r : r + 1, -r : r + 1]
        return x * x + y * y <= r * r


# ---------------------------------------------------------------------------
# PNG I/O
# ---------------------------------------------------------------------------

def read_gray_png(path):
    """Load a PNG as GrayImage. RGB(A) inputs are collapsed by luminance."""
    with Image.open(path) as im:
        if im.mode in ("RGB", "RGBA"):
            arr = np.asarray(im.convert("RGB"), dtype=np.float64)
            gray = arr @ _LUMA
        else:
            gray = np.asarray(im.convert("L"), dtype=np.float64)
    return GrayImage(np.clip(gray / 255.0, 0.0, 1.0))


def write_gray_png(img: GrayImage, path):
    Image.fromarray(img.to_u8(), mode="L").save(path, format="PNG")


def write_mask_png(mask: BinaryMask, path):
    Image.fromarray(np.where(mask.bits, 255, 0).astype(np.uint8), mode="L").save(
        path, format="PNG"
    )


def read_mask_png(path):
    with Image.open(path) as im:
        arr = np.asarray(im.convert("L"))
    return BinaryMask(arr >= 128)


_LABEL_LEVELS = np.array([0, 128, 255], dtype=np.uint8)


def write_labels_png(labels: LabelMask, path):
    Image.fromarray(_LABEL_LEVELS[labels.labels], mode="L").save(path, format="PNG")


def read_labels_png(path):
    with Image.open(path) as im:
        arr = np.asarray(im.convert("L")).astype(np.int16)
    # snap to the nearest of the three published levels
    idx = np.abs(arr[..., None] - _LABEL_LEVELS[None, None, :].astype(np.int16)).argmin(
        axis=-1
    )
    return LabelMask(idx.astype(np.uint8))
