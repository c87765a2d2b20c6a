"""Point and neighborhood operations shared by both segmentation pipelines."""

from __future__ import annotations

import warnings

import numpy as np
from scipy.ndimage import convolve1d

from .errors import DegenerateContrastWarning, ParameterError
from .image import GrayImage

HIST_BINS = 256


def gaussian_kernel(sigma):
    """Normalized 1-D Gaussian truncated at +-3 sigma."""
    if sigma <= 0:
        raise ParameterError("sigma must be > 0")
    radius = int(np.ceil(3.0 * sigma))
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-0.5 * (x / sigma) ** 2)
    return k / k.sum()


def gaussian_blur(img: GrayImage, sigma) -> GrayImage:
    """Separable Gaussian blur with edge replication at the borders."""
    k = gaussian_kernel(sigma)
    out = convolve1d(img.pixels, k, axis=0, mode="nearest")
    out = convolve1d(out, k, axis=1, mode="nearest")
    return GrayImage(np.clip(out, 0.0, 1.0))


def gamma_correct(img: GrayImage, gamma) -> GrayImage:
    """Power-law intensity mapping v -> v**gamma."""
    if gamma <= 0:
        raise ParameterError("gamma must be > 0")
    return GrayImage(np.power(img.pixels, gamma))


def contrast_stretch(img: GrayImage, p_low=2.0, p_high=98.0) -> GrayImage:
    """Linear remap sending the p_low percentile to 0 and p_high to 1.

    Values outside the percentile window clamp. If both percentile values
    coincide (e.g. a constant image) the result is the zero image and a
    DegenerateContrastWarning is emitted.
    """
    if not (0.0 <= p_low < p_high <= 100.0):
        raise ParameterError(f"need 0 <= p_low < p_high <= 100, got ({p_low}, {p_high})")
    lo, hi = np.percentile(img.pixels, [p_low, p_high])
    if hi <= lo:
        warnings.warn(
            "percentile values coincide; output collapsed to zero",
            DegenerateContrastWarning,
            stacklevel=2,
        )
        return GrayImage(np.zeros_like(img.pixels))
    out = (img.pixels - lo) / (hi - lo)
    return GrayImage(np.clip(out, 0.0, 1.0))


def sharpen(img: GrayImage, amount=1.0, sigma=1.0) -> GrayImage:
    """Unsharp masking: img + amount * (img - blur(img, sigma)), clamped."""
    if amount < 0:
        raise ParameterError("amount must be >= 0")
    blurred = gaussian_blur(img, sigma)
    out = img.pixels + amount * (img.pixels - blurred.pixels)
    return GrayImage(np.clip(out, 0.0, 1.0))


# ---------------------------------------------------------------------------
# CLAHE
# ---------------------------------------------------------------------------

def to_bins(pixels):
    """Quantize [0,1] intensities to the 256-bin histogram grid."""
    return np.rint(pixels * (HIST_BINS - 1)).astype(np.intp)


def _clip_histogram(hist, limit):
    """Clip histogram bins at `limit`, redistributing the excess uniformly.

    Redistribution can push bins back over the limit, so it repeats until
    the residual excess drops below one count.
    """
    hist = hist.astype(np.float64)
    for _ in range(100):
        excess = np.maximum(hist - limit, 0.0).sum()
        if excess < 1.0:
            break
        hist = np.minimum(hist, limit)
        hist += excess / HIST_BINS
    return hist


def _tile_mapping(tile_bins, clip_limit):
    """Equalization lookup table (bin -> [0,1]) for one tile."""
    npix = tile_bins.size
    hist = np.bincount(tile_bins.ravel(), minlength=HIST_BINS).astype(np.float64)
    if np.count_nonzero(hist) <= 1:
        # degenerate histogram: identity mapping by convention
        return np.arange(HIST_BINS, dtype=np.float64) / (HIST_BINS - 1)
    limit = clip_limit * npix / HIST_BINS
    hist = _clip_histogram(hist, limit)
    cdf = np.cumsum(hist)
    return cdf / cdf[-1]


def _tile_edges(size, tiles):
    return np.rint(np.linspace(0, size, tiles + 1)).astype(int)


def clahe(img: GrayImage, clip_limit=2.0, tiles_x=8, tiles_y=8) -> GrayImage:
    """Contrast-limited adaptive histogram equalization.

    Per-tile 256-bin histograms are clipped at clip_limit * tile_pixels/256,
    equalized, and the tile-center mappings are blended bilinearly.
    """
    if tiles_x < 1 or tiles_y < 1:
        raise ParameterError("tile counts must be >= 1")
    if clip_limit <= 0:
        raise ParameterError("clip_limit must be > 0")
    h, w = img.shape
    if w // tiles_x < 2 or h // tiles_y < 2:
        raise ParameterError(
            f"tile grid {tiles_x}x{tiles_y} too fine for a {w}x{h} image"
        )

    bins = to_bins(img.pixels)
    xs = _tile_edges(w, tiles_x)
    ys = _tile_edges(h, tiles_y)

    maps = np.empty((tiles_y, tiles_x, HIST_BINS))
    cx = np.empty(tiles_x)
    cy = np.empty(tiles_y)
    for ty in range(tiles_y):
        cy[ty] = (ys[ty] + ys[ty + 1] - 1) / 2.0
        for tx in range(tiles_x):
            cx[tx] = (xs[tx] + xs[tx + 1] - 1) / 2.0
            maps[ty, tx] = _tile_mapping(bins[ys[ty] : ys[ty + 1], xs[tx] : xs[tx + 1]], clip_limit)

    # bilinear blend of the four surrounding tile mappings, clamped at edges
    col = np.arange(w, dtype=np.float64)
    row = np.arange(h, dtype=np.float64)
    ix = np.clip(np.searchsorted(cx, col) - 1, 0, tiles_x - 2) if tiles_x > 1 else None
    iy = np.clip(np.searchsorted(cy, row) - 1, 0, tiles_y - 2) if tiles_y > 1 else None

    if tiles_x > 1:
        wx = np.clip((col - cx[ix]) / (cx[ix + 1] - cx[ix]), 0.0, 1.0)
    else:
        ix = np.zeros(w, dtype=int)
        wx = np.zeros(w)
    if tiles_y > 1:
        wy = np.clip((row - cy[iy]) / (cy[iy + 1] - cy[iy]), 0.0, 1.0)
    else:
        iy = np.zeros(h, dtype=int)
        wy = np.zeros(h)

    ix2 = np.minimum(ix + 1, tiles_x - 1)
    iy2 = np.minimum(iy + 1, tiles_y - 1)

    IY = iy[:, None]
    IY2 = iy2[:, None]
    IX = ix[None, :]
    IX2 = ix2[None, :]
    WY = wy[:, None]
    WX = wx[None, :]

    m00 = maps[IY, IX, bins]
    m01 = maps[IY, IX2, bins]
    m10 = maps[IY2, IX, bins]
    m11 = maps[IY2, IX2, bins]
    out = (
        (1 - WY) * ((1 - WX) * m00 + WX * m01)
        + WY * ((1 - WX) * m10 + WX * m11)
    )
    return GrayImage(np.clip(out, 0.0, 1.0))


def global_equalize(img: GrayImage) -> GrayImage:
    """Plain global histogram equalization (value -> CDF)."""
    bins = to_bins(img.pixels)
    hist = np.bincount(bins.ravel(), minlength=HIST_BINS).astype(np.float64)
    if np.count_nonzero(hist) <= 1:
        return img
    cdf = np.cumsum(hist)
    lut = cdf / cdf[-1]
    return GrayImage(lut[bins])
