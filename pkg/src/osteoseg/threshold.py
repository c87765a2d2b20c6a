"""Otsu and multi-Otsu histogram thresholding by exhaustive search."""

from __future__ import annotations

import numpy as np

from .errors import DegenerateInputError
from .image import BinaryMask, GrayImage
from .ops import HIST_BINS, to_bins


def _histogram(img: GrayImage):
    bins = to_bins(img.pixels)
    return bins, np.bincount(bins.ravel(), minlength=HIST_BINS).astype(np.float64)


def otsu_threshold(img: GrayImage):
    """Single Otsu threshold maximizing between-class variance.

    Returns (threshold, mask) where the threshold is the bin value t/255
    and the mask selects pixels strictly above it. Ties resolve to the
    lowest qualifying threshold.
    """
    bins, hist = _histogram(img)
    if np.count_nonzero(hist) < 2:
        raise DegenerateInputError("constant image has no threshold")
    n = hist.sum()
    idx = np.arange(HIST_BINS)
    w0 = np.cumsum(hist)[:-1]
    s0 = np.cumsum(hist * idx)[:-1]
    total = float((hist * idx).sum())

    valid = (w0 > 0) & (w0 < n)
    with np.errstate(divide="ignore", invalid="ignore"):
        mu0 = s0 / w0
        mu1 = (total - s0) / (n - w0)
        var_b = (w0 / n) * ((n - w0) / n) * (mu0 - mu1) ** 2
    var_b[~valid] = -np.inf
    t = int(np.argmax(var_b))  # argmax returns the first (lowest) maximizer
    mask = BinaryMask(bins > t)
    return t / (HIST_BINS - 1), mask


def _interval_score(cw, cs, n, mu_total, a, b):
    """Between-class variance contribution of the bin interval [a, b)."""
    w = cw[b] - cw[a]
    with np.errstate(divide="ignore", invalid="ignore"):
        mu = (cs[b] - cs[a]) / w
        score = (w / n) * (mu - mu_total) ** 2
    return np.where(w > 0, score, -np.inf)


def multi_otsu(img: GrayImage, classes=3):
    """Multi-level Otsu: exhaustive search over (classes-1) cut points.

    Returns (thresholds, class_map): thresholds as sorted intensities and
    a (height, width) uint8 map assigning each pixel its interval index.
    A cut at bin t puts bins <= t in the lower class. Ties resolve to the
    lexicographically smallest cut tuple.
    """
    if classes not in (3, 4):
        raise DegenerateInputError(f"classes must be 3 or 4, got {classes}")
    bins, hist = _histogram(img)
    occupied = np.flatnonzero(hist)
    if occupied.size < classes:
        raise DegenerateInputError(
            f"histogram has {occupied.size} occupied bins, need >= {classes}"
        )
    n = hist.sum()
    idx = np.arange(HIST_BINS, dtype=np.float64)
    cw = np.concatenate([[0.0], np.cumsum(hist)])
    cs = np.concatenate([[0.0], np.cumsum(hist * idx)])
    mu_total = cs[-1] / n

    cut = np.arange(HIST_BINS - 1)
    if classes == 3:
        i = cut[:, None]
        j = cut[None, :]
        score = (
            _interval_score(cw, cs, n, mu_total, 0, i + 1)
            + _interval_score(cw, cs, n, mu_total, i + 1, j + 1)
            + _interval_score(cw, cs, n, mu_total, j + 1, HIST_BINS)
        )
        score = np.where(i < j, score, -np.inf)
        flat = int(np.argmax(score))
        cuts = (flat // score.shape[1], flat % score.shape[1])
    else:
        j = cut[:, None]
        k = cut[None, :]
        pair_ok = j < k
        best_score = -np.inf
        cuts = None
        for i in range(HIST_BINS - 3):
            score = (
                _interval_score(cw, cs, n, mu_total, 0, i + 1)
                + _interval_score(cw, cs, n, mu_total, i + 1, j + 1)
                + _interval_score(cw, cs, n, mu_total, j + 1, k + 1)
                + _interval_score(cw, cs, n, mu_total, k + 1, HIST_BINS)
            )
            score = np.where(pair_ok & (j > i), score, -np.inf)
            flat = int(np.argmax(score))
            s = score.flat[flat]
            if s > best_score:
                best_score = s
                cuts = (i, flat // score.shape[1], flat % score.shape[1])
        if cuts is None or not np.isfinite(best_score):
            raise DegenerateInputError("no valid cut points found")

    thresholds = [c / (HIST_BINS - 1) for c in cuts]
    class_map = np.zeros(bins.shape, dtype=np.uint8)
    for c in cuts:
        class_map += (bins > c).astype(np.uint8)
    return thresholds, class_map
