"""Synthetic phantom images with known ground truth."""

import numpy as np

from osteoseg.image import BinaryMask, GrayImage


def disk_mask(shape, center, radius):
    h, w = shape
    y, x = np.ogrid[:h, :w]
    return (x - center[0]) ** 2 + (y - center[1]) ** 2 <= radius**2


def bright_disk(shape=(128, 128), center=(64, 64), radius=30, fg=0.9, bg=0.1):
    """Disk phantom for active-contour tests."""
    truth = disk_mask(shape, center, radius)
    img = np.where(truth, fg, bg)
    return GrayImage(img), BinaryMask(truth)


def half_planes(shape=(80, 80), low=0.0, high=1.0):
    h, w = shape
    img = np.full(shape, low)
    img[:, w // 2 :] = high
    truth = np.zeros(shape, dtype=bool)
    truth[:, w // 2 :] = True
    return GrayImage(img), BinaryMask(truth)


def xray_phantom(shape=(220, 180), seed=7):
    """Femur-like phantom: dark soft tissue, a bright shaft, and a brighter
    lytic blob embedded in the shaft. Returns (image, blob truth mask)."""
    h, w = shape
    rng = np.random.default_rng(seed)
    img = np.full(shape, 0.28)
    shaft = np.zeros(shape, dtype=bool)
    shaft[:, w // 2 - 22 : w // 2 + 22] = True
    img[shaft] = 0.46
    blob = disk_mask(shape, (w // 2, h // 2), 26)
    img[blob] = 0.95
    img += rng.normal(0.0, 0.01, shape)
    return GrayImage(np.clip(img, 0.0, 1.0)), BinaryMask(blob)


def mri_phantom(shape=(160, 160)):
    """Tri-level phantom: dark background, muscle band, bright tumor blob.

    Returns (image, tumor truth, muscle truth)."""
    h, w = shape
    img = np.full(shape, 0.05)
    muscle = np.zeros(shape, dtype=bool)
    muscle[h // 5 : 4 * h // 5, w // 6 : 5 * w // 6] = True
    img[muscle] = 0.45
    tumor = disk_mask(shape, (w // 2, h // 2), 24)
    img[tumor] = 0.9
    muscle &= ~tumor
    return GrayImage(img), BinaryMask(tumor), BinaryMask(muscle)


def tri_level(shape=(60, 60), levels=(0.1, 0.5, 0.9)):
    """Three equal vertical bands, one per intensity level."""
    h, w = shape
    img = np.empty(shape)
    third = w // 3
    img[:, :third] = levels[0]
    img[:, third : 2 * third] = levels[1]
    img[:, 2 * third :] = levels[2]
    return GrayImage(img)


def iou(a: BinaryMask, b: BinaryMask):
    inter = np.logical_and(a.bits, b.bits).sum()
    union = np.logical_or(a.bits, b.bits).sum()
    return inter / union if union else 1.0
