"""Five-step MRI tumor segmentation pipeline.

Order: sharpening, gamma correction, multi-Otsu, per-class morphological
refinement, K-means. The multi-Otsu class map acts as a denoising prior:
each class region is opened and closed, and pixels covered by exactly one
cleaned region are homogenized to that region's mean intensity before the
final K-means labeling.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np
from scipy import ndimage

from . import ops
from .cluster import kmeans_segment
from .errors import OsteosegError, ParameterError, PipelineStepError
from .image import BinaryMask, GrayImage, LabelMask, StructuringElement
from .morphology import morph_close, morph_open
from .threshold import multi_otsu

TUMOR_RULES = ("brightest", "darkest", "largest-component")

# final label semantics
BACKGROUND, TUMOR, NEIGHBOR = 0, 1, 2


@dataclass(frozen=True)
class MriConfig:
    sharpen_amount: float = 1.0
    sharpen_sigma: float = 1.0
    gamma: float = 1.2
    multi_otsu_classes: int = 3
    morph_radius: int = 2
    k: int = 3
    seed: int = 0
    tumor_rule: str = "brightest"

    def __post_init__(self):
        if self.tumor_rule not in TUMOR_RULES:
            raise ParameterError(f"tumor_rule must be one of {TUMOR_RULES}")

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


@dataclass(frozen=True)
class MriSegmentation:
    labels: LabelMask
    tumor_mask: BinaryMask
    neighbor_mask: BinaryMask
    centroids: np.ndarray       # ascending cluster intensities
    config: MriConfig
    flags: list                 # quality flags, e.g. "single_cluster"


@dataclass(frozen=True)
class QualityResult:
    accepted: bool
    reasons: list


def _step(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except OsteosegError as exc:
        raise PipelineStepError(name, exc) from exc


def _refine_with_prior(img: GrayImage, class_map, n_classes, radius):
    """Homogenize pixels inside morphologically cleaned class regions."""
    se = StructuringElement(radius)
    refined = img.pixels.copy()
    coverage = np.zeros(class_map.shape, dtype=np.int32)
    cleaned = []
    for c in range(n_classes):
        mask = BinaryMask(class_map == c)
        if mask.is_empty():
            cleaned.append(None)
            continue
        m = morph_close(morph_open(mask, se), se)
        cleaned.append(m)
        coverage += m.bits
    for c, m in enumerate(cleaned):
        if m is None:
            continue
        region = m.bits & (coverage == 1)
        if region.any():
            refined[region] = img.pixels[m.bits].mean()
    return GrayImage(np.clip(refined, 0.0, 1.0))


def _tumor_cluster(rule, labels, k):
    """Which ascending-centroid cluster index is the tumor."""
    if rule == "brightest":
        return k - 1
    if rule == "darkest":
        return 0
    # largest-component: cluster owning the biggest connected blob
    best = (-1, 0)
    for c in range(k):
        lab, n = ndimage.label(labels == c)
        if n == 0:
            continue
        largest = int(np.bincount(lab.ravel())[1:].max())
        if largest > best[0]:
            best = (largest, c)
    return best[1]


def segment_mri(img: GrayImage, cfg: MriConfig | None = None) -> MriSegmentation:
    cfg = cfg or MriConfig()

    sharpened = _step("sharpen", ops.sharpen, img, cfg.sharpen_amount, cfg.sharpen_sigma)
    corrected = _step("gamma_correct", ops.gamma_correct, sharpened, cfg.gamma)
    _, class_map = _step("multi_otsu", multi_otsu, corrected, cfg.multi_otsu_classes)
    refined = _step(
        "morphological_refine",
        _refine_with_prior,
        corrected,
        class_map,
        cfg.multi_otsu_classes,
        cfg.morph_radius,
    )
    km = _step("kmeans", kmeans_segment, refined, cfg.k, cfg.seed)

    tumor_cluster = _tumor_cluster(cfg.tumor_rule, km.labels, cfg.k)
    rest = sorted(c for c in range(cfg.k) if c != tumor_cluster)
    mapping = np.empty(cfg.k, dtype=np.uint8)
    mapping[tumor_cluster] = TUMOR
    mapping[rest[0]] = BACKGROUND       # darker leftover cluster
    for c in rest[1:]:
        mapping[c] = NEIGHBOR
    labels = LabelMask(mapping[km.labels])

    flags = []
    if labels.is_degenerate():
        flags.append("single_cluster")
    return MriSegmentation(
        labels=labels,
        tumor_mask=labels.class_mask(TUMOR),
        neighbor_mask=labels.class_mask(NEIGHBOR),
        centroids=km.centroids,
        config=cfg,
        flags=flags,
    )


def quality_filter(img: GrayImage, saturation_level=0.98, max_saturation_frac=0.20, min_std=0.05) -> QualityResult:
    """Reject images too saturated or too flat to segment usefully."""
    reasons = []
    sat_frac = float((img.pixels >= saturation_level).mean())
    if sat_frac > max_saturation_frac:
        reasons.append(f"high-saturation: {sat_frac:.3f} of pixels >= {saturation_level}")
    std = float(img.pixels.std())
    if std < min_std:
        reasons.append(f"low-contrast: intensity std {std:.4f} < {min_std}")
    return QualityResult(accepted=not reasons, reasons=reasons)
