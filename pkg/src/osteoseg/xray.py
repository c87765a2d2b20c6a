"""Seven-step X-ray lesion segmentation pipeline.

Order: Gaussian blur, first gamma correction, CLAHE, contrast stretch,
Otsu binarization, active-contour refinement seeded from the Otsu mask,
second gamma correction. The second gamma only balances the display
image; the lesion mask is the active-contour result.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict

from . import ops
from .chanvese import ChanVeseParams, chan_vese
from .errors import OsteosegError, PipelineStepError
from .image import BinaryMask, GrayImage
from .threshold import otsu_threshold


@dataclass(frozen=True)
class XrayConfig:
    gaussian_sigma: float = 1.0
    gamma1: float = 0.8
    clahe_clip_limit: float = 2.0
    clahe_tiles_x: int = 8
    clahe_tiles_y: int = 8
    stretch_p_low: float = 2.0
    stretch_p_high: float = 98.0
    chan_vese: ChanVeseParams = field(default_factory=ChanVeseParams)

    gamma2: float = 1.2

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        cv = d.pop("chan_vese", None)
        kwargs = {k: d[k] for k in d}
        if cv is not None:
            kwargs["chan_vese"] = ChanVeseParams(**cv)
        return cls(**kwargs)


@dataclass(frozen=True)
class XraySegmentation:
    lesion_mask: BinaryMask
    display: GrayImage
    intermediates: list          # ordered (step name, image/mask) pairs
    config: XrayConfig
    converged: bool
    otsu_threshold: float


def _step(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except OsteosegError as exc:
        raise PipelineStepError(name, exc) from exc


def segment_xray(img: GrayImage, cfg: XrayConfig | None = None, record_intermediates=False) -> XraySegmentation:
    cfg = cfg or XrayConfig()
    steps = []

    def record(name, value):
        if record_intermediates:
            steps.append((name, value))

    blurred = _step("gaussian_blur", ops.gaussian_blur, img, cfg.gaussian_sigma)
    record("gaussian_blur", blurred)
    corrected = _step("gamma_correct_1", ops.gamma_correct, blurred, cfg.gamma1)
    record("gamma_correct_1", corrected)
    equalized = _step(
        "clahe", ops.clahe, corrected, cfg.clahe_clip_limit, cfg.clahe_tiles_x, cfg.clahe_tiles_y
    )
    record("clahe", equalized)
    stretched = _step(
        "contrast_stretch", ops.contrast_stretch, equalized, cfg.stretch_p_low, cfg.stretch_p_high
    )
    record("contrast_stretch", stretched)
    threshold, otsu_mask = _step("otsu_threshold", otsu_threshold, stretched)
    record("otsu_threshold", otsu_mask)
    cv_result = _step("chan_vese", chan_vese, stretched, cfg.chan_vese, otsu_mask)
    record("chan_vese", cv_result.mask)
    display = _step("gamma_correct_2", ops.gamma_correct, stretched, cfg.gamma2)
    record("gamma_correct_2", display)

    return XraySegmentation(
        lesion_mask=cv_result.mask,
        display=display,
        intermediates=steps,
        config=cfg,
        converged=cv_result.converged,
        otsu_threshold=threshold,
    )
