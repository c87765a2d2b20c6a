"""Surgical safety margin model and the supporting regression utilities.

The per-stage linear coefficients are fitted at load time from the
published reference table bundled as CSV, so the published numbers stay
the single source of truth rather than hardcoded slopes.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from importlib import resources

import numpy as np

from .errors import ParameterError
from .image import BinaryMask, GrayImage

RADIUS_RANGE_CM = (0.50, 4.75)
TABLE_STEP_CM = 0.25


class EnnekingStage(str, Enum):
    IB = "IB"
    IIA = "IIA"
    IIB = "IIB"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ParameterError(
                f"unknown Enneking stage {value!r}; expected one of IB, IIA, IIB"
            ) from None


@dataclass(frozen=True)
class CorrelationFit:
    slope: float
    intercept: float
    r: float
    r_squared: float
    n_points: int


def fit_linear(xs, ys) -> CorrelationFit:
    """Ordinary least squares line with Pearson correlation."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ParameterError("xs and ys must be equal-length 1-D sequences")
    n = xs.size
    if n < 2:
        raise ParameterError("need at least 2 points")
    sxx = float(np.sum((xs - xs.mean()) ** 2))
    if sxx == 0.0:
        raise ParameterError("xs are all equal; line is undefined")
    sxy = float(np.sum((xs - xs.mean()) * (ys - ys.mean())))
    syy = float(np.sum((ys - ys.mean()) ** 2))
    slope = sxy / sxx
    intercept = float(ys.mean() - slope * xs.mean())
    r = sxy / math.sqrt(sxx * syy) if syy > 0 else 0.0
    return CorrelationFit(slope, intercept, r, r * r, n)


def weighted_mask_mean(img: GrayImage, mask: BinaryMask):
    """Mean intensity over the mask's foreground pixels."""
    if img.shape != mask.shape:
        raise ParameterError(f"shape mismatch: {img.shape} vs {mask.shape}")
    if mask.is_empty():
        raise ParameterError("mask is empty")
    return float(img.pixels[mask.bits].mean())


def pooled_mask_mean(means_and_counts):
    """Combine per-mask means weighted by pixel counts (pooled pixel mean)."""
    total = sum(c for _, c in means_and_counts)
    if total == 0:
        raise ParameterError("no pixels to pool")
    return sum(m * c for m, c in means_and_counts) / total


def lesion_radius(mask: BinaryMask, cal):
    """Equivalent-circle radius of the mask in cm: sqrt(area/pi) * scale."""
    if mask.is_empty():
        raise ParameterError("mask is empty")
    return math.sqrt(mask.foreground_count / math.pi) * cal.scale_cm_per_px


@dataclass(frozen=True)
class MarginPrediction:
    stage: EnnekingStage
    lesion_radius_cm: float
    margin_radius_cm: float
    extrapolated: bool

    def to_dict(self):
        return {
            "stage": self.stage.value,
            "lesion_radius_cm": self.lesion_radius_cm,
            "margin_radius_cm": self.margin_radius_cm,
            "extrapolated": self.extrapolated,
        }


@dataclass(frozen=True)
class StageLine:
    slope: float
    intercept: float
    max_residual: float
    n_rows: int


class MarginModel:
    """Per-stage linear margin predictor fitted from reference rows."""

    def __init__(self, stage_lines, radius_range=RADIUS_RANGE_CM):
        missing = [s for s in EnnekingStage if s not in stage_lines]
        if missing:
            raise ParameterError(f"model missing stages: {[s.value for s in missing]}")
        for stage, line in stage_lines.items():
            if line.slope <= 0:
                raise ParameterError(f"stage {stage.value} slope must be positive")
        self.stage_lines = dict(stage_lines)
        self.radius_range = radius_range

    def predict(self, stage, radius_cm) -> MarginPrediction:
        stage = EnnekingStage.parse(stage)
        if radius_cm <= 0:
            raise ParameterError("lesion radius must be > 0 cm")
        line = self.stage_lines[stage]
        margin = line.slope * radius_cm + line.intercept
        lo, hi = self.radius_range
        return MarginPrediction(
            stage=stage,
            lesion_radius_cm=float(radius_cm),
            margin_radius_cm=float(margin),
            extrapolated=not (lo <= radius_cm <= hi),
        )

    def table(self, stage, r_min=RADIUS_RANGE_CM[0], r_max=RADIUS_RANGE_CM[1], step=TABLE_STEP_CM):
        """Inclusive arithmetic grid of predictions from r_min to r_max."""
        if step <= 0:
            raise ParameterError("step must be > 0")
        if r_min > r_max:
            raise ParameterError("r_min must be <= r_max")
        rows = []
        i = 0
        while True:
            r = r_min + i * step
            if r > r_max + 1e-9:
                break
            rows.append(self.predict(stage, r))
            i += 1
        return rows

    def crossover_radius(self, stage_a, stage_b):
        """Radius where stage_a's margin overtakes stage_b's (None if parallel)."""
        a = self.stage_lines[EnnekingStage.parse(stage_a)]
        b = self.stage_lines[EnnekingStage.parse(stage_b)]
        if a.slope == b.slope:
            return None
        return (b.intercept - a.intercept) / (a.slope - b.slope)


def fit_margin_model(rows, radius_range=RADIUS_RANGE_CM) -> MarginModel:
    """Least-squares fit per stage over (injury_radius_cm, margin_radius_cm) rows.

    rows: iterable of (stage, injury_radius_cm, margin_radius_cm).
    """
    by_stage = {}
    for stage, r, m in rows:
        by_stage.setdefault(EnnekingStage.parse(stage), []).append((float(r), float(m)))
    lines = {}
    for stage, pts in by_stage.items():
        if len(pts) < 2:
            raise ParameterError(f"stage {stage.value} needs >= 2 rows")
        xs = np.array([p[0] for p in pts])
        ys = np.array([p[1] for p in pts])
        fit = fit_linear(xs, ys)
        residual = float(np.max(np.abs(fit.slope * xs + fit.intercept - ys)))
        lines[stage] = StageLine(fit.slope, fit.intercept, residual, len(pts))
    return MarginModel(lines, radius_range)


def load_reference_rows():
    """The published margin table bundled with the package."""
    ref = resources.files("osteoseg.data") / "margin_reference.csv"
    with ref.open("r", newline="") as fh:
        reader = csv.DictReader(fh)
        return [
            (row["stage"], float(row["injury_radius_cm"]), float(row["margin_radius_cm"]))
            for row in reader
        ]


_default_model = None


def default_model() -> MarginModel:
    """Model fitted from the bundled reference table (cached)."""
    global _default_model
    if _default_model is None:
        _default_model = fit_margin_model(load_reference_rows())
    return _default_model
