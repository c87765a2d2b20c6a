import { marginCircleVisible, type ViewState } from "./state";
import type { Point } from "./types";

/**
 * Render plan for one frame. Kept as plain data so the geometry is unit
 * testable without a canvas; main.ts replays it onto a 2D context.
 */
export interface RenderPlan {
  imageUrl: string | null;
  overlayUrl: string | null;
  overlayOpacity: number;
  line: { p0: Point; p1: Point; lengthPx: number } | null;
  circle: { center: Point; radiusPx: number; warning: boolean } | null;
  hint: string | null;
}

/**
 * Screen-pixel radius of the margin circle. The service reports the margin in
 * cm and the calibration scale in cm/px; drawing is the only conversion the
 * client performs.
 */
export function marginRadiusPx(marginCm: number, scaleCmPerPx: number): number {
  if (scaleCmPerPx <= 0) throw new Error(`bad scale ${scaleCmPerPx}`);
  return marginCm / scaleCmPerPx;
}

export function buildRenderPlan(
  s: ViewState,
  imageUrlFor: (imageId: string) => string,
  manualCenter: Point | null = null,
): RenderPlan {
  const plan: RenderPlan = {
    imageUrl: s.selectedImage !== null ? imageUrlFor(s.selectedImage) : null,
    overlayUrl: null,
    overlayOpacity: s.overlayOpacity,
    line: null,
    circle: null,
    hint: s.errorMessage,
  };

  const seg = s.segmentation;
  if (seg !== null) {
    if (seg.modality === "xray" && s.overlays.mask) plan.overlayUrl = seg.mask_url;
    if (seg.modality === "mri" && s.overlays.labels) plan.overlayUrl = seg.labels_url;
  }

  if (s.draftLine !== null) {
    const { p0, p1 } = s.draftLine;
    plan.line = { p0, p1, lengthPx: Math.hypot(p1.x - p0.x, p1.y - p0.y) };
  }

  if (marginCircleVisible(s) && s.calibration !== null && s.displayedMarginCm !== null) {
    const center =
      manualCenter ??
      (seg?.centroid != null ? { x: seg.centroid[0], y: seg.centroid[1] } : null);
    if (center !== null) {
      plan.circle = {
        center,
        radiusPx: marginRadiusPx(s.displayedMarginCm, s.calibration.scale_cm_per_px),
        warning: s.extrapolated,
      };
    }
  }

  return plan;
}
