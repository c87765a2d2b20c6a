import type { Point } from "./types";

export type CalibrateSubmit = (p0: Point, p1: Point) => void;

export interface PointerLike {
  x: number;
  y: number;
}

function dist(a: Point, b: Point): number {
  return Math.hypot(b.x - a.x, b.y - a.y);
}

/**
 * Two-click or drag line tool for the femur reference measurement.
 *
 * State machine: idle -> anchored (first down) -> either drag-release or a
 * second click finishes the line. Escape cancels from any state. Lines under
 * one pixel are rejected client-side (the service would 422 them anyway).
 * The submitted endpoints are exactly the drawn image-space coordinates.
 */
export class CalibrateTool {
  private anchor: Point | null = null;
  private cursor: Point | null = null;
  private dragging = false;

  constructor(private readonly onSubmit: CalibrateSubmit) {}

  pointerDown(p: PointerLike): void {
    if (this.anchor === null) {
      this.anchor = { x: p.x, y: p.y };
      this.cursor = { x: p.x, y: p.y };
      this.dragging = true;
    } else {
      // second click of two-click mode
      this.finish({ x: p.x, y: p.y });
    }
  }

  pointerMove(p: PointerLike): void {
    if (this.anchor !== null) this.cursor = { x: p.x, y: p.y };
  }

  pointerUp(p: PointerLike): void {
    if (this.anchor === null || !this.dragging) return;
    this.dragging = false;
    // a release on the anchor point means two-click mode: keep waiting
    if (dist(this.anchor, p) >= 1) this.finish({ x: p.x, y: p.y });
  }

  escape(): void {
    this.anchor = null;
    this.cursor = null;
    this.dragging = false;
  }

  private finish(end: Point): void {
    const start = this.anchor as Point;
    this.anchor = null;
    this.cursor = null;
    this.dragging = false;
    if (dist(start, end) < 1) return; // zero-length: reject silently
    this.onSubmit(start, end);
  }

  /** Current draft line for rendering, or null while idle. */
  draft(): { p0: Point; p1: Point } | null {
    if (this.anchor === null || this.cursor === null) return null;
    return { p0: this.anchor, p1: this.cursor };
  }

  /** Live pixel-length readout of the draft line. */
  draftLengthPx(): number {
    const d = this.draft();
    return d === null ? 0 : dist(d.p0, d.p1);
  }
}
