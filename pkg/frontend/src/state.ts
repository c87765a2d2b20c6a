import type { CalibrationRecord, Point, SegmentResponse, Stage } from "./types";

export interface OverlayToggles {
  mask: boolean;
  labels: boolean;
  marginCircle: boolean;
}

/** Single source of truth for what the workbench is showing. */
export interface ViewState {
  selectedCase: string | null;
  selectedImage: string | null;
  overlays: OverlayToggles;
  overlayOpacity: number;
  calibration: CalibrationRecord | null;
  draftLine: { p0: Point; p1: Point } | null;
  stage: Stage | null;
  /** What-if lesion radius in cm driven by the slider. */
  sliderRadiusCm: number | null;
  /** Margin value currently displayed; always a number the service returned. */
  displayedMarginCm: number | null;
  extrapolated: boolean;
  segmentation: SegmentResponse | null;
  lastRevision: number;
  errorMessage: string | null;
}

export function initialState(): ViewState {
  return {
    selectedCase: null,
    selectedImage: null,
    overlays: { mask: true, labels: true, marginCircle: true },
    overlayOpacity: 0.5,
    calibration: null,
    draftLine: null,
    stage: null,
    sliderRadiusCm: null,
    displayedMarginCm: null,
    extrapolated: false,
    segmentation: null,
    lastRevision: 0,
    errorMessage: null,
  };
}

type Listener = (state: ViewState) => void;

/** Minimal observable store; mutations go through update(). */
export class Store {
  private state: ViewState;
  private listeners: Listener[] = [];

  constructor(state: ViewState = initialState()) {
    this.state = state;
  }

  get(): ViewState {
    return this.state;
  }

  update(patch: Partial<ViewState>): void {
    this.state = { ...this.state, ...patch };
    for (const fn of this.listeners) fn(this.state);
  }

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== fn);
    };
  }
}

/** Margin controls need a stage plus either a slider radius or a tumor mask. */
export function marginControlsEnabled(s: ViewState): boolean {
  if (s.calibration === null) return false;
  return s.sliderRadiusCm !== null || s.segmentation !== null;
}

/** The margin circle only renders once the service has answered. */
export function marginCircleVisible(s: ViewState): boolean {
  return (
    s.overlays.marginCircle &&
    s.stage !== null &&
    s.displayedMarginCm !== null &&
    (s.sliderRadiusCm !== null || s.segmentation !== null)
  );
}

/** Hint shown while margin controls are gated off. */
export function marginDisabledHint(s: ViewState): string | null {
  if (s.calibration === null) {
    return "Draw a calibration line (or look one up by sex/age) to enable margin planning.";
  }
  if (s.sliderRadiusCm === null && s.segmentation === null) {
    return "Segment the image or pick a what-if radius first.";
  }
  return null;
}
