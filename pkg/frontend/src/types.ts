/** Payload shapes of the segmentation/margin service. */

export type Stage = "IB" | "IIA" | "IIB";

export interface CaseSummary {
  case_id: string;
  age_years: number;
  sex: string;
  origin: string;
  bone: string;
  n_images: number;
}

export interface ImageEntry {
  image_id: string;
  modality: "xray" | "mri";
  plane: string;
  url: string;
}

export interface CaseDetail extends CaseSummary {
  images: ImageEntry[];
  revision: number;
}

export interface SegmentXrayResponse {
  revision: number;
  modality: "xray";
  mask_url: string;
  otsu_threshold: number;
  converged: boolean;
  foreground_pixels: number;
  /** Mask centroid as [x, y] pixel coordinates; null for an empty mask. */
  centroid: [number, number] | null;
}

export interface SegmentMriResponse {
  revision: number;
  modality: "mri";
  labels_url: string;
  centroids: number[];
  tumor_pixels: number;
  neighbor_pixels: number;
  centroid: [number, number] | null;
  flags: string[];
}

export type SegmentResponse = SegmentXrayResponse | SegmentMriResponse;

export interface CalibrationRecord {
  line: { p0: [number, number]; p1: [number, number] };
  known_length_cm: number;
  scale_cm_per_px: number;
  source: "user_supplied" | "reference_table";
}

export interface CalibrateResponse {
  revision: number;
  calibration: CalibrationRecord;
}

export interface MarginResponse {
  stage: Stage;
  lesion_radius_cm: number;
  margin_radius_cm: number;
  margin_cm: number;
  extrapolated: boolean;
  revision: number;
  scale_cm_per_px?: number;
}

export interface MarginTableRow {
  stage: Stage;
  lesion_radius_cm: number;
  margin_radius_cm: number;
  extrapolated: boolean;
}

/** Error body the service returns for every non-2xx response. */
export interface ServiceErrorBody {
  code: string;
  message: string;
  revision: number;
}

export interface Point {
  x: number;
  y: number;
}
