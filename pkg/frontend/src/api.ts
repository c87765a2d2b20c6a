import type {
  CalibrateResponse,
  CaseDetail,
  CaseSummary,
  MarginResponse,
  MarginTableRow,
  Point,
  SegmentResponse,
  ServiceErrorBody,
  Stage,
} from "./types";

/** Thrown for any non-2xx service reply; carries the machine-readable code. */
export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly revision?: number,
  ) {
    super(message);
    this.name = "ServiceError";
  }

  get isStaleRevision(): boolean {
    return this.status === 409 && this.code === "STALE_REVISION";
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

async function asJson<T>(resp: Response): Promise<T> {
  if (!resp.ok) {
    let body: Partial<ServiceErrorBody> = {};
    try {
      body = await resp.json();
    } catch {
      // non-JSON error body; fall through with defaults
    }
    throw new ServiceError(
      resp.status,
      body.code ?? "UNKNOWN",
      body.message ?? `service returned ${resp.status}`,
      body.revision,
    );
  }
  return (await resp.json()) as T;
}

/**
 * Thin typed client over the service endpoints. All numbers displayed in the
 * UI come from these responses; the client performs no computation.
 */
export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.fetchImpl(this.base + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    }).then((r) => asJson<T>(r));
  }

  async listCases(): Promise<{ revision: number; cases: CaseSummary[] }> {
    return asJson(await this.fetchImpl(`${this.base}/cases`));
  }

  async getCase(caseId: string): Promise<CaseDetail> {
    return asJson(await this.fetchImpl(`${this.base}/cases/${encodeURIComponent(caseId)}`));
  }

  imageUrl(imageId: string): string {
    return `${this.base}/images/${imageId}`;
  }

  segment(imageId: string, modality: "xray" | "mri", config?: object): Promise<SegmentResponse> {
    return this.post("/segment", { image_id: imageId, modality, config });
  }

  calibrateKnownLength(imageId: string, p0: Point, p1: Point, knownCm: number): Promise<CalibrateResponse> {
    return this.post("/calibrate", {
      image_id: imageId,
      line: { p0: [p0.x, p0.y], p1: [p1.x, p1.y] },
      known_cm: knownCm,
    });
  }

  calibrateFromReference(imageId: string, p0: Point, p1: Point, sex: string, age: number): Promise<CalibrateResponse> {
    return this.post("/calibrate", {
      image_id: imageId,
      line: { p0: [p0.x, p0.y], p1: [p1.x, p1.y] },
      sex,
      age,
    });
  }

  margin(caseId: string, stage: Stage, radiusCm?: number, revision?: number): Promise<MarginResponse> {
    const payload: Record<string, unknown> = { case_id: caseId, stage };
    if (radiusCm !== undefined) payload.radius_cm = radiusCm;
    if (revision !== undefined) payload.revision = revision;
    return this.post("/margin", payload);
  }

  async marginTable(stage: Stage): Promise<MarginTableRow[]> {
    const body = await asJson<{ rows: MarginTableRow[] }>(
      await this.fetchImpl(`${this.base}/margin-table?stage=${stage}`),
    );
    return body.rows;
  }
}
