import { ApiClient, ServiceError } from "./api";
import type { Store } from "./state";
import type { Stage } from "./types";

const DEFAULT_DEBOUNCE_MS = 150;

/**
 * Drives the stage selector and the what-if radius slider.
 *
 * Every displayed margin number comes from a POST /margin response; the panel
 * itself does no margin math. Slider movement is debounced, and responses are
 * sequence-checked so a slow early reply can never overwrite the result of a
 * later interaction.
 */
export class MarginPanel {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private requestSeq = 0;
  private appliedSeq = 0;

  constructor(
    private readonly api: ApiClient,
    private readonly store: Store,
    private readonly debounceMs: number = DEFAULT_DEBOUNCE_MS,
  ) {}

  setStage(stage: Stage): void {
    this.store.update({ stage });
    this.requestMargin();
  }

  /** Called on every slider input event; the POST fires after a settle delay. */
  setSliderRadius(radiusCm: number): void {
    this.store.update({ sliderRadiusCm: radiusCm });
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = null;
      this.requestMargin();
    }, this.debounceMs);
  }

  /** Issue the margin request for the current stage/radius immediately. */
  requestMargin(): void {
    const s = this.store.get();
    if (s.stage === null || s.selectedCase === null) return;
    if (s.sliderRadiusCm === null && s.segmentation === null) return;
    const seq = ++this.requestSeq;
    const radius = s.sliderRadiusCm ?? undefined;
    this.api
      .margin(s.selectedCase, s.stage, radius)
      .then((resp) => {
        if (seq <= this.appliedSeq) return; // a newer interaction already landed
        this.appliedSeq = seq;
        this.store.update({
          displayedMarginCm: resp.margin_radius_cm,
          extrapolated: resp.extrapolated,
          lastRevision: resp.revision,
          errorMessage: null,
        });
      })
      .catch((err) => {
        if (seq <= this.appliedSeq) return;
        if (err instanceof ServiceError) {
          if (err.isStaleRevision) {
            // newer state exists server-side; never clobber local state,
            // just retry against the current revision
            this.requestMargin();
            return;
          }
          // domain error: surface inline, keep slider/stage untouched
          this.store.update({ errorMessage: err.message });
          return;
        }
        this.store.update({ errorMessage: String(err) });
      });
  }

  /** True while a debounced request is pending (useful for spinners/tests). */
  get settling(): boolean {
    return this.timer !== null;
  }
}
