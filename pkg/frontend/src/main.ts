import { ApiClient } from "./api";
import { CalibrateTool } from "./calibrate-tool";
import { MarginPanel } from "./margin-panel";
import { marginDisabledHint, Store } from "./state";
import type { Stage } from "./types";
import { buildRenderPlan, type RenderPlan } from "./viewer";

const STAGES: Stage[] = ["IB", "IIA", "IIB"];

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

function drawPlan(canvas: HTMLCanvasElement, plan: RenderPlan, images: Map<string, HTMLImageElement>): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.clearRect(0, 0, canvas.width, canvas.height);

  const base = plan.imageUrl !== null ? images.get(plan.imageUrl) : undefined;
  if (base && base.complete) {
    canvas.width = base.naturalWidth;
    canvas.height = base.naturalHeight;
    ctx.drawImage(base, 0, 0);
  }
  const overlay = plan.overlayUrl !== null ? images.get(plan.overlayUrl) : undefined;
  if (overlay && overlay.complete) {
    ctx.globalAlpha = plan.overlayOpacity;
    ctx.drawImage(overlay, 0, 0);
    ctx.globalAlpha = 1;
  }
  if (plan.line !== null) {
    ctx.strokeStyle = "#ffd24d";
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(plan.line.p0.x, plan.line.p0.y);
    ctx.lineTo(plan.line.p1.x, plan.line.p1.y);
    ctx.stroke();
    ctx.fillStyle = "#ffd24d";
    ctx.fillText(`${plan.line.lengthPx.toFixed(1)} px`, plan.line.p1.x + 6, plan.line.p1.y);
  }
  if (plan.circle !== null) {
    ctx.strokeStyle = plan.circle.warning ? "#ff5d5d" : "#4dd26f";
    ctx.setLineDash(plan.circle.warning ? [6, 4] : []);
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.arc(plan.circle.center.x, plan.circle.center.y, plan.circle.radiusPx, 0, 2 * Math.PI);
    ctx.stroke();
    ctx.setLineDash([]);
  }
}

function loadImage(url: string, cache: Map<string, HTMLImageElement>, onReady: () => void): void {
  if (cache.has(url)) return;
  const img = new Image();
  img.onload = onReady;
  img.src = url;
  cache.set(url, img);
}

export function mount(root: HTMLElement, api = new ApiClient()): void {
  const store = new Store();
  const panel = new MarginPanel(api, store);
  const images = new Map<string, HTMLImageElement>();

  const caseList = el("select", { class: "case-list" });
  const imageList = el("select", { class: "image-list" });
  const canvas = el("canvas", { class: "viewer" });
  const segmentBtn = el("button", {}, "Segment");
  const stageSelect = el("select", { class: "stage" });
  stageSelect.append(el("option", { value: "" }, "stage…"));
  for (const s of STAGES) stageSelect.append(el("option", { value: s }, s));
  const slider = el("input", { type: "range", min: "0.25", max: "6", step: "0.05" });
  const marginReadout = el("span", { class: "margin-readout" });
  const warnBadge = el("span", { class: "warn-badge", hidden: "" }, "outside validated range");
  const hintBox = el("p", { class: "hint" });
  const knownCm = el("input", { type: "number", placeholder: "known length (cm)" });

  const tool = new CalibrateTool((p0, p1) => {
    const state = store.get();
    if (state.selectedImage === null) return;
    const cm = Number(knownCm.value);
    if (!(cm > 0)) return;
    api.calibrateKnownLength(state.selectedImage, p0, p1, cm).then((resp) => {
      store.update({ calibration: resp.calibration, lastRevision: resp.revision, draftLine: null });
    });
  });

  canvas.addEventListener("pointerdown", (e) => tool.pointerDown({ x: e.offsetX, y: e.offsetY }));
  canvas.addEventListener("pointermove", (e) => {
    tool.pointerMove({ x: e.offsetX, y: e.offsetY });
    store.update({ draftLine: tool.draft() });
  });
  canvas.addEventListener("pointerup", (e) => tool.pointerUp({ x: e.offsetX, y: e.offsetY }));
  window.addEventListener("keydown", (e) => {
    if (e.key === "Escape") {
      tool.escape();
      store.update({ draftLine: null });
    }
  });

  caseList.addEventListener("change", () => {
    const caseId = caseList.value;
    store.update({ selectedCase: caseId, segmentation: null, displayedMarginCm: null });
    api.getCase(caseId).then((detail) => {
      imageList.replaceChildren(
        ...detail.images.map((im) => el("option", { value: im.image_id }, `${im.modality} ${im.plane}`)),
      );
      if (detail.images.length > 0) {
        store.update({ selectedImage: detail.images[0].image_id });
      }
    });
  });
  imageList.addEventListener("change", () => store.update({ selectedImage: imageList.value }));

  segmentBtn.addEventListener("click", () => {
    const s = store.get();
    if (s.selectedImage === null) return;
    const entry = imageList.selectedOptions[0]?.textContent ?? "";
    const modality = entry.startsWith("mri") ? "mri" : "xray";
    api.segment(s.selectedImage, modality).then((resp) => {
      store.update({ segmentation: resp, lastRevision: resp.revision });
      panel.requestMargin();
    });
  });

  stageSelect.addEventListener("change", () => {
    if (stageSelect.value !== "") panel.setStage(stageSelect.value as Stage);
  });
  slider.addEventListener("input", () => panel.setSliderRadius(Number(slider.value)));

  store.subscribe((s) => {
    marginReadout.textContent = s.displayedMarginCm !== null ? `${s.displayedMarginCm.toFixed(4)} cm` : "—";
    warnBadge.hidden = !s.extrapolated;
    hintBox.textContent = s.errorMessage ?? marginDisabledHint(s) ?? "";
    const disabled = marginDisabledHint(s) !== null;
    slider.disabled = disabled;
    stageSelect.disabled = s.calibration === null && s.segmentation === null;
    const plan = buildRenderPlan(s, (id) => api.imageUrl(id));
    for (const url of [plan.imageUrl, plan.overlayUrl]) {
      if (url !== null) loadImage(url, images, () => drawPlan(canvas, plan, images));
    }
    drawPlan(canvas, plan, images);
  });

  api.listCases().then((body) => {
    caseList.replaceChildren(...body.cases.map((c) => el("option", { value: c.case_id }, c.case_id)));
    store.update({ lastRevision: body.revision });
  });

  root.append(caseList, imageList, segmentBtn, canvas, knownCm, stageSelect, slider, marginReadout, warnBadge, hintBox);
}

if (typeof document !== "undefined") {
  const root = document.getElementById("app");
  if (root) mount(root);
}
