"""Local JSON-over-HTTP service backing the workbench UI.

The service is a thin shell: every numeric result comes from the same
library calls the CLI uses. State is an in-memory session over one
ingested case root, with a monotonically increasing revision counter;
mutations are serialized per case while distinct cases proceed in
parallel. Binds loopback by default (local clinician tool).
"""

from __future__ import annotations

import io
import threading
import uuid
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response

from . import dataset
from .calibration import (
    FemurReferenceTable,
    ReferenceLine,
    set_scale,
)
from .errors import (
    DegenerateInputError,
    OsteosegError,
    ParameterError,
    PipelineStepError,
)
from .image import read_gray_png, write_labels_png, write_mask_png
from .margin import EnnekingStage, default_model, lesion_radius
from .mri import MriConfig, segment_mri
from .xray import XrayConfig, segment_xray


class ApiError(Exception):
    def __init__(self, status, code, message):
        self.status = status
        self.code = code
        self.message = message
        super().__init__(message)


def _error_code(exc):
    if isinstance(exc, PipelineStepError):
        kind = "DEGENERATE" if isinstance(exc.cause, DegenerateInputError) else "STEP_FAILED"
        return f"{kind}_{exc.step.upper()}"
    if isinstance(exc, DegenerateInputError):
        return "DEGENERATE_INPUT"
    if isinstance(exc, ParameterError):
        return "PARAMETER"
    return "DOMAIN_ERROR"


class CaseState:
    """Mutable per-case working state; guarded by its own lock."""

    def __init__(self):
        self.lock = threading.Lock()
        self.calibration = None
        self.stage = None
        self.latest_tumor_mask = None


class Session:
    def __init__(self, case_root, artifact_dir):
        self.case_root = Path(case_root)
        result = dataset.ingest(self.case_root)
        self.cases = {c.case_id: c for c in result.cases}
        self.diagnostics = result.diagnostics
        self.states = {cid: CaseState() for cid in self.cases}
        self.artifact_dir = Path(artifact_dir)
        self.artifact_dir.mkdir(parents=True, exist_ok=True)
        self._revision = 0
        self._rev_lock = threading.Lock()
        self.model = default_model()
        self.femur_table = FemurReferenceTable.bundled_placeholder()

    @property
    def revision(self):
        with self._rev_lock:
            return self._revision

    def bump(self):
        with self._rev_lock:
            self._revision += 1
            return self._revision

    def check_revision(self, payload):
        expected = payload.get("revision")
        if expected is not None and expected != self.revision:
            raise ApiError(409, "STALE_REVISION", f"revision {expected} is stale (now {self.revision})")

    def resolve_image(self, image_id):
        """image_id is '<case_id>/<filename>'."""
        if "/" not in image_id:
            raise ApiError(404, "UNKNOWN_IMAGE", f"unknown image id {image_id!r}")
        case_id, filename = image_id.split("/", 1)
        case = self.cases.get(case_id)
        if case is None:
            raise ApiError(404, "UNKNOWN_CASE", f"unknown case {case_id!r}")
        for ref in case.images:
            if Path(ref.path).name == filename:
                return case, ref
        raise ApiError(404, "UNKNOWN_IMAGE", f"unknown image id {image_id!r}")

    def state_for(self, case_id):
        state = self.states.get(case_id)
        if state is None:
            raise ApiError(404, "UNKNOWN_CASE", f"unknown case {case_id!r}")
        return state

    def store_artifact(self, writer, suffix):
        name = f"{uuid.uuid4().hex}.{suffix}"
        writer(self.artifact_dir / name)
        return name


def _mask_centroid(mask):
    """Foreground centroid as [x, y] pixel coordinates (None if empty)."""
    ys, xs = np.nonzero(mask.bits)
    if ys.size == 0:
        return None
    return [float(xs.mean()), float(ys.mean())]


def _image_id(case, ref):
    return f"{case.case_id}/{Path(ref.path).name}"


def _case_summary(case):
    return {
        "case_id": case.case_id,
        "age_years": case.age_years,
        "sex": case.sex,
        "origin": case.origin,
        "bone": case.bone,
        "n_images": len(case.images),
    }


def _case_detail(case):
    detail = _case_summary(case)
    detail["images"] = [
        {
            "image_id": _image_id(case, ref),
            "modality": ref.modality,
            "plane": ref.plane,
            "url": f"/images/{_image_id(case, ref)}",
        }
        for ref in case.images
    ]
    return detail


def _require(payload, key, types, code="MALFORMED_BODY"):
    if key not in payload:
        raise ApiError(400, code, f"missing field '{key}'")
    value = payload[key]
    if not isinstance(value, types):
        raise ApiError(400, code, f"field '{key}' has the wrong type")
    return value


def create_app(case_root, artifact_dir=None) -> FastAPI:
    if artifact_dir is None:
        artifact_dir = Path(case_root) / "_artifacts"
    session = Session(case_root, artifact_dir)
    app = FastAPI(title="osteoseg service")
    app.state.session = session

    @app.exception_handler(ApiError)
    async def _api_error(request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status,
            content={"code": exc.code, "message": exc.message, "revision": session.revision},
        )

    @app.exception_handler(OsteosegError)
    async def _domain_error(request, exc: OsteosegError):
        return JSONResponse(
            status_code=422,
            content={"code": _error_code(exc), "message": str(exc), "revision": session.revision},
        )

    async def _json_body(request: Request):
        try:
            payload = await request.json()
        except Exception:
            raise ApiError(400, "MALFORMED_BODY", "request body is not valid JSON")
        if not isinstance(payload, dict):
            raise ApiError(400, "MALFORMED_BODY", "request body must be a JSON object")
        return payload

    @app.get("/cases")
    def list_cases():
        return {
            "revision": session.revision,
            "cases": [_case_summary(c) for c in sorted(session.cases.values(), key=lambda c: c.case_id)],
        }

    @app.get("/cases/{case_id}")
    def get_case(case_id: str):
        case = session.cases.get(case_id)
        if case is None:
            raise ApiError(404, "UNKNOWN_CASE", f"unknown case {case_id!r}")
        detail = _case_detail(case)
        detail["revision"] = session.revision
        return detail

    @app.get("/images/{image_id:path}")
    def get_image(image_id: str):
        _, ref = session.resolve_image(image_id)
        return Response(content=Path(ref.path).read_bytes(), media_type="image/png")

    @app.get("/artifacts/{name}")
    def get_artifact(name: str):
        path = session.artifact_dir / Path(name).name
        if not path.is_file():
            raise ApiError(404, "UNKNOWN_ARTIFACT", f"unknown artifact {name!r}")
        return Response(content=path.read_bytes(), media_type="image/png")

    @app.post("/segment")
    async def segment(request: Request):
        payload = await _json_body(request)
        session.check_revision(payload)
        image_id = _require(payload, "image_id", str)
        modality = _require(payload, "modality", str)
        if modality not in ("xray", "mri"):
            raise ApiError(400, "MALFORMED_BODY", f"modality must be 'xray' or 'mri', got {modality!r}")
        cfg_dict = payload.get("config") or {}
        if not isinstance(cfg_dict, dict):
            raise ApiError(400, "MALFORMED_BODY", "config must be an object")
        case, ref = session.resolve_image(image_id)
        img = read_gray_png(ref.path)
        state = session.state_for(case.case_id)
        with state.lock:
            if modality == "xray":
                try:
                    cfg = XrayConfig.from_dict(cfg_dict) if cfg_dict else XrayConfig()
                except TypeError as exc:
                    raise ApiError(400, "MALFORMED_BODY", f"bad xray config: {exc}")
                seg = segment_xray(img, cfg)
                state.latest_tumor_mask = seg.lesion_mask
                name = session.store_artifact(lambda p: write_mask_png(seg.lesion_mask, p), "png")
                revision = session.bump()
                return {
                    "revision": revision,
                    "modality": "xray",
                    "mask_url": f"/artifacts/{name}",
                    "otsu_threshold": seg.otsu_threshold,
                    "converged": seg.converged,
                    "foreground_pixels": seg.lesion_mask.foreground_count,
                    "centroid": _mask_centroid(seg.lesion_mask),
                }
            try:
                cfg = MriConfig.from_dict(cfg_dict) if cfg_dict else MriConfig()
            except TypeError as exc:
                raise ApiError(400, "MALFORMED_BODY", f"bad mri config: {exc}")
            seg = segment_mri(img, cfg)
            state.latest_tumor_mask = seg.tumor_mask
            name = session.store_artifact(lambda p: write_labels_png(seg.labels, p), "png")
            revision = session.bump()
            return {
                "revision": revision,
                "modality": "mri",
                "labels_url": f"/artifacts/{name}",
                "centroids": [float(c) for c in seg.centroids],
                "tumor_pixels": seg.tumor_mask.foreground_count,
                "neighbor_pixels": seg.neighbor_mask.foreground_count,
                "centroid": _mask_centroid(seg.tumor_mask),
                "flags": seg.flags,
            }

    @app.post("/calibrate")
    async def calibrate(request: Request):
        payload = await _json_body(request)
        session.check_revision(payload)
        image_id = _require(payload, "image_id", str)
        line_d = _require(payload, "line", dict)
        try:
            line = ReferenceLine(tuple(line_d["p0"]), tuple(line_d["p1"]))
        except (KeyError, TypeError, IndexError):
            raise ApiError(400, "MALFORMED_BODY", "line must carry p0 and p1 point pairs")
        case, _ = session.resolve_image(image_id)
        if "known_cm" in payload:
            known = _require(payload, "known_cm", (int, float))
            source = "user_supplied"
        else:
            sex = _require(payload, "sex", str)
            age = _require(payload, "age", (int, float))
            known = session.femur_table.estimate(sex, age)
            source = "reference_table"
        record = set_scale(line, known, source)
        state = session.state_for(case.case_id)
        with state.lock:
            state.calibration = record
            revision = session.bump()
        return {"revision": revision, "calibration": record.to_dict()}

    @app.post("/margin")
    async def margin(request: Request):
        payload = await _json_body(request)
        session.check_revision(payload)
        case_id = _require(payload, "case_id", str)
        stage_raw = _require(payload, "stage", str)
        stage = EnnekingStage.parse(stage_raw)
        state = session.state_for(case_id)
        with state.lock:
            if "radius_cm" in payload and payload["radius_cm"] is not None:
                radius = _require(payload, "radius_cm", (int, float))
            else:
                if state.latest_tumor_mask is None:
                    raise ApiError(422, "NO_TUMOR_MASK", "no segmented tumor mask for this case")
                if state.calibration is None:
                    raise ApiError(422, "NO_CALIBRATION", "case is not calibrated")
                radius = lesion_radius(state.latest_tumor_mask, state.calibration)
            prediction = session.model.predict(stage, radius)
            state.stage = stage
            revision = session.bump()
        body = prediction.to_dict()
        body["margin_cm"] = prediction.margin_radius_cm
        body["revision"] = revision
        if state.calibration is not None:
            body["scale_cm_per_px"] = state.calibration.scale_cm_per_px
        return body

    @app.get("/margin-table")
    def margin_table(stage: str):
        parsed = EnnekingStage.parse(stage)
        rows = session.model.table(parsed)
        return {
            "revision": session.revision,
            "stage": parsed.value,
            "rows": [r.to_dict() for r in rows],
        }

    return app


def serve(port=8077, case_root=".", host="127.0.0.1", artifact_dir=None):
    """Run the service on loopback (blocking)."""
    import uvicorn

    app = create_app(case_root, artifact_dir)
    uvicorn.run(app, host=host, port=port)
