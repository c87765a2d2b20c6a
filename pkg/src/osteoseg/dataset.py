"""Case ingestion, exploration statistics, and result persistence.

Expected layout: `<root>/<case_id>/<image files>` with a `metadata.csv`
at the root (columns: case_id, age, sex, origin, bone, filename,
modality, plane). Results persist under `<out>/<case_id>/` with an
`index.json` validated against BUNDLE_SCHEMA.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, asdict
from datetime import datetime, timezone
from pathlib import Path

import jsonschema

from .calibration import CalibrationRecord
from .errors import OsteosegError, ParameterError
from .image import (
    BinaryMask,
    LabelMask,
    read_labels_png,
    read_mask_png,
    write_labels_png,
    write_mask_png,
)
from .margin import EnnekingStage, MarginPrediction
from .metrics import METRIC_NAMES, MetricRow

SEXES = ("male", "female", "unknown")
BONES = ("femur", "tibia", "fibula", "other")
MODALITIES = ("xray", "mri")
PLANES = ("frontal", "sagittal", "axial")

METADATA_COLUMNS = ("case_id", "age", "sex", "origin", "bone", "filename", "modality", "plane")


class BundleSchemaError(OsteosegError):
    """A persisted result index does not match the published schema."""


@dataclass(frozen=True)
class ImageRef:
    path: str
    modality: str
    plane: str | None = None
    accepted: bool = True


@dataclass(frozen=True)
class PatientCase:
    case_id: str
    age_years: int
    sex: str
    origin: str
    bone: str
    images: tuple = ()


@dataclass
class IngestResult:
    cases: list
    diagnostics: list


def _parse_row(root, row, line_no):
    case_id = (row.get("case_id") or "").strip()
    if not case_id:
        raise ValueError("missing case_id")
    try:
        age = int(row["age"])
        if age < 0:
            raise ValueError
    except (KeyError, ValueError, TypeError):
        raise ValueError(f"bad age {row.get('age')!r}")
    sex = (row.get("sex") or "unknown").strip().lower() or "unknown"
    if sex not in SEXES:
        raise ValueError(f"bad sex {sex!r}")
    bone = (row.get("bone") or "other").strip().lower() or "other"
    if bone not in BONES:
        bone = "other"
    modality = (row.get("modality") or "").strip().lower()
    if modality not in MODALITIES:
        raise ValueError(f"bad modality {row.get('modality')!r}")
    plane = (row.get("plane") or "").strip().lower() or None
    if modality == "mri":
        if plane not in PLANES:
            raise ValueError(f"MRI rows need a plane, got {row.get('plane')!r}")
    elif plane is not None and plane not in PLANES:
        raise ValueError(f"bad plane {row.get('plane')!r}")
    filename = (row.get("filename") or "").strip()
    if not filename:
        raise ValueError("missing filename")
    path = Path(root) / case_id / filename
    if not path.is_file():
        raise ValueError(f"image file not found: {path}")
    return case_id, age, sex, (row.get("origin") or "").strip(), bone, filename, modality, plane


def ingest(root_dir, metadata_csv=None) -> IngestResult:
    """Read metadata.csv and group rows into PatientCases.

    Unreadable rows become diagnostics rather than being dropped
    silently; a duplicated case_id+filename pair is an error.
    """
    root = Path(root_dir)
    csv_path = Path(metadata_csv) if metadata_csv else root / "metadata.csv"
    if not csv_path.is_file():
        raise ParameterError(f"metadata CSV not found: {csv_path}")

    diagnostics = []
    grouped = {}
    seen_files = set()
    with open(csv_path, newline="") as fh:
        reader = csv.DictReader(fh)
        for line_no, row in enumerate(reader, start=2):
            try:
                case_id, age, sex, origin, bone, filename, modality, plane = _parse_row(
                    root, row, line_no
                )
            except ValueError as exc:
                diagnostics.append(f"row {line_no}: {exc}")
                continue
            key = (case_id, filename)
            if key in seen_files:
                raise ParameterError(
                    f"row {line_no}: duplicate case_id+filename {key}"
                )
            seen_files.add(key)
            meta = (age, sex, origin, bone)
            entry = grouped.setdefault(case_id, {"meta": meta, "images": []})
            if entry["meta"] != meta:
                diagnostics.append(
                    f"row {line_no}: metadata for case {case_id} disagrees with earlier rows"
                )
            entry["images"].append(
                ImageRef(path=str(root / case_id / filename), modality=modality, plane=plane)
            )

    cases = []
    for case_id in sorted(grouped):
        entry = grouped[case_id]
        age, sex, origin, bone = entry["meta"]
        images = tuple(sorted(entry["images"], key=lambda r: r.path))
        cases.append(PatientCase(case_id, age, sex, origin, bone, images))
    return IngestResult(cases, diagnostics)


def explore(cases):
    """Dataset exploration statistics: age decades, sex, planes, bone sites."""
    if not cases:
        raise ParameterError("no cases to explore")
    max_age = max(c.age_years for c in cases)
    n_bins = max_age // 10 + 1
    age_histogram = {f"[{10*i},{10*(i+1)})": 0 for i in range(n_bins)}
    sex_counts = {s: 0 for s in SEXES}
    bone_counts = {b: 0 for b in BONES}
    modality_counts = {m: 0 for m in MODALITIES}
    plane_counts = {p: 0 for p in PLANES}  # MRI images only
    for c in cases:
        age_histogram[f"[{10*(c.age_years//10)},{10*(c.age_years//10+1)})"] += 1
        sex_counts[c.sex] += 1
        bone_counts[c.bone] += 1
        for ref in c.images:
            modality_counts[ref.modality] += 1
            if ref.modality == "mri":
                plane_counts[ref.plane] += 1
    return {
        "n_cases": len(cases),
        "n_images": sum(len(c.images) for c in cases),
        "age_histogram": age_histogram,
        "sex_counts": sex_counts,
        "bone_counts": bone_counts,
        "modality_counts": modality_counts,
        "mri_plane_counts": plane_counts,
    }


# ---------------------------------------------------------------------------
# Result bundles
# ---------------------------------------------------------------------------

BUNDLE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["case_id", "masks", "labels", "margin_predictions", "metric_rows", "created", "updated"],
    "properties": {
        "case_id": {"type": "string"},
        "masks": {"type": "object", "additionalProperties": {"type": "string"}},
        "labels": {"type": "object", "additionalProperties": {"type": "string"}},
        "calibration": {
            "type": ["object", "null"],
            "required": ["line", "known_length_cm", "scale_cm_per_px", "source"],
        },
        "margin_predictions": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["stage", "lesion_radius_cm", "margin_radius_cm", "extrapolated"],
            },
        },
        "metric_rows": {
            "type": "array",
            "items": {"type": "object", "required": ["name"] + list(METRIC_NAMES)},
        },
        "created": {"type": "string"},
        "updated": {"type": "string"},
    },
}


def _now():
    return datetime.now(timezone.utc).isoformat()


@dataclass
class CaseResultBundle:
    case_id: str
    masks: dict = field(default_factory=dict)      # name -> BinaryMask
    labels: dict = field(default_factory=dict)     # name -> LabelMask
    calibration: CalibrationRecord | None = None
    margin_predictions: list = field(default_factory=list)
    metric_rows: list = field(default_factory=list)
    created: str = field(default_factory=_now)
    updated: str = field(default_factory=_now)

    def touch(self):
        self.updated = _now()


def persist(bundle: CaseResultBundle, out_dir):
    """Write the bundle under out_dir/<case_id>/ and return the index path."""
    case_dir = Path(out_dir) / bundle.case_id
    case_dir.mkdir(parents=True, exist_ok=True)
    index = {
        "case_id": bundle.case_id,
        "masks": {},
        "labels": {},
        "calibration": bundle.calibration.to_dict() if bundle.calibration else None,
        "margin_predictions": [p.to_dict() for p in bundle.margin_predictions],
        "metric_rows": [asdict(r) for r in bundle.metric_rows],
        "created": bundle.created,
        "updated": bundle.updated,
    }
    for name, mask in bundle.masks.items():
        fname = f"mask_{name}.png"
        write_mask_png(mask, case_dir / fname)
        index["masks"][name] = fname
    for name, labels in bundle.labels.items():
        fname = f"labels_{name}.png"
        write_labels_png(labels, case_dir / fname)
        index["labels"][name] = fname
    index_path = case_dir / "index.json"
    with open(index_path, "w") as fh:
        json.dump(index, fh, indent=2, sort_keys=True)
    return index_path


def load(index_path) -> CaseResultBundle:
    index_path = Path(index_path)
    with open(index_path) as fh:
        index = json.load(fh)
    try:
        jsonschema.validate(index, BUNDLE_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise BundleSchemaError(exc.message) from exc
    case_dir = index_path.parent
    masks = {
        name: read_mask_png(case_dir / fname) for name, fname in index["masks"].items()
    }
    labels = {
        name: read_labels_png(case_dir / fname) for name, fname in index["labels"].items()
    }
    cal = index.get("calibration")
    predictions = [
        MarginPrediction(
            stage=EnnekingStage.parse(p["stage"]),
            lesion_radius_cm=p["lesion_radius_cm"],
            margin_radius_cm=p["margin_radius_cm"],
            extrapolated=p["extrapolated"],
        )
        for p in index["margin_predictions"]
    ]
    rows = [MetricRow(**r) for r in index["metric_rows"]]
    return CaseResultBundle(
        case_id=index["case_id"],
        masks=masks,
        labels=labels,
        calibration=CalibrationRecord.from_dict(cal) if cal else None,
        margin_predictions=predictions,
        metric_rows=rows,
        created=index["created"],
        updated=index["updated"],
    )
