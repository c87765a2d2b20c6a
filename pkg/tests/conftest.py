import csv

import pytest

from osteoseg.image import write_gray_png

from phantoms import mri_phantom, xray_phantom


@pytest.fixture
def case_root(tmp_path):
    """Two-case fixture: one X-ray case, one MRI case (two slices)."""
    root = tmp_path / "cases"
    rows = []

    (root / "case01").mkdir(parents=True)
    ximg, _ = xray_phantom()
    write_gray_png(ximg, root / "case01" / "xr_frontal.png")
    rows.append(("case01", 15, "male", "La Paz", "femur", "xr_frontal.png", "xray", "frontal"))

    (root / "case02").mkdir(parents=True)
    mimg, _, _ = mri_phantom()
    write_gray_png(mimg, root / "case02" / "mri_sag.png")
    write_gray_png(mimg, root / "case02" / "mri_ax.png")
    rows.append(("case02", 22, "female", "Cochabamba", "tibia", "mri_sag.png", "mri", "sagittal"))
    rows.append(("case02", 22, "female", "Cochabamba", "tibia", "mri_ax.png", "mri", "axial"))

    with open(root / "metadata.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("case_id", "age", "sex", "origin", "bone", "filename", "modality", "plane"))
        writer.writerows(rows)
    return root
