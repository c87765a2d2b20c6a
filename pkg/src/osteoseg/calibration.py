"""Pixel-to-centimeter calibration from a femur-length reference line."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from importlib import resources

from .errors import ParameterError


@dataclass(frozen=True)
class ReferenceLine:
    """A measurement line between two (x, y) pixel points; sub-pixel allowed."""

    p0: tuple
    p1: tuple

    def __post_init__(self):
        if tuple(self.p0) == tuple(self.p1):
            raise ParameterError("reference line endpoints must differ")
        object.__setattr__(self, "p0", (float(self.p0[0]), float(self.p0[1])))
        object.__setattr__(self, "p1", (float(self.p1[0]), float(self.p1[1])))

    def length_px(self):
        return math.hypot(self.p1[0] - self.p0[0], self.p1[1] - self.p0[1])


@dataclass(frozen=True)
class CalibrationRecord:
    line: ReferenceLine
    known_length_cm: float
    scale_cm_per_px: float
    source: str = "user_supplied"

    def to_dict(self):
        return {
            "line": {"p0": list(self.line.p0), "p1": list(self.line.p1)},
            "known_length_cm": self.known_length_cm,
            "scale_cm_per_px": self.scale_cm_per_px,
            "source": self.source,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            line=ReferenceLine(tuple(d["line"]["p0"]), tuple(d["line"]["p1"])),
            known_length_cm=d["known_length_cm"],
            scale_cm_per_px=d["scale_cm_per_px"],
            source=d.get("source", "user_supplied"),
        )

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def set_scale(line: ReferenceLine, known_length_cm, source="user_supplied") -> CalibrationRecord:
    if known_length_cm <= 0:
        raise ParameterError("known length must be > 0 cm")
    px = line.length_px()
    if px < 1.0:
        raise ParameterError(f"reference line is only {px:.3f} px long; need >= 1")
    return CalibrationRecord(line, float(known_length_cm), known_length_cm / px, source)


def measure_length(line: ReferenceLine, cal: CalibrationRecord):
    return line.length_px() * cal.scale_cm_per_px


class FemurReferenceTable:
    """Sex/age lookup of femur length with linear interpolation over age.

    Queries clamp at the table's age range. The bundled default table is a
    small placeholder and is NOT clinically sourced; deployments should
    replace it with data from a published anthropometric reference.
    """

    def __init__(self, rows):
        # rows: iterable of (sex, age_years, femur_length_cm)
        self._by_sex = {}
        seen = set()
        for sex, age, length in rows:
            sex = str(sex).strip().lower()
            age = float(age)
            length = float(length)
            if length <= 0:
                raise ParameterError(f"femur length must be positive, got {length}")
            if (sex, age) in seen:
                raise ParameterError(f"duplicate table key ({sex}, {age})")
            seen.add((sex, age))
            self._by_sex.setdefault(sex, []).append((age, length))
        for entries in self._by_sex.values():
            entries.sort()

    @classmethod
    def from_csv(cls, path_or_file):
        if hasattr(path_or_file, "read"):
            fh = path_or_file
            close = False
        else:
            fh = open(path_or_file, newline="")
            close = True
        try:
            reader = csv.DictReader(row for row in fh if not row.startswith("#"))
            rows = [
                (r["sex"], r["age_years"], r["femur_length_cm"]) for r in reader
            ]
        finally:
            if close:
                fh.close()
        return cls(rows)

    @classmethod
    def bundled_placeholder(cls):
        ref = resources.files("osteoseg.data") / "femur_reference_placeholder.csv"
        with ref.open("r") as fh:
            return cls.from_csv(fh)

    def sexes(self):
        return sorted(self._by_sex)

    def estimate(self, sex, age_years):
        sex = str(sex).strip().lower()
        if sex not in self._by_sex:
            raise ParameterError(f"no table entries for sex '{sex}'")
        entries = self._by_sex[sex]
        ages = [a for a, _ in entries]
        lengths = [l for _, l in entries]
        if age_years <= ages[0]:
            return lengths[0]
        if age_years >= ages[-1]:
            return lengths[-1]
        for i in range(1, len(ages)):
            if age_years <= ages[i]:
                a0, a1 = ages[i - 1], ages[i]
                l0, l1 = lengths[i - 1], lengths[i]
                t = (age_years - a0) / (a1 - a0)
                return l0 + t * (l1 - l0)
        raise AssertionError("unreachable")


def estimate_femur_length(sex, age_years, table: FemurReferenceTable):
    return table.estimate(sex, age_years)
