"""Per-pixel segmentation evaluation: confusion counts and metric families.

Binary metrics treat foreground as the positive class. Micro metrics
aggregate both classes symmetrically, treating each pixel as a two-class
single-label classification; for that setting micro F1, micro recall and
accuracy all reduce to (tp+tn)/total, while the micro-averaged Jaccard is
(tp+tn)/(tp+tn+2fp+2fn).

Empty-mask conventions: dice/jaccard/sensitivity/f1_binary are 1.0 when
both masks are empty and 0.0 when exactly one is (keeps batch means free
of NaN).
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass

from .errors import ParameterError
from .image import BinaryMask

METRIC_NAMES = (
    "jaccard_micro",
    "jaccard_binary",
    "accuracy_binary",
    "sensitivity",
    "f1_micro",
    "f1_binary",
    "recall_micro",
    "recall_binary",
    "dice",
)


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self):
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class MetricRow:
    name: str
    jaccard_micro: float
    jaccard_binary: float
    accuracy_binary: float
    sensitivity: float
    f1_micro: float
    f1_binary: float
    recall_micro: float
    recall_binary: float
    dice: float


@dataclass(frozen=True)
class MetricsReport:
    rows: list
    means: dict

    def to_json(self):
        return json.dumps(
            {"rows": [asdict(r) for r in self.rows], "means": self.means}, indent=2
        )

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(("name",) + METRIC_NAMES)
            for r in self.rows:
                d = asdict(r)
                writer.writerow([d["name"]] + [repr(d[m]) for m in METRIC_NAMES])
            writer.writerow(["mean"] + [repr(self.means[m]) for m in METRIC_NAMES])


def confusion(pred: BinaryMask, gt: BinaryMask) -> ConfusionCounts:
    if pred.shape != gt.shape:
        raise ParameterError(f"shape mismatch: {pred.shape} vs {gt.shape}")
    p = pred.bits
    g = gt.bits
    tp = int((p & g).sum())
    fp = int((p & ~g).sum())
    fn = int((~p & g).sum())
    tn = int((~p & ~g).sum())
    return ConfusionCounts(tp, fp, fn, tn)


def _safe_div(num, den, empty_value):
    return num / den if den else empty_value


def evaluate_pair(pred: BinaryMask, gt: BinaryMask, name="") -> MetricRow:
    c = confusion(pred, gt)
    both_empty = 1.0 if (c.tp + c.fp + c.fn) == 0 else 0.0
    dice = _safe_div(2 * c.tp, 2 * c.tp + c.fp + c.fn, both_empty)
    jaccard_binary = _safe_div(c.tp, c.tp + c.fp + c.fn, both_empty)
    sensitivity = _safe_div(c.tp, c.tp + c.fn, both_empty)
    accuracy = (c.tp + c.tn) / c.total
    micro = accuracy  # micro F1 == micro recall == accuracy for 2-class single-label
    jaccard_micro = (c.tp + c.tn) / (c.tp + c.tn + 2 * (c.fp + c.fn))
    return MetricRow(
        name=name,
        jaccard_micro=jaccard_micro,
        jaccard_binary=jaccard_binary,
        accuracy_binary=accuracy,
        sensitivity=sensitivity,
        f1_micro=micro,
        f1_binary=dice,
        recall_micro=micro,
        recall_binary=sensitivity,
        dice=dice,
    )


def evaluate_batch(pairs) -> MetricsReport:
    """pairs: iterable of (name, pred, gt). Means are unweighted over images."""
    rows = [evaluate_pair(pred, gt, name) for name, pred, gt in pairs]
    if not rows:
        raise ParameterError("empty batch")
    means = {
        m: sum(getattr(r, m) for r in rows) / len(rows) for m in METRIC_NAMES
    }
    return MetricsReport(rows, means)
