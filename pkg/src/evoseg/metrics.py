"""Segmentation scoring: IoU, one-to-one instance matching, AP, fitness.

Conventions fixed here: matching is greedy in descending IoU with ties broken
by (smaller gt label, smaller pred label); a pair counts only when IoU is
strictly above the threshold; empty-vs-empty scores 1.0.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .image import as_labels, label_count

AP_DEFAULT_THRESHOLD = 0.5


@dataclass(frozen=True)
class FitnessSpec:
    metric: str = "ap"
    iou_threshold: float = AP_DEFAULT_THRESHOLD

    def __post_init__(self):
        if self.metric not in ("ap", "iou"):
            raise InputError(f"unknown fitness metric {self.metric!r}")
        if not 0.0 < self.iou_threshold <= 1.0:
            raise InputError(f"iou_threshold must be in (0, 1], got {self.iou_threshold}")

    @property
    def needs_labels(self):
        return self.metric == "ap"

    def score(self, prediction, annotation):
        if self.metric == "iou":
            return iou(prediction, annotation)
        return average_precision(prediction, annotation, self.iou_threshold)

    def to_json(self):
        return {"metric": self.metric, "iou_threshold": self.iou_threshold}

    @classmethod
    def from_json(cls, obj):
        return cls(metric=obj["metric"], iou_threshold=obj.get("iou_threshold", AP_DEFAULT_THRESHOLD))


@dataclass
class MatchResult:
    pairs: list = field(default_factory=list)  # (pred label, gt label, iou)
    tp: int = 0
    fp: int = 0
    fn: int = 0


def iou(a, b):
    """Intersection over union of two masks; 1.0 when both are empty."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise InputError(f"mask shapes differ: {a.shape} vs {b.shape}")
    am = a > 0
    bm = b > 0
    union = np.count_nonzero(am | bm)
    if union == 0:
        return 1.0
    return np.count_nonzero(am & bm) / union


def _overlap_table(pred, gt):
    """Sparse label co-occurrence: one pass over the joint histogram."""
    p = pred.ravel().astype(np.int64)
    g = gt.ravel().astype(np.int64)
    gmax = int(g.max(initial=0))
    joint = p * (gmax + 1) + g
    codes, counts = np.unique(joint, return_counts=True)
    pl = codes // (gmax + 1)
    gl = codes % (gmax + 1)
    return pl, gl, counts


def match_instances(pred, gt, t=AP_DEFAULT_THRESHOLD):
    """Greedy one-to-one matching of instances by descending IoU."""
    pred = as_labels(pred)
    gt = as_labels(gt)
    if pred.shape != gt.shape:
        raise InputError(f"label map shapes differ: {pred.shape} vs {gt.shape}")
    np_count = label_count(pred)
    ng_count = label_count(gt)
    pl, gl, inter = _overlap_table(pred, gt)
    p_area = np.bincount(pred.ravel(), minlength=np_count + 1)
    g_area = np.bincount(gt.ravel(), minlength=ng_count + 1)

    keep = (pl > 0) & (gl > 0)
    pl, gl, inter = pl[keep], gl[keep], inter[keep]
    denom = p_area[pl] + g_area[gl] - inter
    ious = inter / denom

    order = np.lexsort((pl, gl, -ious))
    taken_p = np.zeros(np_count + 1, bool)
    taken_g = np.zeros(ng_count + 1, bool)
    result = MatchResult()
    for idx in order:
        if ious[idx] <= t:
            break  # descending order: nothing further qualifies
        p, g = int(pl[idx]), int(gl[idx])
        if taken_p[p] or taken_g[g]:
            continue
        taken_p[p] = True
        taken_g[g] = True
        result.pairs.append((p, g, float(ious[idx])))
    result.tp = len(result.pairs)
    result.fp = int(np.count_nonzero(p_area[1:])) - result.tp
    result.fn = int(np.count_nonzero(g_area[1:])) - result.tp
    return result


def average_precision(pred, gt, t=AP_DEFAULT_THRESHOLD):
    """TP / (TP + FP + FN); 1.0 when both maps are empty."""
    m = match_instances(pred, gt, t)
    total = m.tp + m.fp + m.fn
    if total == 0:
        return 1.0
    return m.tp / total


def fitness(model, dataset, spec):
    """Mean prediction error (1 - metric) of a model over a dataset."""
    from .model import run_model  # local import to avoid a cycle

    if len(dataset.entries) == 0:
        raise InputError("fitness needs a non-empty dataset")
    errors = []
    for entry in dataset.entries:
        pred = run_model(model, entry.input)
        errors.append(1.0 - spec.score(pred, entry.annotation))
    return float(np.mean(errors))
