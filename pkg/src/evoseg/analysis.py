"""Post-segmentation analyses: instance pairing, intensity feature vectors,
area filtering, and conjugate (touching-pair) detection."""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InputError
from .image import as_labels, label_areas, label_centroids, label_count, relabel_sequential
from .metrics import match_instances
from .primitives import otsu_value

PAIRING_DEFAULT_THRESHOLD = 0.05


def pair_instances(a, b, t=PAIRING_DEFAULT_THRESHOLD):
    """Greedy one-to-one pairing of instances across two label maps.

    Returns (pairs, a_only, b_only) where pairs are (a label, b label, IoU)
    with IoU strictly above t; the rest are single-positive per side.
    """
    a = as_labels(a)
    b = as_labels(b)
    match = match_instances(a, b, t)
    paired_a = {p for p, _, _ in match.pairs}
    paired_b = {g for _, g, _ in match.pairs}
    a_only = [v for v in np.unique(a) if v > 0 and v not in paired_a]
    b_only = [v for v in np.unique(b) if v > 0 and v not in paired_b]
    return match.pairs, a_only, b_only


@dataclass
class IntensityFeatureVector:
    """2^C positivity-pattern counters plus per-channel (count, sum, mean).

    Pattern bit c is set when channel c exceeds its positivity threshold; the
    per-channel triple covers the positive pixels inside the instance.
    """

    combination_counts: np.ndarray
    positive_counts: np.ndarray
    intensity_sums: np.ndarray
    intensity_means: np.ndarray

    @property
    def length(self):
        return len(self.combination_counts) + 3 * len(self.positive_counts)

    def vector(self):
        per_channel = np.stack(
            [self.positive_counts, self.intensity_sums, self.intensity_means]
        ).T.ravel()
        return np.concatenate([self.combination_counts.astype(np.float64), per_channel])


def intensity_features(instance_mask, channels, thresholds=None):
    """Feature vector of one instance over C channels (Eq. length 2^C + 3C)."""
    mask = np.asarray(instance_mask) > 0
    channels = list(channels)
    c_count = len(channels)
    if c_count < 1:
        raise InputError("intensity features need at least one channel")
    for ch in channels:
        if ch.shape != mask.shape:
            raise InputError("channel dimensions must match the instance mask")
    if thresholds is None:
        thresholds = [otsu_value(ch) for ch in channels]
    if len(thresholds) != c_count:
        raise InputError(f"expected {c_count} thresholds, got {len(thresholds)}")

    patterns = np.zeros(mask.shape, np.int64)
    pos_counts = np.zeros(c_count, np.int64)
    sums = np.zeros(c_count, np.int64)
    means = np.zeros(c_count, np.float64)
    for c, (ch, t) in enumerate(zip(channels, thresholds)):
        positive = (ch > t) & mask
        patterns |= positive.astype(np.int64) << c
        pos_counts[c] = np.count_nonzero(positive)
        sums[c] = int(ch[positive].astype(np.int64).sum())
        means[c] = sums[c] / pos_counts[c] if pos_counts[c] else 0.0
    combos = np.bincount(patterns[mask], minlength=2**c_count)
    return IntensityFeatureVector(combos, pos_counts, sums, means)


def area_filter(labels, min_px, max_px):
    """Keep instances with min_px < area < max_px (strict), relabel contiguous."""
    if min_px >= max_px:
        raise InputError(f"area bounds must satisfy min < max, got ({min_px}, {max_px})")
    lab = as_labels(labels)
    count = label_count(lab)
    if count == 0:
        return lab.copy()
    areas = label_areas(lab, count)
    keep = (areas > min_px) & (areas < max_px)
    keep[0] = False
    return relabel_sequential(np.where(keep[lab], lab, 0))


def detect_conjugates(ctl, targets, max_centroid_dist=70.0, dilation_kernel=3, dilation_iterations=1):
    """Find (ctl, target) instance pairs in contact.

    Candidates by centroid distance strictly below max_centroid_dist; confirmed
    when the dilated target mask overlaps the CTL mask by >= 1 pixel.
    """
    ctl = as_labels(ctl)
    targets = as_labels(targets)
    if ctl.shape != targets.shape:
        raise InputError(f"label maps differ in shape: {ctl.shape} vs {targets.shape}")
    nc = label_count(ctl)
    nt = label_count(targets)
    if nc == 0 or nt == 0:
        return []
    c_cent = label_centroids(ctl, nc)
    t_cent = label_centroids(targets, nt)
    dilated = {}
    pairs = []
    for ci in range(1, nc + 1):
        for ti in range(1, nt + 1):
            d = np.hypot(*(c_cent[ci] - t_cent[ti]))
            if not d < max_centroid_dist:
                continue
            if ti not in dilated:
                m = (targets == ti).astype(np.uint8)
                for _ in range(dilation_iterations):
                    m = kernels.dilate_u8(m, dilation_kernel)
                dilated[ti] = m > 0
            if np.any(dilated[ti] & (ctl == ci)):
                pairs.append((ci, ti))
    return pairs
