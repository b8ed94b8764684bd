"""Array conventions and small shared helpers.

Images are plain numpy arrays:

* ``Image2D``  -> 2D ``uint8`` array, row-major, values 0..255.
* ``LabelMap`` -> 2D ``int32`` array, 0 = background, labels contiguous 1..L.
* masks are any 2D array interpreted through ``> 0``.
"""

import numpy as np

from .errors import InputError


def as_u8(arr):
    """Coerce to a C-contiguous uint8 2D array without rescaling."""
    a = np.asarray(arr)
    if a.ndim != 2:
        raise InputError(f"expected a 2D image, got shape {a.shape}")
    if a.dtype != np.uint8:
        a = np.clip(a, 0, 255).astype(np.uint8)
    return np.ascontiguousarray(a)


def as_labels(arr):
    a = np.asarray(arr)
    if a.ndim != 2:
        raise InputError(f"expected a 2D label map, got shape {a.shape}")
    if a.min(initial=0) < 0:
        raise InputError("label maps must be non-negative")
    return np.ascontiguousarray(a.astype(np.int32, copy=False))


def check_same_shape(arrays, what="images"):
    shapes = {a.shape for a in arrays}
    if len(shapes) > 1:
        raise InputError(f"{what} must share dimensions, got {sorted(shapes)}")


def round_half_up(x):
    """Round floats half-up (0.5 -> 1), elementwise."""
    return np.floor(np.asarray(x, dtype=np.float64) + 0.5)


def clip_u8(x):
    return np.clip(x, 0, 255).astype(np.uint8)


def relabel_sequential(labels):
    """Relabel to contiguous 1..L by raster order of each label's first pixel."""
    lab = as_labels(labels)
    flat = lab.ravel()
    seen = {}
    out = np.zeros_like(flat)
    nz = np.flatnonzero(flat)
    for idx in nz:
        v = flat[idx]
        m = seen.get(v)
        if m is None:
            m = len(seen) + 1
            seen[v] = m
        out[idx] = m
    return out.reshape(lab.shape)


def label_count(labels):
    lab = np.asarray(labels)
    return int(lab.max(initial=0))


def label_areas(labels, count=None):
    """Pixel area per label, index 0 = background."""
    lab = as_labels(labels)
    n = (count if count is not None else label_count(lab)) + 1
    return np.bincount(lab.ravel(), minlength=n)[:n]


def label_centroids(labels, count=None):
    """(row, col) centroid per label as a float array of shape (L+1, 2)."""
    lab = as_labels(labels)
    n = (count if count is not None else label_count(lab)) + 1
    h, w = lab.shape
    flat = lab.ravel()
    area = np.bincount(flat, minlength=n)[:n].astype(np.float64)
    rows = np.bincount(flat, weights=np.repeat(np.arange(h), w), minlength=n)[:n]
    cols = np.bincount(flat, weights=np.tile(np.arange(w), h), minlength=n)[:n]
    with np.errstate(invalid="ignore", divide="ignore"):
        cent = np.stack([rows / area, cols / area], axis=1)
    return cent
