"""Multi-model ensemble heatmaps, threshold sweeps, and upscaling."""

import numpy as np

from .errors import InputError
from .metrics import iou
from .model import run_model
from .primitives import bilinear_resize

THRESHOLD_GRID = np.arange(101) / 100.0


def normalize_prediction(pred):
    """Min-max to [0, 1]; a constant prediction carries no ranking -> zeros."""
    p = np.asarray(pred, dtype=np.float64)
    lo = p.min()
    hi = p.max()
    if hi - lo <= 0:
        return np.zeros_like(p)
    return (p - lo) / (hi - lo)


def build_heatmap(models, raw_input, preprocessed=False):
    """Pixelwise mean of min-max-normalized predictions, one per model."""
    if not models:
        raise InputError("ensemble needs at least one model")
    acc = None
    for model in models:
        pred = normalize_prediction(run_model(model, raw_input, preprocessed=preprocessed))
        if acc is None:
            acc = pred
        elif acc.shape != pred.shape:
            raise InputError(f"model predictions disagree on shape: {acc.shape} vs {pred.shape}")
        else:
            acc += pred
    return acc / len(models)


def sweep_threshold(heatmaps, ground_truths):
    """Mean IoU over the 101-point threshold grid; best = argmax, first on ties."""
    pairs = list(zip(heatmaps, ground_truths))
    if not pairs:
        raise InputError("threshold sweep needs at least one heatmap/annotation pair")
    curve = np.empty(len(THRESHOLD_GRID))
    for i, t in enumerate(THRESHOLD_GRID):
        scores = [iou(hm >= t, np.asarray(gtm) > 0) for hm, gtm in pairs]
        curve[i] = float(np.mean(scores))
    best = int(np.argmax(curve))
    return float(THRESHOLD_GRID[best]), curve


def upscale_heatmap(heatmap, out_h, out_w):
    """Strategy A: bilinear-resize an existing heatmap; no model re-run."""
    return np.clip(bilinear_resize(np.asarray(heatmap, dtype=np.float64), out_h, out_w), 0.0, 1.0)


def upscale_predict(models, highres_input, preprocessed=False):
    """Strategy B: run every model on the high-res input and merge fresh
    predictions; no retraining."""
    return build_heatmap(models, highres_input, preprocessed=preprocessed)
