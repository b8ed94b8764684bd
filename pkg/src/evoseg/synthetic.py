"""Seeded synthetic disc datasets for benchmarks and end-to-end checks."""

import json
from pathlib import Path

import numpy as np

from .dataset import Dataset, DatasetEntry, save_labels_png, save_mask_png
from .image import clip_u8
from .preprocess import PreprocessingSpec


def disc_image(height, width, rng, n_discs=(5, 15), radius=(6, 14), noise_sigma=20.0):
    """White discs on black with additive gaussian noise; returns (image, labels).

    Disc centers keep a minimum mutual separation of max(r_i, r_j) + 2 px so
    instances stay splittable; later discs overwrite overlaps in the labels.
    """
    n = int(rng.integers(n_discs[0], n_discs[1] + 1))
    labels = np.zeros((height, width), np.int32)
    clean = np.zeros((height, width), np.float64)
    yy = np.arange(height)[:, None]
    xx = np.arange(width)[None, :]
    placed = []
    lab = 0
    attempts = 0
    while lab < n and attempts < 200 * n:
        attempts += 1
        r = int(rng.integers(radius[0], radius[1] + 1))
        cy = int(rng.integers(r, height - r))
        cx = int(rng.integers(r, width - r))
        if any((cy - py) ** 2 + (cx - px) ** 2 < (max(r, pr) + 2) ** 2 for py, px, pr in placed):
            continue
        placed.append((cy, cx, r))
        lab += 1
        disc = (yy - cy) ** 2 + (xx - cx) ** 2 <= r * r
        labels[disc] = lab
        clean[disc] = 255.0
    noisy = clean + rng.normal(0.0, noise_sigma, size=clean.shape)
    return clip_u8(noisy), labels


def disc_dataset(n_entries, height=128, width=128, seed=0, noise_sigma=20.0, role="train"):
    """In-memory dataset of noisy disc images with instance-label annotations."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, 0xD15C])))
    prep = PreprocessingSpec(mode="gray")
    entries = []
    for i in range(n_entries):
        img, labels = disc_image(height, width, rng, noise_sigma=noise_sigma)
        entries.append(DatasetEntry(f"disc-{role}-{i}", [[img]], labels, prep))
    return Dataset(entries=entries, preprocessing=prep, role=role)


def write_dataset(dataset, out_dir, semantic=False):
    """Materialize a dataset as PNGs plus a manifest; returns the manifest path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for e in dataset.entries:
        img_name = f"{e.name}.png"
        ann_name = f"{e.name}_ann.png"
        save_mask_png(e.raw_sections[0][0], out_dir / img_name)
        if semantic:
            save_mask_png((np.asarray(e.annotation) > 0).astype(np.uint8) * 255, out_dir / ann_name)
        else:
            save_labels_png(e.annotation, out_dir / ann_name)
        entries.append({"name": e.name, "channels": [img_name], "annotation": ann_name})
    manifest = {
        "version": 1,
        "role": dataset.role,
        "preprocessing": dataset.preprocessing.to_json(),
        "entries": entries,
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n")
    return path
