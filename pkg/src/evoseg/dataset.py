"""Dataset manifests, image loading, and the entry representation.

Manifest (JSON, paths relative to the manifest file):

    {
      "version": 1,
      "role": "train",
      "preprocessing": {"mode": "gray"},
      "entries": [
        {"channels": ["img.png"], "annotation": "img_labels.png"},
        {"stack": [["z0.png"], ["z1.png"]], "annotation": "labels.png"}
      ]
    }

Annotations: 8-bit files are semantic masks (nonzero = foreground), 16-bit
PNGs are instance label maps (0 = background, relabeled contiguous on load).
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import InputError, LoadError
from .image import relabel_sequential
from .preprocess import PreprocessingSpec, preprocess

MANIFEST_VERSION = 1


def load_image_channels(path):
    """Load an image file as a list of 2D u8 channel arrays."""
    try:
        img = Image.open(path)
        img.load()
    except (OSError, ValueError) as e:
        raise LoadError(f"cannot read image {path}: {e}") from e
    if img.mode in ("RGB", "RGBA"):
        arr = np.asarray(img.convert("RGB"), dtype=np.uint8)
        return [np.ascontiguousarray(arr[..., c]) for c in range(3)]
    if img.mode in ("L", "P"):
        return [np.asarray(img.convert("L"), dtype=np.uint8)]
    if img.mode in ("I", "I;16", "I;16B"):
        arr = np.asarray(img, dtype=np.int64)
        if arr.max(initial=0) > 255:
            raise LoadError(f"{path}: 16-bit image used as a channel must stay within u8 range")
        return [arr.astype(np.uint8)]
    raise LoadError(f"{path}: unsupported image mode {img.mode!r}")


def load_annotation(path):
    """16-bit PNG -> int32 label map; 8-bit -> u8 mask."""
    try:
        img = Image.open(path)
        img.load()
    except (OSError, ValueError) as e:
        raise LoadError(f"cannot read annotation {path}: {e}") from e
    if img.mode in ("I", "I;16", "I;16B"):
        labels = np.asarray(img, dtype=np.int32)
        return relabel_sequential(labels).astype(np.int32)
    if img.mode in ("L", "P"):
        return np.asarray(img.convert("L"), dtype=np.uint8)
    if img.mode == "RGB":
        raise LoadError(f"{path}: annotations must be single-channel")
    raise LoadError(f"{path}: unsupported annotation mode {img.mode!r}")


def save_labels_png(labels, path):
    lab = np.asarray(labels)
    if lab.max(initial=0) > 65535:
        raise InputError("label map exceeds 16-bit range")
    Image.fromarray(lab.astype(np.uint16)).save(path)


def save_mask_png(mask, path):
    Image.fromarray(np.asarray(mask, dtype=np.uint8), mode="L").save(path)


@dataclass
class DatasetEntry:
    name: str
    raw_sections: list  # per z-section: list of raw channel arrays
    annotation: np.ndarray
    preprocessing: PreprocessingSpec
    _sections: list = field(default=None, repr=False)

    @property
    def input(self):
        """Raw input as run_model expects it."""
        if len(self.raw_sections) == 1:
            return self.raw_sections[0]
        return self.raw_sections

    @property
    def sections(self):
        """Preprocessed channels per section (computed on first use)."""
        if self._sections is None:
            self._sections = [preprocess(sec, self.preprocessing) for sec in self.raw_sections]
        return self._sections

    @property
    def is_stack(self):
        return len(self.raw_sections) > 1


@dataclass
class Dataset:
    entries: list
    preprocessing: PreprocessingSpec
    role: str = "train"


def _entry_paths(spec, idx):
    if "channels" in spec:
        return [spec["channels"]]
    if "stack" in spec:
        return spec["stack"]
    raise LoadError(f"entry {idx}: needs 'channels' or 'stack'")


def load_dataset(manifest_path):
    manifest_path = Path(manifest_path)
    try:
        obj = json.loads(manifest_path.read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise LoadError(f"cannot read manifest {manifest_path}: {e}") from e
    if obj.get("version", MANIFEST_VERSION) != MANIFEST_VERSION:
        raise LoadError(f"unsupported manifest version {obj.get('version')!r}")
    if "entries" not in obj or not isinstance(obj["entries"], list):
        raise LoadError(f"{manifest_path}: manifest needs an 'entries' list")
    prep = PreprocessingSpec.from_json(obj.get("preprocessing", {"mode": "gray"}))
    base = manifest_path.parent
    entries = []
    for idx, spec in enumerate(obj["entries"]):
        name = spec.get("name", f"entry-{idx}")
        if "annotation" not in spec:
            raise LoadError(f"entry {name}: missing 'annotation'")
        raw_sections = []
        for section_paths in _entry_paths(spec, idx):
            channels = []
            for p in section_paths:
                channels.extend(load_image_channels(base / p))
            raw_sections.append(channels)
        shapes = {ch.shape for sec in raw_sections for ch in sec}
        if len(shapes) > 1:
            raise LoadError(f"entry {name}: channel dimensions differ: {sorted(shapes)}")
        counts = {len(sec) for sec in raw_sections}
        if len(counts) > 1:
            raise LoadError(f"entry {name}: z-sections disagree on channel count")
        annotation = load_annotation(base / spec["annotation"])
        if annotation.shape != raw_sections[0][0].shape:
            raise LoadError(
                f"entry {name}: annotation shape {annotation.shape} != image shape {raw_sections[0][0].shape}"
            )
        entries.append(DatasetEntry(name, raw_sections, annotation, prep))
    return Dataset(entries=entries, preprocessing=prep, role=obj.get("role", "train"))
