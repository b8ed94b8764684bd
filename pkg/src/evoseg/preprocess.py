"""Non-evolvable input preprocessing: raw channels -> model channels.

A raw entry is a list of 2D u8 arrays (an RGB file contributes three). The
preprocessing mode fixes how many channels the model sees (iota).
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .image import check_same_shape, round_half_up

# Ruifrok-Johnston stain optical-density vectors (rows: hematoxylin, eosin, DAB)
RGB_FROM_HED = np.array(
    [
        [0.65, 0.70, 0.29],
        [0.07, 0.99, 0.11],
        [0.27, 0.57, 0.78],
    ]
)
HED_FROM_RGB = np.linalg.inv(RGB_FROM_HED)

MODES = ("rgb", "hsv", "hed", "gray", "select")


@dataclass(frozen=True)
class PreprocessingSpec:
    mode: str = "rgb"
    channels: tuple = field(default=())

    def __post_init__(self):
        if self.mode not in MODES:
            raise InputError(f"unknown preprocessing mode {self.mode!r}")
        if self.mode == "select" and not self.channels:
            raise InputError("select mode needs a channel index list")
        object.__setattr__(self, "channels", tuple(self.channels))

    @property
    def iota(self):
        if self.mode == "gray":
            return 1
        if self.mode == "select":
            return len(self.channels)
        return 3

    def to_json(self):
        out = {"mode": self.mode}
        if self.mode == "select":
            out["channels"] = list(self.channels)
        return out

    @classmethod
    def from_json(cls, obj):
        return cls(mode=obj["mode"], channels=tuple(obj.get("channels", ())))


def rgb_to_hsv_u8(r, g, b):
    """Standard RGB->HSV with every channel rescaled to u8 (hue over 0..255)."""
    rf = r.astype(np.float64)
    gf = g.astype(np.float64)
    bf = b.astype(np.float64)
    mx = np.maximum(np.maximum(rf, gf), bf)
    mn = np.minimum(np.minimum(rf, gf), bf)
    d = mx - mn
    with np.errstate(invalid="ignore", divide="ignore"):
        h6 = np.where(
            d == 0,
            0.0,
            np.where(
                mx == rf,
                np.mod((gf - bf) / d, 6.0),
                np.where(mx == gf, (bf - rf) / d + 2.0, (rf - gf) / d + 4.0),
            ),
        )
        s = np.where(mx == 0, 0.0, d / mx)
    h = round_half_up(h6 / 6.0 * 255.0).astype(np.uint8)
    s8 = round_half_up(s * 255.0).astype(np.uint8)
    v8 = mx.astype(np.uint8)
    return [h, s8, v8]


def rgb_to_hed_u8(r, g, b):
    """Color deconvolution into stain channels, min-max rescaled to u8 each."""
    rgb = np.stack([r, g, b], axis=-1).astype(np.float64)
    od = -np.log10((rgb + 1.0) / 256.0)
    stains = od @ HED_FROM_RGB
    out = []
    for c in range(3):
        ch = stains[..., c]
        lo = ch.min()
        hi = ch.max()
        if hi - lo <= 0:
            out.append(np.zeros(r.shape, np.uint8))
        else:
            out.append(round_half_up((ch - lo) * (255.0 / (hi - lo))).astype(np.uint8))
    return out


def preprocess(raw_channels, spec):
    """Apply a preprocessing mode to raw channels, yielding iota channels."""
    raw = list(raw_channels)
    if not raw:
        raise InputError("no raw channels to preprocess")
    check_same_shape(raw, "raw channels")
    if spec.mode == "gray":
        if len(raw) != 1:
            raise InputError(f"gray preprocessing expects 1 raw channel, got {len(raw)}")
        return [raw[0].copy()]
    if spec.mode == "select":
        for c in spec.channels:
            if not 0 <= c < len(raw):
                raise InputError(f"channel index {c} out of range for {len(raw)} raw channels")
        return [raw[c].copy() for c in spec.channels]
    if len(raw) != 3:
        raise InputError(f"{spec.mode} preprocessing expects 3 raw channels (r,g,b), got {len(raw)}")
    r, g, b = raw
    if spec.mode == "rgb":
        return [r.copy(), g.copy(), b.copy()]
    if spec.mode == "hsv":
        return rgb_to_hsv_u8(r, g, b)
    return rgb_to_hed_u8(r, g, b)
