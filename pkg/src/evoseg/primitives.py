"""Deterministic u8 image transforms backing the default function library.

Every transform maps uint8 2D arrays to a uint8 2D array of the same shape,
saturates instead of wrapping, and uses reflected borders for windowed
operations. Pointwise math stays in numpy; windowed and scan-heavy work goes
through the kernel backends.
"""

import numpy as np

from . import kernels
from .image import clip_u8, round_half_up

# --- pointwise arithmetic -------------------------------------------------


def add(a, b):
    return clip_u8(a.astype(np.int16) + b)


def sub(a, b):
    return clip_u8(a.astype(np.int16) - b)


def minimum(a, b):
    return np.minimum(a, b)


def maximum(a, b):
    return np.maximum(a, b)


def mean(a, b):
    # round-half-up of the pairwise average
    return ((a.astype(np.uint16) + b + 1) >> 1).astype(np.uint8)


def abs_diff(a, b):
    return np.abs(a.astype(np.int16) - b).astype(np.uint8)


def bit_and(a, b):
    return a & b


def bit_or(a, b):
    return a | b


def bit_xor(a, b):
    return a ^ b


def multiply_scaled(a, b):
    return round_half_up(a.astype(np.float64) * b / 255.0).astype(np.uint8)


def bit_not(a):
    return (255 - a.astype(np.int16)).astype(np.uint8)


_SQRT_LUT = round_half_up(np.sqrt(np.arange(256) * 255.0)).astype(np.uint8)
_SQUARE_LUT = np.minimum(np.arange(256) ** 2, 255).astype(np.uint8)
_POW2_LUT = round_half_up(np.arange(256) ** 2 / 255.0).astype(np.uint8)


def sqrt_scaled(a):
    return _SQRT_LUT[a]


def square(a):
    return _SQUARE_LUT[a]


def pow2_scaled(a):
    return _POW2_LUT[a]


def gamma_correct(a, g):
    lut = round_half_up(255.0 * (np.arange(256) / 255.0) ** g).astype(np.uint8)
    return lut[a]


def min_max_normalize(a):
    lo = int(a.min())
    hi = int(a.max())
    if hi == lo:
        return np.zeros_like(a)
    return round_half_up((a.astype(np.float64) - lo) * (255.0 / (hi - lo))).astype(np.uint8)


def shift_left(a, s):
    return np.minimum(a.astype(np.int32) << s, 255).astype(np.uint8)


def shift_right(a, s):
    return (a >> s).astype(np.uint8)


# --- blurs ------------------------------------------------------------------


def gaussian_taps(k, sigma=None):
    """1D normalized gaussian taps; sigma derived from k unless given."""
    if k <= 1:
        return np.ones(1, np.float64)
    if sigma is None:
        sigma = 0.3 * ((k - 1) * 0.5 - 1.0) + 0.8
    d = np.arange(k, dtype=np.float64) - k // 2
    t = np.exp(-(d * d) / (2.0 * sigma * sigma))
    return t / t.sum()


def taps_for_sigma(sigma):
    k = 2 * int(np.ceil(3.0 * sigma)) + 1
    return gaussian_taps(k, sigma=sigma)


def gaussian_blur(a, k):
    return kernels.sep_convolve_u8(a, gaussian_taps(k))


def box_blur(a, k):
    return kernels.sep_convolve_u8(a, np.full(k, 1.0 / k, np.float64))


def median_blur(a, k):
    return kernels.median_u8(a, k)


def bilinear_resize(src, out_h, out_w):
    """Corner-aligned bilinear resize of a float64 array."""
    h, w = src.shape
    src = np.asarray(src, dtype=np.float64)
    ys = np.arange(out_h, dtype=np.float64) * ((h - 1) / (out_h - 1)) if out_h > 1 else np.zeros(out_h)
    xs = np.arange(out_w, dtype=np.float64) * ((w - 1) / (out_w - 1)) if out_w > 1 else np.zeros(out_w)
    y0 = np.minimum(ys.astype(np.int64), h - 1)
    x0 = np.minimum(xs.astype(np.int64), w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    fy = (ys - y0)[:, None]
    fx = (xs - x0)[None, :]
    top = src[np.ix_(y0, x0)] * (1 - fx) + src[np.ix_(y0, x1)] * fx
    bot = src[np.ix_(y1, x0)] * (1 - fx) + src[np.ix_(y1, x1)] * fx
    return top * (1 - fy) + bot * fy


_PYR_TAPS = np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0


def pyramid_blur(a):
    """Blur, decimate 2x, then resize back up: one pyramid round trip."""
    h, w = a.shape
    low = kernels.sep_convolve_f64(a.astype(np.float64), _PYR_TAPS)[::2, ::2]
    up = bilinear_resize(low, h, w)
    return clip_u8(round_half_up(up))


# --- edge detectors ---------------------------------------------------------

_SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], np.int64)
_SOBEL_Y = _SOBEL_X.T.copy()
_SCHARR_X = np.array([[-3, 0, 3], [-10, 0, 10], [-3, 0, 3]], np.int64)
_SCHARR_Y = _SCHARR_X.T.copy()
_LAPLACIAN = np.array([[0, 1, 0], [1, -4, 1], [0, 1, 0]], np.int64)

_KIRSCH_BASE = np.array([[5, 5, 5], [-3, 0, -3], [-3, -3, -3]], np.int64)


def _rotations_8(kern):
    ring = [(0, 0), (0, 1), (0, 2), (1, 2), (2, 2), (2, 1), (2, 0), (1, 0)]
    vals = [kern[p] for p in ring]
    out = []
    for r in range(8):
        k = np.zeros((3, 3), np.int64)
        for idx, p in enumerate(ring):
            k[p] = vals[(idx - r) % 8]
        out.append(k)
    return out


_KIRSCH_KERNELS = _rotations_8(_KIRSCH_BASE)


def _magnitude(gx, gy):
    m = np.sqrt(gx.astype(np.float64) ** 2 + gy.astype(np.float64) ** 2)
    return clip_u8(round_half_up(m))


def laplacian(a):
    return clip_u8(np.abs(kernels.conv3x3_i32(a, _LAPLACIAN)))


def sobel(a):
    return _magnitude(kernels.conv3x3_i32(a, _SOBEL_X), kernels.conv3x3_i32(a, _SOBEL_Y))


def sobel_x(a):
    return clip_u8(np.abs(kernels.conv3x3_i32(a, _SOBEL_X)))


def sobel_y(a):
    return clip_u8(np.abs(kernels.conv3x3_i32(a, _SOBEL_Y)))


def scharr(a):
    return _magnitude(kernels.conv3x3_i32(a, _SCHARR_X), kernels.conv3x3_i32(a, _SCHARR_Y))


def kirsch(a):
    best = kernels.conv3x3_i32(a, _KIRSCH_KERNELS[0])
    for kern in _KIRSCH_KERNELS[1:]:
        np.maximum(best, kernels.conv3x3_i32(a, kern), out=best)
    # positive-side kernel weight is 15, so a full edge maps to 255
    return clip_u8(round_half_up(np.maximum(best, 0) / 15.0))


# --- morphology -------------------------------------------------------------


def erode(a, k):
    return kernels.erode_u8(a, k)


def dilate(a, k):
    return kernels.dilate_u8(a, k)


def morph_open(a, k):
    return kernels.dilate_u8(kernels.erode_u8(a, k), k)


def morph_close(a, k):
    return kernels.erode_u8(kernels.dilate_u8(a, k), k)


def morph_gradient(a, k):
    return sub(kernels.dilate_u8(a, k), kernels.erode_u8(a, k))


def top_hat(a, k):
    return sub(a, morph_open(a, k))


def black_hat(a, k):
    return sub(morph_close(a, k), a)


def fill_holes(a):
    """Binary mask of {a > 0} with enclosed background regions filled."""
    fg = (a > 0).astype(np.uint8)
    inv = (1 - fg).astype(np.uint8)
    labels, count = kernels.label_8(inv)
    if count == 0:
        return fg * np.uint8(255)
    border = np.zeros(count + 1, bool)
    border[labels[0, :]] = True
    border[labels[-1, :]] = True
    border[labels[:, 0]] = True
    border[labels[:, -1]] = True
    border[0] = True
    hole = ~border[labels]
    return ((fg > 0) | hole).astype(np.uint8) * np.uint8(255)


def remove_small_objects(a, min_area):
    """Zero out 8-connected components of {a > 0} smaller than min_area px."""
    labels, count = kernels.label_8((a > 0).astype(np.uint8))
    if count == 0:
        return a.copy()
    areas = np.bincount(labels.ravel(), minlength=count + 1)
    keep = areas >= min_area
    keep[0] = False
    return np.where(keep[labels], a, 0).astype(np.uint8)


def distance_transform(a):
    """Euclidean distance to background, min-max rescaled to u8."""
    d = kernels.edt_f64((a > 0).astype(np.uint8))
    hi = d.max()
    if hi <= 0:
        return np.zeros_like(a)
    return round_half_up(d * (255.0 / hi)).astype(np.uint8)


# --- thresholds -------------------------------------------------------------


def threshold_binary(a, t):
    return ((a > t) * np.uint8(255)).astype(np.uint8)


def threshold_to_zero(a, t):
    return np.where(a > t, a, 0).astype(np.uint8)


def otsu_value(a):
    """Otsu threshold over the 256-bin histogram; first maximum wins ties."""
    hist = np.bincount(a.ravel(), minlength=256).astype(np.float64)
    total = hist.sum()
    if total == 0:
        return 0
    omega = np.cumsum(hist)
    mu = np.cumsum(hist * np.arange(256))
    mu_t = mu[-1]
    with np.errstate(invalid="ignore", divide="ignore"):
        between = (mu_t * omega - mu) ** 2 / (omega * (total - omega))
    between[~np.isfinite(between)] = -1.0
    return int(np.argmax(between))


def otsu_threshold(a):
    return threshold_binary(a, otsu_value(a))


def adaptive_threshold(a, k, offset):
    local_mean = kernels.sep_convolve_f64(a.astype(np.float64), np.full(k, 1.0 / k, np.float64))
    return ((a.astype(np.float64) > local_mean + offset) * np.uint8(255)).astype(np.uint8)
