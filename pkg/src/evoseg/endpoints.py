"""Non-evolvable terminal transforms: heuristics -> masks or label maps.

All label outputs are int32 maps with contiguous labels 1..L; watershed
variants flood with 8-connectivity and assign boundary pixels to the
first-arriving label, so labels partition the reachable mask.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InputError
from .primitives import taps_for_sigma

KINDS = (
    "threshold_binary",
    "threshold_to_zero",
    "connected_components",
    "marker_watershed",
    "local_max_watershed",
    "hough_circle",
)

_MASK_KINDS = ("threshold_binary", "threshold_to_zero")


@dataclass(frozen=True)
class EndpointSpec:
    """kind plus the parameters that kind actually reads.

    sigma is the threshold value for threshold endpoints and the gaussian
    smoothing scale of the watershed topography for watershed endpoints.
    """

    kind: str
    sigma: float = None
    min_peak_distance: float = 5.0
    topography: str = "smoothed_dt"
    radius_min: int = 5
    radius_max: int = 40
    accumulator_threshold: float = 0.5
    min_center_distance: float = 10.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown endpoint kind {self.kind!r}")
        if self.sigma is None:
            default = 1.0 if self.kind in _MASK_KINDS else 2.0
            object.__setattr__(self, "sigma", default)

    @property
    def required_outputs(self):
        return 2 if self.kind == "marker_watershed" else 1

    @property
    def produces_labels(self):
        return self.kind not in _MASK_KINDS

    def to_json(self):
        out = {"kind": self.kind, "sigma": self.sigma}
        if self.kind == "local_max_watershed":
            out["min_peak_distance"] = self.min_peak_distance
            out["topography"] = self.topography
        if self.kind == "hough_circle":
            out.update(
                radius_min=self.radius_min,
                radius_max=self.radius_max,
                accumulator_threshold=self.accumulator_threshold,
                min_center_distance=self.min_center_distance,
            )
        return out

    @classmethod
    def from_json(cls, obj):
        known = {k: obj[k] for k in obj if k != "kind"}
        return cls(kind=obj["kind"], **known)


def apply(spec, heuristics):
    """Dispatch an EndpointSpec over the intermediate outputs."""
    if len(heuristics) < spec.required_outputs:
        raise InputError(f"{spec.kind} needs {spec.required_outputs} heuristics, got {len(heuristics)}")
    if spec.kind == "threshold_binary":
        return threshold_endpoint(heuristics[0], "binary", spec.sigma)
    if spec.kind == "threshold_to_zero":
        return threshold_endpoint(heuristics[0], "to_zero", spec.sigma)
    if spec.kind == "connected_components":
        return connected_components(heuristics[0])
    if spec.kind == "marker_watershed":
        return marker_controlled_watershed(heuristics[0], heuristics[1], smoothing=spec.sigma)
    if spec.kind == "local_max_watershed":
        return local_max_watershed(
            heuristics[0],
            smoothing=spec.sigma,
            min_peak_distance=spec.min_peak_distance,
            topography=spec.topography,
        )
    return hough_circle_endpoint(
        heuristics[0],
        spec.radius_min,
        spec.radius_max,
        accumulator_threshold=spec.accumulator_threshold,
        min_center_distance=spec.min_center_distance,
    )


def threshold_endpoint(z, mode, sigma):
    t = int(sigma)
    if mode == "binary":
        return ((z > t) * np.uint8(255)).astype(np.uint8)
    if mode == "to_zero":
        return np.where(z > t, z, 0).astype(np.uint8)
    raise InputError(f"unknown threshold mode {mode!r}")


def connected_components(mask):
    """8-connected components of {px > 0}, labeled in raster-first order."""
    labels, _ = kernels.label_8((np.asarray(mask) > 0).astype(np.uint8))
    return labels


def marker_controlled_watershed(mask, markers, smoothing=2.0):
    """Flood {mask > 0} from marker components over a smoothed -EDT topography."""
    mask = np.asarray(mask)
    markers = np.asarray(markers)
    if mask.shape != markers.shape:
        raise InputError(f"mask {mask.shape} and markers {markers.shape} differ in shape")
    m = (mask > 0).astype(np.uint8)
    seeds, count = kernels.label_8(((markers > 0) & (m > 0)).astype(np.uint8))
    if count == 0:
        return np.zeros(mask.shape, np.int32)
    dt = kernels.edt_f64(m)
    topo = -kernels.sep_convolve_f64(dt, taps_for_sigma(smoothing))
    return kernels.priority_flood(topo, seeds, m)


def _dt_peaks(dt, mask, min_peak_distance):
    """Local maxima of the distance map with a minimum mutual separation."""
    radius = max(int(np.ceil(min_peak_distance)), 1)
    wmax = kernels.window_max_f64(dt, radius)
    cand = (dt >= 1.0) & (dt >= wmax) & (mask > 0)
    ys, xs = np.nonzero(cand)
    if len(ys) == 0:
        return np.zeros(dt.shape, np.int32), 0
    vals = dt[ys, xs]
    order = np.lexsort((xs, ys, -vals))
    ys = ys[order].astype(np.int64)
    xs = xs[order].astype(np.int64)
    flags = kernels.greedy_select(ys, xs, dt.shape[0], dt.shape[1], float(min_peak_distance))
    seeds = np.zeros(dt.shape, np.int32)
    lab = 0
    for i in range(len(ys)):
        if flags[i]:
            lab += 1
            seeds[ys[i], xs[i]] = lab
    return seeds, lab


def local_max_watershed(mask, smoothing=2.0, min_peak_distance=5.0, topography="smoothed_dt"):
    """Split {mask > 0} by flooding from distance-map peaks.

    The default topography floods the negated smoothed distance map, which
    places boundaries on the necks between touching objects. "dt_gradient"
    floods the smoothed gradient magnitude of the distance map instead; it
    tends to split touching objects raggedly and exists for comparison.
    """
    m = (np.asarray(mask) > 0).astype(np.uint8)
    if not m.any():
        return np.zeros(m.shape, np.int32)
    dt = kernels.edt_f64(m)
    seeds, count = _dt_peaks(dt, m, min_peak_distance)
    if count == 0:
        return np.zeros(m.shape, np.int32)
    if topography == "dt_gradient":
        gy, gx = np.zeros_like(dt), np.zeros_like(dt)
        gy[1:-1, :] = (dt[2:, :] - dt[:-2, :]) * 0.5
        gx[:, 1:-1] = (dt[:, 2:] - dt[:, :-2]) * 0.5
        relief = np.sqrt(gx * gx + gy * gy)
        topo = kernels.sep_convolve_f64(relief, taps_for_sigma(smoothing))
    elif topography == "smoothed_dt":
        topo = -kernels.sep_convolve_f64(dt, taps_for_sigma(smoothing))
    else:
        raise InputError(f"unknown watershed topography {topography!r}")
    return kernels.priority_flood(topo, seeds, m)


def annulus_offsets_count(r):
    """Number of integer offsets whose rounded distance equals r."""
    d = np.arange(-r, r + 1)
    d2 = d[:, None] ** 2 + d[None, :] ** 2
    return int(np.count_nonzero((d2 >= (r - 0.5) ** 2) & (d2 < (r + 0.5) ** 2)))


def hough_circle_endpoint(z, radius_min, radius_max, accumulator_threshold=0.5, min_center_distance=10.0):
    """Detect circles among {px > 0} edge pixels; each becomes a filled disc label."""
    if radius_min < 1 or radius_max < radius_min:
        raise InputError(f"bad radius range [{radius_min}, {radius_max}]")
    z = np.asarray(z)
    h, w = z.shape
    ys, xs = np.nonzero(z > 0)
    if len(ys) == 0:
        return np.zeros((h, w), np.int32)
    votes = kernels.hough_votes(ys.astype(np.int64), xs.astype(np.int64), radius_min, radius_max, h, w)
    sizes = np.array([annulus_offsets_count(r) for r in range(radius_min, radius_max + 1)], np.float64)
    scores = votes / sizes[:, None, None]
    ri, cy, cx = np.nonzero(scores >= accumulator_threshold)
    if len(ri) == 0:
        return np.zeros((h, w), np.int32)
    sc = scores[ri, cy, cx]
    order = np.lexsort((ri, cx, cy, -sc))
    ri, cy, cx = ri[order], cy[order], cx[order]
    flags = kernels.greedy_select(cy.astype(np.int64), cx.astype(np.int64), h, w, float(min_center_distance))
    labels = np.zeros((h, w), np.int32)
    yy = np.arange(h)[:, None]
    xx = np.arange(w)[None, :]
    lab = 0
    for i in range(len(ri)):
        if not flags[i]:
            continue
        lab += 1
        r = radius_min + ri[i]
        disc = (yy - cy[i]) ** 2 + (xx - cx[i]) ** 2 <= r * r
        labels[disc & (labels == 0)] = lab
    return labels
