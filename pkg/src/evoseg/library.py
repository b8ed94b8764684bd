"""Function library: the ordered roster of evolvable image primitives.

The library fixes the genotype's induced parameters: alpha (max arity), rho
(max parameter count) and phi (function count). Raw genotype parameters are
u8 values mapped to concrete arguments per slot kind; the mapping is part of
the content hash so saved models stay reproducible against one exact roster.
"""

import hashlib
import json
from dataclasses import dataclass

from . import primitives as P
from .errors import InputError
from .image import check_same_shape

# slot kind -> mapping from a raw u8 gene to the concrete argument
PARAM_MAPPINGS = {
    "kernel": "2*(raw//32)+1",
    "threshold": "raw",
    "shift": "raw//32",
    "area": "raw*4",
    "gamma": "(raw+1)/64",
    "offset": "raw-128",
}


def map_param(kind, raw):
    if kind == "kernel":
        return 2 * (raw // 32) + 1
    if kind == "threshold":
        return int(raw)
    if kind == "shift":
        return raw // 32
    if kind == "area":
        return int(raw) * 4
    if kind == "gamma":
        return (raw + 1) / 64.0
    if kind == "offset":
        return int(raw) - 128
    raise KeyError(f"unknown param kind {kind!r}")


@dataclass(frozen=True)
class ParamSlot:
    name: str
    kind: str


@dataclass(frozen=True)
class FunctionSpec:
    fid: int
    name: str
    arity: int
    params: tuple
    fn: callable

    @property
    def param_count(self):
        return len(self.params)


def apply_primitive(spec, inputs, raw_params):
    """Run one library function on mapped arguments; saturating u8 out."""
    if len(inputs) < spec.arity:
        raise InputError(f"{spec.name} needs {spec.arity} inputs, got {len(inputs)}")
    check_same_shape(inputs[: spec.arity], f"inputs of {spec.name}")
    args = [map_param(slot.kind, int(raw_params[i])) for i, slot in enumerate(spec.params)]
    return spec.fn(*inputs[: spec.arity], *args)


class FunctionLibrary:
    def __init__(self, library_id, functions):
        self.library_id = library_id
        self.functions = tuple(functions)
        for i, f in enumerate(self.functions, start=1):
            if f.fid != i:
                raise InputError(f"function ids must be contiguous 1..phi, got {f.fid} at {i}")
        self.alpha = max(f.arity for f in self.functions)
        self.rho = max(f.param_count for f in self.functions)
        self._by_name = {f.name: f for f in self.functions}
        self._hash = None

    @property
    def phi(self):
        return len(self.functions)

    def spec(self, fid):
        return self.functions[fid - 1]

    def by_name(self, name):
        return self._by_name[name]

    def apply(self, fid, inputs, raw_params):
        return apply_primitive(self.spec(fid), inputs, raw_params)

    def manifest(self):
        return {
            "id": self.library_id,
            "alpha": self.alpha,
            "rho": self.rho,
            "param_mappings": dict(PARAM_MAPPINGS),
            "functions": [
                {
                    "id": f.fid,
                    "name": f.name,
                    "arity": f.arity,
                    "params": [{"name": s.name, "kind": s.kind} for s in f.params],
                }
                for f in self.functions
            ],
        }

    @property
    def content_hash(self):
        if self._hash is None:
            blob = json.dumps(self.manifest(), sort_keys=True, separators=(",", ":"))
            self._hash = hashlib.sha256(blob.encode()).hexdigest()
        return self._hash

    def manifest_with_hash(self):
        m = self.manifest()
        m["hash"] = self.content_hash
        return m


_K = ParamSlot("kernel_size", "kernel")
_T = ParamSlot("threshold", "threshold")


def _build_default():
    rows = [
        # (name, arity, params, fn)
        ("add", 2, (), P.add),
        ("sub", 2, (), P.sub),
        ("min", 2, (), P.minimum),
        ("max", 2, (), P.maximum),
        ("mean", 2, (), P.mean),
        ("abs_diff", 2, (), P.abs_diff),
        ("and", 2, (), P.bit_and),
        ("or", 2, (), P.bit_or),
        ("xor", 2, (), P.bit_xor),
        ("multiply_scaled", 2, (), P.multiply_scaled),
        ("not", 1, (), P.bit_not),
        ("sqrt", 1, (), P.sqrt_scaled),
        ("square", 1, (), P.square),
        ("pow2_scaled", 1, (), P.pow2_scaled),
        ("gamma", 1, (ParamSlot("gamma", "gamma"),), P.gamma_correct),
        ("min_max_normalize", 1, (), P.min_max_normalize),
        ("shift_left", 1, (ParamSlot("bits", "shift"),), P.shift_left),
        ("shift_right", 1, (ParamSlot("bits", "shift"),), P.shift_right),
        ("gaussian_blur", 1, (_K,), P.gaussian_blur),
        ("median_blur", 1, (_K,), P.median_blur),
        ("box_blur", 1, (_K,), P.box_blur),
        ("pyramid_blur", 1, (), P.pyramid_blur),
        ("laplacian", 1, (), P.laplacian),
        ("sobel", 1, (), P.sobel),
        ("sobel_x", 1, (), P.sobel_x),
        ("sobel_y", 1, (), P.sobel_y),
        ("scharr", 1, (), P.scharr),
        ("kirsch", 1, (), P.kirsch),
        ("erode", 1, (_K,), P.erode),
        ("dilate", 1, (_K,), P.dilate),
        ("open", 1, (_K,), P.morph_open),
        ("close", 1, (_K,), P.morph_close),
        ("morph_gradient", 1, (_K,), P.morph_gradient),
        ("top_hat", 1, (_K,), P.top_hat),
        ("black_hat", 1, (_K,), P.black_hat),
        ("fill_holes", 1, (), P.fill_holes),
        ("remove_small_objects", 1, (ParamSlot("min_area", "area"),), P.remove_small_objects),
        ("distance_transform", 1, (), P.distance_transform),
        ("threshold_binary", 1, (_T,), P.threshold_binary),
        ("threshold_to_zero", 1, (_T,), P.threshold_to_zero),
        ("otsu_threshold", 1, (), P.otsu_threshold),
        ("adaptive_threshold", 1, (_K, ParamSlot("offset", "offset")), P.adaptive_threshold),
    ]
    funcs = [FunctionSpec(i + 1, name, ar, ps, fn) for i, (name, ar, ps, fn) in enumerate(rows)]
    return FunctionLibrary("default-v1", funcs)


_DEFAULT = None


def default_library():
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = _build_default()
    return _DEFAULT


def get_library(library_id):
    if library_id == "default-v1":
        return default_library()
    raise InputError(f"unknown function library {library_id!r}")
