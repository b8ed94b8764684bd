"""Deployable pipeline model: genotype + library identity + fixed stages."""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import endpoints as ep
from . import genotype as gt
from .errors import InputError, LoadError
from .graph import aggregate, decode, execute
from .library import get_library
from .metrics import FitnessSpec
from .preprocess import PreprocessingSpec, preprocess

MODEL_FORMAT = "evoseg-model"
MODEL_VERSION = 1


def normalize_input(raw):
    """Accept one array, a channel list, or a z-stack of channel lists; return
    a list of sections, each a list of 2D u8 channel arrays."""
    if isinstance(raw, np.ndarray):
        if raw.ndim == 3 and raw.shape[2] == 3:
            return [[np.ascontiguousarray(raw[..., c]) for c in range(3)]]
        if raw.ndim == 2:
            return [[raw]]
        raise InputError(f"cannot interpret array of shape {raw.shape} as input")
    seq = list(raw)
    if not seq:
        raise InputError("empty input")
    if isinstance(seq[0], np.ndarray):
        return [seq]
    return [list(section) for section in seq]


@dataclass
class PipelineModel:
    genotype: object
    library: object
    preprocessing: PreprocessingSpec
    endpoint: ep.EndpointSpec
    fitness: FitnessSpec = field(default_factory=FitnessSpec)
    aggregation: str = "mean"
    provenance: dict = field(default_factory=dict)
    _graph: object = field(default=None, repr=False, compare=False)

    def graph(self):
        if self._graph is None:
            self._graph = decode(self.genotype, self.library)
        return self._graph


def run_model(model, raw_input, preprocessed=False):
    """Decode once, execute per z-section, aggregate, then apply the endpoint."""
    sections = normalize_input(raw_input)
    graph = model.graph()
    if preprocessed:
        channels_per_section = sections
    else:
        channels_per_section = [preprocess(sec, model.preprocessing) for sec in sections]
    outs = [execute(graph, channels, model.library) for channels in channels_per_section]
    agg = aggregate(outs) if len(outs) > 1 else outs[0]
    return ep.apply(model.endpoint, agg)


def model_to_json(model):
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "genotype": gt.to_json(model.genotype, model.library),
        "preprocessing": model.preprocessing.to_json(),
        "aggregation": model.aggregation,
        "endpoint": model.endpoint.to_json(),
        "fitness": model.fitness.to_json(),
        "provenance": model.provenance,
    }


def save_model(model, path):
    Path(path).write_text(json.dumps(model_to_json(model), indent=2, sort_keys=True) + "\n")


def load_model(path, library=None):
    try:
        obj = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise LoadError(f"cannot read model file {path}: {e}") from e
    if obj.get("format") != MODEL_FORMAT:
        raise LoadError(f"{path} is not a model file (format={obj.get('format')!r})")
    if obj.get("version") != MODEL_VERSION:
        raise LoadError(f"unsupported model version {obj.get('version')!r}")
    if library is None:
        library = get_library(obj["genotype"]["library_id"])
    genotype = gt.from_json(obj["genotype"], library)
    return PipelineModel(
        genotype=genotype,
        library=library,
        preprocessing=PreprocessingSpec.from_json(obj["preprocessing"]),
        endpoint=ep.EndpointSpec.from_json(obj["endpoint"]),
        fitness=FitnessSpec.from_json(obj["fitness"]),
        aggregation=obj.get("aggregation", "mean"),
        provenance=obj.get("provenance", {}),
    )
