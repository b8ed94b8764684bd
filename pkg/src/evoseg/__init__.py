"""Evolving transparent image-segmentation pipelines.

Integer genotypes decode to acyclic graphs of deterministic u8 image
primitives, evolve under a 1+lambda strategy against annotated datasets, and
deploy as inspectable, exportable pipeline models.
"""

from .analysis import area_filter, detect_conjugates, intensity_features, pair_instances
from .dataset import Dataset, DatasetEntry, load_dataset
from .endpoints import (
    EndpointSpec,
    connected_components,
    hough_circle_endpoint,
    local_max_watershed,
    marker_controlled_watershed,
    threshold_endpoint,
)
from .ensemble import build_heatmap, sweep_threshold, upscale_heatmap, upscale_predict
from .errors import (
    EvosegError,
    GenotypeError,
    InputError,
    LibraryMismatchError,
    LoadError,
    MutationStallError,
)
from .evolution import EvolutionConfig, EvolutionTrace, evolve, mutate, random_genotype, select
from .export import export_dsl, export_python
from .genotype import Genotype, validate
from .graph import ActiveGraph, ActiveNode, aggregate, decode, execute
from .library import FunctionLibrary, FunctionSpec, apply_primitive, default_library, map_param
from .metrics import FitnessSpec, MatchResult, average_precision, fitness, iou, match_instances
from .model import PipelineModel, load_model, run_model, save_model
from .preprocess import PreprocessingSpec, preprocess

__version__ = "0.1.0"

__all__ = [
    "ActiveGraph",
    "ActiveNode",
    "Dataset",
    "DatasetEntry",
    "EndpointSpec",
    "EvolutionConfig",
    "EvolutionTrace",
    "EvosegError",
    "FitnessSpec",
    "FunctionLibrary",
    "FunctionSpec",
    "Genotype",
    "GenotypeError",
    "InputError",
    "LibraryMismatchError",
    "LoadError",
    "MatchResult",
    "MutationStallError",
    "PipelineModel",
    "PreprocessingSpec",
    "aggregate",
    "apply_primitive",
    "area_filter",
    "average_precision",
    "build_heatmap",
    "connected_components",
    "decode",
    "default_library",
    "detect_conjugates",
    "evolve",
    "execute",
    "export_dsl",
    "export_python",
    "fitness",
    "hough_circle_endpoint",
    "intensity_features",
    "iou",
    "load_dataset",
    "load_model",
    "local_max_watershed",
    "map_param",
    "marker_controlled_watershed",
    "match_instances",
    "mutate",
    "pair_instances",
    "preprocess",
    "random_genotype",
    "run_model",
    "save_model",
    "select",
    "sweep_threshold",
    "threshold_endpoint",
    "upscale_heatmap",
    "upscale_predict",
    "validate",
]
