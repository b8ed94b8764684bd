"""Throughput benchmarking, including the numba-vs-numpy backend comparison."""

import time

import numpy as np

from . import kernels
from .endpoints import EndpointSpec
from .errors import InputError
from .genotype import Genotype
from .library import default_library
from .model import PipelineModel, run_model
from .preprocess import PreprocessingSpec
from .synthetic import disc_image


def reference_model(library=None):
    """Hand-wired 3-active-node pipeline (blur, threshold, erode) feeding a
    marker-controlled watershed; the shape used for throughput claims."""
    lib = library if library is not None else default_library()
    blur = lib.by_name("gaussian_blur").fid
    thresh = lib.by_name("threshold_binary").fid
    erode = lib.by_name("erode").fid
    # iota=1; addresses: x1=1, nodes 2..6; outputs read mask=3, markers=4
    mat = np.array(
        [
            [blur, 1, 1, 32, 0],  # n2 = gaussian_blur(x1, k=3)
            [thresh, 2, 1, 100, 0],  # n3 = threshold_binary(n2, 100)
            [erode, 3, 1, 96, 0],  # n4 = erode(n3, k=7)
            [1, 1, 1, 0, 0],  # inactive
            [1, 1, 1, 0, 0],  # inactive
            [0, 3, 0, 0, 0],  # output 1 -> mask
            [0, 4, 0, 0, 0],  # output 2 -> markers
        ],
        np.int64,
    )
    genotype = Genotype(iota=1, eta=5, o=2, alpha=lib.alpha, rho=lib.rho, matrix=mat)
    return PipelineModel(
        genotype=genotype,
        library=lib,
        preprocessing=PreprocessingSpec(mode="gray"),
        endpoint=EndpointSpec(kind="marker_watershed"),
        provenance={"note": "hand-wired benchmark reference"},
    )


def benchmark_image(size, seed=7):
    rng = np.random.Generator(np.random.PCG64(seed))
    img, _ = disc_image(size, size, rng, n_discs=(8, 12), radius=(10, 24), noise_sigma=15.0)
    return img


def measure_throughput(model, size=512, iterations=30, warmup=2, seed=7):
    """Median per-image wall time of run_model on one synthetic image."""
    if iterations < 1:
        raise InputError("iterations must be >= 1")
    img = benchmark_image(size, seed)
    for _ in range(warmup):
        run_model(model, img)
    times = np.empty(iterations)
    for i in range(iterations):
        t0 = time.perf_counter()
        run_model(model, img)
        times[i] = time.perf_counter() - t0
    median = float(np.median(times))
    return {
        "size": int(size),
        "iterations": int(iterations),
        "median_ms": median * 1e3,
        "min_ms": float(times.min()) * 1e3,
        "max_ms": float(times.max()) * 1e3,
        "images_per_s": 1.0 / median,
        "backend": kernels.active_backend,
    }


def compare_backends(model, size=512, iterations=30, fallback_iterations=None, seed=7):
    """Run the same benchmark under both kernel backends."""
    if fallback_iterations is None:
        fallback_iterations = max(1, iterations // 10)
    results = {}
    with kernels.backend("numba"):
        results["numba"] = measure_throughput(model, size, iterations, seed=seed)
    with kernels.backend("numpy"):
        results["numpy"] = measure_throughput(model, size, fallback_iterations, warmup=1, seed=seed)
    results["speedup"] = results["numba"]["images_per_s"] / results["numpy"]["images_per_s"]
    return results
