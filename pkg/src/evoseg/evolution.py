"""1+lambda evolution strategy with accumulate mutation.

RNG discipline: every (generation, child) pair gets its own PCG64 stream
derived from SeedSequence([seed, generation, child]), so runs are bit
reproducible regardless of how child evaluations are scheduled.
"""

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import endpoints as ep
from . import genotype as gt
from .errors import InputError, MutationStallError
from .graph import aggregate, decode, execute
from .metrics import FitnessSpec
from .model import PipelineModel

MUTATION_ROUND_CAP = 1000

FRUGALITY_MODES = ("node-count", "measured-time")


@dataclass
class EvolutionConfig:
    eta: int = 30
    lam: int = 5
    mu: float = 0.15
    nu: float = 0.2
    iterations: int = 20000
    seed: int = 0
    frugality: str = "node-count"
    fitness: FitnessSpec = field(default_factory=FitnessSpec)

    def __post_init__(self):
        if self.eta < 1 or self.lam < 1 or self.iterations < 1:
            raise InputError("eta, lambda and iterations must all be >= 1")
        if not (0.0 <= self.mu <= 1.0 and 0.0 <= self.nu <= 1.0):
            raise InputError("mutation rates must lie in [0, 1]")
        if self.frugality not in FRUGALITY_MODES:
            raise InputError(f"frugality must be one of {FRUGALITY_MODES}")

    def to_json(self):
        return {
            "eta": self.eta,
            "lambda": self.lam,
            "mu": self.mu,
            "nu": self.nu,
            "iterations": self.iterations,
            "seed": self.seed,
            "frugality": self.frugality,
            "fitness": self.fitness.to_json(),
        }

    @classmethod
    def from_json(cls, obj):
        kw = dict(obj)
        if "lambda" in kw:
            kw["lam"] = kw.pop("lambda")
        if "fitness" in kw:
            kw["fitness"] = FitnessSpec.from_json(kw["fitness"])
        return cls(**kw)


@dataclass
class TraceRow:
    generation: int
    error: float
    active_nodes: int
    replaced: bool


@dataclass
class EvolutionTrace:
    rows: list = field(default_factory=list)
    generations_run: int = 0
    stopped_early: bool = False

    @property
    def final_error(self):
        return self.rows[-1].error if self.rows else None


def stream(seed, generation, child):
    """Dedicated RNG stream for one (generation, child) slot."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, generation, child])))


def round_half_up_int(x):
    return int(np.floor(x + 0.5))


def random_genotype(iota, eta, o, library, rng):
    """Uniformly sample every meaningful gene within its legal range."""
    n = 1 + library.alpha + library.rho
    mat = np.zeros((eta + o, n), np.int64)
    for k in range(eta):
        mat[k, 0] = rng.integers(1, library.phi + 1)
        addr = iota + k + 1
        for c in range(1, 1 + library.alpha):
            mat[k, c] = rng.integers(1, addr)
        for c in range(1 + library.alpha, n):
            mat[k, c] = rng.integers(0, 256)
    for j in range(o):
        mat[eta + j, 1] = rng.integers(1, iota + eta + 1)
    return gt.Genotype(iota, eta, o, library.alpha, library.rho, mat)


def mutation_round(genotype, mu, nu, library, rng):
    """One in-place round: resample exactly round(mu*eta*n) distinct functional
    cells, then each output address with probability nu. Returns the count of
    functional cells touched."""
    g = genotype
    n = g.n
    total = g.eta * n
    count = round_half_up_int(mu * total)
    if count > 0:
        cells = rng.choice(total, size=count, replace=False)
        for cell in cells:
            k = int(cell) // n
            c = int(cell) % n
            if c == 0:
                g.matrix[k, 0] = rng.integers(1, library.phi + 1)
            elif c <= g.alpha:
                g.matrix[k, c] = rng.integers(1, g.iota + k + 1)
            else:
                g.matrix[k, c] = rng.integers(0, 256)
    for j in range(g.o):
        if rng.random() < nu:
            g.matrix[g.eta + j, 1] = rng.integers(1, g.iota + g.eta + 1)
    return count


def mutate(parent, mu, nu, library, rng, max_rounds=MUTATION_ROUND_CAP):
    """Accumulate-mutate a copy of parent until its active graph differs."""
    parent_graph = decode(parent, library)
    child = parent.copy()
    for _ in range(max_rounds):
        mutation_round(child, mu, nu, library, rng)
        child_graph = decode(child, library)
        if child_graph != parent_graph:
            return child
    raise MutationStallError(
        f"active graph unchanged after {max_rounds} mutation rounds (mu={mu}, nu={nu})"
    )


@dataclass
class Scored:
    genotype: object
    graph: object
    error: float
    frugality: float


def select(parent, children):
    """Lowest error wins; ties prefer the frugal graph, then the child."""
    best = parent
    best_is_parent = True
    for child in children:
        if (child.error, child.frugality) < (best.error, best.frugality) or (
            best_is_parent and (child.error, child.frugality) == (best.error, best.frugality)
        ):
            best = child
            best_is_parent = False
    return best, not best_is_parent


def _predict(graph, entry, library, endpoint):
    outs = [execute(graph, channels, library) for channels in entry.sections]
    agg = aggregate(outs) if len(outs) > 1 else outs[0]
    return ep.apply(endpoint, agg)


def evaluate_genotype(genotype, library, dataset, endpoint, fitness, frugality="node-count"):
    """Eq.-style dataset error plus the frugality measure used on ties."""
    graph = decode(genotype, library)
    errors = np.empty(len(dataset.entries))
    times = []
    for i, entry in enumerate(dataset.entries):
        t0 = time.perf_counter() if frugality == "measured-time" else 0.0
        pred = _predict(graph, entry, library, endpoint)
        if frugality == "measured-time":
            times.append(time.perf_counter() - t0)
        errors[i] = 1.0 - fitness.score(pred, entry.annotation)
    measure = float(np.median(times)) if frugality == "measured-time" else float(graph.active_count)
    return Scored(genotype, graph, float(np.mean(errors)), measure)


def evolve(dataset, config, library, endpoint, preprocessing=None, workers=1):
    """Run the full loop and wrap the surviving genotype as a deployable model."""
    if len(dataset.entries) == 0:
        raise InputError("training dataset is empty")
    if config.fitness.needs_labels:
        for entry in dataset.entries:
            if entry.annotation.dtype == np.uint8:
                raise InputError(
                    f"entry {entry.name!r}: AP fitness needs instance label annotations"
                )
    preprocessing = preprocessing if preprocessing is not None else dataset.preprocessing
    iota = preprocessing.iota
    o = endpoint.required_outputs

    def evaluate(g):
        return evaluate_genotype(g, library, dataset, endpoint, config.fitness, config.frugality)

    def evaluate_batch(genos):
        if workers > 1 and len(genos) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                return list(pool.map(evaluate, genos))
        return [evaluate(g) for g in genos]

    initial = [random_genotype(iota, config.eta, o, library, stream(config.seed, 0, i)) for i in range(config.lam + 1)]
    scored = evaluate_batch(initial)
    parent = scored[0]
    for cand in scored[1:]:
        if (cand.error, cand.frugality) < (parent.error, parent.frugality):
            parent = cand

    trace = EvolutionTrace()
    trace.rows.append(TraceRow(0, parent.error, parent.graph.active_count, False))
    generation = 0
    if parent.error > 0.0:
        for generation in range(1, config.iterations + 1):
            children_g = [
                mutate(parent.genotype, config.mu, config.nu, library, stream(config.seed, generation, c + 1))
                for c in range(config.lam)
            ]
            children = evaluate_batch(children_g)
            parent, replaced = select(parent, children)
            trace.rows.append(TraceRow(generation, parent.error, parent.graph.active_count, replaced))
            if parent.error <= 0.0:
                trace.stopped_early = generation < config.iterations
                break
    else:
        trace.stopped_early = True
    trace.generations_run = generation

    model = PipelineModel(
        genotype=parent.genotype,
        library=library,
        preprocessing=preprocessing,
        endpoint=endpoint,
        fitness=config.fitness,
        provenance={
            "seed": config.seed,
            "generations": trace.generations_run,
            "train_error": parent.error,
            "active_nodes": parent.graph.active_count,
            "config": config.to_json(),
        },
    )
    return model, trace
