"""Decoding genotypes to active graphs and executing them on images."""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import genotype as gt
from .errors import InputError
from .image import check_same_shape, clip_u8, round_half_up


class ActiveNode(NamedTuple):
    address: int
    fid: int
    connections: tuple
    params: tuple


@dataclass(frozen=True)
class ActiveGraph:
    """Topologically ordered active nodes plus the output wiring.

    Only meaningful genes appear: a node carries arity(f) connections and
    param_count(f) raw parameters, so equality between two graphs means the
    executable pipelines are identical.
    """

    iota: int
    nodes: tuple
    output_addresses: tuple

    @property
    def active_count(self):
        return len(self.nodes)


def decode(genotype, library):
    """Extract the active subgraph reachable backwards from the outputs."""
    gt.validate(genotype, library)
    mat = genotype.matrix
    iota = genotype.iota
    outputs = genotype.output_addresses()

    needed = set()
    stack = [a for a in outputs if a > iota]
    while stack:
        addr = stack.pop()
        if addr in needed:
            continue
        needed.add(addr)
        row = addr - iota - 1
        spec = library.spec(int(mat[row, 0]))
        for c in range(spec.arity):
            conn = int(mat[row, 1 + c])
            if conn > iota:
                stack.append(conn)

    nodes = []
    for addr in sorted(needed):
        row = addr - iota - 1
        spec = library.spec(int(mat[row, 0]))
        conns = tuple(int(mat[row, 1 + c]) for c in range(spec.arity))
        params = tuple(int(mat[row, 1 + genotype.alpha + p]) for p in range(spec.param_count))
        nodes.append(ActiveNode(addr, spec.fid, conns, params))
    return ActiveGraph(iota=iota, nodes=tuple(nodes), output_addresses=outputs)


def execute(graph, channels, library):
    """Run the active graph on iota channels; returns the o heuristic images."""
    channels = list(channels)
    if len(channels) != graph.iota:
        raise InputError(f"graph expects {graph.iota} channels, got {len(channels)}")
    check_same_shape(channels, "input channels")
    values = {i + 1: ch for i, ch in enumerate(channels)}
    for node in graph.nodes:
        inputs = [values[c] for c in node.connections]
        values[node.address] = library.apply(node.fid, inputs, node.params)
    out = []
    for addr in graph.output_addresses:
        v = values[addr]
        out.append(v.copy() if addr <= graph.iota else v)
    return out


def aggregate(sections):
    """Pixelwise mean across z-sections per heuristic, rounded half-up to u8."""
    if not sections:
        raise InputError("aggregate needs at least one section")
    if len(sections) == 1:
        return [z.copy() for z in sections[0]]
    o = len(sections[0])
    for s in sections:
        if len(s) != o:
            raise InputError("sections disagree on heuristic count")
    out = []
    for i in range(o):
        stack = [s[i] for s in sections]
        check_same_shape(stack, "section heuristics")
        acc = np.zeros(stack[0].shape, np.float64)
        for z in stack:
            acc += z
        acc /= len(stack)
        out.append(clip_u8(round_half_up(acc)))
    return out
