"""Human-readable pipeline export.

The line-oriented DSL is the canonical artifact: one ``node`` line per active
node in topological order, with parameters already mapped to concrete
arguments. Exporting the same model twice yields byte-identical text.

Grammar (one directive per line):

    pipeline library=<id> hash=<sha256>
    preprocess mode=<mode> [channels=<i,j,...>]
    inputs <iota>
    node <addr> <function> src=<a[,b]> [<param>=<value> ...]
    output <index> <addr>
    endpoint <kind> [<param>=<value> ...]
"""

from .library import map_param


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _mapped_args(spec, raw_params):
    return [(slot.name, map_param(slot.kind, int(raw_params[i]))) for i, slot in enumerate(spec.params)]


def export_dsl(model):
    lib = model.library
    graph = model.graph()
    lines = [f"pipeline library={lib.library_id} hash={lib.content_hash}"]
    prep = model.preprocessing.to_json()
    prep_line = f"preprocess mode={prep['mode']}"
    if "channels" in prep:
        prep_line += " channels=" + ",".join(str(c) for c in prep["channels"])
    lines.append(prep_line)
    lines.append(f"inputs {graph.iota}")
    for node in graph.nodes:
        spec = lib.spec(node.fid)
        parts = [
            f"node {node.address} {spec.name}",
            "src=" + ",".join(str(c) for c in node.connections),
        ]
        for name, value in _mapped_args(spec, node.params):
            parts.append(f"{name}={_fmt(value)}")
        lines.append(" ".join(parts))
    for i, addr in enumerate(graph.output_addresses, start=1):
        lines.append(f"output {i} {addr}")
    epj = model.endpoint.to_json()
    ep_parts = [f"endpoint {epj.pop('kind')}"]
    for key in sorted(epj):
        ep_parts.append(f"{key}={_fmt(epj[key])}")
    lines.append(" ".join(ep_parts))
    return "\n".join(lines) + "\n"


_ENDPOINT_CALLS = {
    "threshold_binary": "endpoints.threshold_endpoint({z0}, 'binary', {sigma})",
    "threshold_to_zero": "endpoints.threshold_endpoint({z0}, 'to_zero', {sigma})",
    "connected_components": "endpoints.connected_components({z0})",
    "marker_watershed": "endpoints.marker_controlled_watershed({z0}, {z1}, smoothing={sigma})",
    "local_max_watershed": (
        "endpoints.local_max_watershed({z0}, smoothing={sigma}, min_peak_distance={min_peak_distance})"
    ),
    "hough_circle": (
        "endpoints.hough_circle_endpoint({z0}, {radius_min}, {radius_max}, "
        "accumulator_threshold={accumulator_threshold}, min_center_distance={min_center_distance})"
    ),
}


def export_python(model):
    """A standalone script reproducing the pipeline with plain imaging calls."""
    lib = model.library
    graph = model.graph()
    var = {i: f"x{i}" for i in range(1, graph.iota + 1)}
    body = []
    for node in graph.nodes:
        spec = lib.spec(node.fid)
        args = [var[c] for c in node.connections]
        args += [_fmt(v) for _, v in _mapped_args(spec, node.params)]
        var[node.address] = f"n{node.address}"
        body.append(f"    n{node.address} = primitives.{spec.fn.__name__}({', '.join(args)})")
    epj = model.endpoint.to_json()
    fmt_args = {k: _fmt(v) for k, v in epj.items()}
    outs = list(graph.output_addresses)
    fmt_args["z0"] = var[outs[0]]
    if len(outs) > 1:
        fmt_args["z1"] = var[outs[1]]
    call = _ENDPOINT_CALLS[model.endpoint.kind].format(**fmt_args)
    channel_names = ", ".join(var[i] for i in range(1, graph.iota + 1))
    unpack = channel_names + "," if graph.iota == 1 else channel_names
    prep = model.preprocessing.to_json()
    lines = [
        "#!/usr/bin/env python3",
        '"""Generated segmentation pipeline.',
        "",
        f"Library {lib.library_id} (hash {lib.content_hash}).",
        f"Expects {graph.iota} channel(s) preprocessed as {prep}.",
        '"""',
        "from evoseg import endpoints, primitives",
        "",
        "",
        "def run(channels):",
        f"    {unpack} = channels",
    ]
    lines += body
    lines.append(f"    return {call}")
    lines.append("")
    return "\n".join(lines)
