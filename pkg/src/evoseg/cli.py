"""Command-line surface: train, predict, eval, ensemble, analyze, export, bench."""

import csv
import functools
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import click
import numpy as np

from . import bench as bench_mod
from . import ensemble as ens
from . import metrics as met
from .analysis import intensity_features, pair_instances
from .dataset import load_annotation, load_dataset, load_image_channels, save_labels_png, save_mask_png
from .endpoints import EndpointSpec
from .errors import EvosegError
from .evolution import EvolutionConfig, evolve
from .export import export_dsl, export_python
from .library import default_library
from .model import load_model, model_to_json, run_model, save_model

EXIT_ERROR = 2


def wraps_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except EvosegError as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(EXIT_ERROR)

    return wrapper


@click.group()
def main():
    """Evolve, inspect, and deploy transparent segmentation pipelines."""


# --- train -------------------------------------------------------------


def _read_run_config(path):
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise click.ClickException(f"cannot read config {path}: {e}")
    return cfg


def _train_single(cfg, run_index, out_dir):
    """One independent evolution run; returns its summary row."""
    base_seed = int(cfg.get("seed", 0))
    evo = dict(cfg.get("evolution", {}))
    evo["seed"] = base_seed + run_index
    if "fitness" in cfg:
        evo["fitness"] = cfg["fitness"]
    config = EvolutionConfig.from_json(evo)
    library = default_library()
    endpoint = EndpointSpec.from_json(cfg["endpoint"])
    train_ds = load_dataset(cfg["dataset"])
    workers = int(cfg.get("workers", 1)) if int(cfg.get("runs", 1)) == 1 else 1
    model, trace = evolve(train_ds, config, library, endpoint, workers=workers)

    test_error = None
    if cfg.get("test_dataset"):
        test_ds = load_dataset(cfg["test_dataset"])
        test_error = met.fitness(model, test_ds, config.fitness)
        model.provenance["test_error"] = test_error

    out_dir.mkdir(parents=True, exist_ok=True)
    model_path = out_dir / f"run_{run_index:03d}.json"
    save_model(model, model_path)
    with open(out_dir / f"run_{run_index:03d}_trace.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["generation", "error", "active_nodes", "replaced"])
        for row in trace.rows:
            w.writerow([row.generation, repr(row.error), row.active_nodes, int(row.replaced)])
    return {
        "run": run_index,
        "seed": config.seed,
        "model": model_path.name,
        "generations": trace.generations_run,
        "train_error": trace.final_error,
        "test_error": test_error,
    }


def _train_worker(args):
    cfg, run_index, out_dir = args
    return _train_single(cfg, run_index, Path(out_dir))


def _stats(values):
    vals = [v for v in values if v is not None]
    if not vals:
        return None
    arr = np.asarray(vals, dtype=np.float64)
    return {
        "min": float(arr.min()),
        "mean": float(arr.mean()),
        "max": float(arr.max()),
        "sd": float(arr.std(ddof=1)) if len(arr) > 1 else 0.0,
    }


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--dataset", default=None, type=click.Path(exists=True), help="Override the config's training manifest.")
@click.option("--seed", default=None, type=int, help="Override the base seed.")
@click.option("--runs", default=None, type=int, help="Number of independent runs.")
@click.option("--out", "out_dir", default=None, type=click.Path(), help="Output directory.")
@click.option("--workers", default=None, type=int, help="Parallelism degree.")
@click.option("--json", "as_json", is_flag=True, help="Emit the summary as JSON.")
@wraps_errors
def train(config_path, dataset, seed, runs, out_dir, workers, as_json):
    """Evolve one or more models from a config file."""
    cfg = _read_run_config(config_path)
    base = Path(config_path).parent
    for key in ("dataset", "test_dataset"):
        if cfg.get(key):
            cfg[key] = str((base / cfg[key]).resolve())
    if dataset:
        cfg["dataset"] = str(Path(dataset).resolve())
    if seed is not None:
        cfg["seed"] = seed
    if runs is not None:
        cfg["runs"] = runs
    if workers is not None:
        cfg["workers"] = workers
    if out_dir is not None:
        cfg["out_dir"] = out_dir
    if "endpoint" not in cfg:
        raise click.ClickException("config needs an 'endpoint' object")
    if "dataset" not in cfg:
        raise click.ClickException("config needs a 'dataset' manifest path")
    n_runs = int(cfg.get("runs", 1))
    n_workers = int(cfg.get("workers", 1))
    out = Path(cfg.get("out_dir", "evoseg-out"))

    # fail fast on config/dataset problems before any run starts
    load_dataset(cfg["dataset"])
    if cfg.get("test_dataset"):
        load_dataset(cfg["test_dataset"])
    EndpointSpec.from_json(cfg["endpoint"])

    if n_runs > 1 and n_workers > 1:
        with ProcessPoolExecutor(max_workers=min(n_workers, n_runs)) as pool:
            rows = list(pool.map(_train_worker, [(cfg, i, str(out)) for i in range(n_runs)]))
    else:
        rows = [_train_single(cfg, i, out) for i in range(n_runs)]

    summary = {
        "runs": rows,
        "train_error": _stats([r["train_error"] for r in rows]),
        "test_error": _stats([r["test_error"] for r in rows]),
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    if as_json:
        click.echo(json.dumps(summary, sort_keys=True))
    else:
        for r in rows:
            te = "-" if r["test_error"] is None else f"{r['test_error']:.4f}"
            click.echo(
                f"run {r['run']:3d} seed {r['seed']:6d} gens {r['generations']:6d} "
                f"train {r['train_error']:.4f} test {te}"
            )
        ts = summary["train_error"]
        click.echo(f"train error min/mean/max/sd: {ts['min']:.4f}/{ts['mean']:.4f}/{ts['max']:.4f}/{ts['sd']:.4f}")
        if summary["test_error"]:
            vs = summary["test_error"]
            click.echo(f"test error min/mean/max/sd: {vs['min']:.4f}/{vs['mean']:.4f}/{vs['max']:.4f}/{vs['sd']:.4f}")


# --- predict -----------------------------------------------------------


def _load_input(path):
    path = Path(path)
    if path.suffix == ".json":
        return load_dataset(path)
    return load_image_channels(path)


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--input", "input_path", required=True, type=click.Path(exists=True), help="Image file or dataset manifest.")
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--json", "as_json", is_flag=True)
@wraps_errors
def predict(model_path, input_path, out_dir, as_json):
    """Run a saved model and write label/mask PNGs."""
    model = load_model(model_path)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    loaded = _load_input(input_path)
    results = []
    if isinstance(loaded, list):  # a single image's channels
        pred = run_model(model, loaded)
        name = Path(input_path).stem + "_pred.png"
        _save_prediction(model, pred, out / name)
        results.append({"input": str(input_path), "output": name, "instances": int(np.max(pred, initial=0))})
    else:
        for entry in loaded.entries:
            pred = run_model(model, entry.input)
            name = f"{entry.name}_pred.png"
            _save_prediction(model, pred, out / name)
            results.append({"input": entry.name, "output": name, "instances": int(np.max(pred, initial=0))})
    if as_json:
        click.echo(json.dumps({"predictions": results}))
    else:
        for r in results:
            click.echo(f"{r['input']} -> {r['output']}")


def _save_prediction(model, pred, path):
    if model.endpoint.produces_labels:
        save_labels_png(pred, path)
    else:
        save_mask_png(pred, path)


# --- eval --------------------------------------------------------------


@main.command("eval")
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--dataset", "dataset_path", required=True, type=click.Path(exists=True))
@click.option("--csv", "csv_path", default=None, type=click.Path())
@click.option("--json", "as_json", is_flag=True)
@wraps_errors
def eval_cmd(model_path, dataset_path, csv_path, as_json):
    """Score a saved model on an annotated dataset."""
    model = load_model(model_path)
    ds = load_dataset(dataset_path)
    rows = []
    for entry in ds.entries:
        pred = run_model(model, entry.input)
        score = model.fitness.score(pred, entry.annotation)
        rows.append({"entry": entry.name, "score": score})
    mean = float(np.mean([r["score"] for r in rows]))
    if csv_path:
        with open(csv_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["entry", "score"])
            for r in rows:
                w.writerow([r["entry"], repr(r["score"])])
            w.writerow(["mean", repr(mean)])
    payload = {"metric": model.fitness.metric, "entries": rows, "mean": mean, "error": 1.0 - mean}
    if as_json:
        click.echo(json.dumps(payload))
    else:
        for r in rows:
            click.echo(f"{r['entry']}: {r['score']:.4f}")
        click.echo(f"mean {model.fitness.metric}: {mean:.4f} (error {1.0 - mean:.4f})")


# --- ensemble ----------------------------------------------------------


def _load_models(models_dir):
    paths = sorted(Path(models_dir).glob("*.json"))
    models = [p for p in paths if p.name not in ("summary.json", "manifest.json")]
    if not models:
        raise click.ClickException(f"no model files found in {models_dir}")
    return [load_model(p) for p in models]


@main.command()
@click.option("--models", "models_dir", required=True, type=click.Path(exists=True))
@click.option("--input", "input_path", default=None, type=click.Path(exists=True))
@click.option("--out", "out_path", default=None, type=click.Path(), help="Heatmap image (.png 16-bit or .tif float32).")
@click.option("--sweep", "sweep_manifest", default=None, type=click.Path(exists=True), help="Annotated manifest for threshold optimization.")
@click.option("--curve", "curve_path", default=None, type=click.Path(), help="CSV output for the sweep curve.")
@click.option("--json", "as_json", is_flag=True)
@wraps_errors
def ensemble(models_dir, input_path, out_path, sweep_manifest, curve_path, as_json):
    """Merge model predictions into a heatmap; optionally optimize its threshold."""
    models = _load_models(models_dir)
    payload = {"models": len(models)}
    if input_path:
        channels = load_image_channels(input_path)
        heatmap = ens.build_heatmap(models, channels)
        if out_path:
            _save_heatmap(heatmap, Path(out_path))
            payload["heatmap"] = str(out_path)
    if sweep_manifest:
        ds = load_dataset(sweep_manifest)
        heatmaps = [ens.build_heatmap(models, e.input) for e in ds.entries]
        gts = [e.annotation for e in ds.entries]
        best_t, curve = ens.sweep_threshold(heatmaps, gts)
        payload["best_threshold"] = best_t
        payload["best_mean_iou"] = float(curve.max())
        if curve_path:
            with open(curve_path, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["t", "mean_iou"])
                for i, v in enumerate(curve):
                    w.writerow([f"{i / 100.0:.2f}", repr(float(v))])
    if not input_path and not sweep_manifest:
        raise click.UsageError("provide --input and/or --sweep")
    if as_json:
        click.echo(json.dumps(payload))
    else:
        for k, v in payload.items():
            click.echo(f"{k}: {v}")


def _save_heatmap(heatmap, path):
    from PIL import Image

    if path.suffix.lower() in (".tif", ".tiff"):
        Image.fromarray(heatmap.astype(np.float32), mode="F").save(path)
    else:
        Image.fromarray((heatmap * 65535.0 + 0.5).astype(np.uint16)).save(path)


# --- analyze -----------------------------------------------------------


@main.group()
def analyze():
    """Post-segmentation analyses."""


@analyze.command("pair")
@click.option("--a", "path_a", required=True, type=click.Path(exists=True))
@click.option("--b", "path_b", required=True, type=click.Path(exists=True))
@click.option("--threshold", default=0.05, show_default=True)
@click.option("--out", "out_csv", required=True, type=click.Path())
@wraps_errors
def analyze_pair(path_a, path_b, threshold, out_csv):
    """Pair instances across two label maps by IoU."""
    a = load_annotation(path_a)
    b = load_annotation(path_b)
    pairs, a_only, b_only = pair_instances(a, b, threshold)
    with open(out_csv, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["map", "label", "matched_label", "iou", "kind"])
        for p, g, score in pairs:
            w.writerow(["a", p, g, repr(score), "double"])
        for v in a_only:
            w.writerow(["a", v, "", "", "single"])
        for v in b_only:
            w.writerow(["b", v, "", "", "single"])
    click.echo(f"{len(pairs)} double, {len(a_only)} a-only, {len(b_only)} b-only")


@analyze.command("features")
@click.option("--labels", "labels_path", required=True, type=click.Path(exists=True))
@click.option("--channels", "channel_paths", required=True, multiple=True, type=click.Path(exists=True))
@click.option("--thresholds", default=None, help="Comma-separated per-channel positivity thresholds (default: Otsu).")
@click.option("--out", "out_csv", required=True, type=click.Path())
@wraps_errors
def analyze_features(labels_path, channel_paths, thresholds, out_csv):
    """Intensity feature vector per instance."""
    labels = load_annotation(labels_path)
    channels = []
    for p in channel_paths:
        channels.extend(load_image_channels(p))
    th = None
    if thresholds:
        th = [int(x) for x in thresholds.split(",")]
    c = len(channels)
    with open(out_csv, "w", newline="") as fh:
        w = csv.writer(fh)
        combo_cols = [f"combo_{i:0{c}b}" for i in range(2**c)]
        per_ch = [f"ch{i}_{what}" for i in range(c) for what in ("count", "sum", "mean")]
        w.writerow(["label", "area"] + combo_cols + per_ch)
        for lab in range(1, int(labels.max(initial=0)) + 1):
            mask = labels == lab
            area = int(np.count_nonzero(mask))
            if area == 0:
                continue
            fv = intensity_features(mask, channels, th)
            row = [lab, area] + [int(x) for x in fv.combination_counts]
            for i in range(c):
                row += [int(fv.positive_counts[i]), int(fv.intensity_sums[i]), repr(float(fv.intensity_means[i]))]
            w.writerow(row)
    click.echo(f"wrote {out_csv}")


# --- export ------------------------------------------------------------


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", default=None, type=click.Path(), help="DSL output (stdout when omitted).")
@click.option("--script", "script_path", default=None, type=click.Path(), help="Also emit a standalone Python script.")
@wraps_errors
def export(model_path, out_path, script_path):
    """Export a model as a human-readable pipeline."""
    model = load_model(model_path)
    dsl = export_dsl(model)
    if out_path:
        Path(out_path).write_text(dsl)
    else:
        click.echo(dsl, nl=False)
    if script_path:
        Path(script_path).write_text(export_python(model))


# --- bench -------------------------------------------------------------


@main.command("bench")
@click.option("--model", "model_path", default=None, type=click.Path(exists=True), help="Defaults to the built-in reference pipeline.")
@click.option("--size", default=512, show_default=True)
@click.option("--iterations", default=30, show_default=True)
@click.option("--compare-backends", is_flag=True, help="Benchmark the jitted and pure-numpy kernel backends side by side.")
@click.option("--json", "as_json", is_flag=True)
@wraps_errors
def bench(model_path, size, iterations, compare_backends, as_json):
    """Measure single-core pipeline throughput."""
    if iterations < 1:
        raise click.UsageError("--iterations must be >= 1")
    model = load_model(model_path) if model_path else bench_mod.reference_model()
    if compare_backends:
        result = bench_mod.compare_backends(model, size=size, iterations=iterations)
        if as_json:
            click.echo(json.dumps(result))
        else:
            for name in ("numba", "numpy"):
                r = result[name]
                click.echo(f"{name:6s}: {r['images_per_s']:8.1f} images/s (median {r['median_ms']:.2f} ms at {size}x{size})")
            click.echo(f"speedup: {result['speedup']:.1f}x")
    else:
        r = bench_mod.measure_throughput(model, size=size, iterations=iterations)
        if as_json:
            click.echo(json.dumps(r))
        else:
            click.echo(
                f"{r['images_per_s']:.1f} images/s at {size}x{size} "
                f"(median {r['median_ms']:.2f} ms, backend {r['backend']})"
            )


if __name__ == "__main__":
    main()
