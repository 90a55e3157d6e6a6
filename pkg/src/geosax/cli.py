"""Command-line surface.

Every command prints a JSON result to stdout and/or writes an artifact file.
Exit codes: 0 success, 1 validation error, 2 incompatible artifacts,
3 I/O error.
"""

from __future__ import annotations

import json
import sys

import click
import numpy as np

from . import bench as bench_mod
from . import codebook as cb_mod
from . import discover as disc_mod
from .encode import encode as encode_sequence
from . import match as match_mod
from . import storage
from .errors import GeosaxError, ValidationError
from .geometry import ManifoldDescriptor


def _emit(obj) -> None:
    click.echo(json.dumps(obj, sort_keys=True, indent=1))


def _fail(exc: GeosaxError) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(exc.exit_code)


def _guarded(fn):
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except GeosaxError as exc:
            _fail(exc)

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@click.group()
def main():
    """Symbolic approximation and fast matching for manifold sequences."""


@main.command()
@click.option("--manifold", required=True, help="e.g. hypersphere:8, grassmann:10,2, se3:19")
@click.option("--scenario", required=True, help="clusters:..., labeled-classes:..., concatenated-activities:...")
@click.option("--seed", type=int, required=True)
@click.option("--out", required=True, type=click.Path())
@_guarded
def gen(manifold, scenario, seed, out):
    """Generate a synthetic dataset."""
    desc = ManifoldDescriptor.from_spec(manifold)
    ds = storage.gen_synthetic(desc, storage.parse_scenario(scenario), seed)
    storage.save_dataset(ds, out)
    _emit(
        {
            "manifold": desc.spec(),
            "sequences": len(ds.sequences),
            "total_frames": int(sum(len(s) for s in ds.sequences)),
            "out": str(out),
        }
    )


@main.command()
@click.option("--in", "in_path", required=True, type=click.Path())
@click.option("--method", type=click.Choice(["kmeans", "conscience", "hybrid"]), required=True)
@click.option("--k", type=int, default=None, help="symbol count (kmeans/conscience)")
@click.option("--stage1-k", type=int, default=5, help="hybrid stage-1 cluster count")
@click.option("--r", type=int, default=1, help="hybrid split factor")
@click.option("--alpha", type=float, default=0.05)
@click.option("--b", "--B", "win_factor", type=float, default=1e-4)
@click.option("--c", "--C", "conscience", type=float, default=10.0)
@click.option("--passes", type=int, default=50)
@click.option("--seed", type=int, required=True)
@click.option("--out", required=True, type=click.Path())
@_guarded
def train(in_path, method, k, stage1_k, r, alpha, win_factor, conscience, passes, seed, out):
    """Learn a codebook from a dataset."""
    ds = storage.load_dataset(in_path)
    X = ds.all_points()
    if method == "kmeans":
        if k is None:
            raise ValidationError("--k is required for kmeans")
        cb = cb_mod.kmeans_geodesic(ds.descriptor, X, k, seed=seed)
    elif method == "conscience":
        if k is None:
            raise ValidationError("--k is required for conscience")
        cfg = cb_mod.ConscienceConfig(
            k=k, alpha=alpha, win_factor=win_factor, conscience=conscience,
            max_passes=passes, seed=seed,
        )
        cb = cb_mod.conscience_learn(ds.descriptor, X, cfg)
    else:
        cfg = cb_mod.ConscienceConfig(
            k=2, alpha=alpha, win_factor=win_factor, conscience=conscience,
            max_passes=passes, seed=seed,
        )
        cb = cb_mod.hybrid_learn(ds.descriptor, X, stage1_k, r, cfg)
    storage.save_codebook(cb, out)
    _emit({"k": cb.k, "id": cb.id, "entropy": cb.training_meta.get("entropy"), "out": str(out)})


@main.command()
@click.option("--in", "in_path", required=True, type=click.Path())
@click.option("--codebook", "cb_path", required=True, type=click.Path())
@click.option("--window", type=int, required=True)
@click.option("--out", required=True, type=click.Path())
@_guarded
def encode(in_path, cb_path, window, out):
    """Encode every sequence of a dataset into symbol strings."""
    ds = storage.load_dataset(in_path)
    cb = storage.load_codebook(cb_path)
    encoded = [encode_sequence(s, cb, window) for s in ds.sequences]
    storage.save_symbol_sequences(encoded, out)
    _emit(
        {
            "sequences": len(encoded),
            "window": window,
            "rendered": {e.id: e.render() for e in encoded[:10]},
            "out": str(out),
        }
    )


@main.command("match")
@click.option("--a", "a_path", required=True, type=click.Path())
@click.option("--b", "b_path", required=True, type=click.Path())
@click.option("--codebook", "cb_path", required=True, type=click.Path())
@click.option("--dtw", "use_dtw", is_flag=True, default=False, help="align with DTW instead of the rigid distance")
@_guarded
def match_cmd(a_path, b_path, cb_path, use_dtw):
    """Distance between the first sequences of two encoded files."""
    a = storage.load_symbol_sequences(a_path)[0]
    b = storage.load_symbol_sequences(b_path)[0]
    cb = storage.load_codebook(cb_path)
    if use_dtw or len(a) != len(b):
        result = match_mod.dtw_symbolic(a, b, cb)
        _emit({"a": a.id, "b": b.id, "distance": result.distance, "metric": "dtw"})
    else:
        _emit(
            {
                "a": a.id,
                "b": b.id,
                "distance": match_mod.symbol_distance(a, b, cb),
                "metric": "rigid",
            }
        )


@main.command()
@click.option("--query", "query_path", required=True, type=click.Path())
@click.option("--db", "db_path", required=True, type=click.Path())
@click.option("--codebook", "cb_path", required=True, type=click.Path())
@click.option("--k", type=int, required=True)
@_guarded
def knn(query_path, db_path, cb_path, k):
    """k nearest database entries for the first query sequence."""
    query = storage.load_symbol_sequences(query_path)[0]
    entries = storage.load_symbol_sequences(db_path)
    cb = storage.load_codebook(cb_path)
    db = match_mod.SequenceDatabase(cb.id, entries)
    hits = match_mod.knn(query, db, cb, k)
    _emit({"query": query.id, "hits": [{"id": i, "distance": d} for i, d in hits]})


@main.command()
@click.option("--db", "db_path", required=True, type=click.Path())
@click.option("--test", "test_path", type=click.Path(), default=None)
@click.option("--codebook", "cb_path", required=True, type=click.Path())
@click.option("--loo", is_flag=True, default=False, help="leave-one-out over the db")
@_guarded
def classify(db_path, test_path, cb_path, loo):
    """1-NN classification of test sequences against a labeled database."""
    entries = storage.load_symbol_sequences(db_path)
    cb = storage.load_codebook(cb_path)
    predictions = []
    correct = 0
    total = 0
    if loo:
        for i, held_out in enumerate(entries):
            rest = entries[:i] + entries[i + 1 :]
            db = match_mod.SequenceDatabase(cb.id, rest)
            pred = match_mod.nn_classify(held_out, db, cb)
            predictions.append({"id": held_out.id, "label": held_out.label, "predicted": pred})
            total += 1
            correct += int(pred == held_out.label)
    else:
        if test_path is None:
            raise ValidationError("--test is required unless --loo is given")
        tests = storage.load_symbol_sequences(test_path)
        db = match_mod.SequenceDatabase(cb.id, entries)
        for t in tests:
            pred = match_mod.nn_classify(t, db, cb)
            predictions.append({"id": t.id, "label": t.label, "predicted": pred})
            total += 1
            correct += int(pred == t.label)
    _emit(
        {
            "accuracy": correct / total if total else None,
            "n": total,
            "predictions": predictions,
        }
    )


@main.command()
@click.option("--in", "in_path", required=True, type=click.Path())
@click.option("--len", "length", type=int, required=True)
@click.option("--radius", required=True, help="match radius, or 'auto'")
@click.option("--trivial", type=int, required=True, help="trivial-match neighborhood m")
@click.option("--top", type=int, required=True, help="number of motifs")
@click.option("--codebook", "cb_path", required=True, type=click.Path())
@click.option("--out", type=click.Path(), default=None)
@_guarded
def discover(in_path, length, radius, trivial, top, cb_path, out):
    """Find the top-k motifs in the first sequence of an encoded file."""
    t = storage.load_symbol_sequences(in_path)[0]
    cb = storage.load_codebook(cb_path)
    if radius == "auto":
        r = disc_mod.auto_radius(t, length, cb)
    else:
        try:
            r = float(radius)
        except ValueError as exc:
            raise ValidationError(f"radius must be a number or 'auto', got {radius!r}") from exc
    query = disc_mod.MotifQuery(length=length, radius=r, trivial_radius=trivial, top_k=top)
    motifs = disc_mod.find_motifs(t, query, cb)
    meta = {
        "sequence": t.id,
        "length": length,
        "radius": r,
        "trivial_radius": trivial,
        "top_k": top,
    }
    if out:
        storage.save_motifs(motifs, meta, out)
    _emit(
        {
            **meta,
            "motifs": [
                {
                    "center_pos": m.center_pos,
                    "member_positions": list(m.member_positions),
                    "count": m.count,
                }
                for m in motifs
            ],
        }
    )


@main.command()
@click.option("--labels-from", "ds_path", required=True, type=click.Path())
@click.option("--codebook", "cb_path", required=True, type=click.Path())
@_guarded
def entropy(ds_path, cb_path):
    """Entropy of codebook labels over a dataset's points."""
    ds = storage.load_dataset(ds_path)
    cb = storage.load_codebook(cb_path)
    labels = cb_mod.assign_many(ds.all_points(), cb)
    _emit(
        {
            "k": cb.k,
            "entropy_bits": cb_mod.entropy(labels, cb.k),
            "max_entropy_bits": float(np.log2(cb.k)),
            "label_probs": (np.bincount(labels, minlength=cb.k) / labels.size).tolist(),
        }
    )


@main.command("bench")
@click.option("--suite", type=click.Choice(["speed", "tradeoff", "bits", "entropy"]), required=True)
@click.option("--out", required=True, type=click.Path())
@click.option("--seed", type=int, default=0)
@click.option("--repetitions", type=int, default=20)
@click.option("--parallel", is_flag=True, default=False)
@_guarded
def bench_cmd(suite, out, seed, repetitions, parallel):
    """Run a benchmark suite and write its report."""
    report = bench_mod.bench(suite, seed=seed, repetitions=repetitions, parallel=parallel)
    storage.save_report(report, out)
    summary = {"suite": suite, "out": str(out)}
    if suite == "speed":
        summary["matching_median_ratio"] = report["results"]["matching"]["median_time_ratio"]
        summary["knn_median_ratio"] = report["results"]["knn"]["median_time_ratio"]
    _emit(summary)


if __name__ == "__main__":
    main()
