"""Benchmark harness: speed, approximation trade-off, bit budget, and
entropy-convergence suites.

Timings are reported as median/mean/std over repeated runs; ratios between
the symbolic and geodesic pipelines are the portable quantities.  All data is
generated from recorded seeds, so reports are reproducible up to the measured
times themselves.
"""

from __future__ import annotations

import math
import platform
import statistics
import sys
import time

import numpy as np

from . import codebook as cb_mod
from .encode import encode as encode_sequence
from . import geometry, match, storage
from .geometry import ManifoldDescriptor


def _environment() -> dict:
    return {
        "python": sys.version.split()[0],
        "numpy": np.__version__,
        "platform": platform.platform(),
    }


def _timing_stats(samples: list[float]) -> dict:
    return {
        "median_s": statistics.median(samples),
        "mean_s": statistics.fmean(samples),
        "std_s": statistics.pstdev(samples) if len(samples) > 1 else 0.0,
        "repetitions": len(samples),
        "samples_s": samples,
    }


def _time_repeated(fn, repetitions: int) -> list[float]:
    out = []
    for _ in range(repetitions):
        t0 = time.perf_counter()
        fn()
        out.append(time.perf_counter() - t0)
    return out


# ---------------------------------------------------------------------------
# speed suite


def speed_suite(
    seed: int = 0,
    repetitions: int = 20,
    n_factors: int = 19,
    length: int = 100,
    k: int = 32,
) -> dict:
    """Symbolic vs geodesic DTW on SE(3)^J sequences, plus encoding throughput.

    The symbolic matching loop is instrumented: the geometry call counter must
    stay at zero once the codebook is trained.
    """
    desc = ManifoldDescriptor.product_se3(n_factors)
    rng = np.random.default_rng(seed)
    ds = storage.gen_synthetic(
        desc,
        storage.LabeledClassesScenario(
            n_classes=2, executions=1, length=length, noise=0.05, step=0.05
        ),
        seed,
    )
    seq_a, seq_b = ds.sequences[0], ds.sequences[1]
    train = ds.all_points()
    cb = cb_mod.kmeans_geodesic(desc, train, k, max_iters=20, seed=seed)

    t0 = time.perf_counter()
    enc_a = encode_sequence(seq_a, cb, window=1)
    encode_time = time.perf_counter() - t0
    enc_b = encode_sequence(seq_b, cb, window=1)

    geodesic_times = _time_repeated(lambda: match.dtw_geodesic(seq_a, seq_b), repetitions)
    geometry.reset_geometry_calls()
    symbolic_times = _time_repeated(lambda: match.dtw_symbolic(enc_a, enc_b, cb), repetitions)
    symbolic_geometry_calls = geometry.geometry_call_count()

    med_sym = statistics.median(symbolic_times)
    med_geo = statistics.median(geodesic_times)
    return {
        "manifold": desc.spec(),
        "length": length,
        "k": k,
        "seed": seed,
        "symbolic_dtw": _timing_stats(symbolic_times),
        "geodesic_dtw": _timing_stats(geodesic_times),
        "median_time_ratio": med_sym / med_geo,
        "symbolic_geometry_calls": symbolic_geometry_calls,
        "encode_frames_per_s": length / encode_time if encode_time > 0 else float("inf"),
    }


def knn_speed_suite(
    seed: int = 0,
    repetitions: int = 20,
    n_factors: int = 19,
    length: int = 60,
    db_size: int = 10,
    k_symbols: int = 32,
) -> dict:
    """kNN query wall time over a small database, symbolic vs geodesic."""
    desc = ManifoldDescriptor.product_se3(n_factors)
    ds = storage.gen_synthetic(
        desc,
        storage.LabeledClassesScenario(
            n_classes=db_size, executions=1, length=length, noise=0.05, step=0.05
        ),
        seed,
    )
    cb = cb_mod.kmeans_geodesic(desc, ds.all_points(), k_symbols, max_iters=15, seed=seed)
    encoded = [encode_sequence(s, cb, window=1) for s in ds.sequences]
    query, entries = encoded[0], encoded[1:]
    raw_query, raw_entries = ds.sequences[0], ds.sequences[1:]
    db = match.SequenceDatabase(cb.id, entries)

    def symbolic_query():
        match.knn(query, db, cb, k=3)

    def geodesic_query():
        scored = sorted(
            (match.dtw_geodesic(raw_query, e).distance, e.id) for e in raw_entries
        )
        return scored[:3]

    geodesic_times = _time_repeated(geodesic_query, repetitions)
    symbolic_times = _time_repeated(symbolic_query, repetitions)
    return {
        "manifold": desc.spec(),
        "db_size": db_size,
        "length": length,
        "symbolic_knn": _timing_stats(symbolic_times),
        "geodesic_knn": _timing_stats(geodesic_times),
        "median_time_ratio": statistics.median(symbolic_times) / statistics.median(geodesic_times),
    }


# ---------------------------------------------------------------------------
# approximation trade-off suite


def approximation_error_grid(
    descriptor: ManifoldDescriptor,
    dataset: storage.DatasetFile,
    ks: list[int],
    ws: list[int],
    n_pairs: int = 50,
    seed: int = 0,
    train_iters: int = 30,
) -> dict:
    """Mean relative |d_geo - d_sym| / d_geo over sequence pairs, per (K, W).

    The symbolic DTW distance lives on the coarsened grid of M = ceil(N/W)
    windows, so it is scaled by W to compare against the frame-level geodesic
    DTW distance.
    """
    rng = np.random.default_rng(seed)
    seqs = dataset.sequences
    idx = np.arange(len(seqs))
    pairs = []
    # measure between distinct activities; same-class pairs have near-zero
    # geodesic distance and an uninformative relative error
    while len(pairs) < n_pairs:
        i, j = rng.choice(idx, size=2, replace=False)
        if seqs[i].label is not None and seqs[i].label == seqs[j].label:
            continue
        pairs.append((int(i), int(j)))
    geo = [match.dtw_geodesic(seqs[i], seqs[j]).distance for i, j in pairs]
    train = dataset.all_points()
    table = {}
    for k in ks:
        cb = cb_mod.kmeans_geodesic(descriptor, train, k, max_iters=train_iters, seed=seed)
        encoded = {}
        for w in ws:
            enc = [encode_sequence(s, cb, window=w) for s in seqs]
            rel = [
                abs(geo[p] - w * match.dtw_symbolic(enc[i], enc[j], cb).distance) / geo[p]
                for p, (i, j) in enumerate(pairs)
                if geo[p] > 0
            ]
            encoded[w] = float(np.mean(rel))
        table[k] = encoded
    return {
        "manifold": descriptor.spec(),
        "n_pairs": n_pairs,
        "seed": seed,
        "ks": ks,
        "ws": ws,
        "mean_relative_error": {str(k): {str(w): v for w, v in row.items()} for k, row in table.items()},
    }


def tradeoff_suite(seed: int = 0) -> dict:
    desc = ManifoldDescriptor.hypersphere(4)
    ds = storage.gen_synthetic(
        desc,
        storage.LabeledClassesScenario(
            n_classes=5, executions=20, length=60, noise=0.20, step=0.15
        ),
        seed,
    )
    return approximation_error_grid(desc, ds, ks=[10, 20, 40, 60], ws=[1, 2, 3], seed=seed)


# ---------------------------------------------------------------------------
# bit budget suite


def bits_suite() -> dict:
    """Compression ratios over representative feature shapes."""
    rows = []
    cases = [
        # (n_frames, dim, k, note)
        (100, 100, 64, "arithmetic reference case"),
        (80, 200, 60, "landmark shape feature"),
        (60, 30, 60, "flow histogram feature"),
        (60, 19 * 16, 25, "skeleton transform feature"),
        (100, 24, 64, "smallest supported dim"),
    ]
    for n, dim, k, note in cases:
        m = n  # window = 1
        symbolic = m * math.ceil(math.log2(k))
        original = n * dim * 32
        rows.append(
            {
                "n_frames": n,
                "dim": dim,
                "k": k,
                "window": 1,
                "original_bits": original,
                "symbolic_bits": symbolic,
                "compression_ratio": 1.0 - symbolic / original,
                "note": note,
            }
        )
    return {"bits_per_scalar": 32, "rows": rows}


# ---------------------------------------------------------------------------
# entropy suite


def entropy_suite(seed: int = 0, n_points: int = 10000, k: int = 10) -> dict:
    """Equiprobability comparison on the skewed cluster mixture."""
    desc = ManifoldDescriptor.hypersphere(8)
    ds = storage.gen_synthetic(desc, storage.ClustersScenario(n_points=n_points), seed)
    X = ds.all_points()
    km = cb_mod.kmeans_geodesic(desc, X, k, seed=seed)
    cfg = cb_mod.ConscienceConfig(k=k, seed=seed)
    cl = cb_mod.conscience_learn(desc, X, cfg)
    return {
        "manifold": desc.spec(),
        "n_points": n_points,
        "k": k,
        "seed": seed,
        "max_entropy": math.log2(k),
        "kmeans_entropy": km.training_meta["entropy"],
        "conscience_entropy": cl.training_meta["entropy"],
        "conscience_entropy_per_pass": cl.training_meta["entropy_per_pass"],
        "conscience_win_rates": cl.training_meta["win_rates"],
    }


# ---------------------------------------------------------------------------
# driver


def bench(suite: str, seed: int = 0, repetitions: int = 20, parallel: bool = False) -> dict:
    """Run one suite and wrap it in a reproducible report envelope."""
    runners = {
        "speed": lambda: {
            "matching": speed_suite(seed=seed, repetitions=repetitions),
            "knn": knn_speed_suite(seed=seed, repetitions=repetitions),
        },
        "tradeoff": lambda: tradeoff_suite(seed=seed),
        "bits": lambda: bits_suite(),
        "entropy": lambda: entropy_suite(seed=seed),
    }
    if suite not in runners:
        from .errors import ValidationError

        raise ValidationError(f"unknown suite {suite!r}; expected {sorted(runners)}")
    return {
        "suite": suite,
        "seed": seed,
        "parallel": parallel,  # accepted for interface parity; execution is serial
        "environment": _environment(),
        "results": runners[suite](),
    }
