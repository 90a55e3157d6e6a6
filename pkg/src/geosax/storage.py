"""Self-describing JSON container for all artifacts, plus synthetic data
generation for the desk-scale experiment suites.

Every artifact round-trips exactly: floats serialize at full precision via
repr, symbol data as integers.  Loads re-validate invariants and reject
unknown container versions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import geometry
from .codebook import Codebook
from .discover import MotifResult
from .encode import SymbolSequence
from .errors import FormatVersionError, StorageError, ValidationError
from .geometry import ManifoldDescriptor
from .stats import ManifoldSequence

FORMAT_VERSION = 1


@dataclass
class DatasetFile:
    """A set of sequences on one manifold plus generation provenance."""

    descriptor: ManifoldDescriptor
    sequences: list[ManifoldSequence]
    provenance: dict = field(default_factory=dict)

    def all_points(self) -> np.ndarray:
        """All frames of all sequences stacked into one training array."""
        return np.concatenate([s.points for s in self.sequences], axis=0)


# ---------------------------------------------------------------------------
# container plumbing


def _dump(kind: str, payload: dict, path) -> None:
    doc = {"format_version": FORMAT_VERSION, "type": kind, "payload": payload}
    try:
        Path(path).write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n")
    except OSError as exc:
        raise StorageError(f"cannot write {path}: {exc}") from exc


def _load(kind: str, path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise StorageError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StorageError(f"{path} is not valid JSON: {exc}") from exc
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise FormatVersionError(
            f"{path} has container version {version}, this build reads {FORMAT_VERSION}"
        )
    if doc.get("type") != kind:
        raise StorageError(f"{path} holds a {doc.get('type')!r} artifact, expected {kind!r}")
    return doc["payload"]


def _seq_to_json(seq: ManifoldSequence) -> dict:
    return {
        "id": seq.id,
        "label": seq.label,
        "points": seq.points.tolist(),
    }


def _seq_from_json(desc: ManifoldDescriptor, obj: dict) -> ManifoldSequence:
    seq = ManifoldSequence(
        desc, np.array(obj["points"], dtype=np.float64), id=obj["id"], label=obj["label"]
    )
    seq.validate()
    return seq


def save_dataset(ds: DatasetFile, path) -> None:
    _dump(
        "dataset",
        {
            "descriptor": ds.descriptor.spec(),
            "sequences": [_seq_to_json(s) for s in ds.sequences],
            "provenance": ds.provenance,
        },
        path,
    )


def load_dataset(path) -> DatasetFile:
    payload = _load("dataset", path)
    desc = ManifoldDescriptor.from_spec(payload["descriptor"])
    seqs = [_seq_from_json(desc, s) for s in payload["sequences"]]
    return DatasetFile(desc, seqs, payload.get("provenance", {}))


def save_codebook(cb: Codebook, path) -> None:
    _dump(
        "codebook",
        {
            "descriptor": cb.descriptor.spec(),
            "id": cb.id,
            "prototypes": cb.prototypes.tolist(),
            "lut": cb.lut.tolist(),
            "training_meta": cb.training_meta,
        },
        path,
    )


def load_codebook(path) -> Codebook:
    payload = _load("codebook", path)
    cb = Codebook(
        ManifoldDescriptor.from_spec(payload["descriptor"]),
        np.array(payload["prototypes"], dtype=np.float64),
        np.array(payload["lut"], dtype=np.float64),
        payload["id"],
        payload.get("training_meta", {}),
    )
    cb.verify()
    return cb


def _ss_to_json(ss: SymbolSequence) -> dict:
    return {
        "id": ss.id,
        "label": ss.label,
        "codebook_id": ss.codebook_id,
        "window": ss.window,
        "source_len": ss.source_len,
        "alphabet_size": ss.alphabet_size,
        "symbols": ss.symbols.tolist(),
    }


def _ss_from_json(obj: dict) -> SymbolSequence:
    return SymbolSequence(
        codebook_id=obj["codebook_id"],
        window=obj["window"],
        symbols=np.array(obj["symbols"], dtype=np.int64),
        source_len=obj["source_len"],
        alphabet_size=obj["alphabet_size"],
        id=obj["id"],
        label=obj["label"],
    )


def save_symbol_sequences(sequences: list[SymbolSequence], path) -> None:
    _dump("symbol_sequences", {"sequences": [_ss_to_json(s) for s in sequences]}, path)


def load_symbol_sequences(path) -> list[SymbolSequence]:
    payload = _load("symbol_sequences", path)
    return [_ss_from_json(o) for o in payload["sequences"]]


def save_motifs(motifs: list[MotifResult], meta: dict, path) -> None:
    _dump(
        "motifs",
        {
            "meta": meta,
            "motifs": [
                {
                    "center_pos": m.center_pos,
                    "member_positions": list(m.member_positions),
                    "member_distances": list(m.member_distances),
                    "count": m.count,
                }
                for m in motifs
            ],
        },
        path,
    )


def load_motifs(path) -> tuple[list[MotifResult], dict]:
    payload = _load("motifs", path)
    motifs = [
        MotifResult(
            center_pos=o["center_pos"],
            member_positions=tuple(o["member_positions"]),
            member_distances=tuple(o["member_distances"]),
            count=o["count"],
        )
        for o in payload["motifs"]
    ]
    return motifs, payload.get("meta", {})


def save_report(report: dict, path) -> None:
    _dump("bench_report", report, path)


def load_report(path) -> dict:
    return _load("bench_report", path)


# ---------------------------------------------------------------------------
# synthetic scenarios


@dataclass(frozen=True)
class ClustersScenario:
    """Point cloud drawn from skewed clusters around separated templates."""

    n_points: int = 10000
    n_clusters: int = 3
    spread: float = 0.35
    skew: tuple[float, ...] = (0.8, 0.15, 0.05)

    def __post_init__(self):
        if self.n_points < 1 or self.n_clusters < 1:
            raise ValidationError("cluster scenario sizes must be positive")
        if len(self.skew) != self.n_clusters:
            raise ValidationError("skew must list one probability per cluster")
        if abs(sum(self.skew) - 1.0) > 1e-9 or any(p <= 0 for p in self.skew):
            raise ValidationError("skew must be positive and sum to 1")
        if self.spread <= 0:
            raise ValidationError("spread must be positive")


@dataclass(frozen=True)
class LabeledClassesScenario:
    """Labeled executions of per-class template trajectories plus noise."""

    n_classes: int = 5
    executions: int = 10
    length: int = 40
    noise: float = 0.05
    step: float = 0.08
    length_jitter: int = 0

    def __post_init__(self):
        if min(self.n_classes, self.executions, self.length) < 1:
            raise ValidationError("class scenario sizes must be positive")
        if self.noise < 0 or self.step <= 0 or self.length_jitter < 0:
            raise ValidationError("bad noise/step/jitter parameters")
        if self.length_jitter >= self.length:
            raise ValidationError("length jitter must be smaller than the length")


@dataclass(frozen=True)
class ConcatenatedScenario:
    """One long sequence of randomly ordered activity executions with a
    ground-truth segment map, for motif discovery."""

    n_classes: int = 5
    repetitions: int = 10
    activity_len: int = 80
    noise: float = 0.03
    step: float = 0.08

    def __post_init__(self):
        if min(self.n_classes, self.repetitions, self.activity_len) < 1:
            raise ValidationError("concatenation scenario sizes must be positive")
        if self.noise < 0 or self.step <= 0:
            raise ValidationError("bad noise/step parameters")


def _separated_templates(desc, n, min_dist, rng, tries=200) -> np.ndarray:
    """Random template points with pairwise distance >= min_dist (best effort)."""
    best = None
    best_sep = -1.0
    for _ in range(tries):
        pts = geometry.random_points(desc, n, rng)
        if n == 1:
            return pts
        sep = np.inf
        for i in range(n):
            d = geometry.distances_to(desc, pts[i + 1 :], pts[i])
            if d.size:
                sep = min(sep, float(d.min()))
        if sep >= min_dist:
            return pts
        if sep > best_sep:
            best_sep, best = sep, pts
    return best


def _template_walk(desc, start, length, step, rng) -> np.ndarray:
    out = np.empty((length, desc.ambient_size))
    out[0] = start
    for t in range(1, length):
        v = geometry.random_tangent(desc, out[t - 1], step, rng)
        out[t] = geometry.arr_exp(desc, out[t - 1], v)
    return out


def _perturb(desc, template, noise, rng) -> np.ndarray:
    out = np.empty_like(template)
    for t in range(template.shape[0]):
        v = geometry.random_tangent(desc, template[t], noise, rng)
        out[t] = geometry.arr_exp(desc, template[t], v)
    return out


def _jitter_timeline(length, jitter, rng) -> np.ndarray:
    """Monotone frame resampling that stretches/compresses time slightly."""
    out_len = int(length + rng.integers(-jitter, jitter + 1))
    out_len = max(2, out_len)
    idx = np.linspace(0, length - 1, out_len) + rng.normal(0.0, 0.3, size=out_len)
    return np.sort(np.clip(np.round(idx), 0, length - 1).astype(int))


def gen_synthetic(descriptor: ManifoldDescriptor, scenario, seed: int) -> DatasetFile:
    """Deterministic synthetic dataset for one of the three scenarios."""
    rng = np.random.default_rng(seed)
    if isinstance(scenario, ClustersScenario):
        return _gen_clusters(descriptor, scenario, seed, rng)
    if isinstance(scenario, LabeledClassesScenario):
        return _gen_classes(descriptor, scenario, seed, rng)
    if isinstance(scenario, ConcatenatedScenario):
        return _gen_concatenated(descriptor, scenario, seed, rng)
    raise ValidationError(f"unknown scenario {scenario!r}")


def _gen_clusters(desc, sc: ClustersScenario, seed, rng) -> DatasetFile:
    templates = _separated_templates(desc, sc.n_clusters, 4.0 * sc.spread, rng)
    choices = rng.choice(sc.n_clusters, size=sc.n_points, p=np.asarray(sc.skew))
    pts = np.empty((sc.n_points, desc.ambient_size))
    for i in range(sc.n_points):
        base = templates[choices[i]]
        pts[i] = geometry.arr_exp(desc, base, geometry.random_tangent(desc, base, sc.spread, rng))
    seq = ManifoldSequence(desc, pts, id="cloud")
    prov = {
        "scenario": "clusters",
        "seed": seed,
        "params": {
            "n_points": sc.n_points,
            "n_clusters": sc.n_clusters,
            "spread": sc.spread,
            "skew": list(sc.skew),
        },
        "templates": templates.tolist(),
        "cluster_labels": choices.tolist(),
    }
    return DatasetFile(desc, [seq], prov)


def _gen_classes(desc, sc: LabeledClassesScenario, seed, rng) -> DatasetFile:
    starts = _separated_templates(desc, sc.n_classes, 8.0 * sc.noise, rng)
    sequences = []
    for c in range(sc.n_classes):
        template = _template_walk(desc, starts[c], sc.length, sc.step, rng)
        for e in range(sc.executions):
            frames = _perturb(desc, template, sc.noise, rng)
            if sc.length_jitter:
                frames = frames[_jitter_timeline(sc.length, sc.length_jitter, rng)]
            sequences.append(
                ManifoldSequence(desc, frames, id=f"class{c}_exec{e}", label=f"class{c}")
            )
    prov = {
        "scenario": "labeled-classes",
        "seed": seed,
        "params": {
            "n_classes": sc.n_classes,
            "executions": sc.executions,
            "length": sc.length,
            "noise": sc.noise,
            "step": sc.step,
            "length_jitter": sc.length_jitter,
        },
    }
    return DatasetFile(desc, sequences, prov)


def _gen_concatenated(desc, sc: ConcatenatedScenario, seed, rng) -> DatasetFile:
    starts = _separated_templates(desc, sc.n_classes, 8.0 * sc.noise, rng)
    templates = [
        _template_walk(desc, starts[c], sc.activity_len, sc.step, rng)
        for c in range(sc.n_classes)
    ]
    order = rng.permutation(
        np.repeat(np.arange(sc.n_classes), sc.repetitions)
    )
    chunks = []
    segments = []
    cursor = 0
    for cls in order:
        frames = _perturb(desc, templates[cls], sc.noise, rng)
        chunks.append(frames)
        segments.append(
            {"start": cursor, "frames": sc.activity_len, "label": f"class{int(cls)}"}
        )
        cursor += sc.activity_len
    seq = ManifoldSequence(desc, np.concatenate(chunks, axis=0), id="concat")
    prov = {
        "scenario": "concatenated-activities",
        "seed": seed,
        "params": {
            "n_classes": sc.n_classes,
            "repetitions": sc.repetitions,
            "activity_len": sc.activity_len,
            "noise": sc.noise,
            "step": sc.step,
        },
        "segments": segments,
    }
    return DatasetFile(desc, [seq], prov)


def parse_scenario(spec: str):
    """Scenario from a CLI token like 'clusters:n=10000,k=3,spread=0.2,skew=0.8/0.15/0.05'."""
    name, _, body = spec.partition(":")
    name = name.strip().lower()
    kv = {}
    if body:
        for item in body.split(","):
            key, _, value = item.partition("=")
            if not _:
                raise ValidationError(f"scenario parameter {item!r} is not key=value")
            kv[key.strip()] = value.strip()
    try:
        if name == "clusters":
            skew = tuple(float(x) for x in kv.get("skew", "0.8/0.15/0.05").split("/"))
            return ClustersScenario(
                n_points=int(kv.get("n", 10000)),
                n_clusters=int(kv.get("k", len(skew))),
                spread=float(kv.get("spread", 0.2)),
                skew=skew,
            )
        if name == "labeled-classes":
            return LabeledClassesScenario(
                n_classes=int(kv.get("c", 5)),
                executions=int(kv.get("execs", 10)),
                length=int(kv.get("len", 40)),
                noise=float(kv.get("noise", 0.05)),
                step=float(kv.get("step", 0.08)),
                length_jitter=int(kv.get("jitter", 0)),
            )
        if name == "concatenated-activities":
            return ConcatenatedScenario(
                n_classes=int(kv.get("c", 5)),
                repetitions=int(kv.get("reps", 10)),
                activity_len=int(kv.get("len", 80)),
                noise=float(kv.get("noise", 0.03)),
                step=float(kv.get("step", 0.08)),
            )
    except ValueError as exc:
        raise ValidationError(f"bad scenario parameter in {spec!r}: {exc}") from exc
    raise ValidationError(
        f"unknown scenario {name!r}; expected clusters, labeled-classes, "
        "or concatenated-activities"
    )
