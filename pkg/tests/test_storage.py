import json

import numpy as np
import pytest

from geosax import geometry, storage
from geosax.codebook import ConscienceConfig, conscience_learn, make_codebook
from geosax.discover import MotifResult
from geosax.encode import SymbolSequence, encode
from geosax.errors import FormatVersionError, StorageError, ValidationError
from geosax.geometry import ManifoldDescriptor
from geosax.stats import ManifoldSequence


@pytest.fixture
def sphere_dataset():
    desc = ManifoldDescriptor.hypersphere(4)
    rng = np.random.default_rng(0)
    seqs = [
        ManifoldSequence(
            desc, geometry.random_points(desc, 5, rng), id=f"s{i}", label="walk"
        )
        for i in range(3)
    ]
    return storage.DatasetFile(desc, seqs, {"scenario": "test"})


def test_dataset_round_trip(tmp_path, sphere_dataset):
    path = tmp_path / "ds.json"
    storage.save_dataset(sphere_dataset, path)
    loaded = storage.load_dataset(path)
    assert loaded.descriptor == sphere_dataset.descriptor
    assert loaded.provenance == sphere_dataset.provenance
    for a, b in zip(loaded.sequences, sphere_dataset.sequences):
        assert a.id == b.id and a.label == b.label
        np.testing.assert_array_equal(a.points, b.points)


def test_codebook_round_trip(tmp_path):
    desc = ManifoldDescriptor.grassmann(4, 2)
    cb = make_codebook(
        desc,
        geometry.random_points(desc, 5, np.random.default_rng(1)),
        {"method": "kmeans", "k": 5},
    )
    path = tmp_path / "cb.json"
    storage.save_codebook(cb, path)
    loaded = storage.load_codebook(path)
    assert loaded.id == cb.id
    np.testing.assert_array_equal(loaded.prototypes, cb.prototypes)
    np.testing.assert_array_equal(loaded.lut, cb.lut)
    assert loaded.training_meta == cb.training_meta


def test_tampered_codebook_rejected(tmp_path, sphere_dataset):
    desc = sphere_dataset.descriptor
    cb = make_codebook(
        desc, geometry.random_points(desc, 4, np.random.default_rng(2))
    )
    path = tmp_path / "cb.json"
    storage.save_codebook(cb, path)
    doc = json.loads(path.read_text())
    doc["payload"]["lut"][0][1] = 42.0
    doc["payload"]["lut"][1][0] = 42.0
    path.write_text(json.dumps(doc))
    with pytest.raises(ValidationError):
        storage.load_codebook(path)


def test_future_format_version_rejected(tmp_path, sphere_dataset):
    path = tmp_path / "ds.json"
    storage.save_dataset(sphere_dataset, path)
    doc = json.loads(path.read_text())
    doc["format_version"] = 99
    path.write_text(json.dumps(doc))
    with pytest.raises(FormatVersionError):
        storage.load_dataset(path)


def test_wrong_artifact_type_rejected(tmp_path, sphere_dataset):
    path = tmp_path / "ds.json"
    storage.save_dataset(sphere_dataset, path)
    with pytest.raises(StorageError):
        storage.load_codebook(path)


def test_corrupt_sequence_rejected_on_load(tmp_path, sphere_dataset):
    path = tmp_path / "ds.json"
    storage.save_dataset(sphere_dataset, path)
    doc = json.loads(path.read_text())
    doc["payload"]["sequences"][1]["points"][0][0] = 5.0  # breaks unit norm
    path.write_text(json.dumps(doc))
    with pytest.raises(ValidationError, match="s1"):
        storage.load_dataset(path)


def test_symbol_sequences_round_trip(tmp_path, sphere_dataset):
    desc = sphere_dataset.descriptor
    cb = make_codebook(
        desc, geometry.random_points(desc, 4, np.random.default_rng(3))
    )
    encoded = [encode(s, cb, 2) for s in sphere_dataset.sequences]
    path = tmp_path / "enc.json"
    storage.save_symbol_sequences(encoded, path)
    loaded = storage.load_symbol_sequences(path)
    for a, b in zip(loaded, encoded):
        assert a == b


def test_motifs_round_trip(tmp_path):
    motifs = [
        MotifResult(3, (3, 11, 19), (0.0, 0.1, 0.2), 3),
        MotifResult(40, (), (), 0),
    ]
    path = tmp_path / "motifs.json"
    storage.save_motifs(motifs, {"radius": 0.5}, path)
    loaded, meta = storage.load_motifs(path)
    assert loaded == motifs
    assert meta == {"radius": 0.5}


def test_missing_file_raises_storage_error():
    with pytest.raises(StorageError):
        storage.load_dataset("/nonexistent/path.json")


def test_floats_round_trip_bit_exact(tmp_path):
    desc = ManifoldDescriptor.hypersphere(6)
    pts = geometry.random_points(desc, 50, np.random.default_rng(4))
    ds = storage.DatasetFile(desc, [ManifoldSequence(desc, pts, id="x")], {})
    path = tmp_path / "ds.json"
    storage.save_dataset(ds, path)
    loaded = storage.load_dataset(path)
    assert np.array_equal(loaded.sequences[0].points, pts)


# ---------------------------------------------------------------------------
# synthetic generation


def test_gen_deterministic(tmp_path):
    desc = ManifoldDescriptor.hypersphere(8)
    sc = storage.ClustersScenario(n_points=200)
    a = storage.gen_synthetic(desc, sc, seed=5)
    b = storage.gen_synthetic(desc, sc, seed=5)
    pa, pb = tmp_path / "a.json", tmp_path / "b.json"
    storage.save_dataset(a, pa)
    storage.save_dataset(b, pb)
    assert pa.read_bytes() == pb.read_bytes()


def test_cluster_proportions_match_skew():
    # count points by nearest template; proportions within 2% at 10k points
    desc = ManifoldDescriptor.hypersphere(8)
    ds = storage.gen_synthetic(desc, storage.ClustersScenario(), seed=0)
    X = ds.all_points()
    templates = np.array(ds.provenance["templates"])
    labels = geometry.pairwise_distances(desc, X, templates).argmin(axis=1)
    props = np.bincount(labels, minlength=3) / len(X)
    np.testing.assert_allclose(props, [0.8, 0.15, 0.05], atol=0.02)


def test_concatenated_structure():
    desc = ManifoldDescriptor.grassmann(6, 2)
    sc = storage.ConcatenatedScenario(
        n_classes=5, repetitions=10, activity_len=80, noise=0.02
    )
    ds = storage.gen_synthetic(desc, sc, seed=1)
    assert len(ds.sequences) == 1
    assert len(ds.sequences[0]) == 4000
    segments = ds.provenance["segments"]
    assert len(segments) == 50
    assert all(s["frames"] == 80 for s in segments)
    starts = [s["start"] for s in segments]
    assert starts == list(range(0, 4000, 80))
    counts = {}
    for s in segments:
        counts[s["label"]] = counts.get(s["label"], 0) + 1
    assert all(v == 10 for v in counts.values())


def test_labeled_classes_metadata():
    desc = ManifoldDescriptor.product_se3(2)
    sc = storage.LabeledClassesScenario(n_classes=3, executions=4, length=10)
    ds = storage.gen_synthetic(desc, sc, seed=2)
    assert len(ds.sequences) == 12
    labels = {s.label for s in ds.sequences}
    assert labels == {"class0", "class1", "class2"}
    for s in ds.sequences:
        s.validate()


def test_scenario_parsing():
    sc = storage.parse_scenario("clusters:n=500,k=3,spread=0.3,skew=0.5/0.3/0.2")
    assert sc == storage.ClustersScenario(500, 3, 0.3, (0.5, 0.3, 0.2))
    sc = storage.parse_scenario("labeled-classes:c=4,execs=6,len=20,noise=0.1")
    assert sc.n_classes == 4 and sc.executions == 6
    sc = storage.parse_scenario("concatenated-activities:c=5,reps=10,len=80")
    assert sc.repetitions == 10
    with pytest.raises(ValidationError):
        storage.parse_scenario("bogus:")
    with pytest.raises(ValidationError):
        storage.parse_scenario("clusters:skew=0.5/0.6")


def test_training_artifacts_deterministic(tmp_path):
    desc = ManifoldDescriptor.hypersphere(4)
    ds = storage.gen_synthetic(
        desc, storage.ClustersScenario(n_points=150), seed=3
    )
    X = ds.all_points()
    cfg = ConscienceConfig(k=3, seed=9, max_passes=3)
    pa, pb = tmp_path / "a.json", tmp_path / "b.json"
    storage.save_codebook(conscience_learn(desc, X, cfg), pa)
    storage.save_codebook(conscience_learn(desc, X, cfg), pb)
    assert pa.read_bytes() == pb.read_bytes()
