import json

import pytest
from click.testing import CliRunner

from geosax.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def run_ok(runner, args):
    result = runner.invoke(main, args, catch_exceptions=False)
    assert result.exit_code == 0, result.output
    return json.loads(result.output)


@pytest.fixture
def pipeline(tmp_path, runner):
    """gen -> train -> encode artifacts shared by the command tests."""
    ds = tmp_path / "ds.json"
    cb = tmp_path / "cb.json"
    enc = tmp_path / "enc.json"
    run_ok(
        runner,
        [
            "gen",
            "--manifold", "hypersphere:6",
            "--scenario", "labeled-classes:c=3,execs=4,len=12,noise=0.1,step=0.1",
            "--seed", "0",
            "--out", str(ds),
        ],
    )
    run_ok(
        runner,
        ["train", "--in", str(ds), "--method", "kmeans", "--k", "8",
         "--seed", "0", "--out", str(cb)],
    )
    run_ok(
        runner,
        ["encode", "--in", str(ds), "--codebook", str(cb), "--window", "2",
         "--out", str(enc)],
    )
    return {"ds": ds, "cb": cb, "enc": enc, "tmp": tmp_path}


def test_gen_reports_shape(tmp_path, runner):
    out = run_ok(
        runner,
        ["gen", "--manifold", "se3:2", "--scenario",
         "labeled-classes:c=2,execs=2,len=6", "--seed", "1",
         "--out", str(tmp_path / "d.json")],
    )
    assert out["sequences"] == 4
    assert out["total_frames"] == 24


def test_gen_rerun_is_byte_identical(tmp_path, runner):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["gen", "--manifold", "hypersphere:5", "--scenario",
            "clusters:n=100", "--seed", "7"]
    run_ok(runner, args + ["--out", str(a)])
    run_ok(runner, args + ["--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_train_rerun_is_byte_identical(pipeline, runner):
    a = pipeline["tmp"] / "cb2.json"
    run_ok(
        runner,
        ["train", "--in", str(pipeline["ds"]), "--method", "kmeans", "--k", "8",
         "--seed", "0", "--out", str(a)],
    )
    assert a.read_bytes() == pipeline["cb"].read_bytes()


def test_train_conscience_and_hybrid(pipeline, runner):
    out = run_ok(
        runner,
        ["train", "--in", str(pipeline["ds"]), "--method", "conscience",
         "--k", "6", "--passes", "3", "--seed", "1",
         "--out", str(pipeline["tmp"] / "cb_con.json")],
    )
    assert out["k"] == 6
    out = run_ok(
        runner,
        ["train", "--in", str(pipeline["ds"]), "--method", "hybrid",
         "--stage1-k", "3", "--r", "1", "--passes", "3", "--seed", "1",
         "--out", str(pipeline["tmp"] / "cb_hyb.json")],
    )
    assert out["k"] >= 3


def test_match_rigid_and_dtw(pipeline, runner):
    out = run_ok(
        runner,
        ["match", "--a", str(pipeline["enc"]), "--b", str(pipeline["enc"]),
         "--codebook", str(pipeline["cb"])],
    )
    assert out["distance"] == 0.0
    assert out["metric"] == "rigid"
    out = run_ok(
        runner,
        ["match", "--a", str(pipeline["enc"]), "--b", str(pipeline["enc"]),
         "--codebook", str(pipeline["cb"]), "--dtw"],
    )
    assert out["metric"] == "dtw"


def test_knn_finds_self(pipeline, runner):
    out = run_ok(
        runner,
        ["knn", "--query", str(pipeline["enc"]), "--db", str(pipeline["enc"]),
         "--codebook", str(pipeline["cb"]), "--k", "3"],
    )
    assert out["hits"][0]["distance"] == 0.0


def test_classify_loo(pipeline, runner):
    out = run_ok(
        runner,
        ["classify", "--db", str(pipeline["enc"]),
         "--codebook", str(pipeline["cb"]), "--loo"],
    )
    assert out["n"] == 12
    assert 0.0 <= out["accuracy"] <= 1.0


def test_discover_and_entropy(pipeline, runner):
    out = run_ok(
        runner,
        ["discover", "--in", str(pipeline["enc"]), "--len", "2",
         "--radius", "auto", "--trivial", "2", "--top", "2",
         "--codebook", str(pipeline["cb"]),
         "--out", str(pipeline["tmp"] / "motifs.json")],
    )
    assert len(out["motifs"]) <= 2
    out = run_ok(
        runner,
        ["entropy", "--labels-from", str(pipeline["ds"]),
         "--codebook", str(pipeline["cb"])],
    )
    assert 0.0 <= out["entropy_bits"] <= out["max_entropy_bits"] + 1e-12


def test_bench_bits_suite(tmp_path, runner):
    report_path = tmp_path / "report.json"
    run_ok(runner, ["bench", "--suite", "bits", "--out", str(report_path)])
    doc = json.loads(report_path.read_text())
    assert doc["type"] == "bench_report"
    rows = doc["payload"]["results"]["rows"]
    ref = next(r for r in rows if r["n_frames"] == 100 and r["dim"] == 100)
    assert ref["compression_ratio"] == 0.998125


def test_exit_code_validation_error(tmp_path, runner):
    result = runner.invoke(
        main,
        ["gen", "--manifold", "hypersphere:0", "--scenario", "clusters:n=10",
         "--seed", "0", "--out", str(tmp_path / "x.json")],
    )
    assert result.exit_code == 1


def test_exit_code_io_error(runner, tmp_path):
    result = runner.invoke(
        main,
        ["train", "--in", "/nonexistent.json", "--method", "kmeans", "--k", "4",
         "--seed", "0", "--out", str(tmp_path / "cb.json")],
    )
    assert result.exit_code == 3


def test_exit_code_artifact_mismatch(pipeline, runner, tmp_path):
    other_cb = tmp_path / "other_cb.json"
    run_ok(
        runner,
        ["train", "--in", str(pipeline["ds"]), "--method", "kmeans", "--k", "5",
         "--seed", "9", "--out", str(other_cb)],
    )
    result = runner.invoke(
        main,
        ["knn", "--query", str(pipeline["enc"]), "--db", str(pipeline["enc"]),
         "--codebook", str(other_cb), "--k", "1"],
    )
    assert result.exit_code == 2
