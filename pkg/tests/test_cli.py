import json

import pytest
from click.testing import CliRunner

from latent_multiview_ssc.cli import cli


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def manifest(runner, tmp_path):
    result = runner.invoke(cli, [
        "synth", "--out-dir", str(tmp_path / "data"), "--name", "toy",
        "--n-samples", "40", "--n-classes", "2", "--latent-dim", "3",
        "--view-dim", "5", "--view-dim", "6", "--seed", "7",
    ])
    assert result.exit_code == 0, result.output
    return result.output.strip().splitlines()[-1]


def test_synth_writes_manifest(manifest):
    with open(manifest) as f:
        data = json.load(f)
    assert data["dims"] == [[5, 40], [6, 40]]
    assert data["classes"] == 2


def test_run_writes_report_and_table(runner, manifest, tmp_path):
    out = tmp_path / "out"
    result = runner.invoke(cli, [
        "run", "--manifest", manifest, "--method", "mlan", "--method", "lmssc",
        "--rate", "0.3", "--trials", "2", "--k", "5", "--latent-dim", "3",
        "--max-iters", "5", "--out", str(out),
    ])
    assert result.exit_code == 0, result.output
    assert (out / "report.json").exists()
    assert (out / "table.txt").exists()
    assert json.loads((out / "config.json").read_text())["lmssc"]["neighbor_count"] == 5
    assert "30%" in result.output


def test_run_rejects_unknown_method(runner, manifest, tmp_path):
    result = runner.invoke(cli, ["run", "--manifest", manifest, "--method", "svm", "--out", str(tmp_path)])
    assert result.exit_code == 2
    assert "unknown method" in result.output


def test_run_exits_nonzero_when_a_cell_fails(runner, manifest, tmp_path):
    result = runner.invoke(cli, [
        "run", "--manifest", manifest, "--method", "gfhf:9", "--rate", "0.3",
        "--trials", "1", "--k", "5", "--out", str(tmp_path / "out"),
    ])
    assert result.exit_code == 1
    report = json.loads((tmp_path / "out" / "report.json").read_text())
    assert report["records"][0]["failure"]["failure_type"] == "configuration"


def test_sweep_writes_best(runner, manifest, tmp_path):
    out = tmp_path / "sweep"
    result = runner.invoke(cli, [
        "sweep", "--manifest", manifest, "--method", "lmssc", "--rate", "0.3", "--trials", "1",
        "--k", "5", "--max-iters", "5", "--latent-dims", "2", "--latent-dims", "3", "--out", str(out),
    ])
    assert result.exit_code == 0, result.output
    best = json.loads((out / "best.json").read_text())
    assert best["latent_dim"] in (2, 3)
    assert len((out / "aggregates.csv").read_text().strip().splitlines()) == 3


def test_check_reports_every_check(runner, tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"n_samples": 40, "n_classes": 2, "latent_dim": 3, "view_dims": [5, 6], "rng_seed": 7}))
    result = runner.invoke(cli, [
        "check", "--synthetic", str(spec), "--rate", "0.3", "--k", "5",
        "--latent-dim", "3", "--max-iters", "5",
    ])
    names = [line.split()[0] for line in result.output.splitlines() if line.split()[1:2] in (["pass"], ["FAIL"])]
    assert names == [
        "simplex-projection", "k-support", "component-count", "graph-invariants",
        "sub-step-descent", "nnls-kkt", "sylvester-residual", "harmonic-property",
    ]
    assert result.exit_code == 0, result.output
