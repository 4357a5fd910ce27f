"""Command-line surface: artifacts, exit codes, config layering."""

import json

import pytest

from simplexrank.cli import main


def run(*argv) -> int:
    return main(list(argv))


@pytest.fixture
def k3_edges(tmp_path):
    p = tmp_path / "k3.txt"
    p.write_text("0 1\n1 2\n0 2\n")
    return p


@pytest.fixture
def pendant_edges(tmp_path):
    # triangle 0-1-2 plus pendant node 3 off vertex 2
    p = tmp_path / "net.txt"
    p.write_text("0 1\n1 2\n0 2\n2 3\n")
    return p


@pytest.fixture
def fast_toml(tmp_path):
    p = tmp_path / "fast.toml"
    p.write_text(
        "[diffusion]\nruns = 50\n\n[train]\nepochs = 30\nhidden_width = 6\nembed_dim = 4\n"
    )
    return p


def test_lift_k3_counts(k3_edges, tmp_path):
    out = tmp_path / "out"
    assert run("lift", "--input", str(k3_edges), "--max-order", "2", "--out", str(out)) == 0
    manifest = json.loads((out / "complex" / "manifest.json").read_text())
    assert {int(k): v for k, v in manifest["layer_counts"].items()} == {0: 3, 1: 3, 2: 1}
    run_manifest = json.loads((out / "run_manifest.json").read_text())
    assert run_manifest["subcommand"] == "lift"
    assert run_manifest["config_hash"] == manifest["config_hash"]


def test_lift_on_simplex_file_keeps_weights(tmp_path):
    data = tmp_path / "cells.txt"
    data.write_text("0 1 2 w=2.0\n2 3\n")
    out = tmp_path / "out"
    assert run("lift", "--input", str(data), "--format", "simplices",
               "--max-order", "2", "--out", str(out)) == 0
    w2 = (out / "weights_h2.csv").read_text().splitlines()
    assert w2[-1] == "0,2.0"
    assert (out / "weights_h1.csv").is_file()


def test_evaluate_identical_files_gives_tau_one(tmp_path, capsys):
    rows = "simplex_id,score\n0,0.9\n1,0.5\n2,0.1\n3,0.7\n"
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    a.write_text(rows)
    b.write_text(rows)
    out = tmp_path / "out"
    assert run("evaluate", "--pred", str(a), "--truth", str(b), "--out", str(out)) == 0
    assert "tau=1.0" in capsys.readouterr().out
    table = (out / "evaluations.csv").read_text().splitlines()
    assert table[0] == "method,beta_ratio,beta2_ratio,tau"
    assert table[1].startswith("model,") and table[1].endswith(",1.0")


def test_evaluate_needs_both_files(tmp_path):
    a = tmp_path / "a.csv"
    a.write_text("simplex_id,score\n0,1.0\n1,0.5\n")
    assert run("evaluate", "--pred", str(a), "--out", str(tmp_path / "o")) == 3


def test_evaluate_hash_mismatch_refused_unless_forced(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    a.write_text("# config_hash=aaaa\nsimplex_id,score\n0,0.9\n1,0.1\n")
    b.write_text("# config_hash=bbbb\nsimplex_id,score\n0,0.8\n1,0.2\n")
    out = tmp_path / "out"
    assert run("evaluate", "--pred", str(a), "--truth", str(b), "--out", str(out)) == 1
    assert run("evaluate", "--pred", str(a), "--truth", str(b), "--force",
               "--out", str(out)) == 0


def test_unknown_subcommand_exits_two():
    with pytest.raises(SystemExit) as err:
        run("transmogrify")
    assert err.value.code == 2


def test_missing_dataset_is_config_error(tmp_path):
    out = tmp_path / "out"
    assert run("lift", "--input", str(tmp_path / "absent.txt"), "--out", str(out)) == 3
    # the manifest is written even when the run fails
    assert (out / "run_manifest.json").is_file()


def test_rank_without_checkpoints_fails(k3_edges, tmp_path):
    out = tmp_path / "out"
    assert run("lift", "--input", str(k3_edges), "--out", str(out)) == 0
    assert run("rank", "--input", str(k3_edges), "--out", str(out)) == 1


def test_unknown_config_key_is_fatal(k3_edges, tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text("[diffusion]\nbeta = 0.5\n")
    assert run("lift", "--input", str(k3_edges), "--config", str(bad),
               "--out", str(tmp_path / "o")) == 3
    worse = tmp_path / "worse.toml"
    worse.write_text("[spreading]\nruns = 5\n")
    assert run("lift", "--input", str(k3_edges), "--config", str(worse),
               "--out", str(tmp_path / "o2")) == 3


def test_flags_override_toml(pendant_edges, tmp_path):
    conf = tmp_path / "c.toml"
    conf.write_text("[diffusion]\nbeta_ratio = 1.0\nruns = 20\n")
    out = tmp_path / "out"
    assert run("lift", "--input", str(pendant_edges), "--out", str(out)) == 0
    assert run("label", "--input", str(pendant_edges), "--config", str(conf),
               "--beta-ratio", "2.0", "--out", str(out)) == 0
    assert (out / "labels_h0_br2_b2r0.csv").is_file()
    assert not (out / "labels_h0_br1_b2r0.csv").is_file()


def test_label_rerun_is_byte_identical(pendant_edges, tmp_path):
    out = tmp_path / "run"
    base = ["--input", str(pendant_edges), "--runs", "30", "--seed", "7",
            "--out", str(out)]
    assert run("lift", *base) == 0
    assert run("label", *base) == 0
    name = "labels_h0_br1.5_b2r0.csv"
    first = (out / name).read_bytes()
    first_sidecar = (out / "labels_h0_br1.5_b2r0.json").read_bytes()
    assert run("label", *base) == 0
    assert (out / name).read_bytes() == first
    assert (out / "labels_h0_br1.5_b2r0.json").read_bytes() == first_sidecar


def test_report_names_missing_inputs(tmp_path, caplog):
    out = tmp_path / "out"
    with caplog.at_level("ERROR", logger="simplexrank"):
        assert run("report", "--out", str(out)) == 1
    message = caplog.text
    for family in ("tau_vs_beta", "tau_heatmap", "immunization", "tau_vs_order"):
        assert family in message


def test_full_pipeline_smoke(pendant_edges, fast_toml, tmp_path, capsys):
    out = tmp_path / "out"
    base = ["--input", str(pendant_edges), "--config", str(fast_toml),
            "--out", str(out), "--seed", "3"]
    assert run("lift", *base) == 0
    assert run("features", *base) == 0
    assert run("label", *base) == 0
    assert run("train", *base) == 0
    assert run("rank", *base) == 0
    assert run("evaluate", *base) == 0
    assert "tau=" in capsys.readouterr().out
    assert run("baseline", *base) == 0
    assert run("immunize", "--method", "random", *base) == 0
    assert run("sweep-order", "--orders", "1,2", *base) == 0
    assert run("report", *base) == 0

    for name in (
        "complex/manifest.json",
        "features_h0.csv",
        "labels_h0_br1.5_b2r0.csv",
        "model_h0_m0.json",
        "model_h0_m0.bin",
        "train_log_h0.json",
        "rank_h0.csv",
        "evaluations.csv",
        "immunization.csv",
        "order_sweep.csv",
        "report_tau_vs_beta.csv",
        "report_tau_heatmap.csv",
        "report_immunization.csv",
        "report_tau_vs_order.csv",
    ):
        assert (out / name).is_file(), name

    evals = (out / "evaluations.csv").read_text().splitlines()
    methods = {row.split(",")[0] for row in evals[1:]}
    assert {"model", "DC", "ND", "HI", "CC", "HD"} <= methods

    sweep = (out / "order_sweep.csv").read_text().splitlines()
    assert [r.split(",")[1] for r in sweep[1:]] == ["1", "2"]


def test_train_rerun_reproduces_checkpoints(pendant_edges, fast_toml, tmp_path):
    out = tmp_path / "run"
    base = ["--input", str(pendant_edges), "--config", str(fast_toml),
            "--out", str(out), "--seed", "11"]
    assert run("lift", *base) == 0
    assert run("label", *base) == 0
    assert run("train", *base) == 0
    first = (out / "model_h0_m0.bin").read_bytes()
    assert run("train", *base) == 0
    assert (out / "model_h0_m0.bin").read_bytes() == first
