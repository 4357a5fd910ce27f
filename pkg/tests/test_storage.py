"""Parsers, persistence round trips, hashing."""

import hashlib
import json

import numpy as np
import pytest

from simplexrank import (
    InfluenceScores,
    ModelParams,
    TrainConfig,
    ValidationError,
    clique_lift,
    from_simplex_list,
    init_params,
)
from simplexrank.centrality import FeatureMatrix
from simplexrank.rng import stream
from simplexrank.storage import (
    append_table_row,
    config_hash,
    dataset_hash,
    load_checkpoint,
    load_complex,
    load_features,
    load_rank,
    load_scores,
    parse_edge_file,
    parse_simplex_file,
    save_checkpoint,
    save_complex,
    save_features,
    save_rank,
    save_scores,
)

from conftest import random_lifted


# -- edge parser ---------------------------------------------------------------


def test_parse_edge_file_skips_comments_and_blanks(tmp_path):
    p = tmp_path / "e.txt"
    p.write_text("# header\n0 1\n\n1 2\n   \n# tail\n2 0\n")
    assert parse_edge_file(p) == [(0, 1), (1, 2), (2, 0)]


def test_parse_edge_file_reports_line_numbers(tmp_path):
    p = tmp_path / "e.txt"
    p.write_text("0 1\n1 2 3\n")
    with pytest.raises(ValidationError, match=r"e\.txt:2"):
        parse_edge_file(p)
    p.write_text("0 x\n")
    with pytest.raises(ValidationError, match=r"e\.txt:1.*non-integer"):
        parse_edge_file(p)
    p.write_text("3 3\n")
    with pytest.raises(ValidationError, match="self-loop"):
        parse_edge_file(p)
    p.write_text("-1 2\n")
    with pytest.raises(ValidationError, match="negative"):
        parse_edge_file(p)
    p.write_text("# only comments\n")
    with pytest.raises(ValidationError, match="no edges"):
        parse_edge_file(p)


# -- simplex parser --------------------------------------------------------------


def test_parse_simplex_file_weights_and_labels(tmp_path):
    p = tmp_path / "s.txt"
    p.write_text("b a c w=2.5\na b\nd\n")
    records, labels = parse_simplex_file(p)
    assert labels == ["a", "b", "c", "d"]
    assert records == [((0, 1, 2), 2.5), ((0, 1), 1.0), ((3,), 1.0)]


def test_parse_simplex_file_numeric_labels_sort_numerically(tmp_path):
    p = tmp_path / "s.txt"
    p.write_text("10 2\n2 3\n")
    _, labels = parse_simplex_file(p)
    assert labels == ["2", "3", "10"]


def test_parse_simplex_file_rejects_bad_records(tmp_path):
    p = tmp_path / "s.txt"
    p.write_text("a a\n")
    with pytest.raises(ValidationError, match="repeated vertex"):
        parse_simplex_file(p)
    p.write_text("a b w=heavy\n")
    with pytest.raises(ValidationError, match="bad weight"):
        parse_simplex_file(p)
    p.write_text("w=2\n")
    with pytest.raises(ValidationError, match="no vertices"):
        parse_simplex_file(p)
    p.write_text("\n")
    with pytest.raises(ValidationError, match="no simplex records"):
        parse_simplex_file(p)


# -- hashing ----------------------------------------------------------------------


def test_config_hash_ignores_key_order():
    a = {"x": 1, "y": {"b": 2, "a": 3}}
    b = {"y": {"a": 3, "b": 2}, "x": 1}
    assert config_hash(a) == config_hash(b)
    assert config_hash(a) != config_hash({"x": 2, "y": {"a": 3, "b": 2}})
    assert len(config_hash(a)) == 16


def test_dataset_hash_matches_sha256(tmp_path):
    p = tmp_path / "d.bin"
    payload = b"0 1\n1 2\n"
    p.write_bytes(payload)
    assert dataset_hash(p) == hashlib.sha256(payload).hexdigest()[:16]


# -- complex round trip --------------------------------------------------------------


def test_complex_round_trip(tmp_path):
    cx = random_lifted(3, n_max=20, p=0.4, f_max=3)
    save_complex(cx, tmp_path / "cx", chash="abc123")
    back, manifest = load_complex(tmp_path / "cx")
    assert back.node_count == cx.node_count
    assert back.max_order == cx.max_order
    for h in cx.orders:
        assert np.array_equal(back.layer(h), cx.layer(h))
    assert manifest["config_hash"] == "abc123"


def test_complex_round_trip_keeps_labels_and_empty_layers(tmp_path):
    cx, _ = from_simplex_list([((0, 1), 1.0), ((1, 2), 1.0)], labels=["x", "y", "z"])
    cx = clique_lift(cx, 2)
    assert cx.layer_size(2) == 0
    save_complex(cx, tmp_path / "cx")
    back, manifest = load_complex(tmp_path / "cx")
    assert list(back.labels) == ["x", "y", "z"]
    assert back.layer(2).shape == (0, 3)
    assert {int(k): int(v) for k, v in manifest["layer_counts"].items()} == {
        0: 3,
        1: 2,
        2: 0,
    }


def test_load_complex_requires_manifest(tmp_path):
    with pytest.raises(ValidationError, match="manifest"):
        load_complex(tmp_path)


# -- score files -----------------------------------------------------------------------


def test_scores_round_trip_with_sidecar(tmp_path):
    values = np.array([0.5, 0.0, 0.125, 2.0 / 3.0])
    observed = np.array([True, False, True, True])
    path = tmp_path / "labels.csv"
    save_scores(path, InfluenceScores(values, observed), sidecar={"beta": 0.5}, chash="h1")
    back, sidecar = load_scores(path, size=4)
    assert np.array_equal(back.observed, observed)
    assert np.array_equal(back.values[observed], values[observed])
    assert sidecar == {"beta": 0.5, "config_hash": "h1"}


def test_scores_round_trip_is_exact_for_awkward_floats(tmp_path):
    rng = stream(0, "floats")
    values = rng.standard_normal(50)
    path = tmp_path / "s.csv"
    save_scores(path, InfluenceScores.fully_observed(values))
    back, _ = load_scores(path, size=50)
    assert np.array_equal(back.values, values)


def test_save_scores_is_byte_stable(tmp_path):
    values = stream(1, "floats").standard_normal(20)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    save_scores(a, InfluenceScores.fully_observed(values), chash="zz")
    save_scores(b, InfluenceScores.fully_observed(values), chash="zz")
    assert a.read_bytes() == b.read_bytes()


def test_load_scores_rejects_out_of_range_id(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("simplex_id,score\n7,0.5\n")
    with pytest.raises(ValidationError, match="out of range"):
        load_scores(p, size=3)


def test_load_scores_rejects_wrong_header(tmp_path):
    p = tmp_path / "s.csv"
    p.write_text("id,value\n0,1.0\n")
    with pytest.raises(ValidationError, match="expected header"):
        load_scores(p)


# -- feature files ------------------------------------------------------------------------


def test_features_round_trip(tmp_path):
    values = stream(2, "feat").standard_normal((6, 3))
    fm = FeatureMatrix(values, ("degree", "coreness", "pagerank"))
    path = tmp_path / "f.csv"
    save_features(path, fm, chash="fh")
    back, chash = load_features(path)
    assert chash == "fh"
    assert back.columns == fm.columns
    assert np.array_equal(back.values, values)


def test_load_features_requires_dense_ordered_ids(tmp_path):
    p = tmp_path / "f.csv"
    p.write_text("simplex_id,degree\n0,1.0\n2,2.0\n")
    with pytest.raises(ValidationError, match="0..n-1"):
        load_features(p)


# -- checkpoints ----------------------------------------------------------------------------


def _some_params(seed=0) -> ModelParams:
    config = TrainConfig(cheb_order=3, hidden_width=5, embed_dim=4)
    params = init_params(3, (1, 2), config, stream(seed, "init"))
    vec = stream(seed, "jitter").standard_normal(params.count())
    return params.from_vector(vec)


def test_checkpoint_round_trip(tmp_path):
    params = _some_params()
    prefix = tmp_path / "model_h0_m0"
    save_checkpoint(prefix, params, meta={"member": 0}, chash="ck")
    back, manifest = load_checkpoint(prefix)
    assert np.array_equal(back.to_vector(), params.to_vector())
    assert back.fringe_orders == params.fringe_orders
    assert manifest["meta"] == {"member": 0}
    assert manifest["config_hash"] == "ck"


def test_checkpoint_is_byte_stable(tmp_path):
    params = _some_params(1)
    save_checkpoint(tmp_path / "a", params, meta={"k": 1}, chash="x")
    save_checkpoint(tmp_path / "b", params, meta={"k": 1}, chash="x")
    assert (tmp_path / "a.bin").read_bytes() == (tmp_path / "b.bin").read_bytes()
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_checkpoint_rejects_truncated_blob(tmp_path):
    params = _some_params(2)
    prefix = tmp_path / "m"
    save_checkpoint(prefix, params)
    blob = prefix.with_suffix(".bin").read_bytes()
    prefix.with_suffix(".bin").write_bytes(blob[:-8])
    with pytest.raises(ValidationError, match="blob holds"):
        load_checkpoint(prefix)


def test_checkpoint_rejects_foreign_dtype(tmp_path):
    params = _some_params(3)
    prefix = tmp_path / "m"
    save_checkpoint(prefix, params)
    manifest = json.loads(prefix.with_suffix(".json").read_text())
    manifest["dtype"] = "<f4"
    prefix.with_suffix(".json").write_text(json.dumps(manifest))
    with pytest.raises(ValidationError, match="dtype"):
        load_checkpoint(prefix)


# -- rank files -------------------------------------------------------------------------------


def test_rank_round_trip(tmp_path):
    scores = np.array([0.1, 0.9, 0.5, 0.9])
    ids = np.lexsort((np.arange(4), -scores))
    path = tmp_path / "rank.csv"
    save_rank(path, ids, scores, chash="rh", sidecar={"hub_order": 0})
    back_ids, back_scores, sidecar = load_rank(path)
    assert np.array_equal(back_ids, ids)
    assert np.array_equal(back_scores, scores)
    assert sidecar == {"hub_order": 0, "config_hash": "rh"}


def test_load_rank_rejects_score_header(tmp_path):
    p = tmp_path / "r.csv"
    p.write_text("simplex_id,score\n0,1.0\n")
    with pytest.raises(ValidationError, match="rank,simplex_id,score"):
        load_rank(p)


# -- append tables ------------------------------------------------------------------------------


def test_append_table_row_writes_header_once(tmp_path):
    p = tmp_path / "evaluations.csv"
    append_table_row(p, "method,tau", "model,0.5", chash="t1")
    append_table_row(p, "method,tau", "DC,0.25", chash="t1")
    lines = p.read_text().splitlines()
    assert lines == ["# config_hash=t1", "method,tau", "model,0.5", "DC,0.25"]
