"""File formats: parsers, persistence, checkpoints, report tables.

Everything written here is deterministic for a fixed config and seed:
floats are serialized with ``repr`` (shortest round trip), JSON keys are
sorted, and no timestamps are embedded.  Artifact CSVs start with a
``# config_hash=...`` comment when a hash is supplied; readers skip
``#`` lines.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .centrality import FeatureMatrix
from .complexes import InfluenceScores, SimplicialComplex
from .errors import ValidationError
from .model import ModelParams

__all__ = [
    "parse_edge_file",
    "parse_simplex_file",
    "save_complex",
    "load_complex",
    "save_scores",
    "load_scores",
    "save_features",
    "load_features",
    "save_checkpoint",
    "load_checkpoint",
    "save_rank",
    "load_rank",
    "append_table_row",
    "config_hash",
    "dataset_hash",
]


# -- input parsing -----------------------------------------------------------


def _data_lines(path: Path) -> Iterable[tuple[int, str]]:
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            yield lineno, line


def parse_edge_file(path) -> list[tuple[int, int]]:
    """Whitespace-separated integer pairs; rejects bad lines by number."""
    path = Path(path)
    edges: list[tuple[int, int]] = []
    for lineno, line in _data_lines(path):
        parts = line.split()
        if len(parts) != 2:
            raise ValidationError(f"{path}:{lineno}: expected two node ids, got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValidationError(f"{path}:{lineno}: non-integer node id in {line!r}") from None
        if u < 0 or v < 0:
            raise ValidationError(f"{path}:{lineno}: negative node id in {line!r}")
        if u == v:
            raise ValidationError(f"{path}:{lineno}: self-loop {u}")
        edges.append((u, v))
    if not edges:
        raise ValidationError(f"{path}: no edges found")
    return edges


def parse_simplex_file(path) -> tuple[list[tuple[tuple[int, ...], float]], list[str]]:
    """Vertex-label records with optional trailing ``w=<number>``.

    Labels may be arbitrary non-whitespace strings; they are densified to
    integer ids (numeric sort when every label is an integer, otherwise
    lexicographic).  Returns the integer records plus the label list.
    """
    path = Path(path)
    raw_records: list[tuple[tuple[str, ...], float]] = []
    seen: set[str] = set()
    for lineno, line in _data_lines(path):
        parts = line.split()
        weight = 1.0
        if parts and parts[-1].startswith("w="):
            try:
                weight = float(parts[-1][2:])
            except ValueError:
                raise ValidationError(
                    f"{path}:{lineno}: bad weight {parts[-1]!r}"
                ) from None
            parts = parts[:-1]
        if not parts:
            raise ValidationError(f"{path}:{lineno}: record has no vertices")
        if len(set(parts)) != len(parts):
            raise ValidationError(f"{path}:{lineno}: repeated vertex in {line!r}")
        raw_records.append((tuple(parts), weight))
        seen.update(parts)
    if not raw_records:
        raise ValidationError(f"{path}: no simplex records found")
    try:
        labels = sorted(seen, key=lambda s: (0, int(s)))
    except ValueError:
        labels = sorted(seen)
    labels = list(labels)
    id_of = {lab: i for i, lab in enumerate(labels)}
    records = [
        (tuple(sorted(id_of[lab] for lab in labs)), weight) for labs, weight in raw_records
    ]
    return records, labels


# -- hashing -----------------------------------------------------------------


def config_hash(config: Mapping) -> str:
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]


def dataset_hash(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()[:16]


# -- generic CSV helpers -------------------------------------------------------


def _write_csv(path: Path, header: str, rows: Iterable[str], chash: str | None) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        if chash:
            fh.write(f"# config_hash={chash}\n")
        fh.write(header + "\n")
        for row in rows:
            fh.write(row + "\n")


def _read_csv(path: Path) -> tuple[list[str], list[list[str]], str | None]:
    chash = None
    header: list[str] | None = None
    rows: list[list[str]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                if line.startswith("# config_hash="):
                    chash = line.split("=", 1)[1].strip()
                continue
            if header is None:
                header = line.split(",")
            else:
                rows.append(line.split(","))
    if header is None:
        raise ValidationError(f"{path}: empty table")
    return header, rows, chash


# -- complex persistence -------------------------------------------------------


def save_complex(cx: SimplicialComplex, directory, chash: str | None = None) -> None:
    """Per-layer CSVs plus a JSON manifest (counts, label map, hash)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    manifest = {
        "nodes": cx.node_count,
        "max_order": cx.max_order,
        "layer_counts": {str(h): c for h, c in cx.layer_counts().items()},
        "labels": list(cx.labels) if cx.labels is not None else None,
        "config_hash": chash,
    }
    with open(directory / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=1)
        fh.write("\n")
    for h in cx.orders:
        with open(directory / f"layer_{h}.csv", "w", encoding="utf-8", newline="\n") as fh:
            for row in cx.layer(h).tolist():
                fh.write(",".join(str(v) for v in row) + "\n")


def load_complex(directory) -> tuple[SimplicialComplex, dict]:
    directory = Path(directory)
    manifest_path = directory / "manifest.json"
    if not manifest_path.exists():
        raise ValidationError(f"{directory}: not a complex directory (no manifest.json)")
    with open(manifest_path, "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    layers: dict[int, np.ndarray] = {}
    for h in range(int(manifest["max_order"]) + 1):
        rows: list[list[int]] = []
        with open(directory / f"layer_{h}.csv", "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    rows.append([int(v) for v in line.split(",")])
        arr = np.asarray(rows, dtype=np.int64) if rows else np.empty((0, h + 1), dtype=np.int64)
        layers[h] = arr.reshape(-1, h + 1)
    cx = SimplicialComplex(layers, manifest.get("labels"))
    return cx, manifest


# -- score/label files ---------------------------------------------------------


def save_scores(
    path,
    scores: InfluenceScores,
    sidecar: Mapping | None = None,
    chash: str | None = None,
) -> None:
    """CSV of observed ``simplex_id,score`` rows plus a JSON sidecar."""
    path = Path(path)
    ids = scores.observed_ids()
    _write_csv(
        path,
        "simplex_id,score",
        (f"{int(i)},{float(scores.values[i])!r}" for i in ids),
        chash,
    )
    if sidecar is not None:
        meta = dict(sidecar)
        meta["config_hash"] = chash
        with open(path.with_suffix(".json"), "w", encoding="utf-8") as fh:
            json.dump(meta, fh, sort_keys=True, indent=1)
            fh.write("\n")


def load_scores(path, size: int | None = None) -> tuple[InfluenceScores, dict | None]:
    """Read a score CSV; unlisted ids stay unobserved."""
    path = Path(path)
    header, rows, chash = _read_csv(path)
    if header[:2] != ["simplex_id", "score"]:
        raise ValidationError(f"{path}: expected header simplex_id,score")
    ids = [int(r[0]) for r in rows]
    vals = [float(r[1]) for r in rows]
    n = (max(ids) + 1 if ids else 0) if size is None else size
    values = np.zeros(n)
    observed = np.zeros(n, dtype=bool)
    for i, v in zip(ids, vals):
        if i >= n:
            raise ValidationError(f"{path}: simplex id {i} out of range for size {n}")
        values[i] = v
        observed[i] = True
    sidecar = None
    side_path = path.with_suffix(".json")
    if side_path.exists():
        with open(side_path, "r", encoding="utf-8") as fh:
            sidecar = json.load(fh)
    elif chash is not None:
        sidecar = {"config_hash": chash}
    return InfluenceScores(values, observed), sidecar


# -- feature files --------------------------------------------------------------


def save_features(path, matrix: FeatureMatrix, chash: str | None = None) -> None:
    header = "simplex_id," + ",".join(matrix.columns)
    rows = (
        f"{i}," + ",".join(repr(float(v)) for v in row)
        for i, row in enumerate(matrix.values)
    )
    _write_csv(Path(path), header, rows, chash)


def load_features(path) -> tuple[FeatureMatrix, str | None]:
    header, rows, chash = _read_csv(Path(path))
    if header[0] != "simplex_id":
        raise ValidationError(f"{path}: expected first column simplex_id")
    ids = [int(r[0]) for r in rows]
    if ids != list(range(len(ids))):
        raise ValidationError(f"{path}: feature rows must cover ids 0..n-1 in order")
    values = np.asarray([[float(v) for v in r[1:]] for r in rows])
    return FeatureMatrix(values, tuple(header[1:])), chash


# -- checkpoints -----------------------------------------------------------------


def save_checkpoint(prefix, params: ModelParams, meta: Mapping | None = None,
                    chash: str | None = None) -> None:
    """JSON manifest plus a little-endian float64 blob in declared order."""
    prefix = Path(prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    manifest = {
        "dtype": "<f8",
        "fringe_orders": list(params.fringe_orders),
        "tensors": [{"name": n, "shape": list(t.shape)} for n, t in params.tensors()],
        "meta": dict(meta) if meta else {},
        "config_hash": chash,
    }
    with open(prefix.with_suffix(".json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=1)
        fh.write("\n")
    blob = params.to_vector().astype("<f8").tobytes()
    with open(prefix.with_suffix(".bin"), "wb") as fh:
        fh.write(blob)


def _zeros_like_manifest(manifest: Mapping) -> ModelParams:
    fringes = tuple(int(f) for f in manifest["fringe_orders"])
    shapes = {t["name"]: tuple(t["shape"]) for t in manifest["tensors"]}
    w1, b1, w2, b2, cheb = {}, {}, {}, {}, {}
    for f in fringes:
        w1[f] = np.zeros(shapes[f"f{f}.w1"])
        b1[f] = np.zeros(shapes[f"f{f}.b1"])
        w2[f] = np.zeros(shapes[f"f{f}.w2"])
        b2[f] = np.zeros(shapes[f"f{f}.b2"])
        cheb[f] = np.zeros(shapes[f"f{f}.cheb"])
    return ModelParams(
        fringe_orders=fringes,
        mlp_w1=w1, mlp_b1=b1, mlp_w2=w2, mlp_b2=b2, cheb=cheb,
        readout_w=np.zeros(shapes["readout.w"]),
        readout_b=0.0,
    )


def load_checkpoint(prefix) -> tuple[ModelParams, dict]:
    prefix = Path(prefix)
    with open(prefix.with_suffix(".json"), "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    if manifest.get("dtype") != "<f8":
        raise ValidationError(f"{prefix}: unsupported checkpoint dtype")
    template = _zeros_like_manifest(manifest)
    blob = np.fromfile(prefix.with_suffix(".bin"), dtype="<f8")
    if blob.shape[0] != template.count():
        raise ValidationError(
            f"{prefix}: blob holds {blob.shape[0]} values, manifest declares {template.count()}"
        )
    return template.from_vector(blob.astype(np.float64)), manifest


# -- rankings and report tables ---------------------------------------------------


def save_rank(path, ids: Sequence[int], scores: Sequence[float],
              chash: str | None = None, sidecar: Mapping | None = None) -> None:
    path = Path(path)
    rows = (
        f"{rank},{int(sid)},{float(scores[sid])!r}"
        for rank, sid in enumerate(ids, start=1)
    )
    _write_csv(path, "rank,simplex_id,score", rows, chash)
    if sidecar is not None:
        meta = dict(sidecar)
        meta["config_hash"] = chash
        with open(path.with_suffix(".json"), "w", encoding="utf-8") as fh:
            json.dump(meta, fh, sort_keys=True, indent=1)
            fh.write("\n")


def load_rank(path) -> tuple[np.ndarray, np.ndarray, dict | None]:
    """Returns (ordered ids, scores indexed by id, sidecar)."""
    path = Path(path)
    header, rows, chash = _read_csv(path)
    if header != ["rank", "simplex_id", "score"]:
        raise ValidationError(f"{path}: expected header rank,simplex_id,score")
    ids = np.asarray([int(r[1]) for r in rows], dtype=np.int64)
    n = int(ids.max()) + 1 if ids.size else 0
    scores = np.zeros(n)
    for r in rows:
        scores[int(r[1])] = float(r[2])
    sidecar = None
    side_path = path.with_suffix(".json")
    if side_path.exists():
        with open(side_path, "r", encoding="utf-8") as fh:
            sidecar = json.load(fh)
    elif chash is not None:
        sidecar = {"config_hash": chash}
    return ids, scores, sidecar


def append_table_row(path, header: str, row: str, chash: str | None = None) -> None:
    """Append one CSV row, creating the file (with header) on first use."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fresh = not path.exists()
    with open(path, "a", encoding="utf-8", newline="\n") as fh:
        if fresh:
            if chash:
                fh.write(f"# config_hash={chash}\n")
            fh.write(header + "\n")
        fh.write(row + "\n")
