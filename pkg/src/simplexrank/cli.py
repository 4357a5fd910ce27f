"""Config-driven command-line pipeline.

Every subcommand resolves its settings from three layers (built-in
defaults, an optional TOML config file, explicit flags), stamps the
resolved config's hash on every artifact it writes, and records a run
manifest in the output directory.  Logs go to standard error; data
goes to files.

Exit codes: 0 success, 1 runtime failure, 2 unknown subcommand or bad
flag (argparse), 3 config error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Mapping, Sequence

try:
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - Python < 3.11
    import tomli as tomllib

import numpy as np
import scipy

from . import __version__
from .centrality import (
    DEFAULT_FEATURES,
    FeatureMatrix,
    higher_order_degree,
    iterative_centrality,
    node_centrality,
    node_features,
    simplex_features,
    standardize,
)
from .complexes import (
    InfluenceScores,
    SimplicialComplex,
    clique_lift,
    from_edge_list,
    from_simplex_list,
)
from .diffusion import (
    DiffusionParams,
    epidemic_threshold,
    generate_labels,
    immunize_and_spread,
)
from .errors import ConfigError, SimplexRankError, ValidationError
from .evaluation import kendall_tau
from .model import TrainConfig, predict_rank, predict_scores, train
from .operators import build_operators
from .rng import stream
from .storage import (
    append_table_row,
    config_hash,
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

log = logging.getLogger("simplexrank")

_FEATURE_NAMES = frozenset(
    ("degree", "neighbor_degree", "h_index", "coreness", "closeness",
     "betweenness", "pagerank", "eigenvector")
)

# Two-letter codes used by baseline tables.
_BASELINE_CODES = {
    "DC": "degree",
    "ND": "neighbor_degree",
    "HI": "h_index",
    "KC": "coreness",
    "CC": "closeness",
    "BC": "betweenness",
    "PR": "pagerank",
    "EC": "eigenvector",
    "HD": "higher_order_degree",
}

_DEFAULTS: dict[str, dict[str, Any]] = {
    "dataset": {"input": "", "format": "edges"},
    "complex": {"hub_order": 0, "max_order": 2, "layer_cap": 5_000_000},
    "features": {"names": list(DEFAULT_FEATURES), "standardize": True},
    "diffusion": {
        "beta_ratio": 1.5,
        "beta2_ratio": 0.0,
        "gamma": 1.0,
        "runs": 1000,
        "max_steps": 0,  # 0 -> engine default
    },
    "train": {
        "cheb_order": 3,
        "hidden_width": 16,
        "embed_dim": 8,
        "learning_rate": 0.01,
        "epochs": 500,
        "pair_sample": 0,  # 0 -> 20 * train-split size
        "ratios": [0.6, 0.2, 0.2],
        "patience": 100,
        "ensemble": 1,
    },
    "baseline": {"metrics": ["DC", "ND", "HI", "CC", "HD"]},
    "immunize": {
        "top_fraction": 0.05,
        "seed_fraction": 0.05,
        "beta_ratios": [],  # empty -> [diffusion.beta_ratio]
    },
    "sweep": {"orders": [1, 2, 3]},
    "run": {"seed": 0, "threads": 1, "out": "runs/out"},
}

# flag dest -> (section, key); applied only when the flag was given
_FLAG_MAP = {
    "input": ("dataset", "input"),
    "format": ("dataset", "format"),
    "hub_order": ("complex", "hub_order"),
    "max_order": ("complex", "max_order"),
    "features": ("features", "names"),
    "beta_ratio": ("diffusion", "beta_ratio"),
    "beta2_ratio": ("diffusion", "beta2_ratio"),
    "gamma": ("diffusion", "gamma"),
    "runs": ("diffusion", "runs"),
    "metrics": ("baseline", "metrics"),
    "top_fraction": ("immunize", "top_fraction"),
    "seed_fraction": ("immunize", "seed_fraction"),
    "orders": ("sweep", "orders"),
    "seed": ("run", "seed"),
    "threads": ("run", "threads"),
    "out": ("run", "out"),
}


# -- config resolution ------------------------------------------------------


def _coerce(default: Any, value: Any, where: str) -> Any:
    """Force config values onto the default's type so hashes are stable."""
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{where} must be a boolean")
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where} must be an integer")
        return int(value)
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where} must be a number")
        return float(value)
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(f"{where} must be a string")
        return value
    if isinstance(default, list):
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{where} must be a list")
        if default:
            return [_coerce(default[0], v, where) for v in value]
        return [float(v) if isinstance(v, (int, float)) else v for v in value]
    raise ConfigError(f"{where} has unsupported type")  # pragma: no cover


def _apply(cfg: dict, section: str, key: str, value: Any, origin: str) -> None:
    if section not in cfg:
        raise ConfigError(f"{origin}: unknown config section {section!r}")
    if key not in cfg[section]:
        raise ConfigError(f"{origin}: unknown config key {section}.{key}")
    cfg[section][key] = _coerce(cfg[section][key], value, f"{section}.{key}")


def resolve_config(args: argparse.Namespace) -> dict:
    """Defaults, then the TOML file, then flags; unknown keys are fatal."""
    cfg = {s: dict(v) for s, v in _DEFAULTS.items()}
    path = getattr(args, "config", None)
    if path:
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file not found: {p}")
        try:
            with open(p, "rb") as fh:
                loaded = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{p}: {exc}") from None
        for section, values in loaded.items():
            if not isinstance(values, Mapping):
                raise ConfigError(f"{p}: top-level keys must be sections, got {section!r}")
            for key, value in values.items():
                _apply(cfg, section, key, value, str(p))
    for dest, (section, key) in _FLAG_MAP.items():
        value = getattr(args, dest, None)
        if value is not None:
            _apply(cfg, section, key, value, f"--{dest.replace('_', '-')}")
    if cfg["dataset"]["format"] not in ("edges", "simplices"):
        raise ConfigError("dataset.format must be 'edges' or 'simplices'")
    if cfg["complex"]["hub_order"] < 0 or cfg["complex"]["max_order"] < 1:
        raise ConfigError("hub_order must be >= 0 and max_order >= 1")
    if cfg["complex"]["hub_order"] > cfg["complex"]["max_order"]:
        raise ConfigError("hub_order must not exceed max_order")
    for name in cfg["features"]["names"]:
        if name not in _FEATURE_NAMES:
            raise ConfigError(
                f"unknown feature {name!r}; choose from {sorted(_FEATURE_NAMES)}"
            )
    for code in cfg["baseline"]["metrics"]:
        if code not in _BASELINE_CODES:
            raise ConfigError(
                f"unknown baseline code {code!r}; choose from {sorted(_BASELINE_CODES)}"
            )
    # a sweep needs the complex lifted up to its largest order
    if getattr(args, "command", None) == "sweep-order" and cfg["sweep"]["orders"]:
        cfg["complex"]["max_order"] = max(
            cfg["complex"]["max_order"], *cfg["sweep"]["orders"]
        )
    return cfg


def _write_manifest(out: Path, subcommand: str, cfg: Mapping, chash: str) -> None:
    manifest = {
        "subcommand": subcommand,
        "config": cfg,
        "config_hash": chash,
        "seed": cfg["run"]["seed"],
        "versions": {
            "python": ".".join(str(v) for v in sys.version_info[:3]),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "simplexrank": __version__,
        },
    }
    with open(out / "run_manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=1)
        fh.write("\n")


# -- shared pipeline steps --------------------------------------------------


def _with_max_order(cx: SimplicialComplex, max_order: int) -> SimplicialComplex:
    """Trim layers above ``max_order`` and pad missing ones as empty."""
    if cx.max_order > max_order:
        log.warning("dropping layers above order %d", max_order)
    layers: dict[int, np.ndarray] = {
        h: cx.layer(h) for h in cx.orders if h <= max_order
    }
    for h in range(max_order + 1):
        layers.setdefault(h, np.zeros((0, h + 1), dtype=np.int64))
    return SimplicialComplex(layers, labels=cx.labels)


def _build_complex(cfg: Mapping) -> tuple[SimplicialComplex, dict[int, InfluenceScores]]:
    source = cfg["dataset"]["input"]
    if not source:
        raise ConfigError("dataset.input is required (set it in the config or via --input)")
    path = Path(source)
    if not path.is_file():
        raise ConfigError(f"dataset file not found: {path}")
    max_order = cfg["complex"]["max_order"]
    if cfg["dataset"]["format"] == "edges":
        base = from_edge_list(parse_edge_file(path))
        cx = clique_lift(base, max_order, layer_cap=cfg["complex"]["layer_cap"])
        return cx, {}
    records, labels = parse_simplex_file(path)
    cx, observed = from_simplex_list(records, labels=labels)
    cx = _with_max_order(cx, max_order)
    observed = {h: s for h, s in observed.items() if h <= max_order}
    return cx, observed


def _ensure_complex(cfg: Mapping, out: Path, chash: str) -> SimplicialComplex:
    """Load the persisted complex, or build and persist it first."""
    cx_dir = out / "complex"
    if (cx_dir / "manifest.json").is_file():
        cx, _ = load_complex(cx_dir)
        return cx
    cx, _ = _build_complex(cfg)
    save_complex(cx, cx_dir, chash)
    log.info("built complex: %s", _counts_text(cx))
    return cx


def _counts_text(cx: SimplicialComplex) -> str:
    return " ".join(f"n_{h}={c}" for h, c in sorted(cx.layer_counts().items()))


def _features_path(out: Path, h: int) -> Path:
    return out / f"features_h{h}.csv"


def _labels_path(out: Path, cfg: Mapping) -> Path:
    d = cfg["diffusion"]
    h = cfg["complex"]["hub_order"]
    return out / f"labels_h{h}_br{d['beta_ratio']:g}_b2r{d['beta2_ratio']:g}.csv"


def _build_features(cx: SimplicialComplex, cfg: Mapping) -> FeatureMatrix:
    h = cfg["complex"]["hub_order"]
    per_node = node_features(cx, tuple(cfg["features"]["names"]))
    mat = simplex_features(per_node, cx, h)
    if cfg["features"]["standardize"]:
        mat = standardize(mat)
    return mat


def _load_or_build_features(
    cx: SimplicialComplex, cfg: Mapping, out: Path, chash: str
) -> FeatureMatrix:
    path = _features_path(out, cfg["complex"]["hub_order"])
    if path.is_file():
        mat, _ = load_features(path)
        if mat.values.shape[0] != cx.layer_size(cfg["complex"]["hub_order"]):
            raise ValidationError(f"{path}: rows do not match the hub layer")
        return mat
    mat = _build_features(cx, cfg)
    save_features(path, mat, chash)
    log.info("computed features %s -> %s", "x".join(map(str, mat.values.shape)), path)
    return mat


def _resolve_betas(cx: SimplicialComplex, cfg: Mapping) -> tuple[float, float, float]:
    """(beta, beta2, threshold); ratios scale the threshold, capped at 1."""
    d = cfg["diffusion"]
    th = epidemic_threshold(cx, d["gamma"])
    beta = min(1.0, d["beta_ratio"] * th)
    beta2 = min(1.0, d["beta2_ratio"] * beta)
    return beta, beta2, th


def _diffusion_params(cfg: Mapping, beta: float, beta2: float) -> DiffusionParams:
    d = cfg["diffusion"]
    return DiffusionParams(
        beta=beta,
        gamma=d["gamma"],
        beta2=beta2,
        runs=d["runs"],
        seed=cfg["run"]["seed"],
        max_steps=d["max_steps"] or None,
    )


def _train_config(cfg: Mapping, seed: int, split_seed: int, max_order: int | None = None) -> TrainConfig:
    t = cfg["train"]
    return TrainConfig(
        cheb_order=t["cheb_order"],
        hidden_width=t["hidden_width"],
        embed_dim=t["embed_dim"],
        learning_rate=t["learning_rate"],
        epochs=t["epochs"],
        pair_sample=t["pair_sample"] or None,
        ratios=tuple(t["ratios"]),
        patience=t["patience"],
        seed=seed,
        split_seed=split_seed,
        max_order=cfg["complex"]["max_order"] if max_order is None else max_order,
    )


def _member_seeds(cfg: Mapping) -> list[int]:
    root = cfg["run"]["seed"]
    count = cfg["train"]["ensemble"]
    return [int(s) for s in stream(root, "ensemble").integers(0, 2**31 - 1, size=count)]


def _require(path: Path, hint: str) -> Path:
    if not path.is_file():
        raise SimplexRankError(f"missing {path}; run `simplexrank {hint}` first")
    return path


def _load_labels(args: argparse.Namespace, cfg: Mapping, out: Path,
                 size: int) -> tuple[InfluenceScores, dict]:
    path = Path(args.labels) if getattr(args, "labels", None) else _labels_path(out, cfg)
    _require(path, "label")
    scores, sidecar = load_scores(path, size=size)
    return scores, sidecar or {}


def _test_ids(out: Path, h: int, labels: InfluenceScores) -> np.ndarray:
    """Test split from the train log when present, else all observed ids."""
    log_path = out / f"train_log_h{h}.json"
    observed = labels.observed_ids()
    if log_path.is_file():
        with open(log_path, "r", encoding="utf-8") as fh:
            members = json.load(fh)["members"]
        test = np.asarray(members[0]["split"]["test"], dtype=np.int64)
        keep = test[labels.observed[test]]
        if keep.size >= 2:
            return keep
        log.warning("test split has under two observed labels; using all observed")
    return observed


# -- subcommands ------------------------------------------------------------


def cmd_lift(args: argparse.Namespace, cfg: dict, out: Path, chash: str) -> None:
    cx, observed = _build_complex(cfg)
    save_complex(cx, out / "complex", chash)
    log.info("lifted complex: %s", _counts_text(cx))
    for h, scores in sorted(observed.items()):
        if scores.observed.any():
            path = out / f"weights_h{h}.csv"
            save_scores(path, scores, sidecar={"source": cfg["dataset"]["input"]}, chash=chash)
            log.info("kept %d observed weights of order %d -> %s",
                     scores.observed.sum(), h, path)


def cmd_features(args: argparse.Namespace, cfg: dict, out: Path, chash: str) -> None:
    cx = _ensure_complex(cfg, out, chash)
    mat = _build_features(cx, cfg)
    path = _features_path(out, cfg["complex"]["hub_order"])
    save_features(path, mat, chash)
    log.info("wrote %d x %d feature matrix -> %s", *mat.values.shape, path)


def cmd_label(args: argparse.Namespace, cfg: dict, out: Path, chash: str) -> None:
    cx = _ensure_complex(cfg, out, chash)
    h = cfg["complex"]["hub_order"]
    beta, beta2, th = _resolve_betas(cx, cfg)
    params = _diffusion_params(cfg, beta, beta2)
    log.info("threshold=%.6g beta=%.6g beta2=%.6g runs=%d",
             th, beta, beta2, params.runs)
    labels = generate_labels(cx, h, params, threads=cfg["run"]["threads"])
    sidecar = {
        "hub_order": h,
        "beta": beta,
        "beta2": beta2,
        "gamma": cfg["diffusion"]["gamma"],
        "beta_ratio": cfg["diffusion"]["beta_ratio"],
        "beta2_ratio": cfg["diffusion"]["beta2_ratio"],
        "threshold": th,
        "runs": params.runs,
        "seed": params.seed,
    }
    path = _labels_path(out, cfg)
    save_scores(path, labels, sidecar=sidecar, chash=chash)
    log.info("wrote %d labels -> %s", len(labels), path)


def cmd_train(args: argparse.Namespace, cfg: dict, out: Path, chash: str) -> None:
    cx = _ensure_complex(cfg, out, chash)
    h = cfg["complex"]["hub_order"]
    feats = _load_or_build_features(cx, cfg, out, chash)
    labels, _ = _load_labels(args, cfg, out, size=cx.layer_size(h))
    seeds = _member_seeds(cfg)
    members = []
    for k, member_seed in enumerate(seeds):
        config = _train_config(cfg, seed=member_seed, split_seed=cfg["run"]["seed"])
        params, train_log = train(cx, h, feats, labels, config)
        save_checkpoint(
            out / f"model_h{h}_m{k}", params,
            meta={"member": k, "seed": member_seed, "hub_order": h},
            chash=chash,
        )
        members.append(train_log)
        log.info("member %d: best epoch %s val tau %s",
                 k, train_log["best_epoch"], train_log["best_val_tau"])
    summary = {
        "hub_order": h,
        "member_seeds": seeds,
        "members": members,
        "config_hash": chash,
    }
    with open(out / f"train_log_h{h}.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, sort_keys=True, indent=1)
        fh.write("\n")


def cmd_rank(args: argparse.Namespace, cfg: dict, out: Path, chash: str) -> None:
    cx = _ensure_complex(cfg, out, chash)
    h = cfg["complex"]["hub_order"]
    feats = _load_or_build_features(cx, cfg, out, chash)
    if args.checkpoint:
        prefixes = [Path(args.checkpoint)]
    else:
        prefixes = sorted(p.with_suffix("") for p in out.glob(f"model_h{h}_m*.json"))
        if not prefixes:
            raise SimplexRankError(
                f"no checkpoints matching model_h{h}_m*.json in {out}; run `simplexrank train` first"
            )
    members = [load_checkpoint(p)[0] for p in prefixes]
    ids, scores = predict_rank(cx, h, feats, members, max_order=cfg["complex"]["max_order"])
    path = out / f"rank_h{h}.csv"
    save_rank(path, ids, scores, chash=chash,
              sidecar={"hub_order": h, "members": len(members)})
    log.info("ranked %d simplices -> %s", ids.shape[0], path)


def _read_score_file(path: Path) -> tuple[dict[int, float], str | None]:
    """Accept either a score CSV or a rank CSV; return id -> score."""
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline()
        if first.startswith("# config_hash="):
            first = fh.readline()
    if first.strip() == "rank,simplex_id,score":
        ids, scores, sidecar = load_rank(path)
        chash = (sidecar or {}).get("config_hash")
        return {int(i): float(scores[i]) for i in ids}, chash
    scores_obj, sidecar = load_scores(path)
    chash = (sidecar or {}).get("config_hash")
    return {int(i): float(scores_obj.values[i]) for i in scores_obj.observed_ids()}, chash


def cmd_evaluate(args: argparse.Namespace, cfg: dict, out: Path, chash: str) -> None:
    h = cfg["complex"]["hub_order"]
    d = cfg["diffusion"]
    method = args.method
    if (args.pred is None) != (args.truth is None):
        raise ConfigError("--pred and --truth must be given together")
    if args.pred is not None:
        pred, pred_hash = _read_score_file(Path(args.pred))
        truth, truth_hash = _read_score_file(Path(args.truth))
        if pred_hash and truth_hash and pred_hash != truth_hash and not args.force:
            raise SimplexRankError(
                f"config hash mismatch: {args.pred} has {pred_hash}, "
                f"{args.truth} has {truth_hash}; pass --force to compare anyway"
            )
        common = sorted(set(pred) & set(truth))
        if len(common) < 2:
            raise SimplexRankError("need at least two ids common to both files")
        tau = kendall_tau([pred[i] for i in common], [truth[i] for i in common])
        beta_ratio, beta2_ratio = d["beta_ratio"], d["beta2_ratio"]
    else:
        rank_path = _require(out / f"rank_h{h}.csv", "rank")
        cx = _ensure_complex(cfg, out, chash)
        labels, sidecar = _load_labels(args, cfg, out, size=cx.layer_size(h))
        pred, _ = _read_score_file(rank_path)
        ids = _test_ids(out, h, labels)
        if ids.size < 2:
            raise SimplexRankError("need at least two labelled simplices to evaluate")
        tau = kendall_tau([pred[int(i)] for i in ids], labels.values[ids])
        beta_ratio = sidecar.get("beta_ratio", d["beta_ratio"])
        beta2_ratio = sidecar.get("beta2_ratio", d["beta2_ratio"])
    append_table_row(
        out / "evaluations.csv",
        "method,beta_ratio,beta2_ratio,tau",
        f"{method},{beta_ratio:g},{beta2_ratio:g},{tau!r}",
    )
    print(f"tau={tau}")


def cmd_baseline(args: argparse.Namespace, cfg: dict, out: Path, chash: str) -> None:
    cx = _ensure_complex(cfg, out, chash)
    h = cfg["complex"]["hub_order"]
    labels, sidecar = _load_labels(args, cfg, out, size=cx.layer_size(h))
    ids = _test_ids(out, h, labels)
    if ids.size < 2:
        raise SimplexRankError("need at least two labelled simplices to evaluate")
    d = cfg["diffusion"]
    beta_ratio = sidecar.get("beta_ratio", d["beta_ratio"])
    beta2_ratio = sidecar.get("beta2_ratio", d["beta2_ratio"])
    for code in cfg["baseline"]["metrics"]:
        metric = _BASELINE_CODES[code]
        if metric == "higher_order_degree":
            per_simplex = higher_order_degree(cx, h)
        else:
            if metric in ("pagerank", "eigenvector"):
                per_node, converged = iterative_centrality(cx, metric)
                if not converged:
                    log.warning("%s did not converge", metric)
            else:
                per_node = node_centrality(cx, metric)
            column = FeatureMatrix(per_node.reshape(-1, 1), (metric,))
            per_simplex = simplex_features(column, cx, h).values[:, 0]
        tau = kendall_tau(per_simplex[ids], labels.values[ids])
        append_table_row(
            out / "evaluations.csv",
            "method,beta_ratio,beta2_ratio,tau",
            f"{code},{beta_ratio:g},{beta2_ratio:g},{tau!r}",
        )
        log.info("%s tau=%.4f over %d test simplices", code, tau, ids.size)


def cmd_immunize(args: argparse.Namespace, cfg: dict, out: Path, chash: str) -> None:
    cx = _ensure_complex(cfg, out, chash)
    h = cfg["complex"]["hub_order"]
    if not cx.has_layer(h) or cx.layer_size(h) == 0:
        raise SimplexRankError(f"complex has no simplices of order {h} to immunize")
    n_h = cx.layer_size(h)
    k = max(1, int(round(cfg["immunize"]["top_fraction"] * n_h)))
    if args.method == "random":
        pick = stream(cfg["run"]["seed"], "immunize-pick").choice(n_h, size=k, replace=False)
        pick = np.sort(pick)
    else:
        rank_path = Path(args.ranking) if args.ranking else out / f"rank_h{h}.csv"
        _require(rank_path, "rank")
        ids, _, _ = load_rank(rank_path)
        if ids.shape[0] != n_h:
            raise ValidationError(f"{rank_path}: ranking covers {ids.shape[0]} of {n_h} simplices")
        pick = ids[:k]
    _, _, th = _resolve_betas(cx, cfg)
    ratios = cfg["immunize"]["beta_ratios"] or [cfg["diffusion"]["beta_ratio"]]
    betas = [min(1.0, r * th) for r in ratios]
    beta2 = min(1.0, cfg["diffusion"]["beta2_ratio"] * betas[0])
    params = _diffusion_params(cfg, betas[0], beta2)
    results = immunize_and_spread(
        cx, cx.layer(h)[pick], cfg["immunize"]["seed_fraction"], betas, params,
        threads=cfg["run"]["threads"],
    )
    for ratio, (beta, mean_r) in zip(ratios, results):
        append_table_row(
            out / "immunization.csv",
            "method,beta_ratio,mean_r",
            f"{args.method},{ratio:g},{mean_r!r}",
        )
        log.info("%s: immunized %d of %d, beta=%.4g, mean r=%.4f",
                 args.method, k, n_h, beta, mean_r)


def cmd_sweep_order(args: argparse.Namespace, cfg: dict, out: Path, chash: str) -> None:
    orders = sorted(set(cfg["sweep"]["orders"]))
    if not orders or orders[0] < 1:
        raise ConfigError("sweep orders must be positive integers")
    h = cfg["complex"]["hub_order"]
    if h > orders[0]:
        raise ConfigError(f"hub order {h} exceeds the smallest sweep order {orders[0]}")
    # one complex at the largest order; smaller sweeps just ignore top layers
    cx = _ensure_complex(cfg, out, chash)
    if cx.max_order < orders[-1]:
        raise ConfigError(
            f"persisted complex stops at order {cx.max_order}; sweep needs {orders[-1]}"
        )
    feats = _load_or_build_features(cx, cfg, out, chash)
    labels_file = _labels_path(out, cfg)
    if labels_file.is_file():
        labels, _ = load_scores(labels_file, size=cx.layer_size(h))
    else:
        beta, beta2, th = _resolve_betas(cx, cfg)
        params = _diffusion_params(cfg, beta, beta2)
        log.info("labelling %d simplices at beta=%.6g", cx.layer_size(h), beta)
        labels = generate_labels(cx, h, params, threads=cfg["run"]["threads"])
        save_scores(labels_file, labels, sidecar={"hub_order": h, "beta": beta}, chash=chash)
    root = cfg["run"]["seed"]
    for max_order in orders:
        config = _train_config(cfg, seed=root, split_seed=root, max_order=max_order)
        params, train_log = train(cx, h, feats, labels, config)
        operators = build_operators(cx, h, max_order)
        scores = predict_scores(operators, feats, params)
        test = np.asarray(train_log["split"]["test"], dtype=np.int64)
        if test.size < 2:
            log.warning("test split has under two simplices; scoring all observed")
            test = labels.observed_ids()
        tau = kendall_tau(scores[test], labels.values[test])
        append_table_row(
            out / "order_sweep.csv",
            "method,max_order,tau",
            f"model,{max_order},{tau!r}",
        )
        log.info("max order %d: test tau=%.4f (best epoch %s)",
                 max_order, tau, train_log["best_epoch"])


_REPORT_FAMILIES = (
    ("tau_vs_beta", "evaluations.csv"),
    ("tau_heatmap", "evaluations.csv"),
    ("immunization", "immunization.csv"),
    ("tau_vs_order", "order_sweep.csv"),
)


def cmd_report(args: argparse.Namespace, cfg: dict, out: Path, chash: str) -> None:
    results = Path(args.results) if args.results else out
    missing = [name for name, src in _REPORT_FAMILIES if not (results / src).is_file()]
    if missing:
        raise SimplexRankError("missing report inputs: " + ", ".join(missing))

    def rows_of(name: str) -> list[list[str]]:
        with open(results / name, "r", encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
        return [ln.split(",") for ln in lines[1:]]

    evals = rows_of("evaluations.csv")
    tables = {
        "report_tau_vs_beta.csv": (
            "method,beta_ratio,tau",
            [f"{m},{b},{t}" for m, b, _, t in evals],
        ),
        "report_tau_heatmap.csv": (
            "method,beta_ratio,beta2_ratio,tau",
            [",".join(r) for r in evals],
        ),
        "report_immunization.csv": (
            "method,beta_ratio,mean_r",
            [",".join(r) for r in rows_of("immunization.csv")],
        ),
        "report_tau_vs_order.csv": (
            "method,max_order,tau",
            [",".join(r) for r in rows_of("order_sweep.csv")],
        ),
    }
    for name, (header, rows) in tables.items():
        with open(out / name, "w", encoding="utf-8") as fh:
            fh.write(f"# config_hash={chash}\n{header}\n")
            fh.writelines(row + "\n" for row in rows)
        log.info("wrote %d rows -> %s", len(rows), out / name)


_COMMANDS = {
    "lift": cmd_lift,
    "features": cmd_features,
    "label": cmd_label,
    "train": cmd_train,
    "rank": cmd_rank,
    "evaluate": cmd_evaluate,
    "immunize": cmd_immunize,
    "baseline": cmd_baseline,
    "sweep-order": cmd_sweep_order,
    "report": cmd_report,
}


# -- parser -----------------------------------------------------------------


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="TOML config file")
    sub.add_argument("--input", help="dataset path")
    sub.add_argument("--format", choices=["edges", "simplices"], help="dataset format")
    sub.add_argument("--hub-order", dest="hub_order", type=int, help="target simplex order h")
    sub.add_argument("--max-order", dest="max_order", type=int, help="largest lifted order F")
    sub.add_argument("--beta-ratio", dest="beta_ratio", type=float,
                     help="infection rate as a multiple of the threshold")
    sub.add_argument("--beta2-ratio", dest="beta2_ratio", type=float,
                     help="triangle infection rate as a multiple of beta")
    sub.add_argument("--gamma", type=float, help="recovery probability")
    sub.add_argument("--runs", type=int, help="Monte-Carlo runs per estimate")
    sub.add_argument("--seed", type=int, help="root seed")
    sub.add_argument("--threads", type=int, help="worker thread cap")
    sub.add_argument("--out", help="output directory")
    sub.add_argument("-v", "--verbose", action="store_true", help="debug logging")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simplexrank",
        description="rank influential simplices in a simplicial complex",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="subcommand")

    p = sub.add_parser("lift", help="build and persist the lifted complex")
    _add_common(p)
    p = sub.add_parser("features", help="write per-simplex centrality features")
    _add_common(p)
    p.add_argument("--features", type=lambda s: s.split(","),
                   help="comma-separated node feature names")
    p = sub.add_parser("label", help="Monte-Carlo infection-ability labels")
    _add_common(p)
    p = sub.add_parser("train", help="fit the spectral ranking model")
    _add_common(p)
    p.add_argument("--labels", help="label CSV (default: the label artifact)")
    p = sub.add_parser("rank", help="score and rank all hub simplices")
    _add_common(p)
    p.add_argument("--checkpoint", help="checkpoint prefix (default: trained members)")
    p = sub.add_parser("evaluate", help="Kendall tau of predictions against labels")
    _add_common(p)
    p.add_argument("--pred", help="predicted score or rank CSV")
    p.add_argument("--truth", help="ground-truth score CSV")
    p.add_argument("--labels", help="label CSV for test-split evaluation")
    p.add_argument("--method", default="model", help="method name for the results table")
    p.add_argument("--force", action="store_true", help="ignore config hash mismatches")
    p = sub.add_parser("immunize", help="spread with top-ranked simplices immunized")
    _add_common(p)
    p.add_argument("--ranking", help="rank CSV (default: the rank artifact)")
    p.add_argument("--method", choices=["model", "random"], default="model",
                   help="pick top-ranked or uniformly random simplices")
    p.add_argument("--top-fraction", dest="top_fraction", type=float,
                   help="fraction of hub simplices to immunize")
    p.add_argument("--seed-fraction", dest="seed_fraction", type=float,
                   help="fraction of remaining nodes that seed each run")
    p = sub.add_parser("baseline", help="Kendall tau of classical centralities")
    _add_common(p)
    p.add_argument("--labels", help="label CSV (default: the label artifact)")
    p.add_argument("--metrics", type=lambda s: s.split(","),
                   help="comma-separated baseline codes, e.g. DC,ND,HI,CC,HD")
    p = sub.add_parser("sweep-order", help="train and evaluate across max orders")
    _add_common(p)
    p.add_argument("--orders", type=lambda s: [int(x) for x in s.split(",")],
                   help="comma-separated max orders, e.g. 1,2,3")
    p = sub.add_parser("report", help="tidy plot-ready tables from run artifacts")
    _add_common(p)
    p.add_argument("--results", help="results directory (default: --out)")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(message)s",
    )
    try:
        cfg = resolve_config(args)
        out = Path(cfg["run"]["out"])
        out.mkdir(parents=True, exist_ok=True)
        chash = config_hash(cfg)
        _write_manifest(out, args.command, cfg, chash)
        _COMMANDS[args.command](args, cfg, out, chash)
    except ConfigError as exc:
        log.error("%s", exc)
        return 3
    except (SimplexRankError, OSError) as exc:
        log.error("%s", exc)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
