"""Spectral ranking model over hub/fringe operators.

Per fringe order ``f`` the model embeds hub features through a two-layer
MLP ``phi_f`` and filters the embedding with a learnable Chebyshev
polynomial of the hub adjacency:

    Y_f = sum_k c_{f,k} T_k(A_{h,f}) phi_f(X),   c_{f,0} = w_{f,0},
                                                 c_{f,k} = w_{f,k} / k

The per-fringe blocks are concatenated and squashed to scores through a
linear readout and a logistic, so predictions always sit in (0, 1).
Training minimizes the pairwise hinge

    loss = - sum_{pairs (i,j)} tanh(y_i - y_j) * R_ij

with R_ij in {+1, -1, 0} from ground-truth score comparisons; pairs are
streamed, the dense pair matrix is never materialized.  All gradients are
analytic reverse-mode: the Chebyshev basis terms are constants with
respect to the parameters, and since ``A`` is symmetric the filter's
adjoint reuses the same three-term recursion on the upstream gradient.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.special import expit

from .centrality import FeatureMatrix
from .complexes import InfluenceScores, SimplicialComplex
from .errors import ValidationError
from .evaluation import kendall_tau, split
from .operators import HubFringeOperator, build_operators, chebyshev_apply
from .rng import stream

__all__ = [
    "ModelParams",
    "TrainConfig",
    "init_params",
    "forward",
    "ranking_loss",
    "gradients",
    "train",
    "predict_scores",
    "predict_rank",
]

_LEAKY_SLOPE = 0.01
_ADAM_B1, _ADAM_B2, _ADAM_EPS = 0.9, 0.999, 1e-8


@dataclass
class ModelParams:
    """All learnable tensors, keyed by fringe order.

    Serialization order (used by ``to_vector`` and the checkpoint blob):
    for each fringe order ascending: W1, b1, W2, b2, cheb; then the
    readout weights and bias.
    """

    fringe_orders: tuple[int, ...]
    mlp_w1: dict[int, np.ndarray]
    mlp_b1: dict[int, np.ndarray]
    mlp_w2: dict[int, np.ndarray]
    mlp_b2: dict[int, np.ndarray]
    cheb: dict[int, np.ndarray]
    readout_w: np.ndarray
    readout_b: float

    @property
    def cheb_order(self) -> int:
        return int(next(iter(self.cheb.values())).shape[0]) - 1

    @property
    def embed_dim(self) -> int:
        return int(next(iter(self.mlp_w2.values())).shape[1])

    def tensors(self) -> list[tuple[str, np.ndarray]]:
        out: list[tuple[str, np.ndarray]] = []
        for f in self.fringe_orders:
            out.append((f"f{f}.w1", self.mlp_w1[f]))
            out.append((f"f{f}.b1", self.mlp_b1[f]))
            out.append((f"f{f}.w2", self.mlp_w2[f]))
            out.append((f"f{f}.b2", self.mlp_b2[f]))
            out.append((f"f{f}.cheb", self.cheb[f]))
        out.append(("readout.w", self.readout_w))
        out.append(("readout.b", np.asarray([self.readout_b])))
        return out

    def count(self) -> int:
        return sum(t.size for _, t in self.tensors())

    def to_vector(self) -> np.ndarray:
        return np.concatenate([t.ravel() for _, t in self.tensors()])

    def from_vector(self, vec: np.ndarray) -> "ModelParams":
        vec = np.asarray(vec, dtype=np.float64)
        if vec.shape != (self.count(),):
            raise ValidationError(f"expected vector of length {self.count()}")
        out = self.copy()
        pos = 0
        for name, t in out.tensors():
            chunk = vec[pos : pos + t.size].reshape(t.shape)
            pos += t.size
            owner, attr = name.split(".")
            if owner == "readout":
                if attr == "w":
                    out.readout_w = chunk.copy()
                else:
                    out.readout_b = float(chunk[0])
            else:
                f = int(owner[1:])
                {"w1": out.mlp_w1, "b1": out.mlp_b1, "w2": out.mlp_w2,
                 "b2": out.mlp_b2, "cheb": out.cheb}[attr][f] = chunk.copy()
        return out

    def copy(self) -> "ModelParams":
        return ModelParams(
            fringe_orders=self.fringe_orders,
            mlp_w1={f: a.copy() for f, a in self.mlp_w1.items()},
            mlp_b1={f: a.copy() for f, a in self.mlp_b1.items()},
            mlp_w2={f: a.copy() for f, a in self.mlp_w2.items()},
            mlp_b2={f: a.copy() for f, a in self.mlp_b2.items()},
            cheb={f: a.copy() for f, a in self.cheb.items()},
            readout_w=self.readout_w.copy(),
            readout_b=float(self.readout_b),
        )


@dataclass(frozen=True)
class TrainConfig:
    """Hyper-parameters; defaults follow the reference protocol."""

    cheb_order: int = 3
    hidden_width: int = 16
    embed_dim: int = 8
    learning_rate: float = 1e-2
    epochs: int = 500
    pair_sample: int | None = None  # None -> 20 * len(train split)
    ratios: tuple[float, float, float] = (0.6, 0.2, 0.2)
    patience: int = 100
    ensemble: int = 1
    seed: int = 0
    split_seed: int | None = None  # None -> seed; lets ensembles share a split
    max_order: int | None = None

    def __post_init__(self) -> None:
        if self.cheb_order < 1:
            raise ValidationError("cheb_order must be at least 1")
        if self.hidden_width < 1 or self.embed_dim < 1:
            raise ValidationError("hidden_width and embed_dim must be positive")
        if self.learning_rate <= 0:
            raise ValidationError("learning_rate must be positive")
        if self.epochs < 1:
            raise ValidationError("epochs must be at least 1")
        if self.pair_sample is not None and self.pair_sample < 1:
            raise ValidationError("pair_sample must be positive")
        if len(self.ratios) != 3 or abs(sum(self.ratios) - 1.0) > 1e-9:
            raise ValidationError("ratios must be three numbers summing to 1")
        if self.patience < 1:
            raise ValidationError("patience must be at least 1")
        if self.ensemble < 1:
            raise ValidationError("ensemble must be at least 1")


def _as_array(x: FeatureMatrix | np.ndarray) -> np.ndarray:
    vals = x.values if isinstance(x, FeatureMatrix) else np.asarray(x, dtype=np.float64)
    if vals.ndim != 2:
        raise ValidationError("features must be a 2-D matrix")
    if not np.all(np.isfinite(vals)):
        raise ValidationError("features must be finite")
    return vals


def init_params(
    n_features: int,
    fringe_orders: Sequence[int],
    config: TrainConfig,
    rng: np.random.Generator,
) -> ModelParams:
    """Scaled-uniform fan-in weights, zero biases, identity-start filter.

    The Chebyshev coefficients start at ``w_{f,0} = 1`` and 0 elsewhere,
    so the initial model is the plain MLP readout (the filter is the
    identity).
    """
    fringes = tuple(sorted(int(f) for f in fringe_orders))
    if not fringes:
        raise ValidationError("at least one fringe order is required")
    h, d_out, k = config.hidden_width, config.embed_dim, config.cheb_order

    def uniform(fan_in: int, shape: tuple[int, ...]) -> np.ndarray:
        bound = 1.0 / np.sqrt(fan_in)
        return rng.uniform(-bound, bound, size=shape)

    w1, b1, w2, b2, cheb = {}, {}, {}, {}, {}
    for f in fringes:
        w1[f] = uniform(n_features, (n_features, h))
        b1[f] = np.zeros(h)
        w2[f] = uniform(h, (h, d_out))
        b2[f] = np.zeros(d_out)
        coef = np.zeros(k + 1)
        coef[0] = 1.0
        cheb[f] = coef
    readout_in = len(fringes) * d_out
    return ModelParams(
        fringe_orders=fringes,
        mlp_w1=w1, mlp_b1=b1, mlp_w2=w2, mlp_b2=b2, cheb=cheb,
        readout_w=uniform(readout_in, (readout_in,)),
        readout_b=0.0,
    )


def _filter_coefficients(omega: np.ndarray) -> np.ndarray:
    c = omega.copy()
    if c.shape[0] > 1:
        c[1:] = c[1:] / np.arange(1, c.shape[0])
    return c


def _forward_cache(
    operators: Mapping[int, HubFringeOperator],
    x: np.ndarray,
    params: ModelParams,
) -> dict:
    blocks = []
    cache: dict = {"per_fringe": {}}
    for f in params.fringe_orders:
        if f not in operators:
            raise ValidationError(f"missing operator for fringe order {f}")
        op = operators[f]
        if op.adjacency.shape[0] != x.shape[0]:
            raise ValidationError(
                f"operator for fringe {f} is {op.adjacency.shape} but features have "
                f"{x.shape[0]} rows"
            )
        pre1 = x @ params.mlp_w1[f] + params.mlp_b1[f]
        h1 = np.where(pre1 > 0, pre1, _LEAKY_SLOPE * pre1)
        phi = h1 @ params.mlp_w2[f] + params.mlp_b2[f]
        basis = chebyshev_apply(op.adjacency, phi, params.cheb_order)
        coef = _filter_coefficients(params.cheb[f])
        y_f = sum(c * z for c, z in zip(coef, basis))
        cache["per_fringe"][f] = {
            "pre1": pre1, "h1": h1, "phi": phi, "basis": basis, "coef": coef,
        }
        blocks.append(y_f)
    y = np.concatenate(blocks, axis=1)
    logits = y @ params.readout_w + params.readout_b
    scores = expit(logits)
    cache.update({"x": x, "y": y, "logits": logits, "scores": scores})
    return cache


def forward(
    operators: Mapping[int, HubFringeOperator],
    x: FeatureMatrix | np.ndarray,
    params: ModelParams,
) -> InfluenceScores:
    """Predicted scores for every hub simplex (all marked observed)."""
    cache = _forward_cache(operators, _as_array(x), params)
    return InfluenceScores.fully_observed(cache["scores"])


def _check_pairs(pairs: np.ndarray, n: int) -> np.ndarray:
    pairs = np.asarray(pairs)
    if pairs.ndim != 2 or pairs.shape[1] != 3:
        raise ValidationError("pairs must be an (n, 3) array of (i, j, r)")
    ids = pairs[:, :2].astype(np.int64)
    if pairs.shape[0] and (ids.min() < 0 or ids.max() >= n):
        raise ValidationError("pair ids out of range")
    return pairs


def ranking_loss(
    predicted: InfluenceScores | np.ndarray,
    pairs: np.ndarray,
) -> float:
    """``- sum tanh(y_i - y_j) * R_ij`` streamed over the pair list."""
    y = predicted.values if isinstance(predicted, InfluenceScores) else np.asarray(predicted)
    pairs = _check_pairs(pairs, y.shape[0])
    if pairs.shape[0] == 0:
        return 0.0
    i = pairs[:, 0].astype(np.int64)
    j = pairs[:, 1].astype(np.int64)
    r = pairs[:, 2].astype(np.float64)
    return float(-(np.tanh(y[i] - y[j]) * r).sum())


def gradients(
    operators: Mapping[int, HubFringeOperator],
    x: FeatureMatrix | np.ndarray,
    params: ModelParams,
    pairs: np.ndarray,
) -> tuple[float, ModelParams]:
    """Loss and its analytic gradient in a ModelParams-shaped container."""
    x = _as_array(x)
    cache = _forward_cache(operators, x, params)
    scores = cache["scores"]
    n = scores.shape[0]
    pairs = _check_pairs(pairs, n)

    i = pairs[:, 0].astype(np.int64)
    j = pairs[:, 1].astype(np.int64)
    r = pairs[:, 2].astype(np.float64)
    t = np.tanh(scores[i] - scores[j])
    loss = float(-(t * r).sum())

    d_scores = np.zeros(n)
    pair_pull = -r * (1.0 - t * t)
    np.add.at(d_scores, i, pair_pull)
    np.add.at(d_scores, j, -pair_pull)

    d_logits = d_scores * scores * (1.0 - scores)
    g_readout_w = cache["y"].T @ d_logits
    g_readout_b = float(d_logits.sum())
    d_y = d_logits[:, None] * params.readout_w[None, :]

    grads = params.copy()
    grads.readout_w = g_readout_w
    grads.readout_b = g_readout_b

    d_out = params.embed_dim
    for idx, f in enumerate(params.fringe_orders):
        fc = cache["per_fringe"][f]
        d_yf = d_y[:, idx * d_out : (idx + 1) * d_out]

        g_coef = np.asarray([(z * d_yf).sum() for z in fc["basis"]])
        g_omega = g_coef.copy()
        if g_omega.shape[0] > 1:
            g_omega[1:] = g_omega[1:] / np.arange(1, g_omega.shape[0])
        grads.cheb[f] = g_omega

        # adjoint of the filter: A is symmetric, so sum_k c_k T_k(A)^T G
        # is the same Chebyshev recursion applied to G
        adj_basis = chebyshev_apply(operators[f].adjacency, d_yf, params.cheb_order)
        d_phi = sum(c * z for c, z in zip(fc["coef"], adj_basis))

        grads.mlp_w2[f] = fc["h1"].T @ d_phi
        grads.mlp_b2[f] = d_phi.sum(axis=0)
        d_h1 = d_phi @ params.mlp_w2[f].T
        d_pre1 = d_h1 * np.where(fc["pre1"] > 0, 1.0, _LEAKY_SLOPE)
        grads.mlp_w1[f] = x.T @ d_pre1
        grads.mlp_b1[f] = d_pre1.sum(axis=0)
    return loss, grads


def _sample_pairs(
    train_ids: np.ndarray,
    label_values: np.ndarray,
    size: int,
    rng: np.random.Generator,
) -> np.ndarray:
    a = train_ids[rng.integers(0, train_ids.size, size)]
    b = train_ids[rng.integers(0, train_ids.size, size)]
    keep = a != b
    a, b = a[keep], b[keep]
    i = np.minimum(a, b)
    j = np.maximum(a, b)
    r = np.sign(label_values[i] - label_values[j])
    return np.column_stack([i, j, r.astype(np.int64)])


def train(
    cx: SimplicialComplex,
    hub_order: int,
    x: FeatureMatrix | np.ndarray,
    labels: InfluenceScores,
    config: TrainConfig,
) -> tuple[ModelParams, dict]:
    """Fit one model; returns the best-validation parameters and a log.

    Observed labels are split train/val/test by ``config.ratios`` (the
    test ids are only recorded in the log, never touched).  Each epoch
    samples up to ``pair_sample`` ordered training pairs, takes one
    adaptive-moment step, and scores validation Kendall tau; the kept
    parameters are the best-validation ones.  Fully deterministic for a
    fixed config and seed.
    """
    x = _as_array(x)
    if not cx.has_layer(hub_order) or cx.layer_size(hub_order) != x.shape[0]:
        raise ValidationError("features do not match the hub layer")
    if len(labels) != x.shape[0]:
        raise ValidationError("labels do not match the hub layer")
    observed = labels.observed_ids()
    if observed.size < 4:
        raise ValidationError("need at least 4 observed labels to train")

    operators = build_operators(cx, hub_order, config.max_order)
    if not operators:
        raise ValidationError("no non-empty fringe layer to build operators from")
    fringe_orders = tuple(sorted(operators))

    split_seed = config.seed if config.split_seed is None else config.split_seed
    train_ids, val_ids, test_ids = split(observed, config.ratios, split_seed)
    if train_ids.size < 2:
        raise ValidationError("train split has fewer than 2 labels; adjust ratios")
    n_pairs = config.pair_sample or 20 * train_ids.size
    use_val = val_ids.size >= 2

    rng = stream(config.seed, "init")
    params = init_params(x.shape[1], fringe_orders, config, rng)

    vec = params.to_vector()
    m = np.zeros_like(vec)
    v = np.zeros_like(vec)
    best_vec = vec.copy()
    best_tau = -np.inf
    best_loss = np.inf
    best_epoch = 0
    stale = 0
    epochs_log: list[dict] = []

    for epoch in range(1, config.epochs + 1):
        pair_rng = stream(config.seed, "pairs", epoch)
        pairs = _sample_pairs(train_ids, labels.values, n_pairs, pair_rng)
        loss, grads = gradients(operators, x, params, pairs)
        g = grads.to_vector()

        m = _ADAM_B1 * m + (1 - _ADAM_B1) * g
        v = _ADAM_B2 * v + (1 - _ADAM_B2) * g * g
        m_hat = m / (1 - _ADAM_B1**epoch)
        v_hat = v / (1 - _ADAM_B2**epoch)
        vec = vec - config.learning_rate * m_hat / (np.sqrt(v_hat) + _ADAM_EPS)
        params = params.from_vector(vec)

        entry = {"epoch": epoch, "loss": loss}
        improved = False
        if use_val:
            scores = _forward_cache(operators, x, params)["scores"]
            val_tau = kendall_tau(scores[val_ids], labels.values[val_ids])
            entry["val_tau"] = val_tau
            if val_tau > best_tau:
                best_tau, best_epoch, best_vec = val_tau, epoch, vec.copy()
                improved = True
        else:
            if loss < best_loss:
                best_loss, best_epoch, best_vec = loss, epoch, vec.copy()
                improved = True
        epochs_log.append(entry)
        stale = 0 if improved else stale + 1
        if stale >= config.patience:
            break

    best = params.from_vector(best_vec)
    log = {
        "epochs": epochs_log,
        "best_epoch": best_epoch,
        "best_val_tau": (best_tau if use_val else None),
        "selector": "val_tau" if use_val else "train_loss",
        "split": {
            "train": train_ids.tolist(),
            "val": val_ids.tolist(),
            "test": test_ids.tolist(),
        },
        "fringe_orders": list(fringe_orders),
    }
    return best, log


def predict_scores(
    operators: Mapping[int, HubFringeOperator],
    x: FeatureMatrix | np.ndarray,
    params: ModelParams | Sequence[ModelParams],
) -> np.ndarray:
    """Scores from one parameter set, or the mean over an ensemble."""
    members = [params] if isinstance(params, ModelParams) else list(params)
    if not members:
        raise ValidationError("no parameters to predict with")
    x = _as_array(x)
    acc = np.zeros(x.shape[0])
    for p in members:
        acc += _forward_cache(operators, x, p)["scores"]
    return acc / len(members)


def predict_rank(
    cx: SimplicialComplex,
    hub_order: int,
    x: FeatureMatrix | np.ndarray,
    params: ModelParams | Sequence[ModelParams],
    max_order: int | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Hub simplex ids sorted by descending score (ties by ascending id)."""
    operators = build_operators(cx, hub_order, max_order)
    scores = predict_scores(operators, x, params)
    order = np.lexsort((np.arange(scores.shape[0]), -scores))
    return order, scores
