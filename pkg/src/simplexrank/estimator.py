"""Scikit-learn style front door for the ranking model.

``SimplexRanker`` wires feature construction, operator assembly, and
training behind the usual ``fit`` / ``predict`` / ``get_params`` surface
so the model composes with sklearn tooling (clone, grid search over
constructor params).  ``X`` is a :class:`SimplicialComplex`; ``y`` is a
score vector over the hub layer with NaN marking unobserved entries, or
an :class:`InfluenceScores`.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .centrality import DEFAULT_FEATURES, node_features, simplex_features, standardize
from .complexes import SimplicialComplex
from .errors import ValidationError
from .evaluation import kendall_tau
from .model import TrainConfig, predict_scores, train
from .operators import build_operators
from .rng import stream
from .validation import check_complex, check_hub_layer, check_scores

__all__ = ["SimplexRanker"]


class SimplexRanker(BaseEstimator):
    """Rank the simplices of one layer by predicted spreading influence."""

    def __init__(
        self,
        hub_order: int = 0,
        max_order: int | None = None,
        features: tuple[str, ...] = DEFAULT_FEATURES,
        standardize_features: bool = True,
        cheb_order: int = 3,
        hidden_width: int = 16,
        embed_dim: int = 8,
        learning_rate: float = 1e-2,
        epochs: int = 500,
        pair_sample: int | None = None,
        ratios: tuple[float, float, float] = (0.6, 0.2, 0.2),
        patience: int = 100,
        ensemble: int = 1,
        random_state: int = 0,
    ) -> None:
        self.hub_order = hub_order
        self.max_order = max_order
        self.features = features
        self.standardize_features = standardize_features
        self.cheb_order = cheb_order
        self.hidden_width = hidden_width
        self.embed_dim = embed_dim
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.pair_sample = pair_sample
        self.ratios = ratios
        self.patience = patience
        self.ensemble = ensemble
        self.random_state = random_state

    # -- internals -----------------------------------------------------------

    def _features(self, cx: SimplicialComplex):
        fm = simplex_features(node_features(cx, self.features), cx, self.hub_order)
        if self.standardize_features:
            fm = standardize(fm)
        return fm

    def _config(self, seed: int, split_seed: int) -> TrainConfig:
        return TrainConfig(
            cheb_order=self.cheb_order,
            hidden_width=self.hidden_width,
            embed_dim=self.embed_dim,
            learning_rate=self.learning_rate,
            epochs=self.epochs,
            pair_sample=self.pair_sample,
            ratios=tuple(self.ratios),
            patience=self.patience,
            seed=seed,
            split_seed=split_seed,
            max_order=self.max_order,
        )

    # -- sklearn surface -----------------------------------------------------

    def fit(self, X, y) -> "SimplexRanker":
        cx = check_complex(X)
        hub = check_hub_layer(cx, self.hub_order)
        labels = check_scores(y, cx.layer_size(hub))
        fm = self._features(cx)
        if int(self.ensemble) < 1:
            raise ValidationError("ensemble must be at least 1")
        member_seeds = stream(self.random_state, "ensemble").integers(
            0, 2**31 - 1, size=int(self.ensemble)
        )
        params, logs = [], []
        for seed in member_seeds:
            # all members share the split (split_seed) but not init/pairs
            p, log = train(cx, hub, fm, labels, self._config(int(seed), self.random_state))
            params.append(p)
            logs.append(log)
        self.params_ = params
        self.logs_ = logs
        self.split_ = logs[0]["split"]
        self.feature_columns_ = fm.columns
        self._fit_complex = cx
        self._fit_operators = build_operators(cx, hub, self.max_order)
        return self

    def _operators(self, cx: SimplicialComplex):
        if getattr(self, "_fit_complex", None) is cx:
            return self._fit_operators
        return build_operators(cx, self.hub_order, self.max_order)

    def predict(self, X) -> np.ndarray:
        """Scores in (0, 1), one per hub simplex (ensemble mean)."""
        if not hasattr(self, "params_"):
            raise ValidationError("this SimplexRanker is not fitted yet")
        cx = check_complex(X)
        check_hub_layer(cx, self.hub_order)
        return predict_scores(self._operators(cx), self._features(cx), self.params_)

    def rank(self, X) -> np.ndarray:
        """Hub simplex ids, most influential first (ties by ascending id)."""
        scores = self.predict(X)
        return np.lexsort((np.arange(scores.shape[0]), -scores))

    def score(self, X, y) -> float:
        """Kendall tau between predictions and the observed part of ``y``."""
        cx = check_complex(X)
        labels = check_scores(y, cx.layer_size(check_hub_layer(cx, self.hub_order)))
        ids = labels.observed_ids()
        return kendall_tau(self.predict(cx)[ids], labels.values[ids])
