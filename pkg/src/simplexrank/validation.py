"""Input validation helpers for the estimator API."""

from __future__ import annotations

import numpy as np

from .complexes import InfluenceScores, SimplicialComplex
from .errors import ValidationError

__all__ = ["check_complex", "check_hub_layer", "check_scores"]


def check_complex(x) -> SimplicialComplex:
    if not isinstance(x, SimplicialComplex):
        raise ValidationError(
            f"expected a SimplicialComplex, got {type(x).__name__}; build one with "
            "from_edge_list/clique_lift/from_simplex_list"
        )
    return x


def check_hub_layer(cx: SimplicialComplex, hub_order: int) -> int:
    hub_order = int(hub_order)
    if not cx.has_layer(hub_order) or cx.layer_size(hub_order) == 0:
        raise ValidationError(f"hub layer {hub_order} is absent or empty")
    return hub_order


def check_scores(y, n: int) -> InfluenceScores:
    """Coerce labels to InfluenceScores; NaN entries mean unobserved."""
    if isinstance(y, InfluenceScores):
        if len(y) != n:
            raise ValidationError(f"labels have {len(y)} entries, expected {n}")
        return y
    vals = np.asarray(y, dtype=np.float64)
    if vals.ndim != 1 or vals.shape[0] != n:
        raise ValidationError(f"labels must be a length-{n} vector")
    observed = np.isfinite(vals)
    safe = np.where(observed, vals, 0.0)
    return InfluenceScores(safe, observed)
