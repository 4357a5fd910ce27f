"""Hub/fringe walk operators between two layers of a complex.

For a hub layer ``h`` and fringe layer ``f`` with incidence ``B`` the
adjacency of the two-step walk hub -> fringe -> hub is

    A = D_hub^{-1/2} . B . D_fringe^{-1} . B^T . D_hub^{-1/2}

with the convention 0^{-1/2} = 0 and 0^{-1} = 0 for isolated simplices.
``A`` is symmetric positive semi-definite with spectrum inside [0, 1], so
Chebyshev polynomials are applied to ``A`` itself (its spectrum already
sits inside the stability interval [-1, 1]; rescaling the Laplacian
``L = I - A`` instead would be an equivalent variant, not used here).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import io as sio
from scipy import sparse

from .complexes import SimplicialComplex, incidence_matrix
from .errors import ValidationError

__all__ = [
    "HubFringeOperator",
    "hub_degrees",
    "fringe_degrees",
    "hub_adjacency",
    "hub_laplacian",
    "build_operator",
    "build_operators",
    "chebyshev_apply",
    "dump_operator",
]


@dataclass(frozen=True)
class HubFringeOperator:
    """Normalized two-step adjacency between a hub layer and one fringe layer."""

    hub_order: int
    fringe_order: int
    adjacency: sparse.csr_matrix
    hub_degrees: np.ndarray
    fringe_degrees: np.ndarray

    @property
    def size(self) -> int:
        return int(self.adjacency.shape[0])


def hub_degrees(incidence: sparse.spmatrix) -> np.ndarray:
    """Row sums of the incidence: fringe count per hub simplex."""
    return np.asarray(incidence.sum(axis=1), dtype=np.float64).ravel()


def fringe_degrees(incidence: sparse.spmatrix) -> np.ndarray:
    """Column sums of the incidence: hub count per fringe simplex."""
    return np.asarray(incidence.sum(axis=0), dtype=np.float64).ravel()


def hub_adjacency(
    incidence: sparse.spmatrix,
    hub_order: int = 0,
    fringe_order: int = 1,
) -> HubFringeOperator:
    """Build the normalized hub-hub adjacency from one incidence matrix.

    Zero-degree hubs and fringes contribute empty rows/columns instead of
    dividing by zero.  The result is symmetrized exactly: it is assembled
    as ``S S^T`` with ``S = D_hub^{-1/2} B D_fringe^{-1/2}`` and averaged
    with its transpose so ``max |A - A^T|`` is 0, not just tiny.
    """
    b = sparse.csr_matrix(incidence, dtype=np.float64)
    d_hub = hub_degrees(b)
    d_fringe = fringe_degrees(b)
    with np.errstate(divide="ignore"):
        inv_sqrt_hub = np.where(d_hub > 0, 1.0 / np.sqrt(d_hub), 0.0)
        inv_sqrt_fringe = np.where(d_fringe > 0, 1.0 / np.sqrt(d_fringe), 0.0)
    s = sparse.diags(inv_sqrt_hub) @ b @ sparse.diags(inv_sqrt_fringe)
    adj = (s @ s.T).tocsr()
    adj = ((adj + adj.T) * 0.5).tocsr()
    adj.sum_duplicates()
    adj.eliminate_zeros()
    return HubFringeOperator(
        hub_order=hub_order,
        fringe_order=fringe_order,
        adjacency=adj,
        hub_degrees=d_hub,
        fringe_degrees=d_fringe,
    )


def hub_laplacian(operator: HubFringeOperator) -> sparse.csr_matrix:
    """``L = I - A``; positive semi-definite with smallest eigenvalue 0."""
    n = operator.size
    return (sparse.eye(n, format="csr") - operator.adjacency).tocsr()


def build_operator(cx: SimplicialComplex, h: int, f: int) -> HubFringeOperator:
    """Incidence + adjacency for one (hub, fringe) pair of a complex."""
    return hub_adjacency(incidence_matrix(cx, h, f), hub_order=h, fringe_order=f)


def build_operators(
    cx: SimplicialComplex,
    hub_order: int,
    max_order: int | None = None,
) -> dict[int, HubFringeOperator]:
    """One operator per non-empty fringe layer ``f <= max_order``, ``f != h``.

    Materialized once per pair and meant to be reused across every
    training epoch; empty fringe layers are skipped because they carry no
    walks.
    """
    top = cx.max_order if max_order is None else max_order
    ops: dict[int, HubFringeOperator] = {}
    for f in range(top + 1):
        if f == hub_order or not cx.has_layer(f) or cx.layer_size(f) == 0:
            continue
        ops[f] = build_operator(cx, hub_order, f)
    return ops


def chebyshev_apply(
    adjacency: sparse.spmatrix | np.ndarray,
    x: np.ndarray,
    cheb_order: int,
) -> list[np.ndarray]:
    """Evaluate ``[T_0(A) X, ..., T_K(A) X]`` by the three-term recursion.

    ``T_0 = X``, ``T_1 = A X``, ``T_k = 2 A T_{k-1} - T_{k-2}``.  Only
    matrix-vector products against ``A`` are used, never an
    eigendecomposition.
    """
    if cheb_order < 0:
        raise ValidationError("cheb_order must be non-negative")
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if adjacency.shape[0] != adjacency.shape[1]:
        raise ValidationError(f"adjacency must be square, got {adjacency.shape}")
    if adjacency.shape[1] != x.shape[0]:
        raise ValidationError(
            f"adjacency {adjacency.shape} does not match signal rows {x.shape[0]}"
        )
    out = [x.copy()]
    if cheb_order >= 1:
        out.append(adjacency @ x)
    for _ in range(2, cheb_order + 1):
        out.append(2.0 * (adjacency @ out[-1]) - out[-2])
    return out


def dump_operator(operator: HubFringeOperator, path) -> None:
    """Write the adjacency in Matrix Market coordinate format (1-based)."""
    sio.mmwrite(str(path), sparse.coo_matrix(operator.adjacency))
