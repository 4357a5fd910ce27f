"""Exception types shared across the package."""

from __future__ import annotations


class SimplexRankError(Exception):
    """Base class for all package errors."""


class ValidationError(SimplexRankError):
    """Malformed input data: bad simplex, bad pair list, bad feature matrix."""


class MissingLayerError(SimplexRankError):
    """A requested layer is absent from the complex."""

    def __init__(self, order: int) -> None:
        super().__init__(f"complex has no layer of order {order}")
        self.order = order


class LayerCapExceededError(SimplexRankError):
    """Clique lifting hit the per-layer simplex cap."""

    def __init__(self, order: int, count: int, cap: int) -> None:
        super().__init__(
            f"lifting aborted: layer {order} reached {count} simplices "
            f"(cap {cap})"
        )
        self.order = order
        self.count = count
        self.cap = cap


class ThresholdUndefinedError(SimplexRankError):
    """Epidemic threshold undefined because <k^2> equals <k>."""


class ConfigError(SimplexRankError):
    """Invalid run configuration. The CLI maps this to exit code 3."""
