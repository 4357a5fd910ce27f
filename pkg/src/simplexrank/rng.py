"""Deterministic random-stream derivation.

Every Monte-Carlo run draws from its own numpy Generator whose seed is a
pure function of the root seed plus a structured key (run index, simplex
vertices, subsystem name).  Results therefore never depend on scheduling,
thread count, or call order.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["stream", "run_stream"]


def _key_words(parts: tuple) -> list[int]:
    # sha256 of the repr is stable across processes and platforms
    digest = hashlib.sha256(repr(parts).encode("utf-8")).digest()
    return [int.from_bytes(digest[i : i + 4], "little") for i in range(0, 16, 4)]


def stream(root_seed: int, *key) -> np.random.Generator:
    """Generator for the stream identified by ``(root_seed, *key)``."""
    root = int(root_seed)
    if root < 0:
        raise ValueError("root seed must be non-negative")
    entropy = [root] + (_key_words(key) if key else [])
    return np.random.default_rng(np.random.SeedSequence(entropy))


def run_stream(root_seed: int, run_index: int) -> np.random.Generator:
    """Independent stream for one simulation run."""
    return stream(root_seed, "run", int(run_index))
