"""Vectorized 64-bit mixing used for point identities and simplex marks."""

from __future__ import annotations

import numpy as np

_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)

_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)

# 2^-53: maps the top 53 bits of a uint64 into [0, 1)
_INV53 = float(2.0**-53)


def mix64(h: np.ndarray | int) -> np.ndarray:
    """SplitMix64 finalizer, elementwise over uint64 arrays."""
    h = np.asarray(h, dtype=np.uint64).copy()
    h ^= h >> _S30
    h *= _M1
    h ^= h >> _S27
    h *= _M2
    h ^= h >> _S31
    return h


def combine(state: np.ndarray, word: np.ndarray) -> np.ndarray:
    """Fold one word into a running hash state."""
    return mix64((state ^ np.asarray(word, dtype=np.uint64)) + _GOLDEN)


_MASK64 = (1 << 64) - 1


def hash_rows(key: int, rows: np.ndarray) -> np.ndarray:
    """Hash each row of a uint64 matrix under ``key`` into uint64 values.

    Rows must already be in canonical (sorted) order if order-independence
    of the result is required.
    """
    rows = np.atleast_2d(np.asarray(rows, dtype=np.uint64))
    m, width = rows.shape
    seed = (int(key) ^ ((int(_GOLDEN) * width) & _MASK64)) & _MASK64
    state = mix64(np.full(m, seed, dtype=np.uint64))
    for col in range(width):
        state = combine(state, rows[:, col])
    return state


def uniform_from_hash(h: np.ndarray) -> np.ndarray:
    """Map uint64 hashes to float64 uniforms in [0, 1)."""
    return (np.asarray(h, dtype=np.uint64) >> _S11).astype(np.float64) * _INV53


def point_idents(order_keys: np.ndarray, indices: np.ndarray) -> np.ndarray:
    """Stable identity of a point from its order key bits and insertion index."""
    bits = np.ascontiguousarray(order_keys, dtype=np.float64).view(np.uint64)
    idx = np.asarray(indices, dtype=np.int64).astype(np.uint64)
    return mix64(bits ^ mix64(idx + _GOLDEN))
