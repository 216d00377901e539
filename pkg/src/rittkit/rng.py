"""Deterministic counter-based random streams.

Every randomized routine takes an explicit seed and derives one Philox
substream per (seed, task index), so results do not depend on evaluation
order or parallel scheduling.
"""

from __future__ import annotations

import numpy as np

__all__ = ["substream", "random_matrix", "random_block_vec"]


def substream(seed: int, task_index: int = 0) -> np.random.Generator:
    """Generator for the (seed, task_index) substream."""
    if seed < 0 or task_index < 0:
        raise ValueError("seed and task index must be nonnegative")
    key = (int(seed) << 64) | int(task_index)
    return np.random.Generator(np.random.Philox(key=key))


def random_matrix(rng: np.random.Generator, n: int, hermitian: bool = False) -> np.ndarray:
    """Complex Ginibre matrix (entries standard complex normal)."""
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    if hermitian:
        a = (a + a.conj().T) / 2.0
    return a


def random_block_vec(rng: np.random.Generator, k: int, n: int) -> np.ndarray:
    """Stack of k complex Ginibre matrices, shape (k, n, n)."""
    return rng.standard_normal((k, n, n)) + 1j * rng.standard_normal((k, n, n))
