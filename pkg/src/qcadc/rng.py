"""Counter-based randomness for classical noise sampling.

Every draw is a pure function of (seed, trial, step, cell), so orbits are
reproducible bit-for-bit no matter how trials are batched or distributed
across workers.  The generator is two rounds of the splitmix64 finalizer
chained over the key words, evaluated with vectorized uint64 arithmetic.
"""
from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


_MASK = 0xFFFFFFFFFFFFFFFF


def _mix(x: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer on uint64 arrays; wraps mod 2^64."""
    x = (x ^ (x >> np.uint64(30))) * _M1
    x = (x ^ (x >> np.uint64(27))) * _M2
    return x ^ (x >> np.uint64(31))


def mix64(x: int) -> int:
    """Scalar splitmix64 finalizer (plain ints, no overflow warnings)."""
    x &= _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def derive_seed(seed: int, stream: int) -> int:
    """Independent stream seed for a sub-experiment (grid point, shard, ...)."""
    return mix64((seed & _MASK) + (stream + 1) * 0x9E3779B97F4A7C15)


def uniform_words(seed: int, trials: np.ndarray, step: int, cells: np.ndarray) -> np.ndarray:
    """64-bit hash words for every (trial, cell) pair at a given step.

    ``trials`` and ``cells`` are 1-D integer arrays; the result has shape
    ``(len(trials), len(cells))``.
    """
    key = np.uint64(mix64((seed & _MASK) + 0x9E3779B97F4A7C15))
    h = _mix(key + trials.astype(np.uint64)[:, None] + _GOLDEN)
    h = _mix(h + np.uint64((step & _MASK)) + _GOLDEN)
    return _mix(h + cells.astype(np.uint64)[None, :] + _GOLDEN)


def bernoulli_matrix(seed: int, trials: np.ndarray, step: int, n_cells: int, p: float) -> np.ndarray:
    """Boolean matrix of independent Bernoulli(p) draws, shape (len(trials), n_cells)."""
    if p <= 0.0:
        return np.zeros((len(trials), n_cells), dtype=bool)
    if p >= 1.0:
        return np.ones((len(trials), n_cells), dtype=bool)
    threshold = np.uint64(int(p * 2.0**64))
    words = uniform_words(seed, trials, step, np.arange(n_cells))
    return words < threshold
