"""Bit-packed row storage and update kernels for the Monte Carlo engine.

A batch of configurations is a ``(trials, words)`` uint64 array, cell ``i``
living at bit ``i % 64`` of word ``i // 64`` (little-endian within a row).
Periodic wraparound is handled by whole-row rotations implemented with
word shifts and carries, so lattices up to 10^4 cells stay cheap.
"""
from __future__ import annotations

import numpy as np

WORD = 64


def n_words(n: int) -> int:
    return (n + WORD - 1) // WORD


def zeros(trials: int, n: int) -> np.ndarray:
    return np.zeros((trials, n_words(n)), dtype=np.uint64)


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack a (trials, n) array of 0/1 values into (trials, n_words(n)) words."""
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    trials, n = bits.shape
    packed = np.packbits(bits, axis=1, bitorder="little")
    padded = np.zeros((trials, n_words(n) * 8), dtype=np.uint8)
    padded[:, : packed.shape[1]] = packed
    return padded.view(np.uint64)


def unpack_bits(words: np.ndarray, n: int) -> np.ndarray:
    """Inverse of pack_bits; returns a (trials, n) uint8 array."""
    as_bytes = np.ascontiguousarray(words).view(np.uint8)
    return np.unpackbits(as_bytes, axis=1, bitorder="little", count=n)


def _mask_top(words: np.ndarray, n: int) -> None:
    rem = n % WORD
    if rem:
        words[..., -1] &= np.uint64((1 << rem) - 1)


def _shift_left(words: np.ndarray, k: int, n: int) -> np.ndarray:
    """Row-wise big-integer left shift by k bits, truncated to n bits."""
    w = words.shape[-1]
    q, b = divmod(k, WORD)
    out = np.zeros_like(words)
    if q < w:
        out[..., q:] = words[..., : w - q]
    if b:
        carry = out >> np.uint64(WORD - b)
        out <<= np.uint64(b)
        out[..., 1:] |= carry[..., :-1]
    _mask_top(out, n)
    return out


def _shift_right(words: np.ndarray, k: int) -> np.ndarray:
    """Row-wise big-integer right shift by k bits."""
    w = words.shape[-1]
    q, b = divmod(k, WORD)
    out = np.zeros_like(words)
    if q < w:
        out[..., : w - q] = words[..., q:]
    if b:
        carry = out << np.uint64(WORD - b)
        out >>= np.uint64(b)
        out[..., :-1] |= carry[..., 1:]
    return out


def rotate(words: np.ndarray, k: int, n: int) -> np.ndarray:
    """Cyclic rotation: bit i of the result is bit (i - k) mod n of the input."""
    k %= n
    if k == 0:
        return words.copy()
    return _shift_left(words, k, n) | _shift_right(words, n - k)


def popcount(words: np.ndarray) -> np.ndarray:
    """Number of set bits per row."""
    return np.bitwise_count(words).sum(axis=-1, dtype=np.int64)


def majority3(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    return (a & b) | (a & c) | (b & c)


def step_rule232(words: np.ndarray, n: int) -> np.ndarray:
    """One synchronous local-majority update on every row."""
    left = rotate(words, 1, n)
    right = rotate(words, -1, n)
    return majority3(left, words, right)


def step_elementary(words: np.ndarray, n: int, rule_bits: np.ndarray) -> np.ndarray:
    """One synchronous update under an arbitrary nearest-neighbor binary rule.

    ``rule_bits[b]`` is the output for the neighborhood whose (left, self,
    right) states read as the binary number b.
    """
    left = rotate(words, 1, n)
    right = rotate(words, -1, n)
    out = np.zeros_like(words)
    full = np.uint64(0xFFFFFFFFFFFFFFFF)
    for b in range(8):
        if not rule_bits[b]:
            continue
        l = left if (b >> 2) & 1 else left ^ full
        c = words if (b >> 1) & 1 else words ^ full
        r = right if b & 1 else right ^ full
        out |= l & c & r
    _mask_top(out, n)
    return out


def step_tlv(upper: np.ndarray, lower: np.ndarray, m: int) -> tuple[np.ndarray, np.ndarray]:
    """One synchronous two-line-voting update on rows of two m-cell strings.

    Each upper cell i becomes the majority of upper[i-1], upper[i-2] and
    lower[i]; each lower cell i the majority of lower[i+1], lower[i+2] and
    upper[i] (indices mod m).  Both strings update from the pre-step state.
    """
    new_upper = majority3(rotate(upper, 1, m), rotate(upper, 2, m), lower)
    new_lower = majority3(rotate(lower, -1, m), rotate(lower, -2, m), upper)
    return new_upper, new_lower
