"""Vectorized Philox4x32-10 counter-based generator.

Maps a 128-bit counter and a 64-bit key to four 32-bit words with no state,
so the value drawn for a given (key, counter) never depends on evaluation
order, chunking or worker count. Words are held in uint64 arrays so that the
32×32→64 bit products fit without overflow.
"""

import numpy as np
from scipy.special import ndtri

_MASK32 = np.uint64(0xFFFFFFFF)
_SHIFT32 = np.uint64(32)

_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint64(0x9E3779B9)
_W1 = np.uint64(0xBB67AE85)

ROUNDS = 10

_TWO_POW_MINUS_53 = 2.0 ** -53


def _as_words(value) -> np.ndarray:
    """Reduce integers (possibly negative) to their low 32 bits as uint64."""
    return np.asarray(value, dtype=np.int64).astype(np.uint64) & _MASK32


def split_key(seed: int) -> tuple[int, int]:
    """Split a 64-bit seed into the (low, high) 32-bit key words."""
    return seed & 0xFFFFFFFF, (seed >> 32) & 0xFFFFFFFF


def philox4x32(c0, c1, c2, c3, key: tuple[int, int], rounds: int = ROUNDS):
    """Run Philox4x32 on broadcast counter arrays.

    Args:
        c0, c1, c2, c3: Counter words (integer arrays, broadcast together).
        key: (k0, k1) 32-bit key words.
        rounds: Number of rounds; 10 is the standard strength.

    Returns:
        Tuple of four uint64 arrays holding the 32-bit output words.
    """
    c0, c1, c2, c3 = np.broadcast_arrays(
        _as_words(c0), _as_words(c1), _as_words(c2), _as_words(c3)
    )
    k0 = np.uint64(key[0] & 0xFFFFFFFF)
    k1 = np.uint64(key[1] & 0xFFFFFFFF)
    for _ in range(rounds):
        prod0 = _M0 * c0
        prod1 = _M1 * c2
        c0, c1, c2, c3 = (
            (prod1 >> _SHIFT32) ^ c1 ^ k0,
            prod1 & _MASK32,
            (prod0 >> _SHIFT32) ^ c3 ^ k1,
            prod0 & _MASK32,
        )
        k0 = (k0 + _W0) & _MASK32
        k1 = (k1 + _W1) & _MASK32
    return c0, c1, c2, c3


def uniforms(word0: np.ndarray, word1: np.ndarray) -> np.ndarray:
    """Combine two 32-bit words into a 53-bit uniform strictly inside (0, 1)."""
    bits = ((word0 >> np.uint64(5)) << np.uint64(26)) | (word1 >> np.uint64(6))
    return (bits.astype(np.float64) + 0.5) * _TWO_POW_MINUS_53


def standard_normals(seed: int, realization_id, i_tau, i_rho, i_z) -> np.ndarray:
    """Keyed N(0, 1) values for broadcast cell indices.

    The counter is (i_tau, i_rho, i_z, realization_id) and the key is the
    64-bit seed, so every (seed, realization, cell) maps to one fixed value.
    """
    out = philox4x32(i_tau, i_rho, i_z, realization_id, split_key(seed))
    return ndtri(uniforms(out[0], out[1]))
