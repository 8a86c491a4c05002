"""Pure-numpy fallback for the bit-packed GF(2) kernels.

Same packing and semantics as kernels_numba; the elimination loop runs in
Python but each row update is a vectorized XOR over uint64 words.
"""

import numpy as np


def rank_bits(mat, n_cols):
    n_rows, n_words = mat.shape
    rank = 0
    pivot_row = 0
    for col in range(n_cols):
        if pivot_row >= n_rows:
            break
        w = col >> 6
        bit = np.uint64(1) << np.uint64(col & 63)
        hits = np.nonzero(mat[pivot_row:, w] & bit)[0]
        if hits.size == 0:
            continue
        pivot = pivot_row + int(hits[0])
        if pivot != pivot_row:
            mat[[pivot, pivot_row]] = mat[[pivot_row, pivot]]
        mask = (mat[:, w] & bit).astype(bool)
        mask[pivot_row] = False
        if mask.any():
            mat[mask] ^= mat[pivot_row]
        rank += 1
        pivot_row += 1
    return rank
