"""Bit-packed GF(2) elimination kernels, numba-compiled.

Matrices are packed row-major: shape (n_rows, n_words) uint64, column j
lives at word j >> 6, bit j & 63.  All kernels destroy their input.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def rank_bits(mat, n_cols):
    n_rows, n_words = mat.shape
    rank = 0
    pivot_row = 0
    for col in range(n_cols):
        if pivot_row >= n_rows:
            break
        w = col >> 6
        bit = np.uint64(1) << np.uint64(col & 63)
        pivot = -1
        for r in range(pivot_row, n_rows):
            if mat[r, w] & bit:
                pivot = r
                break
        if pivot < 0:
            continue
        if pivot != pivot_row:
            for k in range(n_words):
                tmp = mat[pivot, k]
                mat[pivot, k] = mat[pivot_row, k]
                mat[pivot_row, k] = tmp
        for r in range(n_rows):
            if r != pivot_row and (mat[r, w] & bit):
                for k in range(w, n_words):
                    mat[r, k] ^= mat[pivot_row, k]
        rank += 1
        pivot_row += 1
    return rank
