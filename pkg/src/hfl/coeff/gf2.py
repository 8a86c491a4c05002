"""Sparse/dense GF(2) rank engine.

Columns come in as lists of row indices.  Small or dense problems go
straight to the bit-packed elimination kernel; large sparse ones first run
a fill-bounded sparse elimination (greedy Markowitz-style pivoting) and
fall back to the dense kernel on whatever residue is left.

Backend selection: HFL_GF2_BACKEND = auto|numba|numpy (env var).  `numpy`
forces the pure-numpy kernel; `auto` (default) uses numba when available.
"""

from __future__ import annotations

import os

import numpy as np

from . import kernels_numpy

_BACKEND = None


def backend_name() -> str:
    _load_backend()
    return _BACKEND[0]


def _load_backend():
    global _BACKEND
    if _BACKEND is not None:
        return
    choice = os.environ.get("HFL_GF2_BACKEND", "auto").lower()
    if choice == "numpy":
        _BACKEND = ("numpy", kernels_numpy)
        return
    try:
        from . import kernels_numba
        _BACKEND = ("numba", kernels_numba)
    except Exception:
        if choice == "numba":
            raise
        _BACKEND = ("numpy", kernels_numpy)


def pack_columns(columns, n_rows):
    """Pack each column as a bit row over row-indices: shape (n_cols, words)."""
    n_cols = len(columns)
    n_words = max(1, (n_rows + 63) >> 6)
    mat = np.zeros((n_cols, n_words), dtype=np.uint64)
    for i, col in enumerate(columns):
        for r in col:
            mat[i, r >> 6] |= np.uint64(1) << np.uint64(r & 63)
    return mat


def _dense_rank(columns, n_rows) -> int:
    _load_backend()
    cols = [c for c in columns if c]
    if not cols or n_rows == 0:
        return 0
    mat = pack_columns(cols, n_rows)
    return int(_BACKEND[1].rank_bits(mat, n_rows))


def _sparse_eliminate(columns, dense_threshold=1500, fill_cap=6.0):
    """Greedy sparse elimination; returns (rank_so_far, residual_columns).

    Columns are visited shortest-first via a lazy heap; within a column the
    pivot row minimizes the row degree (Markowitz-style).  Stops when the
    residue fits the dense kernel or fill-in exceeds fill_cap * nnz.
    """
    import heapq

    col_sets = {i: set(c) for i, c in enumerate(columns) if c}
    row_cols = {}
    for i, c in col_sets.items():
        for r in c:
            row_cols.setdefault(r, set()).add(i)
    heap = [(len(c), i) for i, c in col_sets.items()]
    heapq.heapify(heap)
    rank = 0
    nnz = sum(len(c) for c in col_sets.values())
    budget = max(100000, int(fill_cap * nnz))
    while heap:
        if len(col_sets) <= dense_threshold:
            break
        ln, pi = heapq.heappop(heap)
        col = col_sets.get(pi)
        if col is None:
            continue
        if len(col) != ln:  # stale heap entry
            heapq.heappush(heap, (len(col), pi))
            continue
        pr = min(col, key=lambda r: len(row_cols[r]))
        pivot_col = col_sets.pop(pi)
        for r in pivot_col:
            row_cols[r].discard(pi)
        for j in list(row_cols.get(pr, ())):
            cj = col_sets[j]
            before = len(cj)
            cj ^= pivot_col
            nnz += len(cj) - before
            for r in pivot_col:
                if r in cj:
                    row_cols[r].add(j)
                else:
                    row_cols[r].discard(j)
            if not cj:
                del col_sets[j]
            else:
                heapq.heappush(heap, (len(cj), j))
        row_cols.pop(pr, None)
        rank += 1
        if nnz > budget:
            break
    return rank, [sorted(c) for c in col_sets.values() if c]


def rank(columns, n_rows, sparse_cutoff=3000) -> int:
    """Rank over GF(2) of the matrix whose columns are the given row-index lists."""
    cols = [c for c in columns if c]
    if not cols or n_rows == 0:
        return 0
    if len(cols) <= sparse_cutoff or n_rows <= sparse_cutoff:
        return _dense_rank(cols, n_rows)
    done, residual = _sparse_eliminate(cols)
    if not residual:
        return done
    rows = sorted({r for c in residual for r in c})
    remap = {r: i for i, r in enumerate(rows)}
    packed = [[remap[r] for r in c] for c in residual]
    return done + _dense_rank(packed, len(rows))


def rank_of_induced_map(f_cols, da_cols, db_cols, n_a, n_b) -> int:
    """Rank of H(f) for a chain map f: (A, dA) -> (B, dB) over F2.

    Uses rank [[f, dB], [dA, 0]] - rank dA - rank dB, with f and dA sharing
    source indices (columns of A) and f, dB sharing target indices (rows of B).
    f_cols/da_cols: lists over A's basis; db_cols: list over B's basis.
    """
    big = []
    for fa, daa in zip(f_cols, da_cols):
        big.append(sorted(set(fa) | {n_b + r for r in daa}))
    for col in db_cols:
        big.append(sorted(col))
    r_big = rank(big, n_a + n_b)
    r_da = rank(da_cols, n_a)
    r_db = rank(db_cols, n_b)
    return r_big - r_da - r_db


def in_column_span(vec, columns, n_rows) -> bool:
    """Whether vec (row-index list) lies in the F2 span of the columns."""
    base = rank(columns, n_rows)
    return rank(list(columns) + [vec], n_rows) == base
