"""
Dense GF(2) linear algebra on numpy arrays.

Rows are packed eight columns per byte so that one elimination step is a
single vectorized XOR over every row that has a one in the pivot column.
"""

from typing import List, Tuple

import numpy as np


def pack_rows(M) -> Tuple[np.ndarray, int]:
    """Reduce mod 2 and pack each row into bytes; returns (packed, n_cols)."""
    A = np.asarray(M, dtype=np.int64) % 2
    if A.ndim != 2:
        raise ValueError("expected a 2-dimensional matrix")
    return np.packbits(A.astype(np.uint8), axis=1), A.shape[1]


def _column(packed: np.ndarray, col: int) -> np.ndarray:
    return (packed[:, col >> 3] >> (7 - (col & 7))) & 1


def gf2_row_echelon(M) -> Tuple[np.ndarray, List[int]]:
    """
    Row-reduce a matrix over GF(2).

    Args:
        M: Integer matrix (m x n); entries are taken mod 2

    Returns:
        (R, pivot_cols): reduced row-echelon form as a 0/1 uint8 array and
        the pivot column of each nonzero row
    """
    R, n = pack_rows(M)
    m = R.shape[0]
    pivot_cols: List[int] = []
    row = 0
    for col in range(n):
        if row == m:
            break
        bits = _column(R, col)
        candidates = np.nonzero(bits[row:])[0]
        if candidates.size == 0:
            continue
        found = row + int(candidates[0])
        if found != row:
            R[[row, found]] = R[[found, row]]
            bits[[row, found]] = bits[[found, row]]
        hits = np.nonzero(bits)[0]
        hits = hits[hits != row]
        if hits.size:
            R[hits] ^= R[row]
        pivot_cols.append(col)
        row += 1
    return np.unpackbits(R, axis=1, count=n), pivot_cols


def binary_rank(M) -> int:
    """Rank of a matrix over GF(2)."""
    A = np.asarray(M)
    if A.size == 0:
        return 0
    _, pivot_cols = gf2_row_echelon(A)
    return len(pivot_cols)
