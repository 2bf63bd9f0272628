"""
Tests for GF(2) row reduction and rank.
"""

import numpy as np
import pytest

from app.gf2 import binary_rank, gf2_row_echelon, pack_rows


def test_identity_rank():
    assert binary_rank(np.eye(5, dtype=int)) == 5


def test_entries_are_taken_mod_2():
    assert binary_rank([[2, 4], [6, 8]]) == 0
    assert binary_rank([[3, 1], [1, 3]]) == 1


def test_empty_matrix():
    assert binary_rank(np.zeros((0, 3), dtype=int)) == 0


def test_row_echelon_form():
    R, pivots = gf2_row_echelon([[1, 1, 0], [1, 0, 1], [0, 1, 1]])
    assert pivots == [0, 1]
    assert R[:2].tolist() == [[1, 0, 1], [0, 1, 1]]
    assert R[2].tolist() == [0, 0, 0]


def test_wide_rows_cross_byte_boundary():
    M = np.zeros((3, 20), dtype=int)
    M[0, 17] = M[1, 9] = M[1, 17] = M[2, 9] = 1
    R, pivots = gf2_row_echelon(M)
    assert pivots == [9, 17]
    assert R.shape == (3, 20)


def test_pack_rows_rejects_vectors():
    with pytest.raises(ValueError):
        pack_rows([1, 0, 1])


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_matches_reference_elimination(seed):
    rng = np.random.default_rng(seed)
    M = rng.integers(0, 2, size=(12, 17))
    assert binary_rank(M) == _rank_mod2(M)


def _rank_mod2(M):
    """Plain elimination used as a reference."""
    rows = [int("".join(str(int(b)) for b in r), 2) for r in np.asarray(M) % 2]
    rank = 0
    while rows:
        pivot = max(rows)
        rows.remove(pivot)
        if pivot == 0:
            continue
        rank += 1
        top = pivot.bit_length() - 1
        rows = [r ^ pivot if (r >> top) & 1 else r for r in rows]
    return rank


if __name__ == "__main__":
    pytest.main([__file__, "-v", "-s"])
