import itertools

import numpy as np
import pytest

import sys
import pathlib
sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent))
from fieldranks import linalg
from fieldranks.gf import field_make


def test_rref_normalizes_pivots():
    f3 = field_make(3)
    reduced, pivots = linalg.rref(f3, [[2, 2]])
    assert reduced.tolist() == [[1, 1]], "the pivot is scaled to one"
    assert pivots == [0]


def test_rref_drops_zero_rows():
    f2 = field_make(2)
    reduced, pivots = linalg.rref(f2, [[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    assert reduced.tolist() == [[1, 0, 1], [0, 1, 1]]
    assert pivots == [0, 1]


def test_batch_rank_matches_rank_over_gf2():
    f2 = field_make(2)
    mats = np.array([np.array(bits).reshape(2, 2) for bits in itertools.product(range(2), repeat=4)])
    ranks = linalg.batch_rank(f2, mats)
    assert ranks.tolist() == [linalg.rank(f2, m) for m in mats]
    assert np.bincount(ranks).tolist() == [1, 9, 6], "one zero matrix, nine of rank one, six invertible"


def test_batch_rank_matches_rank_over_gf4():
    f4 = field_make(2, 2)
    mats = np.random.default_rng(7).integers(0, 4, size=(50, 3, 4))
    assert linalg.batch_rank(f4, mats).tolist() == [linalg.rank(f4, m) for m in mats]


def test_solve():
    f2 = field_make(2)
    a = np.array([[1, 1], [0, 1]])
    x = linalg.solve(f2, a, [1, 1])
    assert x.tolist() == [0, 1]
    assert linalg.solve(f2, [[1, 0], [1, 0]], [0, 1]) is None, "inconsistent systems have no solution"


def test_solve_with_matrix_right_hand_side():
    f5 = field_make(5)
    a = np.array([[1, 2], [3, 4]])
    b = np.array([[1, 0], [0, 1]])
    x = linalg.solve(f5, a, b)
    assert linalg.matmul(f5, a, x).tolist() == b.tolist()


def test_inverse():
    f2 = field_make(2)
    assert linalg.inverse(f2, [[1, 1], [0, 1]]).tolist() == [[1, 1], [0, 1]]
    with pytest.raises(ValueError, match="singular"):
        linalg.inverse(f2, [[1, 1], [1, 1]])


def test_inverse_over_extension_field():
    f9 = field_make(3, 2)
    a = np.array([[1, 3], [5, 7]])
    identity = linalg.matmul(f9, a, linalg.inverse(f9, a))
    assert identity.tolist() == [[1, 0], [0, 1]]


def test_nullspace():
    f2 = field_make(2)
    assert linalg.nullspace(f2, [[1, 1]]).tolist() == [[1, 1]]
    assert linalg.nullspace(f2, np.zeros((0, 3), dtype=np.int64), 3).shape == (3, 3)
    f3 = field_make(3)
    kernel = linalg.nullspace(f3, [[1, 2, 0], [0, 1, 1]])
    assert kernel.shape == (1, 3)
    assert not linalg.matmul(f3, [[1, 2, 0], [0, 1, 1]], kernel.T).any()
