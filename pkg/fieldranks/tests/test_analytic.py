import itertools
import math

import numpy as np
import pytest

import sys
import pathlib
sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent))
from fieldranks import analytic, linalg
from fieldranks.analytic import (analytic_rank_char, analytic_rank_zero_count, geometric_rank_estimate,
                                 matmul_pair_count, stability_check)
from fieldranks.errors import GuardExceeded
from fieldranks.gf import field_make
from fieldranks.settings import Settings
from fieldranks.tensor import Tensor, direct_sum, identity_tensor, matmul_tensor, random_tensor

F2 = field_make(2)
F3 = field_make(3)


def e1_cubed():
    arr = np.zeros((2, 2, 2), dtype=np.int64)
    arr[0, 0, 0] = 1
    return Tensor(F2, arr)


def test_identity_matrix_zero_count():
    result = analytic_rank_zero_count(identity_tensor(2, 2, F2), 1)
    assert (result.m, result.zero_count) == (2, 1)
    assert result.value() == pytest.approx(2.0)


def test_zero_tensor_has_rank_zero():
    result = analytic_rank_zero_count(Tensor.zeros(F2, (2, 2)), 1)
    assert result.zero_count == 4
    assert result.value() == pytest.approx(0.0)


def test_single_entry_tensor():
    result = analytic_rank_zero_count(e1_cubed(), 2)
    assert result.zero_count == 12, "(x, y) with x_1 y_1 = 0"
    assert result.value() == pytest.approx(2 - math.log2(3), abs=1e-12)
    assert result.value() == pytest.approx(0.41504, abs=1e-5)


@pytest.mark.parametrize("q, n", [(2, 2), (3, 2), (2, 3), (3, 3)])
def test_analytic_rank_of_matrices_is_their_rank(q, n):
    f = field_make(q)
    for flat in itertools.product(range(q), repeat=n * n):
        M = Tensor.from_flat(f, (n, n), flat)
        value = analytic_rank_zero_count(M, 1).value()
        assert round(value, 9) == linalg.rank(f, M.entries), f"AR of {flat} should equal its rank"


def test_cross_mode_consistency():
    rng = np.random.default_rng(12)
    for shape, f in [((2, 3, 2), F2), ((2, 2, 2), F3), ((2, 2, 2, 2), F2)]:
        T = random_tensor(shape, f, rng)
        results = [analytic_rank_zero_count(T, k) for k in range(T.order)]
        for a, b in itertools.combinations(results, 2):
            assert a.consistent_with(b), f"modes {a.k} and {b.k} disagree on {T.entries.tolist()}"


def test_mode_out_of_range():
    with pytest.raises(ValueError):
        analytic_rank_zero_count(identity_tensor(2, 2, F2), 2)


def test_character_sum_examples():
    assert analytic_rank_char(identity_tensor(2, 2, F2)) == pytest.approx(2.0, abs=1e-9)
    assert analytic_rank_char(identity_tensor(2, 3, F2)) == pytest.approx(4 - math.log2(9), abs=1e-9)
    assert analytic_rank_char(Tensor.zeros(F3, (2, 2))) == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("shape, q, samples",
                         [((2, 2, 2), 2, 50), ((2, 2), 3, 50), ((2, 2, 2), 3, 10), ((2, 2), 4, 10)])
def test_character_sum_agrees_with_zero_count(shape, q, samples):
    f = field_make(*{2: (2,), 3: (3,), 4: (2, 2)}[q])
    rng = np.random.default_rng(q)
    for _ in range(samples):
        T = random_tensor(shape, f, rng)
        exact = analytic_rank_zero_count(T, T.order - 1).value()
        assert analytic_rank_char(T) == pytest.approx(exact, abs=1e-9)


def test_additivity_on_direct_sums():
    rng = np.random.default_rng(21)
    for _ in range(25):
        T, S = random_tensor((2, 2, 2), F2, rng), random_tensor((2, 2, 2), F2, rng)
        total = analytic_rank_zero_count(direct_sum(T, S), 2)
        zt, zs = analytic_rank_zero_count(T, 2), analytic_rank_zero_count(S, 2)
        assert total.m == zt.m + zs.m
        assert total.zero_count == zt.zero_count * zs.zero_count, "zero sets of a direct sum are products"


def test_budget_guard():
    with pytest.raises(GuardExceeded):
        analytic_rank_zero_count(identity_tensor(3, 3, F2), 2, settings=Settings(budget=10))
    with pytest.raises(GuardExceeded):
        analytic_rank_char(identity_tensor(3, 3, F2), settings=Settings(budget=10))


def test_worker_count_does_not_change_the_count(monkeypatch):
    monkeypatch.setattr(analytic, "BLOCK_ENTRIES", 64)
    T = random_tensor((3, 3, 3), F3, np.random.default_rng(30))
    serial = analytic_rank_zero_count(T, 2, settings=Settings(workers=1))
    parallel = analytic_rank_zero_count(T, 2, settings=Settings(workers=2))
    assert serial == parallel, "zero counts must not depend on parallelism"
    small = random_tensor((2, 2, 2), F3, np.random.default_rng(31))
    assert analytic_rank_char(small, settings=Settings(workers=2)) == pytest.approx(analytic_rank_char(small), abs=1e-9)


def test_matmul_pair_counts():
    assert matmul_pair_count(2, 2) == 58
    assert matmul_pair_count(2, 4) == 1636
    assert matmul_pair_count(2, 8) == 43912
    assert matmul_pair_count(1, 5) == 9, "ab = 0 has 2q - 1 solutions"


def test_matmul_zero_count_matches_pair_count():
    for n, q in [(1, 3), (2, 2), (2, 3)]:
        f = field_make(q)
        assert analytic_rank_zero_count(matmul_tensor(n, f), 2).zero_count == matmul_pair_count(n, q)


def test_geometric_rank_of_matmul():
    estimate = geometric_rank_estimate(matmul_tensor(2, F2), 2, 3)
    assert [level.zero_count for level in estimate.levels] == [58, 1636, 43912]
    assert estimate.gr == 3
    assert estimate.residual == pytest.approx(0.254, abs=0.01)


def test_geometric_rank_examples():
    diagonal = geometric_rank_estimate(identity_tensor(2, 3, F2), 2, 3)
    assert [level.zero_count for level in diagonal.levels] == [9, 49, 225]
    assert diagonal.gr == 2
    single = geometric_rank_estimate(e1_cubed(), 2, 2)
    assert [level.zero_count for level in single.levels] == [12, 112]
    assert single.gr == 1


def test_geometric_rank_needs_two_levels():
    with pytest.raises(ValueError):
        geometric_rank_estimate(identity_tensor(2, 3, F2), 2, 1)


def test_stability_of_identity_matrix():
    result = stability_check(identity_tensor(2, 2, F2), 2)
    assert result.identity_holds
    assert result.native.value() == pytest.approx(2.0)
    assert result.kron.value() == pytest.approx(4.0)
    assert result.ratio() == pytest.approx(1.0)


def test_stability_identity_on_random_tensors():
    rng = np.random.default_rng(40)
    for _ in range(10):
        T = random_tensor((2, 2, 2), F2, rng)
        result = stability_check(T, 2)
        assert result.native.zero_count == result.kron.zero_count
        assert 2 * result.native.value() == pytest.approx(result.kron.value(), abs=1e-9)


def test_stability_of_zero_tensor():
    result = stability_check(Tensor.zeros(F3, (2, 2, 2)), 2)
    assert result.identity_holds
    assert result.ratio() is None, "the ratio is undefined when AR vanishes"
