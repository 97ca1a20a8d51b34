# Copyright (c) 2024 Contributors
# All rights reserved.

"""Exact linear algebra over a FieldSpec on numpy arrays of encoded elements."""

import numpy as np

from .gf import FieldSpec


def as_matrix(mat, columns: int | None = None) -> np.ndarray:
    m = np.array(mat, dtype=np.int64)
    if m.ndim == 1 and m.size == 0:
        m = m.reshape(0, columns or 0)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {m.shape}")
    return m


def rref(field: FieldSpec, mat) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form with zero rows dropped, and the pivot columns."""
    ops = field.ops
    m = as_matrix(mat)
    rows, cols = m.shape
    pivots: list[int] = []
    row = 0
    for col in range(cols):
        if row == rows:
            break
        nonzero = np.nonzero(m[row:, col])[0]
        if nonzero.size == 0:
            continue
        pivot = row + int(nonzero[0])
        if pivot != row:
            m[[row, pivot]] = m[[pivot, row]]
        m[row] = ops.mul(ops.inv(m[row, col]), m[row])
        factors = m[:, col].copy()
        factors[row] = 0
        m = ops.sub(m, ops.mul(factors[:, None], m[row][None, :]))
        pivots.append(col)
        row += 1
    return m[:row], pivots


def rank(field: FieldSpec, mat) -> int:
    return len(rref(field, mat)[1])


def batch_rank(field: FieldSpec, mats: np.ndarray) -> np.ndarray:
    """Ranks of a stack of equally shaped matrices, eliminated side by side."""
    ops = field.ops
    m = np.array(mats, dtype=np.int64)
    count, rows, cols = m.shape
    ranks = np.zeros(count, dtype=np.int64)
    row_index = np.arange(rows)
    for col in range(cols):
        eligible = (m[:, :, col] != 0) & (row_index[None, :] >= ranks[:, None])
        active = np.nonzero(eligible.any(axis=1))[0]
        if active.size == 0:
            continue
        block = m[active]
        target = ranks[active]
        pivot = np.argmax(eligible[active], axis=1)
        idx = np.arange(active.size)
        pivot_rows = block[idx, pivot].copy()
        block[idx, pivot] = block[idx, target]
        pivot_rows = ops.mul(ops.inv(pivot_rows[:, col])[:, None], pivot_rows)
        block[idx, target] = pivot_rows
        factors = block[:, :, col].copy()
        factors[idx, target] = 0
        m[active] = ops.sub(block, ops.mul(factors[:, :, None], pivot_rows[:, None, :]))
        ranks[active] += 1
    return ranks


def solve(field: FieldSpec, a, b) -> np.ndarray | None:
    """A solution x of a @ x = b (b a vector or a matrix of columns), or None."""
    a = as_matrix(a)
    b = np.asarray(b, dtype=np.int64)
    rhs = b.reshape(a.shape[0], -1)
    reduced, pivots = rref(field, np.hstack([a, rhs]))
    unknowns = a.shape[1]
    if pivots and pivots[-1] >= unknowns:
        return None
    x = np.zeros((unknowns, rhs.shape[1]), dtype=np.int64)
    for i, col in enumerate(pivots):
        x[col] = reduced[i, unknowns:]
    return x.reshape(unknowns) if b.ndim == 1 else x


def inverse(field: FieldSpec, a) -> np.ndarray:
    a = as_matrix(a)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"cannot invert a {a.shape} matrix")
    reduced, pivots = rref(field, np.hstack([a, np.eye(n, dtype=np.int64)]))
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return reduced[:, n:]


def nullspace(field: FieldSpec, a, columns: int | None = None) -> np.ndarray:
    """Basis rows of {x : a @ x = 0}."""
    a = as_matrix(a, columns)
    n = a.shape[1]
    reduced, pivots = rref(field, a)
    free = [c for c in range(n) if c not in pivots]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for j, col in enumerate(free):
        basis[j, col] = 1
        for i, pivot in enumerate(pivots):
            basis[j, pivot] = field.ops.neg(reduced[i, col])
    return basis


def matmul(field: FieldSpec, a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"cannot multiply {a.shape} by {b.shape}")
    ops = field.ops
    if a.shape[1] == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    return ops.sum(ops.mul(a[:, :, None], b[None, :, :]), axis=1)
