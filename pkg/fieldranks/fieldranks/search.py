# Copyright (c) 2024 Contributors
# All rights reserved.

"""Exact slice, partition and cp-rank, subrank, and slice rank of subspaces.

Every search deepens on the total rank r = 0, 1, 2, ...; within a level,
compositions of r are tried in lexicographic order and subspaces in
pivot-pattern order, so the first certificate found is deterministic.
"""

import itertools
import logging
import math

import msgspec
import numpy as np

from . import linalg
from .certificates import DecompCert, DecompTerm, Factor, RestrictionCert, pure_term
from .errors import GuardExceeded, VerificationFailed, check_budget
from .gf import FieldSpec
from .settings import DEFAULT_SETTINGS, Settings
from .subspace import (Subspace, TensorSubspace, annihilator, enumerate_subspaces, gaussian_binomial,
                       member_of_slice_sum, slice_sum_generators, zero_space)
from .tensor import (MatrixTuple, Tensor, apply_matrices, extend_scalars, flatten, identity_tensor, mode_product,
                     mult_tensor)

logger = logging.getLogger(__name__)


def _check_slice_guard(shape, field: FieldSpec, settings: Settings) -> None:
    if shape and max(shape) > settings.slice_max_dim:
        raise GuardExceeded("slice search mode size", max(shape), settings.slice_max_dim)
    if field.q > settings.slice_max_field:
        raise GuardExceeded("slice search field size", field.q, settings.slice_max_field)


def compositions(total: int, caps: list[int]):
    """Tuples (r_1, ..., r_s) with 0 <= r_i <= caps[i] summing to total, lexicographically."""
    if not caps:
        if total == 0:
            yield ()
        return
    for first in range(min(total, caps[0]) + 1):
        for rest in compositions(total - first, caps[1:]):
            yield (first,) + rest


def _cover_search(targets: list[Tensor], field: FieldSpec, shape: tuple[int, ...], sides: list[tuple[int, ...]],
                  settings: Settings) -> tuple[int, list[tuple[tuple[int, ...], Subspace]]]:
    """Smallest r with subspaces S_P (dims summing to r) whose slice sum holds every target."""
    caps = [math.prod(shape[i] for i in side) for side in sides]
    upper = min(caps)
    for r in range(upper + 1):
        logger.debug("deepening to r=%d over sides %s", r, sides)
        for dims in compositions(r, caps):
            chosen = [(side, cap, dim) for side, cap, dim in zip(sides, caps, dims) if dim]
            pools = [enumerate_subspaces(cap, field, dim, settings) for _, cap, dim in chosen]
            for spaces in itertools.product(*pools):
                parts = [(side, space) for (side, _, _), space in zip(chosen, spaces)]
                if all(member_of_slice_sum(T, parts) for T in targets):
                    return r, parts
    raise AssertionError(f"no cover found up to the trivial bound {upper}")


def _decomposition(T: Tensor, parts, kind: str) -> DecompCert:
    """Solves for the complement factors of a successful slice sum."""
    gens = slice_sum_generators(T.shape, T.field, parts)
    coefficients = linalg.solve(T.field, gens.T, T.entries.reshape(-1))
    if coefficients is None:
        raise VerificationFailed(f"{T!r} is not in the slice sum found by the search")
    terms, offset = [], 0
    for side, space in parts:
        rest = tuple(i for i in range(T.order) if i not in side)
        side_shape = tuple(T.shape[i] for i in side)
        rest_shape = tuple(T.shape[i] for i in rest)
        size = math.prod(rest_shape)
        for vector in space.basis:
            other = coefficients[offset:offset + size].reshape(rest_shape)
            terms.append(DecompTerm((Factor(side, vector.reshape(side_shape)), Factor(rest, other))))
            offset += size
    return DecompCert(kind, T.field, T.shape, tuple(terms)).check(T)


def slice_rank(T: Tensor, *, settings: Settings = DEFAULT_SETTINGS) -> tuple[int, DecompCert]:
    """SR(T) <= r iff T lies in a sum of A_i ⊗ (other modes) with sum of dim A_i = r."""
    _check_slice_guard(T.shape, T.field, settings)
    value, parts = _cover_search([T], T.field, T.shape, [(i,) for i in range(T.order)], settings)
    logger.info("slice rank of %r is %d", T, value)
    return value, _decomposition(T, parts, "slice")


def bipartition_sides(shape) -> list[tuple[int, ...]]:
    """One side per bipartition of the modes: the smaller flattening, ties to the side holding mode 0."""
    d = len(shape)
    sides, seen = [], set()
    for size in range(1, d):
        for side in itertools.combinations(range(d), size):
            rest = tuple(i for i in range(d) if i not in side)
            key = frozenset((side, rest))
            if key in seen:
                continue
            seen.add(key)
            sides.append(min(side, rest, key=lambda s: (math.prod(shape[i] for i in s), 0 not in s)))
    return sides


def partition_rank(T: Tensor, *, settings: Settings = DEFAULT_SETTINGS) -> tuple[int, DecompCert]:
    """Like slice_rank, with parts ranging over every bipartition of the modes."""
    sides = bipartition_sides(T.shape)
    for side in sides:
        size = math.prod(T.shape[i] for i in side)
        if size > settings.partition_max_side:
            raise GuardExceeded(f"partition search side {side}", size, settings.partition_max_side)
    value, parts = _cover_search([T], T.field, T.shape, sides, settings)
    logger.info("partition rank of %r is %d", T, value)
    return value, _decomposition(T, parts, "partition")


def projective_points(n: int, field: FieldSpec) -> np.ndarray:
    """Nonzero vectors of GF(q)^n whose first nonzero coordinate is 1."""
    points = [v for v in itertools.product(range(field.q), repeat=n)
              if any(v) and next(x for x in v if x) == 1]
    return np.array(points, dtype=np.int64).reshape(len(points), n)


def _flatten_bound(field: FieldSpec, arr: np.ndarray) -> int:
    return max(linalg.rank(field, np.moveaxis(arr, i, 0).reshape(arr.shape[i], -1)) for i in range(arr.ndim))


def cp_rank(T: Tensor, *, settings: Settings = DEFAULT_SETTINGS) -> tuple[int, DecompCert]:
    """Fewest pure products summing to T, by depth-first search over ordered rank-one terms."""
    field, ops = T.field, T.field.ops
    points = [projective_points(n, field) for n in T.shape]
    count = math.prod(len(p) for p in points)
    check_budget("projective rank-one tensors", count, settings.cp_max_terms)
    if T.is_zero():
        return 0, DecompCert("cp", field, T.shape, ())

    combos = list(itertools.product(*(range(len(p)) for p in points)))
    pure = np.empty((count, T.entries.size), dtype=np.int64)
    for index, combo in enumerate(combos):
        term = pure_term([points[i][c] for i, c in enumerate(combo)])
        pure[index] = term.assemble(field, T.order).entries.reshape(-1)
    scalars = range(1, field.q)
    lookup = {}
    for index in range(count):
        for scalar in scalars:
            lookup.setdefault(ops.mul(scalar, pure[index]).tobytes(), (index, scalar))

    def search(residual: np.ndarray, remaining: int, start: int):
        if remaining == 1:
            hit = lookup.get(residual.tobytes())
            return [hit] if hit is not None and hit[0] >= start else None
        if _flatten_bound(field, residual.reshape(T.shape)) > remaining:
            return None
        for index in range(start, count):
            for scalar in scalars:
                found = search(ops.sub(residual, ops.mul(scalar, pure[index])), remaining - 1, index + 1)
                if found is not None:
                    return [(index, scalar)] + found
        return None

    lower = _flatten_bound(field, T.entries)
    upper = min(math.prod(T.shape) // n for n in T.shape)
    for r in range(lower, upper + 1):
        logger.debug("cp search at r=%d over %d rank-one tensors", r, count)
        found = search(T.entries.reshape(-1).copy(), r, 0)
        if found is not None:
            terms = []
            for index, scalar in found:
                vectors = [points[i][c] for i, c in enumerate(combos[index])]
                vectors[0] = ops.mul(scalar, vectors[0])
                terms.append(pure_term(vectors))
            logger.info("cp rank of %r is %d", T, r)
            return r, DecompCert("cp", field, T.shape, tuple(terms)).check(T)
    raise AssertionError(f"no cp decomposition found up to the slice bound {upper}")


def _full_rank_matrices(rows: int, cols: int, field: FieldSpec) -> np.ndarray:
    q, size = field.q, rows * cols
    index = np.arange(q ** size, dtype=np.int64)
    mats = ((index[:, None] // q ** np.arange(size, dtype=np.int64)) % q).reshape(-1, rows, cols)
    return mats[linalg.batch_rank(field, mats) == rows]


def subrank_at_least(T: Tensor, s: int, *, settings: Settings = DEFAULT_SETTINGS) -> RestrictionCert | None:
    """A verified Id_s ⪯ T, or None when no matrix tuple exists.

    The first d-1 matrices are enumerated among full-rank ones; the last is solved
    for linearly, so None is a proof that Q(T) < s.
    """
    if s < 1:
        raise ValueError(f"subrank target must be positive, got {s}")
    field = T.field
    check_budget("subrank search space", field.q ** (s * sum(T.shape)), settings.subrank_max_space)
    if s > min(T.shape):
        return None
    target = identity_tensor(s, T.order, field)
    last = T.order - 1
    wanted = target.entries.reshape(-1, s)
    candidates = [_full_rank_matrices(s, n, field) for n in T.shape[:last]]
    for mats in itertools.product(*candidates):
        partial = T.entries
        for mode, mat in enumerate(mats):
            partial = mode_product(field, partial, mode, mat)
        solution = linalg.solve(field, partial.reshape(-1, T.shape[last]), wanted)
        if solution is not None:
            cert = RestrictionCert(MatrixTuple(field, tuple(mats) + (solution.T,)), T, target)
            return cert.check()
    return None


def sr_subspace(W: TensorSubspace, *, settings: Settings = DEFAULT_SETTINGS) -> tuple[int, tuple[Subspace, ...]]:
    """min sum of codim U_i with <W, U_1 ⊗ ... ⊗ U_d> = 0, and the witness (U_1, ..., U_d).

    Searched in primal form: every basis tensor must lie in the slice sum of the
    A_i, and U_i is the annihilator of A_i.
    """
    _check_slice_guard(W.shape, W.field, settings)
    sides = [(i,) for i in range(W.order)]
    if W.dim == 0:
        value, parts = 0, []
    else:
        value, parts = _cover_search(list(W.basis), W.field, W.shape, sides, settings)
    chosen = {side[0]: space for side, space in parts}
    witness = tuple(annihilator(chosen.get(i, zero_space(n, W.field))) for i, n in enumerate(W.shape))
    functionals = MatrixTuple(W.field, tuple(u.basis for u in witness))
    if not all(apply_matrices(functionals, T).is_zero() for T in W.basis):
        raise VerificationFailed("slice rank witness does not annihilate the subspace")
    logger.info("slice rank of a %d-dimensional subspace is %d", W.dim, value)
    return value, witness


def sr_k_subspace(W: TensorSubspace, k: int, *, settings: Settings = DEFAULT_SETTINGS) -> int:
    """max of sr_subspace(V) over k-dimensional subspaces V of W."""
    if not 0 <= k <= W.dim:
        raise ValueError(f"k must lie in 0..{W.dim}, got {k}")
    ceiling, _ = sr_subspace(W, settings=settings)
    if k == W.dim:
        return ceiling
    check_budget("k-dimensional subspaces", gaussian_binomial(W.dim, k, W.field.q), settings.subspace_budget)
    best = 0
    for coordinates in enumerate_subspaces(W.dim, W.field, k, settings):
        best = max(best, sr_subspace(W.subspace(coordinates), settings=settings)[0])
        if best == ceiling:
            break
    return best


def flatten_ranks(T: Tensor) -> list[int]:
    return [linalg.rank(T.field, flatten(T, i)) for i in range(T.order)]


class SandwichResult(msgspec.Struct, frozen=True):
    """PR over GF(q^2) of T, PR over GF(q) of T, and the cp-rank of GF(q^2) multiplication."""
    pr_extension: int
    pr_base: int
    mult_rank: int

    @property
    def holds(self) -> bool:
        return self.pr_extension <= self.pr_base <= self.pr_extension * self.mult_rank


def extension_pr_sandwich(T: Tensor, *, settings: Settings = DEFAULT_SETTINGS) -> SandwichResult:
    """PR_F(T^F) <= PR_K(T) <= PR_F(T^F) * R_K(T_{3,F}) for F = GF(q^2).

    Every PR_F-one term of T^F is a K-valued product after composing with
    the multiplication of F, which costs R_K(T_{3,F}) K-terms.
    """
    if T.order != 3:
        raise ValueError(f"the sandwich is checked on order-3 tensors, got order {T.order}")
    pr_base, _ = partition_rank(T, settings=settings)
    pr_extension, _ = partition_rank(extend_scalars(T, 2), settings=settings)
    mult_rank, _ = cp_rank(mult_tensor(3, T.field, 2), settings=settings)
    result = SandwichResult(pr_extension=pr_extension, pr_base=pr_base, mult_rank=mult_rank)
    logger.info("partition rank sandwich for %r: %s", T, result)
    return result
