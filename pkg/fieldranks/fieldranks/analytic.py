# Copyright (c) 2024 Contributors
# All rights reserved.

"""Analytic rank by exact point counting, and geometric rank through extension towers.

|Z_k(T)| counts tuples of functionals on every mode but k that annihilate T.
Counting fixes all functionals except those on one further mode j; the
remaining condition f_j^T M = 0 has q^(n_j - rank M) solutions, so only the
other modes are enumerated. The enumeration is cut into contiguous index
blocks whose partial counts are added exactly, so the result does not depend
on the number of workers.
"""

import cmath
import logging
import math
from multiprocessing import Pool

import msgspec
import numpy as np

from . import linalg
from .errors import InconclusiveEstimate, VerificationFailed, check_budget
from .gf import FieldSpec, field_make
from .settings import DEFAULT_SETTINGS, Settings
from .tensor import Tensor, base_change, extend_scalars

logger = logging.getLogger(__name__)

BLOCK_ENTRIES = 1 << 20


class ARExact(msgspec.Struct, frozen=True):
    """Analytic rank held exactly: value = m - log_q(zero_count)."""
    q: int
    m: int
    zero_count: int
    k: int

    def value(self) -> float:
        return self.m - math.log(self.zero_count) / math.log(self.q)

    def consistent_with(self, other: "ARExact") -> bool:
        """Integer form of mode independence: count_1 * q^m_2 == count_2 * q^m_1."""
        return self.q == other.q and self.zero_count * self.q ** other.m == other.zero_count * self.q ** self.m

    def to_dict(self) -> dict:
        return {"q": self.q, "m": self.m, "k": self.k, "zero_count": str(self.zero_count)}


class TowerLevel(msgspec.Struct, frozen=True):
    l: int
    zero_count: int


class GREstimate(msgspec.Struct, frozen=True):
    """Geometric rank read off the growth of |Z_k| along GF(q^l), l = 1..l_max."""
    q: int
    m: int
    k: int
    levels: list[TowerLevel]
    dim_estimate: int
    gr: int
    residual: float

    def to_dict(self) -> dict:
        return {"q": self.q, "m": self.m, "k": self.k, "dim_estimate": self.dim_estimate, "gr": self.gr,
                "levels": [{"l": level.l, "zero_count": str(level.zero_count)} for level in self.levels]}


def _decode_functionals(q: int, width: int, start: int, stop: int) -> np.ndarray:
    index = np.arange(start, stop, dtype=np.int64)
    return (index[:, None] // (q ** np.arange(width, dtype=np.int64))) % q


def _contract_batch(field: FieldSpec, entries: np.ndarray, modes: list[int], digits: np.ndarray) -> np.ndarray:
    """Contracts `modes` of entries with one functional per row of digits.

    Digits are laid out mode after mode in ascending mode order; the result has
    a leading batch axis followed by the uncontracted modes in original order.
    """
    ops = field.ops
    offsets, offset = {}, 0
    for mode in modes:
        offsets[mode] = offset
        offset += entries.shape[mode]
    batch = digits.shape[0]
    arr = entries[None]
    for mode in sorted(modes, reverse=True):
        n = entries.shape[mode]
        moved = np.moveaxis(arr, mode + 1, -1)
        vectors = digits[:, offsets[mode]:offsets[mode] + n]
        arr = ops.sum(ops.mul(moved, vectors.reshape((batch,) + (1,) * (moved.ndim - 2) + (n,))), axis=-1)
    return np.broadcast_to(arr, (batch,) + arr.shape[1:])


def _zero_count_block(job) -> int:
    p, k, entries, free_mode, kept_mode, modes, start, stop = job
    field = field_make(p, k)
    q = field.q
    width = sum(entries.shape[i] for i in modes)
    digits = _decode_functionals(q, width, start, stop)
    mats = _contract_batch(field, entries, modes, digits)
    if free_mode > kept_mode:
        mats = mats.swapaxes(1, 2)
    n_free = entries.shape[free_mode]
    ranks = linalg.batch_rank(field, mats)
    counts = np.bincount(ranks, minlength=n_free + 1)
    return sum(int(c) * q ** (n_free - r) for r, c in enumerate(counts))


def _trace_histogram_block(job) -> list[int]:
    p, k, entries, start, stop = job
    field = field_make(p, k)
    width = sum(entries.shape)
    digits = _decode_functionals(field.q, width, start, stop)
    values = _contract_batch(field, entries, list(range(entries.ndim)), digits)
    return np.bincount(field.ops.trace(values), minlength=p).tolist()


def _blocks(total: int, per_point: int) -> list[tuple[int, int]]:
    size = max(1, BLOCK_ENTRIES // max(1, per_point))
    return [(start, min(total, start + size)) for start in range(0, total, size)]


def _run_blocks(function, jobs: list, workers: int) -> list:
    if workers > 1 and len(jobs) > 1:
        with Pool(min(workers, len(jobs))) as pool:
            return pool.map(function, jobs, chunksize=1)
    return [function(job) for job in jobs]


def analytic_rank_zero_count(T: Tensor, k: int, *, settings: Settings = DEFAULT_SETTINGS) -> ARExact:
    """Exact |Z_k(T)| together with m = sum of n_i over i != k."""
    if not 0 <= k < T.order:
        raise ValueError(f"mode {k} out of range for order {T.order}")
    q = T.field.q
    m = sum(T.shape) - T.shape[k]
    check_budget("analytic rank points", q ** m, settings.budget)
    others = [i for i in range(T.order) if i != k]
    free_mode = max(others, key=lambda i: (T.shape[i], -i))
    modes = [i for i in others if i != free_mode]
    total = q ** sum(T.shape[i] for i in modes)
    jobs = [(T.field.p, T.field.k, T.entries, free_mode, k, modes, start, stop)
            for start, stop in _blocks(total, T.entries.size)]
    logger.debug("zero count of %r at mode %d: %d assignments in %d blocks", T, k, total, len(jobs))
    zero_count = sum(_run_blocks(_zero_count_block, jobs, settings.workers))
    return ARExact(q=q, m=m, zero_count=zero_count, k=k)


def analytic_rank_char(T: Tensor, *, settings: Settings = DEFAULT_SETTINGS) -> float:
    """-log_q of q^(-sum n_i) times the sum of chi(T(f_1, ..., f_d)) over all tuples."""
    field = T.field
    points = sum(T.shape)
    total = field.q ** points
    check_budget("character sum terms", total, settings.budget)
    jobs = [(field.p, field.k, T.entries, start, stop) for start, stop in _blocks(total, T.entries.size)]
    histogram = np.zeros(field.p, dtype=object)
    for partial in _run_blocks(_trace_histogram_block, jobs, settings.workers):
        histogram += np.array(partial, dtype=object)
    character_sum = sum(int(count) * cmath.exp(2j * cmath.pi * t / field.p) for t, count in enumerate(histogram))
    return points - math.log(character_sum.real) / math.log(field.q)


def geometric_rank_estimate(T: Tensor, k: int, l_max: int, *,
                            settings: Settings = DEFAULT_SETTINGS) -> GREstimate:
    """Counts |Z_k| over GF(q^l) for l = 1..l_max and rounds log_q of the last ratio.

    The ratio of successive counts cancels the constant factors that make
    log_{q^l}(count) converge slowly.
    """
    if l_max < 2:
        raise ValueError(f"the tower needs l_max >= 2, got {l_max}")
    q = T.field.q
    levels = []
    for l in range(1, l_max + 1):
        native = extend_scalars(T, l)
        count = analytic_rank_zero_count(native, k, settings=settings).zero_count
        logger.info("|Z_%d| over GF(%d^%d) = %d", k, q, l, count)
        levels.append(TowerLevel(l=l, zero_count=count))
    m = sum(T.shape) - T.shape[k]
    ratio = (math.log(levels[-1].zero_count) - math.log(levels[-2].zero_count)) / math.log(q)
    dim_estimate = round(ratio)
    residual = abs(ratio - dim_estimate)
    estimate = GREstimate(q=q, m=m, k=k, levels=levels, dim_estimate=dim_estimate,
                          gr=m - dim_estimate, residual=residual)
    if residual >= 0.5:
        raise InconclusiveEstimate(f"tower ratio {ratio:.6f} is not near an integer", estimate)
    return estimate


def matmul_pair_count(n: int, q: int) -> int:
    """#{(A, B) : AB = 0} for n x n matrices over GF(q), stratified by the rank of A."""
    total = 0
    for r in range(n + 1):
        rank_r = math.prod((q ** n - q ** i) ** 2 for i in range(r)) // math.prod(q ** r - q ** i for i in range(r))
        total += rank_r * q ** (n * (n - r))
    return total


class StabilityResult(msgspec.Struct, frozen=True):
    """Analytic ranks of T, of its native base change and of its Kronecker view."""
    l: int
    base: ARExact
    native: ARExact
    kron: ARExact

    @property
    def identity_holds(self) -> bool:
        return self.native.zero_count == self.kron.zero_count

    def ratio(self) -> float | None:
        base = self.base.value()
        return self.native.value() / base if base > 0 else None


def stability_check(T: Tensor, l: int, k: int | None = None, *,
                    settings: Settings = DEFAULT_SETTINGS) -> StabilityResult:
    """Checks l * AR over GF(q^l) of the native view against AR of T ⊠ T_{d,GF(q^l)}.

    Both sides have the same m * l, so the identity is the equality of the two zero counts.
    """
    k = T.order - 1 if k is None else k
    native, kron = base_change(T, l)
    result = StabilityResult(
        l=l,
        base=analytic_rank_zero_count(T, k, settings=settings),
        native=analytic_rank_zero_count(native, k, settings=settings),
        kron=analytic_rank_zero_count(kron, k, settings=settings),
    )
    if not result.identity_holds:
        raise VerificationFailed(
            f"base change identity fails for {T!r} at l={l}: "
            f"{result.native.zero_count} != {result.kron.zero_count}")
    return result
