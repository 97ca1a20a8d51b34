# Copyright (c) 2024 Contributors
# All rights reserved.

"""Subspaces of coordinate spaces in canonical RREF, and spans of tensors.

Dual spaces are identified with primal ones through the dot pairing, so the
annihilator of a subspace is the kernel of its basis matrix.
"""

import itertools
import logging
import math
import os
import pathlib
from dataclasses import dataclass
from functools import cache

import msgspec
import numpy as np

from . import linalg
from .errors import GuardExceeded, TensorFormatError
from .gf import FieldSpec, field_make
from .settings import DEFAULT_SETTINGS, Settings
from .tensor import Tensor, direct_sum, mode_product

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of GF(q)^n given by its r x n RREF basis."""
    field: FieldSpec
    ambient_dim: int
    basis: np.ndarray

    def __post_init__(self):
        basis = linalg.as_matrix(self.basis, self.ambient_dim)
        if basis.shape[1] != self.ambient_dim:
            raise ValueError(f"basis rows have length {basis.shape[1]}, expected {self.ambient_dim}")
        basis.flags.writeable = False
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def rows(self) -> list[list[int]]:
        return self.basis.tolist()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return (self.field == other.field and self.ambient_dim == other.ambient_dim
                and np.array_equal(self.basis, other.basis))

    def __hash__(self) -> int:
        return hash((self.field, self.ambient_dim, self.basis.tobytes()))

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, n={self.ambient_dim}, {self.basis.tolist()})"


def rref(vectors, field: FieldSpec, ambient_dim: int | None = None) -> Subspace:
    """The span of the given vectors in canonical form."""
    mat = linalg.as_matrix(vectors, ambient_dim)
    reduced, _ = linalg.rref(field, mat)
    return Subspace(field, mat.shape[1], reduced)


def full_space(n: int, field: FieldSpec) -> Subspace:
    return Subspace(field, n, np.eye(n, dtype=np.int64))


def zero_space(n: int, field: FieldSpec) -> Subspace:
    return Subspace(field, n, np.zeros((0, n), dtype=np.int64))


def gaussian_binomial(n: int, k: int, q: int) -> int:
    if not 0 <= k <= n:
        return 0
    numerator = math.prod(q ** (n - i) - 1 for i in range(k))
    denominator = math.prod(q ** (i + 1) - 1 for i in range(k))
    return numerator // denominator


def _check_enumeration(n: int, field: FieldSpec, settings: Settings) -> None:
    if n > settings.subspace_max_ambient:
        raise GuardExceeded("subspace enumeration ambient dimension", n, settings.subspace_max_ambient)
    if field.q ** n > settings.subspace_max_points:
        raise GuardExceeded("subspace enumeration points", field.q ** n, settings.subspace_max_points)


@cache
def _subspaces_of_dim(n: int, field: FieldSpec, dim: int) -> tuple[Subspace, ...]:
    found = []
    for pivots in itertools.combinations(range(n), dim):
        free = [(row, col) for row, pivot in enumerate(pivots)
                for col in range(pivot + 1, n) if col not in pivots]
        for values in itertools.product(range(field.q), repeat=len(free)):
            basis = np.zeros((dim, n), dtype=np.int64)
            basis[np.arange(dim), list(pivots)] = 1
            for (row, col), value in zip(free, values):
                basis[row, col] = value
            found.append(Subspace(field, n, basis))
    return tuple(found)


def enumerate_subspaces(n: int, f: FieldSpec, dim: int | None = None,
                        settings: Settings = DEFAULT_SETTINGS) -> tuple[Subspace, ...]:
    """Every subspace of GF(q)^n exactly once, by dimension then pivot pattern."""
    _check_enumeration(n, f, settings)
    dims = range(n + 1) if dim is None else [dim]
    return tuple(s for d in dims if 0 <= d <= n for s in _subspaces_of_dim(n, f, d))


@cache
def annihilator(s: Subspace) -> Subspace:
    if s.dim == 0:
        return full_space(s.ambient_dim, s.field)
    return Subspace(s.field, s.ambient_dim, linalg.rref(s.field, linalg.nullspace(s.field, s.basis, s.ambient_dim))[0])


def slice_sum_generators(shape, field: FieldSpec, parts) -> np.ndarray:
    """Flattened generators v ⊗ e_c of the sum over parts of S_P ⊗ (full complement).

    Rows come part by part, then basis vector by basis vector, then by the
    row-major index c over the complement modes.
    """
    shape = tuple(shape)
    total = int(np.prod(shape, dtype=np.int64))
    blocks = [np.zeros((0, total), dtype=np.int64)]
    for modes, space in parts:
        side = list(modes)
        rest = [i for i in range(len(shape)) if i not in side]
        side_shape = [shape[i] for i in side]
        rest_shape = [shape[i] for i in rest]
        side_size, rest_size = math.prod(side_shape), math.prod(rest_shape)
        if space.ambient_dim != side_size:
            raise ValueError(f"subspace for modes {tuple(modes)} must live in dimension {side_size}")
        gens = space.basis[:, None, :, None] * np.eye(rest_size, dtype=np.int64)[None, :, None, :]
        gens = gens.reshape([space.dim * rest_size] + side_shape + rest_shape)
        order = side + rest
        gens = gens.transpose([0] + [1 + order.index(i) for i in range(len(shape))])
        blocks.append(gens.reshape(space.dim * rest_size, total))
    return np.vstack(blocks)


def _validate_parts(T: Tensor, parts) -> None:
    for modes, space in parts:
        if not modes or any(not 0 <= m < T.order for m in modes) or len(set(modes)) != len(modes):
            raise ValueError(f"invalid mode subset {modes} for order {T.order}")
        if space.field != T.field:
            raise ValueError(f"subspace over {space.field!r} used with a tensor over {T.field!r}")
        if space.ambient_dim != math.prod(T.shape[m] for m in modes):
            raise ValueError(f"subspace for modes {tuple(modes)} has the wrong ambient dimension")


def member_of_slice_sum(T: Tensor, parts) -> bool:
    """Whether T lies in the sum over parts (P, S_P) of S_P ⊗ (full complement modes).

    Singleton parts on distinct modes are decided by projecting every mode onto
    its quotient (the annihilator rows) and testing for zero; anything else by
    one rank comparison of the generator matrix with and without T.
    """
    parts = [(tuple(modes), space) for modes, space in parts]
    _validate_parts(T, parts)
    if T.is_zero():
        return True
    singles = [modes[0] for modes, _ in parts if len(modes) == 1]
    if len(singles) == len(parts) and len(set(singles)) == len(singles):
        arr = T.entries
        for modes, space in parts:
            arr = mode_product(T.field, arr, modes[0], annihilator(space).basis)
            if not arr.any():
                return True
        return False
    gens = slice_sum_generators(T.shape, T.field, parts)
    base = linalg.rank(T.field, gens)
    return linalg.rank(T.field, np.vstack([gens, T.entries.reshape(1, -1)])) == base


@dataclass(frozen=True, eq=False)
class TensorSubspace:
    """A span of linearly independent tensors of a common shape."""
    field: FieldSpec
    shape: tuple[int, ...]
    basis: tuple[Tensor, ...]

    def __post_init__(self):
        object.__setattr__(self, "shape", tuple(self.shape))
        object.__setattr__(self, "basis", tuple(self.basis))
        for T in self.basis:
            if T.field != self.field or T.shape != self.shape:
                raise ValueError(f"{T!r} does not live in {self.field!r}^{self.shape}")
        if linalg.rank(self.field, self.matrix()) != len(self.basis):
            raise ValueError("basis tensors are linearly dependent")

    @classmethod
    def span(cls, field: FieldSpec, shape, tensors) -> "TensorSubspace":
        """The span of arbitrary tensors, with the canonical RREF basis."""
        shape = tuple(shape)
        flat = linalg.as_matrix([T.flat() for T in tensors], math.prod(shape))
        reduced, _ = linalg.rref(field, flat)
        return cls(field, shape, tuple(Tensor.from_flat(field, shape, row) for row in reduced))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def order(self) -> int:
        return len(self.shape)

    def matrix(self) -> np.ndarray:
        return linalg.as_matrix([T.flat() for T in self.basis], math.prod(self.shape))

    def combination(self, coefficients) -> Tensor:
        """The tensor sum_t c_t T_t for encoded coefficients c."""
        coefficients = np.asarray(coefficients, dtype=np.int64)
        flat = linalg.matmul(self.field, coefficients[None, :], self.matrix())[0]
        return Tensor.from_flat(self.field, self.shape, flat)

    def subspace(self, coordinates: Subspace) -> "TensorSubspace":
        """The subspace spanned by combinations given as rows of a coordinate subspace."""
        return TensorSubspace(self.field, self.shape, tuple(self.combination(row) for row in coordinates.basis))


def subspace_direct_sum(W1: TensorSubspace, W2: TensorSubspace) -> TensorSubspace:
    """W1 ⊕ W2 spanned by T ⊕ 0 and 0 ⊕ S inside the block-diagonal ambient space."""
    if W1.field != W2.field or W1.order != W2.order:
        raise ValueError("direct sum needs subspaces of equal order over one field")
    zero1, zero2 = Tensor.zeros(W1.field, W1.shape), Tensor.zeros(W2.field, W2.shape)
    basis = [direct_sum(T, zero2) for T in W1.basis] + [direct_sum(zero1, S) for S in W2.basis]
    shape = tuple(a + b for a, b in zip(W1.shape, W2.shape))
    return TensorSubspace(W1.field, shape, tuple(basis))


class BasisDocument(msgspec.Struct):
    """A list of basis tensors, each as row-major element codes."""
    p: int
    k: int
    shape: list[int]
    basis: list[list[int]]


def decode_basis(data: bytes) -> TensorSubspace:
    try:
        doc = msgspec.json.decode(data, type=BasisDocument)
        field = field_make(doc.p, doc.k)
        tensors = tuple(Tensor.from_flat(field, doc.shape, row) for row in doc.basis)
        return TensorSubspace(field, tuple(doc.shape), tensors)
    except (msgspec.DecodeError, ValueError) as exc:
        raise TensorFormatError(f"invalid basis document: {exc}") from exc


def read_basis(path: str | os.PathLike) -> TensorSubspace:
    return decode_basis(pathlib.Path(path).read_bytes())


def to_basis_document(W: TensorSubspace) -> BasisDocument:
    return BasisDocument(p=W.field.p, k=W.field.k, shape=list(W.shape), basis=[T.flat() for T in W.basis])
