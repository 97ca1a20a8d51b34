# Copyright (c) 2024 Contributors
# All rights reserved.

"""Dense tensors over a finite field and the named tensor families.

Entries are held as a read-only numpy array of element codes in row-major
order (last index fastest). Mode indices are 0-based.
"""

import itertools
import logging
import os
import pathlib
from dataclasses import dataclass

import msgspec
import numpy as np

from .errors import TensorFormatError
from .extension import extension
from .gf import FieldElem, FieldSpec, embedding_table, field_make
from .linalg import matmul

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Tensor:
    """An order-d array (d >= 2) of encoded elements of `field`."""
    field: FieldSpec
    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=np.int64)
        if entries.ndim < 2:
            raise ValueError(f"tensors have order at least 2, got shape {entries.shape}")
        if entries.size and (entries.min() < 0 or entries.max() >= self.field.q):
            raise ValueError(f"entries do not encode elements of {self.field!r}")
        entries.flags.writeable = False
        object.__setattr__(self, "entries", entries)

    @classmethod
    def zeros(cls, field: FieldSpec, shape) -> "Tensor":
        return cls(field, np.zeros(tuple(shape), dtype=np.int64))

    @classmethod
    def from_flat(cls, field: FieldSpec, shape, flat) -> "Tensor":
        flat = np.asarray(flat, dtype=np.int64)
        shape = tuple(int(n) for n in shape)
        if flat.size != int(np.prod(shape, dtype=np.int64)):
            raise ValueError(f"{flat.size} entries do not fill shape {shape}")
        return cls(field, flat.reshape(shape))

    @property
    def shape(self) -> tuple[int, ...]:
        return self.entries.shape

    @property
    def order(self) -> int:
        return self.entries.ndim

    def flat(self) -> list[int]:
        return [int(x) for x in self.entries.reshape(-1)]

    def at(self, *index: int) -> FieldElem:
        return self.field.element(int(self.entries[index]))

    def is_zero(self) -> bool:
        return not self.entries.any()

    def _check_compatible(self, other: "Tensor") -> None:
        if other.field != self.field or other.shape != self.shape:
            raise ValueError(f"incompatible tensors {self!r} and {other!r}")

    def __add__(self, other: "Tensor") -> "Tensor":
        self._check_compatible(other)
        return Tensor(self.field, self.field.ops.add(self.entries, other.entries))

    def __sub__(self, other: "Tensor") -> "Tensor":
        self._check_compatible(other)
        return Tensor(self.field, self.field.ops.sub(self.entries, other.entries))

    def scale(self, code: int) -> "Tensor":
        return Tensor(self.field, self.field.ops.mul(code, self.entries))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tensor):
            return NotImplemented
        return self.field == other.field and self.shape == other.shape and np.array_equal(self.entries, other.entries)

    def __hash__(self) -> int:
        return hash((self.field, self.shape, self.entries.tobytes()))

    def __repr__(self) -> str:
        return f"Tensor({self.field!r}, shape={self.shape})"


@dataclass(frozen=True, eq=False)
class MatrixTuple:
    """d matrices over a common field; the i-th maps mode i of a tensor (n_i x m_i)."""
    field: FieldSpec
    mats: tuple[np.ndarray, ...]

    def __post_init__(self):
        mats = []
        for mat in self.mats:
            mat = np.array(mat, dtype=np.int64)
            if mat.ndim != 2:
                raise ValueError(f"expected matrices, got shape {mat.shape}")
            if mat.size and (mat.min() < 0 or mat.max() >= self.field.q):
                raise ValueError(f"matrix entries do not encode elements of {self.field!r}")
            mat.flags.writeable = False
            mats.append(mat)
        if len(mats) < 2:
            raise ValueError("a matrix tuple needs at least two matrices")
        object.__setattr__(self, "mats", tuple(mats))

    def __len__(self) -> int:
        return len(self.mats)

    def compose(self, other: "MatrixTuple") -> "MatrixTuple":
        """The tuple applying `other` first and then self."""
        if len(other) != len(self) or other.field != self.field:
            raise ValueError("cannot compose matrix tuples of different orders or fields")
        return MatrixTuple(self.field, tuple(matmul(self.field, a, b) for a, b in zip(self.mats, other.mats)))

    def rows(self) -> list[list[list[int]]]:
        return [mat.tolist() for mat in self.mats]


def _check_mode(T: Tensor, mode: int) -> int:
    if not 0 <= mode < T.order:
        raise ValueError(f"mode {mode} out of range for order {T.order}")
    return mode


def contract(T: Tensor, modes, functionals) -> "Tensor | np.ndarray | FieldElem":
    """Contracts the given modes with coordinate vectors.

    Returns a Tensor while two or more modes remain, a coordinate vector when
    one remains, and the scalar T(f_1, ..., f_d) when every mode is contracted.
    """
    modes = [_check_mode(T, int(m)) for m in modes]
    if len(set(modes)) != len(modes) or len(modes) != len(functionals):
        raise ValueError("modes must be distinct, one functional per mode")
    ops = T.field.ops
    arr = T.entries
    for mode, vector in sorted(zip(modes, functionals), key=lambda pair: -pair[0]):
        vector = np.asarray(vector, dtype=np.int64)
        if vector.shape != (T.shape[mode],):
            raise ValueError(f"functional for mode {mode} must have length {T.shape[mode]}")
        arr = ops.contract(arr, mode, vector)
    if arr.ndim == 0:
        return T.field.element(int(arr))
    if arr.ndim == 1:
        return arr
    return Tensor(T.field, arr)


def _check_pair(T: Tensor, S: Tensor) -> None:
    if T.order != S.order:
        raise ValueError(f"order mismatch: {T.order} and {S.order}")
    if T.field != S.field:
        raise ValueError(f"field mismatch: {T.field!r} and {S.field!r}")


def kronecker(T: Tensor, S: Tensor) -> Tensor:
    """T ⊠ S; mode i of the result has composite index a_i * m_i + b_i."""
    _check_pair(T, S)
    d = T.order
    product = T.field.ops.mul(T.entries.reshape(T.shape + (1,) * d), S.entries.reshape((1,) * d + S.shape))
    interleaved = product.transpose([axis for i in range(d) for axis in (i, d + i)])
    return Tensor(T.field, interleaved.reshape(tuple(n * m for n, m in zip(T.shape, S.shape))))


def direct_sum(T: Tensor, S: Tensor) -> Tensor:
    """Block-diagonal placement of T and S; mixed blocks are zero."""
    _check_pair(T, S)
    out = np.zeros(tuple(n + m for n, m in zip(T.shape, S.shape)), dtype=np.int64)
    out[tuple(slice(0, n) for n in T.shape)] = T.entries
    out[tuple(slice(n, None) for n in T.shape)] = S.entries
    return Tensor(T.field, out)


def identity_tensor(n: int, d: int, f: FieldSpec) -> Tensor:
    if d < 2:
        raise ValueError(f"order must be at least 2, got {d}")
    arr = np.zeros((n,) * d, dtype=np.int64)
    arr[(np.arange(n),) * d] = 1
    return Tensor(f, arr)


def mode_product(field: FieldSpec, arr: np.ndarray, mode: int, mat: np.ndarray) -> np.ndarray:
    """Applies mat (n x m) to axis `mode` (of size m) of arr."""
    ops = field.ops
    moved = np.moveaxis(np.asarray(arr, dtype=np.int64), mode, -1)
    if mat.shape[1] != moved.shape[-1]:
        raise ValueError(f"matrix with {mat.shape[1]} columns cannot act on a mode of size {moved.shape[-1]}")
    if mat.shape[1] == 0:
        result = np.zeros(moved.shape[:-1] + (mat.shape[0],), dtype=np.int64)
    else:
        result = ops.sum(ops.mul(moved[..., None, :], mat), axis=-1)
    return np.moveaxis(result, -1, mode)


def apply_matrices(m: MatrixTuple, S: Tensor) -> Tensor:
    """(M_1 ⊗ ... ⊗ M_d) S."""
    if len(m) != S.order or m.field != S.field:
        raise ValueError(f"a {len(m)}-tuple over {m.field!r} cannot act on {S!r}")
    arr = S.entries
    for mode, mat in enumerate(m.mats):
        arr = mode_product(S.field, arr, mode, mat)
    return Tensor(S.field, arr)


def flatten(T: Tensor, k: int) -> np.ndarray:
    """n_k x (product of the other sizes); columns row-major over the other modes."""
    _check_mode(T, k)
    return np.moveaxis(T.entries, k, 0).reshape(T.shape[k], -1)


def mult_tensor(d: int, base: FieldSpec, l: int) -> Tensor:
    """T_{d,F} for F = GF(q^l) over GF(q), shape (l,) * d.

    Entry (i_1, ..., i_{d-1}, j) is coordinate j of x^(i_1 + ... + i_{d-1}).
    """
    if d < 2:
        raise ValueError(f"order must be at least 2, got {d}")
    ext = extension(base, l)
    coordinates = [ext.power_coordinates(e) for e in range((d - 1) * (l - 1) + 1)]
    arr = np.zeros((l,) * d, dtype=np.int64)
    for index in itertools.product(range(l), repeat=d - 1):
        arr[index] = coordinates[sum(index)]
    return Tensor(base, arr)


def matmul_tensor(n: int, f: FieldSpec) -> Tensor:
    """<n,n,n> in the trace convention T(A, B, C) = tr(ABC), composite index i * n + j."""
    if n < 1:
        raise ValueError(f"size must be at least 1, got {n}")
    arr = np.zeros((n * n,) * 3, dtype=np.int64)
    for i, j, l in itertools.product(range(n), repeat=3):
        arr[i * n + j, j * n + l, l * n + i] = 1
    return Tensor(f, arr)


def poly_mult_tensor(d: int, deg: int, f: FieldSpec) -> Tensor:
    """Multiplication of d-1 polynomials of degree <= deg, coefficients low degree first."""
    if d < 2 or deg < 0:
        raise ValueError(f"need d >= 2 and deg >= 0, got d={d}, deg={deg}")
    arr = np.zeros((deg + 1,) * (d - 1) + ((d - 1) * deg + 1,), dtype=np.int64)
    for index in itertools.product(range(deg + 1), repeat=d - 1):
        arr[index + (sum(index),)] = 1
    return Tensor(f, arr)


def base_change(T: Tensor, l: int) -> tuple[Tensor, Tensor]:
    """The native view over GF(q^l) and the Kronecker view T ⊠ T_{d,GF(q^l)} over GF(q)."""
    native = extend_scalars(T, l)
    kron = kronecker(T, mult_tensor(T.order, T.field, l))
    logger.debug("base change of %r to %r: kron shape %s", T, native.field, kron.shape)
    return native, kron


def extend_scalars(T: Tensor, l: int) -> Tensor:
    """T with its entries embedded into GF(q^l)."""
    ext = extension(T.field, l)
    return Tensor(ext.field, embedding_table(T.field, ext.field)[T.entries])


def random_tensor(shape, f: FieldSpec, rng: np.random.Generator) -> Tensor:
    return Tensor(f, rng.integers(0, f.q, size=tuple(shape), dtype=np.int64))


class TensorDocument(msgspec.Struct):
    """The tensor file format; entries are row-major element codes."""
    p: int
    k: int
    shape: list[int]
    entries: list[int]


def to_document(T: Tensor) -> TensorDocument:
    return TensorDocument(p=T.field.p, k=T.field.k, shape=list(T.shape), entries=T.flat())


def from_document(doc: TensorDocument) -> Tensor:
    try:
        return Tensor.from_flat(field_make(doc.p, doc.k), doc.shape, doc.entries)
    except ValueError as exc:
        raise TensorFormatError(f"invalid tensor document: {exc}") from exc


def decode_tensor(data: bytes) -> Tensor:
    try:
        doc = msgspec.json.decode(data, type=TensorDocument)
    except (msgspec.DecodeError, msgspec.ValidationError) as exc:
        raise TensorFormatError(f"unreadable tensor document: {exc}") from exc
    return from_document(doc)


def read_tensor(path: str | os.PathLike) -> Tensor:
    return decode_tensor(pathlib.Path(path).read_bytes())


def write_tensor(T: Tensor, path: str | os.PathLike) -> None:
    pathlib.Path(path).write_bytes(msgspec.json.encode(to_document(T)))
