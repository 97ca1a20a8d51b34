# Copyright (c) 2024 Contributors
# All rights reserved.

"""Exact arithmetic in GF(p^k).

A field is fixed by (p, k): its modulus is the lexicographically smallest monic
irreducible of degree k over Z_p, coefficients compared low degree first.
Elements are coefficient vectors in the basis 1, x, ..., x^(k-1) and are encoded
for I/O and for numpy kernels as the integer sum(coeffs[i] * p**i).
"""

import cmath
import itertools
import logging
from functools import cache

import msgspec
import numpy as np

from .errors import GuardExceeded

logger = logging.getLogger(__name__)

MAX_DEGREE = 12
MAX_TABLE_ORDER = 1024


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, int(n ** 0.5) + 1))


def _poly_rem(f: list[int], g: tuple[int, ...], p: int) -> list[int]:
    """Remainder of f modulo the monic polynomial g, both low degree first."""
    r = [c % p for c in f]
    dg = len(g) - 1
    for i in range(len(r) - 1, dg - 1, -1):
        c = r[i]
        if c:
            for j in range(dg + 1):
                r[i - dg + j] = (r[i - dg + j] - c * g[j]) % p
    return (r + [0] * dg)[:dg]


def _poly_mul(a, b, p: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return out


def _is_irreducible(coeffs: tuple[int, ...], p: int) -> bool:
    k = len(coeffs) - 1
    if k == 1:
        return True
    for degree in range(1, k // 2 + 1):
        for tail in itertools.product(range(p), repeat=degree):
            if not any(_poly_rem(list(coeffs), tail + (1,), p)):
                return False
    return True


class FieldSpec(msgspec.Struct, frozen=True):
    """GF(p^k) with its canonical modulus (k+1 coefficients, low degree first)."""
    p: int
    k: int
    modulus: tuple[int, ...]

    @property
    def q(self) -> int:
        return self.p ** self.k

    @property
    def ops(self) -> "FieldOps":
        return field_ops(self)

    def element(self, code: int) -> "FieldElem":
        code = int(code)
        if not 0 <= code < self.q:
            raise ValueError(f"{code} does not encode an element of GF({self.q})")
        return FieldElem(self, tuple((code // self.p ** i) % self.p for i in range(self.k)))

    @property
    def zero(self) -> "FieldElem":
        return self.element(0)

    @property
    def one(self) -> "FieldElem":
        return self.element(1)

    def to_dict(self) -> dict:
        return {"p": self.p, "k": self.k}

    def __repr__(self) -> str:
        return f"GF({self.p}^{self.k})" if self.k > 1 else f"GF({self.p})"


@cache
def field_make(p: int, k: int = 1) -> FieldSpec:
    """Returns the canonical GF(p^k)."""
    if not is_prime(p):
        raise ValueError(f"characteristic {p} is not prime")
    if k < 1:
        raise ValueError(f"extension degree must be at least 1, got {k}")
    if k > MAX_DEGREE:
        raise ValueError(f"extension degree {k} is above the supported {MAX_DEGREE}")
    for tail in itertools.product(range(p), repeat=k):
        candidate = tail + (1,)
        if _is_irreducible(candidate, p):
            logger.debug("GF(%d^%d) modulus %s", p, k, candidate)
            return FieldSpec(p, k, candidate)
    raise AssertionError(f"no irreducible polynomial of degree {k} over Z_{p}")


def field_of_order(q: int) -> FieldSpec:
    """The canonical field with q elements; q must be a prime power."""
    for p in range(2, q + 1):
        if q % p == 0:
            k, rest = 0, q
            while rest % p == 0:
                rest //= p
                k += 1
            if rest != 1:
                break
            return field_make(p, k)
    raise ValueError(f"{q} is not a prime power")


class FieldElem(msgspec.Struct, frozen=True):
    field: FieldSpec
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.field.k or any(not 0 <= c < self.field.p for c in self.coeffs):
            raise ValueError(f"{self.coeffs} is not a coefficient vector of {self.field!r}")

    @property
    def code(self) -> int:
        return sum(c * self.field.p ** i for i, c in enumerate(self.coeffs))

    def _same_field(self, other: "FieldElem") -> None:
        if other.field != self.field:
            raise ValueError(f"mismatched fields {self.field!r} and {other.field!r}")

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def __add__(self, other: "FieldElem") -> "FieldElem":
        self._same_field(other)
        p = self.field.p
        return FieldElem(self.field, tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "FieldElem":
        p = self.field.p
        return FieldElem(self.field, tuple((-a) % p for a in self.coeffs))

    def __sub__(self, other: "FieldElem") -> "FieldElem":
        return self + (-other)

    def __mul__(self, other: "FieldElem") -> "FieldElem":
        self._same_field(other)
        f = self.field
        product = _poly_mul(self.coeffs, other.coeffs, f.p)
        return FieldElem(f, tuple(_poly_rem(product, f.modulus, f.p)))

    def __pow__(self, exponent: int) -> "FieldElem":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result, base = self.field.one, self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def inverse(self) -> "FieldElem":
        if not self:
            raise ZeroDivisionError(f"zero has no inverse in {self.field!r}")
        return self ** (self.field.q - 2)

    def frobenius(self) -> "FieldElem":
        return self ** self.field.p

    def __repr__(self) -> str:
        return f"{self.field!r}:{self.code}"


def arith(a: FieldElem, b: FieldElem | None, op: str) -> FieldElem:
    """Applies one of add, sub, mul, inv, neg; unary operations ignore b."""
    match op:
        case "add":
            return a + b
        case "sub":
            return a - b
        case "mul":
            return a * b
        case "inv":
            return a.inverse()
        case "neg":
            return -a
        case _:
            raise ValueError(f"unknown field operation {op!r}")


def trace_and_character(x: FieldElem) -> tuple[int, complex]:
    """Tr(x) = sum of x^(p^i) for i < k, and chi(x) = exp(2 pi i Tr(x) / p)."""
    total, conjugate = x, x
    for _ in range(x.field.k - 1):
        conjugate = conjugate.frobenius()
        total = total + conjugate
    trace = total.coeffs[0]
    assert not any(total.coeffs[1:]), "trace left the prime field"
    return trace, cmath.exp(2j * cmath.pi * trace / x.field.p)


@cache
def _embedding_root(src: FieldSpec, dst: FieldSpec) -> FieldElem:
    for candidate in enumerate_elements(dst):
        value, power = dst.zero, dst.one
        for c in src.modulus:
            value = value + dst.element(c) * power
            power = power * candidate
        if not value:
            return candidate
    raise AssertionError(f"{src!r} modulus has no root in {dst!r}")


def _check_embeddable(src: FieldSpec, dst: FieldSpec) -> None:
    if src.p != dst.p or dst.k % src.k:
        raise ValueError(f"{src!r} does not embed in {dst!r}")


def embed(src: FieldSpec, dst: FieldSpec, x: FieldElem) -> FieldElem:
    """Sends the generator of src to the smallest root of src's modulus in dst."""
    _check_embeddable(src, dst)
    if x.field != src:
        raise ValueError(f"{x!r} is not an element of {src!r}")
    root = _embedding_root(src, dst)
    result, power = dst.zero, dst.one
    for c in x.coeffs:
        result = result + dst.element(c) * power
        power = power * root
    return result


@cache
def embedding_table(src: FieldSpec, dst: FieldSpec) -> np.ndarray:
    """Codes of embed(src, dst, x) indexed by the code of x."""
    table = np.array([embed(src, dst, x).code for x in enumerate_elements(src)], dtype=np.int64)
    table.flags.writeable = False
    return table


def enumerate_elements(f: FieldSpec) -> list[FieldElem]:
    """All elements in lexicographic coefficient order, low digit fastest."""
    return [f.element(code) for code in range(f.q)]


class FieldOps:
    """Vectorized arithmetic on numpy arrays of encoded elements.

    Prime fields use modular integer arithmetic. Extension fields add digit-wise
    and multiply through a q x q table, so they are limited to q <= MAX_TABLE_ORDER.
    """

    def __init__(self, field: FieldSpec):
        self.field = field
        self.p, self.k, self.q = field.p, field.k, field.q
        self.powers = self.p ** np.arange(self.k, dtype=np.int64)
        if self.k == 1:
            self._mul = None
            self._inv = np.array([pow(a, self.p - 2, self.p) if a else 0 for a in range(self.p)], dtype=np.int64)
            self._trace = np.arange(self.p, dtype=np.int64)
        else:
            if self.q > MAX_TABLE_ORDER:
                raise GuardExceeded(f"multiplication table of {field!r}", self.q, MAX_TABLE_ORDER)
            self._mul = self._multiplication_table()
            self._inv = np.argmax(self._mul == 1, axis=1).astype(np.int64)
            self._trace = self._trace_table()

    def _multiplication_table(self) -> np.ndarray:
        p, k = self.p, self.k
        companion = np.zeros((k, k), dtype=np.int64)
        for i in range(k - 1):
            companion[i + 1, i] = 1
        companion[:, k - 1] = [(-c) % p for c in self.field.modulus[:k]]
        powers_of_x = [np.eye(k, dtype=np.int64)]
        for _ in range(k - 1):
            powers_of_x.append(companion @ powers_of_x[-1] % p)
        digits = self.digits(np.arange(self.q))
        by_element = np.einsum("at,tij->aij", digits, np.stack(powers_of_x)) % p
        table = np.empty((self.q, self.q), dtype=np.int64)
        for start in range(0, self.q, 64):
            block = np.einsum("aij,bj->abi", by_element[start:start + 64], digits) % p
            table[start:start + 64] = block @ self.powers
        return table

    def _trace_table(self) -> np.ndarray:
        everything = np.arange(self.q, dtype=np.int64)
        total, conjugate = everything.copy(), everything.copy()
        for _ in range(self.k - 1):
            power = np.ones(self.q, dtype=np.int64)
            for _ in range(self.p):
                power = self._mul[power, conjugate]
            conjugate = power
            total = self.add(total, conjugate)
        assert (total < self.p).all(), "trace left the prime field"
        return total

    def digits(self, a) -> np.ndarray:
        return (np.asarray(a, dtype=np.int64)[..., None] // self.powers) % self.p

    def encode(self, digits: np.ndarray) -> np.ndarray:
        return (digits % self.p) @ self.powers

    def add(self, a, b) -> np.ndarray:
        if self.k == 1:
            return (np.asarray(a) + np.asarray(b)) % self.p
        return self.encode(self.digits(a) + self.digits(b))

    def neg(self, a) -> np.ndarray:
        if self.k == 1:
            return (-np.asarray(a)) % self.p
        return self.encode(-self.digits(a))

    def sub(self, a, b) -> np.ndarray:
        if self.k == 1:
            return (np.asarray(a) - np.asarray(b)) % self.p
        return self.encode(self.digits(a) - self.digits(b))

    def mul(self, a, b) -> np.ndarray:
        if self.k == 1:
            return (np.asarray(a) * np.asarray(b)) % self.p
        return self._mul[np.asarray(a), np.asarray(b)]

    def inv(self, a) -> np.ndarray:
        a = np.asarray(a)
        if (a == 0).any():
            raise ZeroDivisionError(f"zero has no inverse in {self.field!r}")
        return self._inv[a]

    def sum(self, a, axis: int) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        axis %= a.ndim
        if self.k == 1:
            return a.sum(axis=axis) % self.p
        return self.encode(self.digits(a).sum(axis=axis))

    def trace(self, a) -> np.ndarray:
        return self._trace[a]

    def contract(self, a: np.ndarray, axis: int, vector) -> np.ndarray:
        """Contracts one axis of a with a coordinate vector."""
        a = np.moveaxis(np.asarray(a, dtype=np.int64), axis, -1)
        return self.sum(self.mul(a, np.asarray(vector, dtype=np.int64)), axis=-1)


@cache
def field_ops(field: FieldSpec) -> FieldOps:
    return FieldOps(field)
