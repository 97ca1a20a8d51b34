# Copyright (c) 2024 Contributors
# All rights reserved.

"""Explicit certificates for multiplication tensors of field extensions.

Polynomials of degree < l are stored by their coefficient vectors, which are
also the coordinates of GF(q^l) in the basis 1, x, ..., x^(l-1); reduction
modulo the canonical modulus is the only map between the two worlds.
"""

import logging
from dataclasses import dataclass

import numpy as np

from . import linalg
from .certificates import DecompCert, RestrictionCert, pure_term
from .extension import extension
from .gf import FieldSpec
from .subspace import TensorSubspace
from .tensor import MatrixTuple, Tensor, identity_tensor, mult_tensor, poly_mult_tensor

logger = logging.getLogger(__name__)


def _powers(f: FieldSpec, points: list[int], count: int) -> np.ndarray:
    """rows[a][i] = points[a] ** i as element codes."""
    return np.array([[(f.element(b) ** i).code for i in range(count)] for b in points], dtype=np.int64)


def _interpolation_points(f: FieldSpec, count: int, what: str) -> list[int]:
    if f.q < count:
        raise ValueError(f"{what} needs {count} distinct points, but {f!r} has only {f.q} elements")
    return list(range(count))


def reduction_matrix(f: FieldSpec, l: int, degree: int) -> np.ndarray:
    """l x (degree + 1) matrix whose column i holds the coordinates of x^i in GF(q^l)."""
    ext = extension(f, l)
    return np.array([ext.power_coordinates(i) for i in range(degree + 1)], dtype=np.int64).T


@dataclass(frozen=True, eq=False)
class InterpDecomp:
    """N + 1 pure terms for multiplying d - 1 polynomials of degree < l, N = (d-1)(l-1)."""
    d: int
    l: int
    points: tuple[int, ...]
    terms: DecompCert

    @property
    def n_points(self) -> int:
        return len(self.points)

    def to_dict(self) -> dict:
        return {"d": self.d, "l": self.l, "points": list(self.points), "terms": self.terms.to_dict()}


def interp_decomp(d: int, l: int, f: FieldSpec) -> InterpDecomp:
    """Evaluate every input at N + 1 points, multiply, and interpolate back.

    Term j pairs the evaluation vector (a_j^0, ..., a_j^(l-1)) on each input
    mode with column j of the inverse Vandermonde matrix on the output mode.
    """
    if d < 2 or l < 1:
        raise ValueError(f"need d >= 2 and l >= 1, got d={d}, l={l}")
    n = (d - 1) * (l - 1)
    points = _interpolation_points(f, n + 1, "interpolation")
    vandermonde = _powers(f, points, n + 1)
    inverse = linalg.inverse(f, vandermonde)
    evaluations = vandermonde[:, :l]
    terms = tuple(pure_term([evaluations[j]] * (d - 1) + [inverse[:, j]]) for j in range(n + 1))
    target = poly_mult_tensor(d, l - 1, f)
    cert = DecompCert("cp", f, target.shape, terms).check(target)
    logger.info("interpolation decomposition of M_%d over %r with %d terms", d, f, cert.rank)
    return InterpDecomp(d=d, l=l, points=tuple(points), terms=cert)


def pushforward_to_extension(dec: InterpDecomp, d: int, l: int, f: FieldSpec) -> DecompCert:
    """Reduces the output factor of every term modulo the modulus of GF(q^l)."""
    if (dec.d, dec.l) != (d, l) or dec.terms.field != f:
        raise ValueError(f"decomposition for d={dec.d}, l={dec.l} over {dec.terms.field!r} cannot be pushed "
                         f"to d={d}, l={l} over {f!r}")
    reduction = reduction_matrix(f, l, (d - 1) * (l - 1))
    terms = []
    for term in dec.terms.terms:
        vectors = [factor.entries for factor in term.factors]
        vectors[-1] = linalg.matmul(f, reduction, vectors[-1][:, None])[:, 0]
        terms.append(pure_term(vectors))
    target = mult_tensor(d, f, l)
    return DecompCert("cp", f, target.shape, tuple(terms)).check(target)


def subrank_cert_interpolation(d: int, l: int, f: FieldSpec) -> RestrictionCert:
    """Id_(m+1) ⪯ T_{d,GF(q^l)} with m = floor((l-1)/(d-1)).

    Inputs are read as polynomials of degree <= m through the inverse
    Vandermonde matrix at m + 1 points; the output is evaluated at them.
    """
    if d < 2 or l < 1:
        raise ValueError(f"need d >= 2 and l >= 1, got d={d}, l={l}")
    m = (l - 1) // (d - 1)
    points = _interpolation_points(f, m + 1, "the subrank certificate")
    square = _powers(f, points, m + 1)
    lift = np.zeros((m + 1, l), dtype=np.int64)
    lift[:, :m + 1] = linalg.inverse(f, square).T
    evaluate = _powers(f, points, l)
    mats = MatrixTuple(f, (lift,) * (d - 1) + (evaluate,))
    cert = RestrictionCert(mats, mult_tensor(d, f, l), identity_tensor(m + 1, d, f)).check()
    logger.info("Id_%d restricts from T_%d over GF(%d^%d)", m + 1, d, f.q, l)
    return cert


def tw_tensor(W: TensorSubspace) -> Tensor:
    """sum_j T_j ⊗ (sum_i e_ij ⊗ e_ij) with two new modes of size m * n.

    m is the largest mode size and n = dim W; e_ij has composite index j * m + i.
    """
    if W.dim == 0:
        raise ValueError("the tensor of a subspace needs a nonzero subspace")
    m, n = max(W.shape), W.dim
    arr = np.zeros(W.shape + (m * n, m * n), dtype=np.int64)
    for j, T in enumerate(W.basis):
        for i in range(m):
            index = j * m + i
            arr[..., index, index] = T.entries
    return Tensor(W.field, arr)


@dataclass(frozen=True, eq=False)
class MonotonicityReport:
    """T_{d,GF(q^n)} ⪯ M_{d,n} ⪯ T_{d,GF(q^l)} with both restrictions verified."""
    d: int
    n: int
    l: int
    field: FieldSpec
    extension_from_polynomials: RestrictionCert
    polynomials_from_extension: RestrictionCert

    def to_dict(self) -> dict:
        return {"d": self.d, "n": self.n, "l": self.l, "field": self.field.to_dict(),
                "extension_from_polynomials": self.extension_from_polynomials.to_dict(),
                "polynomials_from_extension": self.polynomials_from_extension.to_dict()}


def poly_monotonicity_check(d: int, n: int, l: int, f: FieldSpec) -> MonotonicityReport:
    """Builds both restrictions of the chain; needs (l - 1) >= (d - 1)(n - 1)."""
    if d < 2 or n < 1 or l < 1:
        raise ValueError(f"need d >= 2, n >= 1 and l >= 1, got d={d}, n={n}, l={l}")
    degree = (d - 1) * (n - 1)
    if l - 1 < degree:
        raise ValueError(f"(l-1)={l - 1} is below (d-1)(n-1)={degree}")
    polys = poly_mult_tensor(d, n - 1, f)
    small, large = mult_tensor(d, f, n), mult_tensor(d, f, l)
    identity = np.eye(n, dtype=np.int64)
    reduce = MatrixTuple(f, (identity,) * (d - 1) + (reduction_matrix(f, n, degree),))
    extension_from_polynomials = RestrictionCert(reduce, polys, small).check()
    truncate = np.eye(n, l, dtype=np.int64)
    project = MatrixTuple(f, (truncate,) * (d - 1) + (np.eye(degree + 1, l, dtype=np.int64),))
    polynomials_from_extension = RestrictionCert(project, large, polys).check()
    logger.info("restriction chain verified for d=%d, n=%d, l=%d over %r", d, n, l, f)
    return MonotonicityReport(d=d, n=n, l=l, field=f, extension_from_polynomials=extension_from_polynomials,
                              polynomials_from_extension=polynomials_from_extension)
