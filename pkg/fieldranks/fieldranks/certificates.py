# Copyright (c) 2024 Contributors
# All rights reserved.

"""Witnesses that make every rank claim re-verifiable.

A DecompCert lists factored terms whose sum is the tensor; a RestrictionCert
holds matrices mapping a source tensor onto a target tensor.
"""

from dataclasses import dataclass

import numpy as np

from .errors import VerificationFailed
from .gf import FieldSpec
from .tensor import MatrixTuple, Tensor, apply_matrices

KINDS = ("slice", "partition", "cp")


@dataclass(frozen=True, eq=False)
class Factor:
    """A tensor on a subset of modes (a vector when the subset is a singleton)."""
    modes: tuple[int, ...]
    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=np.int64)
        if entries.ndim != len(self.modes):
            raise ValueError(f"factor on modes {self.modes} has {entries.ndim} axes")
        entries.flags.writeable = False
        object.__setattr__(self, "modes", tuple(int(m) for m in self.modes))
        object.__setattr__(self, "entries", entries)

    def to_dict(self) -> dict:
        return {"modes": list(self.modes), "shape": list(self.entries.shape),
                "entries": [int(x) for x in self.entries.reshape(-1)]}


@dataclass(frozen=True, eq=False)
class DecompTerm:
    factors: tuple[Factor, ...]

    def assemble(self, field: FieldSpec, order: int) -> Tensor:
        ops = field.ops
        arr = np.ones((), dtype=np.int64)
        modes: list[int] = []
        for factor in self.factors:
            arr = ops.mul(arr.reshape(arr.shape + (1,) * factor.entries.ndim),
                          factor.entries.reshape((1,) * arr.ndim + factor.entries.shape))
            modes.extend(factor.modes)
        if sorted(modes) != list(range(order)):
            raise ValueError(f"term factors cover modes {modes}, expected each of 0..{order - 1} once")
        return Tensor(field, arr.transpose([modes.index(i) for i in range(order)]))


@dataclass(frozen=True, eq=False)
class DecompCert:
    """T = sum of terms; slice terms pair a vector with a tensor on the other modes,
    partition terms pair tensors across a bipartition, cp terms are pure products."""
    kind: str
    field: FieldSpec
    shape: tuple[int, ...]
    terms: tuple[DecompTerm, ...]

    def __post_init__(self):
        object.__setattr__(self, "shape", tuple(self.shape))
        object.__setattr__(self, "terms", tuple(self.terms))
        if self.kind not in KINDS:
            raise ValueError(f"unknown decomposition kind {self.kind!r}")
        d = len(self.shape)
        for term in self.terms:
            sizes = sorted(len(f.modes) for f in term.factors)
            match self.kind:
                case "slice" if len(sizes) != 2 or sizes[0] != 1:
                    raise ValueError("slice terms need a singleton factor and its complement")
                case "partition" if len(sizes) != 2:
                    raise ValueError("partition terms need exactly two factors")
                case "cp" if sizes != [1] * d:
                    raise ValueError("cp terms need one vector per mode")

    @property
    def rank(self) -> int:
        return len(self.terms)

    def assemble(self) -> Tensor:
        total = Tensor.zeros(self.field, self.shape)
        for term in self.terms:
            total = total + term.assemble(self.field, len(self.shape))
        return total

    def verify(self, T: Tensor) -> bool:
        return T.field == self.field and T.shape == self.shape and self.assemble() == T

    def check(self, T: Tensor) -> "DecompCert":
        if not self.verify(T):
            raise VerificationFailed(f"{self.kind} decomposition with {self.rank} terms does not reassemble {T!r}")
        return self

    def to_dict(self) -> dict:
        return {"kind": self.kind, "field": self.field.to_dict(), "shape": list(self.shape),
                "terms": [[f.to_dict() for f in term.factors] for term in self.terms]}


def pure_term(vectors) -> DecompTerm:
    return DecompTerm(tuple(Factor((i,), v) for i, v in enumerate(vectors)))


@dataclass(frozen=True, eq=False)
class RestrictionCert:
    """apply_matrices(mats, source) == target."""
    mats: MatrixTuple
    source: Tensor
    target: Tensor

    def verify(self) -> bool:
        try:
            return apply_matrices(self.mats, self.source) == self.target
        except ValueError:
            return False

    def check(self) -> "RestrictionCert":
        if not self.verify():
            raise VerificationFailed(f"restriction of {self.source!r} does not give {self.target!r}")
        return self

    def to_dict(self) -> dict:
        return {"field": self.source.field.to_dict(), "source_shape": list(self.source.shape),
                "target_shape": list(self.target.shape), "mats": self.mats.rows()}
