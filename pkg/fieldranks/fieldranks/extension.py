# Copyright (c) 2024 Contributors
# All rights reserved.

from functools import cache

import numpy as np

from . import linalg
from .gf import FieldElem, FieldSpec, embed, field_make


class Extension:
    """GF(q^l) as an l-dimensional space over GF(q) with basis 1, x, ..., x^(l-1).

    x is the class of the indeterminate in the canonical GF(p^(kl)); GF(q) sits
    inside it through `embed`.
    """

    def __init__(self, base: FieldSpec, l: int):
        if l < 1:
            raise ValueError(f"extension degree must be at least 1, got {l}")
        self.base, self.l = base, l
        self.field = field_make(base.p, base.k * l)
        coeffs = [0] * self.field.k
        if self.field.k > 1:
            coeffs[1] = 1
        self.generator = FieldElem(self.field, tuple(coeffs))
        self._prime = field_make(base.p)
        columns = []
        for j in range(l):
            power = self.generator ** j
            for t in range(base.k):
                columns.append((embed(base, self.field, base.element(base.p ** t)) * power).coeffs)
        self._to_coordinates = linalg.inverse(self._prime, np.array(columns, dtype=np.int64).T)

    def coordinates(self, y: FieldElem) -> list[int]:
        """Codes of the GF(q) coordinates of y."""
        if y.field != self.field:
            raise ValueError(f"{y!r} is not an element of {self.field!r}")
        z = linalg.matmul(self._prime, self._to_coordinates, np.array(y.coeffs, dtype=np.int64)[:, None])[:, 0]
        k = self.base.k
        return [int(sum(int(z[j * k + t]) * self.base.p ** t for t in range(k))) for j in range(self.l)]

    def element(self, coords) -> FieldElem:
        result = self.field.zero
        for j, code in enumerate(coords):
            result = result + embed(self.base, self.field, self.base.element(int(code))) * self.generator ** j
        return result

    def power_coordinates(self, exponent: int) -> list[int]:
        return self.coordinates(self.generator ** exponent)


@cache
def extension(base: FieldSpec, l: int) -> Extension:
    return Extension(base, l)
