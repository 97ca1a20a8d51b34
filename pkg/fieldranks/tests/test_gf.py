import itertools

import numpy as np
import pytest

import sys
import pathlib
sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent))
from fieldranks.errors import GuardExceeded
from fieldranks.gf import (arith, embed, embedding_table, enumerate_elements, field_make, field_of_order,
                           trace_and_character)

SMALL_ORDERS = [2, 3, 4, 5, 7, 8, 9]


def test_canonical_moduli():
    assert field_make(2).modulus == (0, 1), "prime fields use the modulus x"
    assert field_make(2, 2).modulus == (1, 1, 1), "GF(4) is defined by x^2 + x + 1"
    assert field_make(3, 2).modulus == (1, 0, 1), "GF(9) is defined by x^2 + 1"
    assert field_make(2, 3).modulus == (1, 0, 1, 1), "GF(8) is defined by x^3 + x^2 + 1"


def test_field_make_is_cached():
    assert field_make(2, 2) is field_make(2, 2), "the same field object should come back on every call"


def test_field_make_rejects_bad_parameters():
    with pytest.raises(ValueError):
        field_make(4)
    with pytest.raises(ValueError):
        field_make(2, 0)


def test_field_of_order():
    assert field_of_order(8) == field_make(2, 3)
    assert field_of_order(9) == field_make(3, 2)
    assert field_of_order(7) == field_make(7)
    for q in (1, 6, 12):
        with pytest.raises(ValueError):
            field_of_order(q)


def test_gf4_arithmetic():
    f = field_make(2, 2)
    alpha = f.element(2)
    assert alpha + alpha == f.zero, "characteristic 2"
    assert alpha * alpha == f.element(3), "alpha^2 = alpha + 1"
    assert alpha.inverse() == f.element(3), "alpha * (alpha + 1) = 1"
    assert arith(alpha, None, "inv") == f.element(3)
    assert arith(alpha, f.one, "add") == f.element(3)
    assert arith(alpha, None, "neg") == alpha


def test_arith_errors():
    f, g = field_make(2, 2), field_make(3)
    with pytest.raises(ZeroDivisionError):
        arith(f.zero, None, "inv")
    with pytest.raises(ValueError):
        arith(f.one, g.one, "add")
    with pytest.raises(ValueError):
        arith(f.one, f.one, "div")
    with pytest.raises(ValueError):
        f.element(4)


@pytest.mark.parametrize("q", SMALL_ORDERS)
def test_field_axioms(q):
    f = field_of_order(q)
    elements = enumerate_elements(f)
    for a, b in itertools.product(elements, repeat=2):
        assert a + b == b + a and a * b == b * a, f"commutativity fails for {a}, {b}"
        assert (a - b) + b == a
    for a in elements[1:]:
        assert a * a.inverse() == f.one, f"{a} times its inverse is not one"
    for a, b, c in itertools.product(elements[:4], repeat=3):
        assert a * (b + c) == a * b + a * c


@pytest.mark.parametrize("q", SMALL_ORDERS)
def test_frobenius_fixes_everything_after_k_steps(q):
    f = field_of_order(q)
    for a in enumerate_elements(f):
        image = a
        for _ in range(f.k):
            image = image.frobenius()
        assert image == a, f"x^(p^k) should equal x for {a}"
        assert a ** q == a


def test_enumerate_elements_order():
    f = field_make(2, 2)
    elements = enumerate_elements(f)
    assert [e.code for e in elements] == [0, 1, 2, 3]
    assert [e.coeffs for e in elements] == [(0, 0), (1, 0), (0, 1), (1, 1)], "low digit runs fastest"


def test_trace_examples():
    trace, character = trace_and_character(field_make(2).one)
    assert trace == 1
    assert abs(character - (-1)) < 1e-12, "chi(1) over GF(2) is -1"
    trace, _ = trace_and_character(field_make(2, 2).element(2))
    assert trace == 1, "Tr(alpha) = alpha + alpha^2 = 1 in GF(4)"


@pytest.mark.parametrize("q", [4, 8, 9])
def test_character_is_additive(q):
    f = field_of_order(q)
    elements = enumerate_elements(f)
    for a, b in itertools.product(elements, repeat=2):
        assert abs(trace_and_character(a + b)[1] - trace_and_character(a)[1] * trace_and_character(b)[1]) < 1e-9


@pytest.mark.parametrize("q", SMALL_ORDERS)
def test_character_orthogonality(q):
    f = field_of_order(q)
    total = sum(trace_and_character(x)[1] for x in enumerate_elements(f))
    assert abs(total) < 1e-9, "a nontrivial character sums to zero"
    assert abs(trace_and_character(f.zero)[1] - 1) < 1e-12


@pytest.mark.parametrize("src, dst", [((2, 1), (2, 2)), ((3, 1), (3, 2)), ((2, 2), (2, 4)), ((2, 1), (2, 3))])
def test_embedding_is_a_ring_homomorphism(src, dst):
    source, target = field_make(*src), field_make(*dst)
    elements = enumerate_elements(source)
    assert embed(source, target, source.one) == target.one
    for a, b in itertools.product(elements, repeat=2):
        assert embed(source, target, a + b) == embed(source, target, a) + embed(source, target, b)
        assert embed(source, target, a * b) == embed(source, target, a) * embed(source, target, b)


def test_embedding_uses_smallest_root():
    source, target = field_make(2, 2), field_make(2, 4)
    roots = [y for y in enumerate_elements(target) if not (y * y + y + target.one)]
    assert embed(source, target, source.element(2)) == roots[0], "alpha goes to the smallest root of x^2 + x + 1"


def test_embedding_rejects_non_subfields():
    with pytest.raises(ValueError):
        embed(field_make(2, 2), field_make(2, 3), field_make(2, 2).one)
    with pytest.raises(ValueError):
        embed(field_make(2), field_make(3, 2), field_make(2).one)


def test_embedding_table_matches_embed():
    source, target = field_make(3), field_make(3, 2)
    assert embedding_table(source, target).tolist() == [embed(source, target, x).code
                                                       for x in enumerate_elements(source)]


@pytest.mark.parametrize("q", SMALL_ORDERS)
def test_vectorized_ops_agree_with_elements(q):
    f = field_of_order(q)
    ops = f.ops
    codes = np.arange(q)
    a, b = np.meshgrid(codes, codes, indexing="ij")
    products, sums = ops.mul(a, b), ops.add(a, b)
    for x, y in itertools.product(range(q), repeat=2):
        assert products[x, y] == (f.element(x) * f.element(y)).code
        assert sums[x, y] == (f.element(x) + f.element(y)).code
    assert ops.inv(codes[1:]).tolist() == [f.element(x).inverse().code for x in range(1, q)]
    assert ops.trace(codes).tolist() == [trace_and_character(f.element(x))[0] for x in range(q)]


def test_ops_guard_on_large_extension_fields():
    with pytest.raises(GuardExceeded):
        field_make(2, 11).ops
