from __future__ import annotations

import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from mwk.errors import DomainError
from mwk.exact import (
    GF,
    QQ,
    MPoly,
    Poly,
    RationalFunctionField,
    expand_factorization,
    factor,
    factor_int,
    is_irreducible,
    is_prime,
    mat_det,
    mat_inv,
    mat_mul,
    normal_form,
    poly_gcd,
    poly_xgcd,
    rational_roots,
    squarefree_decomposition,
)

PRIME_POWERS = [2, 3, 4, 5, 7, 8, 9, 25, 27]

coeff_lists = st.lists(st.integers(-20, 20), min_size=1, max_size=7)


def test_prime_helpers():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert factor_int(360) == {2: 3, 3: 2, 5: 1}


@pytest.mark.parametrize("q", PRIME_POWERS)
def test_finite_field_is_a_field(q):
    F = GF(q)
    elems = list(F.elements())
    assert len(elems) == q
    units = [x for x in elems if x]
    for x in units:
        assert x * x.inverse() == F.one
        assert x ** (q - 1) == F.one
    # Frobenius is additive
    p = F.characteristic
    for x, y in zip(elems, reversed(elems)):
        assert (x + y) ** p == x ** p + y ** p


@pytest.mark.parametrize("q", [3, 5, 7, 9, 25])
def test_squares_are_half_the_units(q):
    F = GF(q)
    squares = {x * x for x in F.elements() if x}
    assert len(squares) == (q - 1) // 2
    for x in F.elements():
        if x:
            assert F.is_square(x) == (x in squares)
            if x in squares:
                r = F.sqrt(x)
                assert r * r == x
    assert not F.is_square(F.nonsquare())


@pytest.mark.parametrize("q", [2, 4, 8])
def test_everything_is_a_square_in_char_2(q):
    F = GF(q)
    assert all(F.is_square(x) for x in F.elements())


@given(coeff_lists, coeff_lists)
def test_polynomial_division_identity(a, b):
    F = GF(7)
    A, B = Poly(F, a), Poly(F, b)
    if not B:
        return
    qt, r = divmod(A, B)
    assert qt * B + r == A
    assert not r or r.degree < B.degree


@given(coeff_lists, coeff_lists)
def test_xgcd_bezout(a, b):
    F = GF(5)
    A, B = Poly(F, a), Poly(F, b)
    if not A and not B:
        return
    g, s, t = poly_xgcd(A, B)
    assert s * A + t * B == g
    assert g == poly_gcd(A, B)
    if A:
        assert not (A % g)


def _roots_by_search(f: Poly) -> set:
    return {x for x in f.field.elements() if not f(x)}


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 3, 4, 5, 7, 9]), st.lists(st.integers(0, 50), min_size=2, max_size=9), st.integers(0, 10))
def test_factorization_over_finite_fields(q, cs, seed):
    F = GF(q)
    elems = list(F.elements())
    f = Poly(F, [elems[c % q] for c in cs])
    if f.degree < 1:
        return
    unit, facs = factor(f, seed=seed)
    assert expand_factorization(unit, facs) == f
    for g, _ in facs:
        assert g.is_monic() and is_irreducible(g)
    # linear factors match the roots found by exhaustive search
    linear = {-g.coeffs[0] for g, _ in facs if g.degree == 1}
    assert linear == _roots_by_search(f)


def test_irreducibility_by_counting():
    # number of monic irreducible quadratics over F_q is (q^2 - q) / 2
    for q in (2, 3, 5):
        F = GF(q)
        elems = list(F.elements())
        count = sum(is_irreducible(Poly(F, [a, b, F.one])) for a, b in product(elems, repeat=2))
        assert count == (q * q - q) // 2


def test_squarefree_decomposition_inseparable():
    F = GF(3)
    x = Poly.x(F)
    f = (x ** 3 + Poly.const(F, 1)) * (x + Poly.const(F, 2)) ** 2
    unit, parts = squarefree_decomposition(f)
    rebuilt = Poly.const(F, unit)
    for g, m in parts:
        rebuilt = rebuilt * g ** m
    assert rebuilt == f


def test_rational_roots():
    x = Poly.x(QQ)
    f = (x - Poly.const(QQ, Fraction(1, 2))) * (x + Poly.const(QQ, 3)) * (x * x + Poly.const(QQ, 1))
    roots = sorted(r.v for r in rational_roots(f))
    assert roots == [Fraction(-3), Fraction(1, 2)]


def test_factor_over_q_needs_rational_roots_only():
    x = Poly.x(QQ)
    f = (x - Poly.const(QQ, 1)) * (x * x - Poly.const(QQ, 2))
    unit, facs = factor(f)
    assert expand_factorization(unit, facs) == f


def test_rational_function_field():
    K = RationalFunctionField(GF(5), "t")
    t = K.gen()
    a = (t * t + 1) / (t - 2)
    assert a * (t - 2) == t * t + 1
    assert a / a == K.one
    with pytest.raises((DomainError, ZeroDivisionError)):
        a / K.zero
    assert K.format((t + 1) / (t * t + 2)) == "(t+1)/(t^2+2)"


def test_matrices():
    F = GF(7)
    A = [[F(2), F(3)], [F(1), F(4)]]
    assert mat_det(A, F) == F(5)
    inv = mat_inv(A, F)
    assert mat_mul(A, inv, F) == [[F.one, F.zero], [F.zero, F.one]]


def test_triangular_normal_form():
    F = GF(5)
    t1, t2 = MPoly.var(F, 2, 0), MPoly.var(F, 2, 1)
    T = [t1 ** 2 - MPoly.const(F, 2, 2), t2 ** 2 - t1]
    # t2^4 = t1^2 = 2
    assert normal_form(t2 ** 4, T) == MPoly.const(F, 2, 2)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.integers(0, 10 ** 6))
def test_function_field_gcd_matches_euclid(p, seed):
    rng = random.Random(seed)
    K = RationalFunctionField(GF(p), "s")
    k = K.base

    def coeff():
        num = Poly(k, [k.random_element(rng) for _ in range(3)])
        return K(num) / K(Poly(k, [k.random_unit(rng), k.one]))

    def monic(d):
        return Poly(K, [coeff() for _ in range(d)] + [K.one])

    g = monic(rng.randint(0, 2))
    a, b = g * monic(rng.randint(0, 2)), g * monic(rng.randint(1, 3))
    x, y = a, b
    while y:
        x, y = y, x % y
    G = poly_gcd(a, b)
    assert G == x.monic()
    assert not (G % g)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([3, 5, 7]), st.integers(0, 10 ** 6))
def test_normal_form_is_idempotent_and_multiplicative(q, seed):
    rng = random.Random(seed)
    F = GF(q)
    t1, t2 = MPoly.var(F, 2, 0), MPoly.var(F, 2, 1)
    T = [t1 ** 2 - MPoly.const(F, 2, 2), t2 ** 3 - t1 * t2 - MPoly.const(F, 2, 1)]

    def rand():
        p = MPoly.const(F, 2, 0)
        for _ in range(4):
            p = p + MPoly.const(F, 2, F.random_element(rng)) * t1 ** rng.randint(0, 4) * t2 ** rng.randint(0, 5)
        return p

    a, b = rand(), rand()
    na, nb = normal_form(a, T), normal_form(b, T)
    assert normal_form(na, T) == na
    assert normal_form(a * b, T) == normal_form(na * nb, T)
    assert normal_form(a + b, T) == na + nb
