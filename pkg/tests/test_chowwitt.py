from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from mwk.chowwitt import (
    Curve,
    QuadraticDivisor,
    a1_decompose,
    a1_lift,
    constant_lift,
    cycle_degree,
    finite_support,
    forget_divisor,
    hyper_divisor,
    pb1_class,
    pb1_equal,
    point_divisor,
    point_json,
    residue_lift,
    tdiv,
)
from mwk.errors import DomainError
from mwk.exact import GF, QQ, Poly, RationalFunctionField, factor
from mwk.fields import Twist
from mwk.fields import Place
from mwk.km import KMSymbol, km_is_zero
from mwk.mw import MWElement, eta, gw_image, h_elem, mw_equal, mw_is_zero, mw_residue_raw, sym
from mwk.sampling import random_mw, random_poly_unit
from mwk.transfer import quadratic_degree


def _symbol(K, degree, rng):
    return random_mw(K, degree, rng, terms=2, unit=lambda: random_poly_unit(K, rng, 2))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([3, 5]), st.sampled_from([-2, 0, 2, -1, 1]), st.integers(0, 2), st.integers(0, 10 ** 6))
def test_principal_divisors_have_trivial_class(q, d, degree, seed):
    if d % 2 and degree == 0:
        return  # odd twists take values in K^M_q, which is zero for q < 0
    rng = random.Random(seed)
    K = RationalFunctionField(GF(q), "t")
    curve = Curve.p1(K, d)
    D = tdiv(_symbol(K, degree, rng), curve)
    c = pb1_class(D)
    if isinstance(c, KMSymbol):
        assert km_is_zero(c)
    else:
        assert mw_is_zero(c)


@pytest.mark.parametrize("d", [-2, 0, 2])
def test_class_of_point_at_infinity(d):
    rng = random.Random(d)
    K = RationalFunctionField(GF(5), "t")
    curve = Curve.p1(K, d)
    k = K.base
    for n in (-1, 0, 1):
        c = random_mw(k, n, rng)
        D = point_divisor(curve, Place(K, None), c)
        assert mw_equal(pb1_class(D), c)


def test_odd_twist_class_is_milnor_valued():
    K = RationalFunctionField(GF(5), "t")
    curve = Curve.p1(K, 1)
    pl = Place(K, Poly(GF(5), [2, 0, 1]))
    kappa = pl.residue_field
    D = point_divisor(curve, pl, MWElement.const(kappa, 3))
    assert pb1_class(D).integer_value() == 6
    with pytest.raises(DomainError):
        pb1_class(point_divisor(curve, pl, MWElement.word(kappa, 1)))   # eta, degree -1


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([3, 5, 7]), st.integers(0, 10 ** 6))
def test_quadratic_degree_of_divisor_of_function_vanishes(q, seed):
    rng = random.Random(seed)
    K = RationalFunctionField(GF(q), "t")
    D = tdiv(sym(K, random_poly_unit(K, rng, 3)), Curve.omega(K.base, K))
    assert mw_is_zero(quadratic_degree(D))


def test_forget_and_hyper_commute_with_degrees():
    K = RationalFunctionField(GF(3), "t")
    curve = Curve.omega(K.base, K)
    cycle = {Place(K, Poly(GF(3), [1, 0, 1])): 2, Place(K, Poly(GF(3), [0, 1])): -1, Place(K, None): 1}
    D = hyper_divisor(curve, cycle)
    k = K.base
    deg = quadratic_degree(D)
    assert mw_equal(deg, h_elem(k) * cycle_degree(cycle))
    assert gw_image(deg).rank == 2 * cycle_degree(cycle)
    assert forget_divisor(D) == {pl: 2 * n for pl, n in cycle.items()}


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([3, 5, 7]), st.integers(-1, 1), st.integers(0, 10 ** 6))
def test_constants_have_no_divisor_and_specialize_back(q, n, seed):
    rng = random.Random(seed)
    K = RationalFunctionField(GF(q), "t")
    c = random_mw(K.base, n, rng)
    lifted = constant_lift(c, K)
    spec, D = a1_decompose(lifted)
    assert not D.coeffs
    assert mw_equal(spec, c)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([3, 5]), st.integers(0, 10 ** 6))
def test_homotopy_decomposition_detects_elements(q, seed):
    # sigma is zero iff both its specialization at 0 and its divisor on A^1 vanish
    rng = random.Random(seed)
    K = RationalFunctionField(GF(q), "t")
    a, b = _symbol(K, 1, rng), _symbol(K, 1, rng)
    sa, Da = a1_decompose(a)
    sb, Db = a1_decompose(b)
    same = mw_equal(sa, sb) and (Da - Db).equals(QuadraticDivisor(Da.curve, Da.q))
    assert same == mw_equal(a, b)


def test_divisor_json_and_validation():
    K = RationalFunctionField(GF(5), "t")
    t = K.gen()
    D = tdiv(sym(K, t * t - 2), Curve.p1(K, 0))
    js = D.to_json()
    assert js[0]["point"] == ["3", "0", "1"]
    assert js[-1]["point"] == "inf"
    assert point_json(Place(K, None)) == "inf"
    pl = Place(K, Poly(GF(5), [2, 0, 1]))
    with pytest.raises(DomainError):
        QuadraticDivisor(Curve.p1(K, 0), 0, {pl: MWElement.const(GF(5), 1)})
    with pytest.raises(DomainError):
        QuadraticDivisor(Curve.a1(K), 0, {Place(K, None): MWElement.const(GF(5), 1)})
    # -1 is a square in F_5 but not in F_7
    assert pb1_equal(MWElement.const(GF(5), 2), h_elem(GF(5)))
    assert not pb1_equal(MWElement.const(GF(7), 2), h_elem(GF(7)))


@pytest.mark.parametrize("q", [4, 9])
def test_quadratic_degree_vanishes_over_even_and_square_fields(q):
    rng = random.Random(q)
    K = RationalFunctionField(GF(q), "t")
    for _ in range(10):
        f = random_poly_unit(K, rng, 3) / random_poly_unit(K, rng, 2)
        D = tdiv(sym(K, f), Curve.omega(K.base, K))
        assert mw_is_zero(quadratic_degree(D))


def test_quadratic_degree_vanishes_over_q_with_factors():
    K = RationalFunctionField(QQ, "t")
    t = K.gen()
    x = Poly.x(QQ)
    one = Poly.const(QQ, 1)
    f = (t * t - 3) * (t + 2) ** 2 / ((t * t + t + 1) * t)
    factors = [x * x - one * 3, x + one * 2, x * x + x + one, x]
    D = tdiv(sym(K, f), Curve.omega(QQ, K), factors=factors)
    assert mw_is_zero(quadratic_degree(D))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([3, 5, 7]), st.integers(-1, 1), st.integers(0, 10 ** 6))
def test_residue_lift_hits_generators_and_lowers_degree(q, n, seed):
    rng = random.Random(seed)
    K = RationalFunctionField(GF(q), "t")
    while True:
        f = random_poly_unit(K, rng, 3).num
        if f.degree >= 1:
            break
    pl = Place(K, factor(f)[1][-1][0])
    c = random_mw(pl.residue_field, n, rng)
    sigma = residue_lift(c, pl)
    assert mw_equal(mw_residue_raw(sigma, pl), c)
    for other in finite_support(sigma):
        if other != pl:
            assert other.degree < pl.degree
    # the same divisor on the local scheme Spec O_v is principal
    curve = Curve.dvr(pl)
    assert tdiv(sigma, curve).equals(point_divisor(curve, pl, c))


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([3, 5]), st.integers(0, 2), st.integers(0, 10 ** 6))
def test_a1_lift_realizes_any_divisor(q, n, seed):
    rng = random.Random(seed)
    K = RationalFunctionField(GF(q), "t")
    targets = {}
    for _ in range(2):
        while True:
            f = random_poly_unit(K, rng, 3).num
            if f.degree >= 1:
                break
        pl = Place(K, factor(f)[1][0][0])
        targets[pl] = random_mw(pl.residue_field, n - 1, rng)
    sigma = a1_lift(targets, n, K)
    D = tdiv(sigma, Curve.a1(K))
    for pl in set(targets) | set(D.coeffs):
        want = targets.get(pl, MWElement.zero(pl.residue_field, n - 1))
        assert mw_equal(D.coefficient(pl).with_twist(Twist()), want)


def test_odd_degree_classes_see_only_the_milnor_part():
    # coker(eta) = K^M: hyperbolic coefficients count twice, eta-multiples vanish
    K = RationalFunctionField(GF(5), "t")
    pl = Place(K, Poly(GF(5), [2, 0, 1]))
    kappa = pl.residue_field
    for d in (-1, 1, 3):
        curve = Curve.p1(K, d)
        assert pb1_class(point_divisor(curve, pl, h_elem(kappa))).integer_value() == 4
        eta_multiple = eta(kappa) * sym(kappa, kappa.gen() + 1)
        assert pb1_class(point_divisor(curve, pl, eta_multiple)).integer_value() == 0
