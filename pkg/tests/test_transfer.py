from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from mwk.errors import DomainError
from mwk.exact import GF, QQ, MPoly, Poly, RationalFunctionField, is_irreducible
from mwk.fields import Twist, make_extension, omega_label
from mwk.gw import GWElement, gw_equal
from mwk.km import field_norm, km_equal, km_transfer
from mwk.mw import bracket, forgetful, gw_image, h_elem, hyperbolic, mw_equal, n_eps_elem, sym
from mwk.sampling import random_mw, random_poly_unit
from mwk.sstrace import dual_basis_form, linear_form_to_omega, scharlau_transfer, usual_trace
from mwk.transfer import (
    chain_tower,
    mw_transfer,
    mw_transfer_bass_tate,
    quadratic_degree_of_extension,
    reciprocity_check,
)


def _irreducible(k, d, rng):
    while True:
        f = Poly(k, [k.random_element(rng) for _ in range(d)] + [k.one])
        if is_irreducible(f):
            return f


def _w(E, k):
    return Twist.of(omega_label(E, k))


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7])
@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_degree_formula_monogenic(q, d):
    k = GF(q)
    E = make_extension(k, _irreducible(k, d, random.Random(q * d)), names=["a"])
    assert mw_equal(quadratic_degree_of_extension(E, k), n_eps_elem(d, k))


@pytest.mark.parametrize("p", [2, 3])
def test_degree_formula_inseparable(p):
    K = RationalFunctionField(GF(p), "s")
    E = make_extension(K, Poly(K, [-K.gen()] + [K.zero] * (p - 1) + [K.one]), names=["x"])
    assert mw_equal(quadratic_degree_of_extension(E, K), n_eps_elem(p, K))


def test_degree_formula_two_stage_tower():
    k = GF(3)
    t1, t2 = MPoly.var(k, 2, 0), MPoly.var(k, 2, 1)
    L = make_extension(k, [t1 ** 2 + MPoly.const(k, 2, 1), t2 ** 2 - t1 - MPoly.const(k, 2, 1)], names=["a", "b"])
    assert mw_equal(quadratic_degree_of_extension(L, k), n_eps_elem(4, k))


@pytest.mark.parametrize("q,d", [(3, 2), (5, 3), (7, 2)])
def test_separable_transfer_is_scaled_trace_form(q, d):
    rng = random.Random(q + d)
    k = GF(q)
    f = _irreducible(k, d, rng)
    E = make_extension(k, f, names=["a"])
    P = E.presentation(k)
    trace_form = [usual_trace(P, P.monomial(i)) for i in range(P.rank)]
    # the usual trace corresponds to f'(a) * w
    fp = f.deriv()(E.gen())
    for _ in range(5):
        u = E.random_unit(rng)
        lhs = mw_transfer(E, (bracket(E, u * fp)).with_twist(_w(E, k)), k)
        rhs = scharlau_transfer(E, GWElement(E, [u]), trace_form, k)
        assert gw_equal(gw_image(lhs), rhs)


@pytest.mark.parametrize("q,d", [(3, 2), (5, 2), (3, 3), (7, 3), (2, 2), (4, 2)])
def test_transfer_of_symbol_is_norm(q, d):
    rng = random.Random(q * 31 + d)
    k = GF(q)
    E = make_extension(k, _irreducible(k, d, rng), names=["a"])
    P = E.presentation(k)
    b = linear_form_to_omega(E, dual_basis_form(P, 0), k)
    for _ in range(5):
        u = E.random_unit(rng)
        lhs = mw_transfer(E, (bracket(E, b) * sym(E, u)).with_twist(_w(E, k)), k)
        assert mw_equal(lhs, sym(k, field_norm(E, u, k)))


@pytest.mark.parametrize("p", [2, 3])
def test_inseparable_transfer_is_tate_form(p):
    K = RationalFunctionField(GF(p), "s")
    s = K.gen()
    E = make_extension(K, Poly(K, [-s] + [K.zero] * (p - 1) + [K.one]), names=["x"])
    P = E.presentation(K)
    x = E.gen()
    for u in (E.one, x + 1, x, x + s):
        lhs = mw_transfer(E, bracket(E, u).with_twist(_w(E, K)), K)
        rhs = scharlau_transfer(E, GWElement(E, [u]), dual_basis_form(P, p - 1), K)
        assert gw_equal(gw_image(lhs), rhs)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([3, 5, 7]), st.integers(-1, 1), st.integers(0, 10 ** 6))
def test_glued_and_chain_transfers_agree(q, n, seed):
    rng = random.Random(seed)
    k = GF(q)
    E = make_extension(k, _irreducible(k, rng.choice([2, 3]), rng), names=["a"])
    a = E.gen()
    chain = [a + k(rng.randrange(q))]
    sigma = random_mw(E, n, rng, terms=2).with_twist(_w(E, k))
    assert mw_equal(mw_transfer(E, sigma, k), mw_transfer_bass_tate(E, sigma, chain, k))


def test_chain_must_generate():
    k = GF(3)
    t1, t2 = MPoly.var(k, 2, 0), MPoly.var(k, 2, 1)
    L = make_extension(k, [t1 ** 2 + MPoly.const(k, 2, 1), t2 ** 2 - t1 - MPoly.const(k, 2, 1)], names=["a", "b"])
    with pytest.raises(DomainError):
        chain_tower(L, [L(L.parent.gen())], k)


def test_transfer_requires_omega_twist():
    k = GF(5)
    E = make_extension(k, Poly(k, [2, 0, 1]), names=["a"])
    with pytest.raises(DomainError):
        mw_transfer(E, sym(E, E.gen()), k)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([3, 4, 5, 7, 9]), st.integers(0, 10 ** 6))
def test_reciprocity_over_finite_fields(q, seed):
    rng = random.Random(seed)
    K = RationalFunctionField(GF(q), "t")
    f = random_poly_unit(K, rng, 3) / random_poly_unit(K, rng, 2)
    rep = reciprocity_check(f, K)
    assert rep.ok
    assert rep.as_dict()["sum"] == "0"


def test_reciprocity_over_q_with_given_factors():
    K = RationalFunctionField(QQ, "t")
    t = K.gen()
    x = Poly.x(QQ)
    one = Poly.const(QQ, 1)
    f = (t * t - 2) * (t - 1) / (t * t + 1)
    rep = reciprocity_check(f, K, factors=[x * x - Poly.const(QQ, 2), x - one, x * x + one])
    assert rep.ok


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([3, 4, 5, 7]), st.integers(0, 2), st.integers(0, 10 ** 6))
def test_transfer_commutes_with_forgetful_and_hyperbolic(q, n, seed):
    rng = random.Random(seed)
    k = GF(q)
    E = make_extension(k, _irreducible(k, rng.choice([2, 3]), rng), names=["a"])
    w = _w(E, k)
    sigma = random_mw(E, n, rng, terms=2).with_twist(w)
    assert km_equal(forgetful(mw_transfer(E, sigma, k)), km_transfer(forgetful(sigma), E, k))
    s = forgetful(sigma)
    assert mw_equal(mw_transfer(E, hyperbolic(s, w), k), hyperbolic(km_transfer(s, E, k)))


@pytest.mark.parametrize("q,d", [(3, 2), (5, 3), (7, 4), (4, 2)])
def test_transfer_of_hyperbolic_multiples(q, d):
    k = GF(q)
    E = make_extension(k, _irreducible(k, d, random.Random(d)), names=["a"])
    for n in (-2, 1, 3):
        out = mw_transfer(E, (h_elem(E) * n).with_twist(_w(E, k)), k)
        assert mw_equal(out, h_elem(k) * (d * n))
        assert gw_image(out).rank == 2 * d * n
