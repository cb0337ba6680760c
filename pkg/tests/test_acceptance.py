"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL ...`` line (visible with
``pytest -v -s`` and in the tee'd log via ``capsys.disabled``).
"""

from __future__ import annotations

import random
import time
from fractions import Fraction


from mwk.chowwitt import (
    Curve,
    a1_decompose,
    a1_lift,
    constant_lift,
    cycle_degree,
    forget_divisor,
    hyper_divisor,
    pb1_class,
    point_divisor,
    tdiv,
)
from mwk.exact import GF, QQ, MPoly, Poly, RationalFunctionField, factor, is_irreducible, mat_solve
from mwk.fields import Place, Presentation, Twist, make_extension, omega_label
from mwk.gw import GramSpace, GWElement, gram_to_gw, gw_equal, n_epsilon, witt_equal
from mwk.km import KMSymbol, field_norm, km_is_zero
from mwk.mw import (
    MWElement,
    bracket,
    eps_elem,
    eta,
    from_gw,
    gw_image,
    h_elem,
    mw_equal,
    mw_is_zero,
    mw_residue_raw,
    mw_specialize,
    n_eps_elem,
    sym,
)
from mwk.rules import run_rules
from mwk.sampling import random_mw, random_poly_unit
from mwk.sstrace import (
    apply_form,
    dual_basis_form,
    gram_matrix,
    linear_form_to_omega,
    scharlau_transfer,
    ss_trace,
    usual_trace,
)
from mwk.transfer import (
    mw_transfer,
    mw_transfer_bass_tate,
    quadratic_degree,
    quadratic_degree_of_extension,
    reciprocity_check,
)


def _report(capsys, n: int, ok: bool, detail: str, start: float, budget: float):
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < budget
    with capsys.disabled():
        print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} {detail} ({elapsed:.2f}s, budget {budget:g}s)")
    assert ok, detail


def _irreducible(k, d, rng):
    while True:
        f = Poly(k, [k.random_element(rng) for _ in range(d)] + [k.one])
        if is_irreducible(f):
            return f


def _w(E, k):
    return Twist.of(omega_label(E, k))


def _nonsquares(F):
    return [u for u in F.units() if not F.is_square(u)]


# ---------------------------------------------------------------------------


def test_criterion_01_gw_tables(capsys):
    start = time.perf_counter()
    checks = 0
    ok = True
    for q in (2, 4):
        F = GF(q)
        for u in F.units():
            ok &= gw_equal(GWElement(F, [u]), GWElement(F, [F.one]))
            checks += 1
    F = GF(5)
    one = GWElement.const(F, 1)
    for u in _nonsquares(F):
        p = one - GWElement(F, [u])
        ok &= gw_equal(p * p, GWElement(F)) and gw_equal(p * 2, GWElement(F))
        ok &= not gw_equal(p, GWElement(F))
        checks += 1
    F = GF(7)
    one = GWElement.const(F, 1)
    h = GWElement(F, [F.one, -F.one])
    for u in _nonsquares(F):
        p = one - GWElement(F, [u])
        ok &= not gw_equal(p, GWElement(F)) and gw_equal(p * 2, GWElement(F))
        ok &= gw_equal(h * p, GWElement(F))
        for v in F.units():
            ok &= gw_equal(p * (one - GWElement(F, [v])), GWElement(F))
        checks += 1
    # W(F_7) = Z/4: <1> has additive order 4 modulo h
    ok &= not witt_equal(one * 2, GWElement(F)) and witt_equal(one * 4, GWElement(F))
    _report(capsys, 1, ok, f"{checks} table entries", start, 1)


def _random_rational(rng):
    while True:
        x = Fraction(rng.randint(-30, 30), rng.randint(1, 12))
        if x:
            return QQ(x)


def test_criterion_02_presentation_relations(capsys):
    start = time.perf_counter()
    rng = random.Random(2)
    fields = [GF(3), GF(5), GF(7), GF(9), GF(4), QQ]
    tuples = 0
    bad = []
    per_field = 90
    for F in fields:
        draw = (lambda: _random_rational(rng)) if F is QQ else (lambda: F.random_unit(rng))
        e = eta(F)
        hh = h_elem(F)
        for _ in range(per_field):
            u, v, c = draw(), draw(), draw()
            res = [
                gw_equal(GWElement(F, [u * v * v]), GWElement(F, [u])),
                gw_equal(GWElement(F, [u, -u]), GWElement(F, [F.one, -F.one])),
                mw_equal(sym(F, u * v), sym(F, u) + sym(F, v) + e * sym(F, u, v)),
                mw_equal(e * sym(F, u), sym(F, u) * e),
                mw_is_zero(e * hh),
            ]
            if u + v:
                res.append(gw_equal(GWElement(F, [u, v]), GWElement(F, [u + v, (u + v) * u * v])))
            if u != F.one:
                res.append(mw_is_zero(sym(F, u, F.one - u)))
            if c != F.one:
                res.append(mw_is_zero(eta(F) * sym(F, c, F.one - c)))
            tuples += 1
            if not all(res):
                bad.append((F.name, u, v, c))
    ok = not bad and tuples >= 500
    _report(capsys, 2, ok, f"{tuples} tuples, {len(bad)} failures", start, 30)


def test_criterion_03_epsilon_arithmetic(capsys):
    start = time.perf_counter()
    ok = True
    checks = 0
    for F in (GF(3), GF(5), GF(7), QQ):
        eps, h = eps_elem(F), h_elem(F)
        ok &= mw_equal(eps * eps, MWElement.const(F, 1))
        ok &= mw_equal(eps * h, -h)
        for n in range(-20, 21):
            r = n % 2
            ok &= gw_equal(n_epsilon(n, F), GWElement.const(F, r) + GWElement(F, [F.one, -F.one]) * ((n - r) // 2))
    # -1 is not a square in F_7, so epsilon differs from -1 there
    F7 = GF(7)
    ns = {n: n_eps_elem(n, F7) for n in range(-20, 21)}
    for n in range(-20, 21):
        for m in range(-20, 21):
            ok &= mw_equal(n_eps_elem(n * m, F7), ns[n] * ns[m])
            checks += 1
    ok &= not mw_equal(n_eps_elem(1, F7) + n_eps_elem(1, F7), n_eps_elem(2, F7))
    _report(capsys, 3, ok, f"{checks} products", start, 1)


def _res2_oracle(K, pl, pi, us):
    """m_eps <v1bar> [u2bar..unbar] for u1 = v1 pi^m and the remaining units v-adic units."""
    R = pl.residue_field
    m = pl.valuation(us[0])
    v1 = pl.reduce(us[0] / pi ** m)
    return n_eps_elem(m, R) * bracket(R, v1) * sym(R, *[pl.reduce(u) for u in us[1:]])


def _place_unit_pair(K, rng):
    while True:
        f = random_poly_unit(K, rng, 3).num
        if f.degree >= 1:
            pl = Place(K, factor(f)[1][0][0])
            break
    while True:
        u = random_poly_unit(K, rng, 2)
        if pl.valuation(u) == 0:
            return pl, u


def test_criterion_04_residue_axioms(capsys):
    start = time.perf_counter()
    rng = random.Random(4)
    count = 0
    bad = 0
    for i in range(210):
        q = (3, 4, 5, 7, 9)[i % 5]
        K = RationalFunctionField(GF(q), "t")
        pl, u = _place_unit_pair(K, rng)
        R = pl.residue_field
        pi = pl.uniformizer
        ubar = pl.reduce(u)
        n = rng.randint(0, 2)
        sigma = random_mw(K, n + 1, rng, terms=2, unit=lambda: random_poly_unit(K, rng, 2))
        d = mw_residue_raw(sigma, pl)
        # Res2 against the closed formula, for a symbol whose tail is made of units
        m = rng.randint(-2, 3)
        tail = [random_poly_unit(K, rng, 2) for _ in range(n)]
        tail = [v if pl.valuation(v) == 0 else u for v in tail]
        head = random_poly_unit(K, rng, 2)
        head = head if pl.valuation(head) == 0 else u
        word = [head * pi ** m] + tail
        checks = [
            mw_equal(mw_residue_raw(sym(K, *word), pl, pi), _res2_oracle(K, pl, pi, word)),
            mw_equal(mw_residue_raw(eta(K) * sigma, pl), eta(R) * d),
            mw_equal(mw_residue_raw(sigma, pl, u * pi), bracket(R, ubar) * d),
            mw_equal(mw_residue_raw(bracket(K, u) * sigma, pl), bracket(R, ubar) * d),
            mw_equal(mw_residue_raw(sym(K, u) * sigma, pl), eps_elem(R) * sym(R, ubar) * d),
        ]
        s = mw_specialize(sigma, pl)
        checks.append(mw_equal(s, mw_residue_raw(sym(K, pi) * sigma, pl) - sym(R, -R.one) * d))
        checks.append(mw_equal(s, -eps_elem(R) * mw_residue_raw(sym(K, -pi) * sigma, pl)))
        count += 1
        bad += not all(checks)
    _report(capsys, 4, bad == 0 and count >= 200, f"{count} symbols, {bad} failures", start, 30)


# hand-factored functions over Q: (constant, [(monic factor coefficients, exponent)])
Q_CASES = [
    (1, [([-2, 0, 1], 1)]),
    (3, [([0, 1], 1), ([-1, 1], -1)]),
    (-2, [([1, 0, 1], 1), ([2, 1], 2)]),
    (1, [([-2, 0, 1], 1), ([-1, 1], 1), ([1, 0, 1], -1)]),
    (5, [([1, 1, 1], 1)]),
    (Fraction(1, 2), [([-3, 0, 1], 1), ([0, 1], -2)]),
    (-1, [([-2, 0, 0, 1], 1)]),
    (7, [([1, 0, 1], 1), ([-3, 0, 1], -1)]),
    (1, [([3, 1], 1), ([-5, 1], 1), ([1, 1], -1)]),
    (-6, [([2, 0, 1], 2), ([0, 1], 1)]),
    (1, [([-2, 0, 0, 1], 1), ([1, 1, 1], -1)]),
    (2, [([-5, 0, 1], 1), ([-1, 1], 3)]),
]


def test_criterion_05_weil_reciprocity(capsys):
    start = time.perf_counter()
    rng = random.Random(5)
    bad = 0
    count = 0
    for i in range(200):
        q = (3, 4, 5, 7, 9)[i % 5]
        K = RationalFunctionField(GF(q), "t")
        f = random_poly_unit(K, rng, 3) / random_poly_unit(K, rng, 2)
        rep = reciprocity_check(f, K)
        bad += not rep.ok
        count += 1
    K = RationalFunctionField(QQ, "t")
    q_count = 0
    for c, facs in Q_CASES:
        f = K(QQ(c))
        polys = []
        for cs, e in facs:
            p = Poly(QQ, [QQ(x) for x in cs])
            assert is_irreducible(p)
            polys.append(p)
            f = f * K(p) ** e
        rep = reciprocity_check(f, K, factors=polys)
        bad += not rep.ok
        q_count += 1
    ok = bad == 0 and count >= 200 and q_count >= 10
    _report(capsys, 5, ok, f"{count} over F_q, {q_count} over Q, {bad} failures", start, 60)


def test_criterion_06_degree_formula(capsys):
    start = time.perf_counter()
    ok = True
    cases = 0
    for q in (2, 3, 4, 5, 7, 9):
        k = GF(q)
        for d in (1, 2, 3, 4):
            E = make_extension(k, _irreducible(k, d, random.Random(q * 10 + d)), names=["a"])
            ok &= mw_equal(quadratic_degree_of_extension(E, k), n_eps_elem(d, k))
            cases += 1
    for p in (2, 3):
        K = RationalFunctionField(GF(p), "s")
        E = make_extension(K, Poly(K, [-K.gen()] + [K.zero] * (p - 1) + [K.one]), names=["x"])
        ok &= not E.separable
        ok &= mw_equal(quadratic_degree_of_extension(E, K), n_eps_elem(p, K))
        cases += 1
    k = GF(3)
    t1, t2 = MPoly.var(k, 2, 0), MPoly.var(k, 2, 1)
    L = make_extension(k, [t1 ** 2 + MPoly.const(k, 2, 1), t2 ** 2 - t1 - MPoly.const(k, 2, 1)], names=["a", "b"])
    ok &= mw_equal(quadratic_degree_of_extension(L, k), n_eps_elem(4, k))
    k5 = GF(5)
    E = make_extension(k5, Poly(k5, [2, 0, 1]), names=["a"])
    a = E.gen()
    L2 = make_extension(E, Poly(E, [-(a + 1), E.zero, E.zero, E.one]), names=["b"])
    ok &= mw_equal(quadratic_degree_of_extension(L2, k5), n_eps_elem(6, k5))
    cases += 2
    _report(capsys, 6, ok, f"{cases} extensions", start, 10)


def _f81():
    k = GF(3)
    t1, t2 = MPoly.var(k, 2, 0), MPoly.var(k, 2, 1)
    L = make_extension(k, [t1 ** 2 + MPoly.const(k, 2, 1), t2 ** 2 - t1 - MPoly.const(k, 2, 1)], names=["a", "b"])
    return k, L


def test_criterion_07_transfer_comparison(capsys):
    start = time.perf_counter()
    rng = random.Random(7)
    count = 0
    bad = 0
    for i in range(90):
        q = (3, 5, 7, 9)[i % 4]
        k = GF(q)
        E = make_extension(k, _irreducible(k, rng.choice([2, 3]), rng), names=["a"])
        chain = [E.gen() + k(rng.randrange(k.characteristic))]
        n = (-1, 0, 1)[i % 3]
        sigma = random_mw(E, n, rng, terms=2).with_twist(_w(E, k))
        bad += not mw_equal(mw_transfer(E, sigma, k), mw_transfer_bass_tate(E, sigma, chain, k))
        count += 1
    k, L = _f81()
    a, b = L(L.parent.gen()), L.gen()
    chains = ([a, b], [b], [b + a])
    for i in range(15):
        n = (-1, 0, 1)[i % 3]
        sigma = random_mw(L, n, rng, terms=2).with_twist(_w(L, k))
        glued = mw_transfer(L, sigma, k)
        for chain in chains:
            bad += not mw_equal(glued, mw_transfer_bass_tate(L, sigma, chain, k))
            count += 1
    _report(capsys, 7, bad == 0 and count >= 100, f"{count} comparisons, {bad} failures", start, 30)


def test_criterion_08_example_transfers(capsys):
    start = time.perf_counter()
    rng = random.Random(8)
    ok = True
    for q, d in ((3, 2), (5, 3), (7, 2), (9, 2)):
        k = GF(q)
        f = _irreducible(k, d, rng)
        E = make_extension(k, f, names=["a"])
        P = E.presentation(k)
        trace_form = [usual_trace(P, P.monomial(i)) for i in range(P.rank)]
        fp = f.deriv()(E.gen())
        b = linear_form_to_omega(E, dual_basis_form(P, 0), k)
        for _ in range(4):
            u = E.random_unit(rng)
            lhs = mw_transfer(E, bracket(E, u * fp).with_twist(_w(E, k)), k)
            ok &= gw_equal(gw_image(lhs), scharlau_transfer(E, GWElement(E, [u]), trace_form, k))
            lhs = mw_transfer(E, (bracket(E, b) * sym(E, u)).with_twist(_w(E, k)), k)
            ok &= mw_equal(lhs, sym(k, field_norm(E, u, k)))
    for p in (2, 3):
        K = RationalFunctionField(GF(p), "s")
        s = K.gen()
        E = make_extension(K, Poly(K, [-s] + [K.zero] * (p - 1) + [K.one]), names=["x"])
        P = E.presentation(K)
        x = E.gen()
        for u in (E.one, x + 1, x, x + s, x * x + x + 1):
            lhs = mw_transfer(E, bracket(E, u).with_twist(_w(E, K)), K)
            ok &= gw_equal(gw_image(lhs), scharlau_transfer(E, GWElement(E, [u]), dual_basis_form(P, p - 1), K))
    _report(capsys, 8, ok, "scaled trace, norm, Tate form", start, 5)


def _pres(f):
    return Presentation(f.field, [MPoly.from_poly(f, 1, 0)])


def test_criterion_09_scheja_storch(capsys):
    start = time.perf_counter()
    rng = random.Random(9)
    ok = True
    count = 0
    for i in range(60):
        q = (2, 3, 5, 7, 9)[i % 5]
        k = GF(q)
        d = rng.randint(1, 5)
        f = Poly(k, [k.random_element(rng) for _ in range(d)] + [k.one])
        P = _pres(f)
        ok &= ss_trace(P) == dual_basis_form(P, d - 1)
        G = gram_matrix(P)
        for r in range(d):
            for c in range(d):
                if r + c < d - 1:
                    ok &= G[r][c] == k.zero
                elif r + c == d - 1:
                    ok &= G[r][c] == k.one
        ok &= gw_equal(gram_to_gw(GramSpace(k, G)), n_epsilon(d, k))
        count += 1
    for i in range(40):
        k = GF((3, 5, 7)[i % 3])
        f = Poly(k, [k.random_element(rng) for _ in range(rng.randint(2, 5))] + [k.one])
        _, facs = factor(f)
        if any(m > 1 for _, m in facs):
            continue
        P = _pres(f)
        tau = ss_trace(P)
        # CRT: tau_f(b) = sum over factors g of tau_g(b / (f/g))
        b_poly = Poly(k, [k.random_element(rng) for _ in range(f.degree)])
        total = k.zero
        for g, _ in facs:
            E = make_extension(k, g, names=["x"])
            PE = E.presentation(k)
            x = E.gen()
            total = total + apply_form(PE, ss_trace(PE), PE.element_to_poly(b_poly(x) / f.exact_div(g)(x)))
        ok &= apply_form(P, tau, MPoly.from_poly(b_poly, 1, 0)) == total
        # Euler: tau_f(b) = Tr(b / f'(alpha))
        M = P.mul_matrix(MPoly.from_poly(f.deriv(), 1, 0))
        inv = P.from_coords(mat_solve(M, [k.one] + [k.zero] * (f.degree - 1), k))
        bb = MPoly.from_poly(b_poly, 1, 0)
        ok &= apply_form(P, tau, bb) == usual_trace(P, bb * inv)
        count += 1
    _report(capsys, 9, ok, f"{count} presentations", start, 10)


# ---------------------------------------------------------------------------
# homotopy invariance


def _random_targets(K, n, rng):
    out = {}
    for _ in range(rng.randint(1, 3)):
        pl = Place(K, _irreducible(K.base, rng.randint(1, 3), rng))
        out[pl] = random_mw(pl.residue_field, n - 1, rng, terms=2)
    return out


def _raw_divisor(D):
    return {pl: c.with_twist(Twist()) for pl, c in D.coeffs.items()}


def _same_divisor(D, targets):
    K_places = set(D) | set(targets)
    for pl in K_places:
        a = D.get(pl)
        b = targets.get(pl)
        if a is None:
            a = MWElement.zero(pl.residue_field, b.degree)
        if b is None:
            b = MWElement.zero(pl.residue_field, a.degree)
        if not mw_equal(a, b):
            return False
    return True


def test_criterion_10_homotopy_invariance(capsys):
    start = time.perf_counter()
    rng = random.Random(10)
    count = 0
    bad = 0
    for i in range(110):
        q = (3, 5, 7)[i % 3]
        K = RationalFunctionField(GF(q), "t")
        n = (0, 1, 2)[i % 3]
        c = random_mw(K.base, n, rng)
        lifted = constant_lift(c, K)
        s, D = a1_decompose(lifted)
        ok = mw_equal(s, c) and not D.coeffs
        # local exactness: every divisor on A^1 is the divisor of some sigma
        targets = _random_targets(K, n, rng)
        sigma = a1_lift(targets, n, K)
        spec0, _ = a1_decompose(sigma)
        full = sigma + constant_lift(c - spec0, K)
        s2, D2 = a1_decompose(full)
        ok &= mw_equal(s2, c) and _same_divisor(_raw_divisor(D2), targets)
        # a random symbol is rebuilt from its decomposition
        rand = random_mw(K, n, rng, terms=2, unit=lambda: random_poly_unit(K, rng, 2))
        s3, D3 = a1_decompose(rand)
        rebuilt = a1_lift(_raw_divisor(D3), n, K)
        s4, _ = a1_decompose(rebuilt)
        rebuilt = rebuilt + constant_lift(s3 - s4, K)
        ok &= mw_equal(rebuilt, rand)
        count += 1
        bad += not ok
    _report(capsys, 10, bad == 0 and count >= 100, f"{count} symbols, {bad} failures", start, 20)


# ---------------------------------------------------------------------------
# PB1


def test_criterion_11_pb1(capsys):
    start = time.perf_counter()
    rng = random.Random(11)
    bad = 0
    counts = {}
    for q in (3, 5):
        K = RationalFunctionField(GF(q), "t")
        k = K.base
        for d in (-2, 0, 2, -1, 1):
            curve = Curve.p1(K, d)
            for i in range(50):
                n = (0, 1, 2)[i % 3] if d % 2 == 0 else (1, 2)[i % 2]
                sigma = random_mw(K, n, rng, terms=2, unit=lambda: random_poly_unit(K, rng, 2))
                c = pb1_class(tdiv(sigma, curve))
                ok = km_is_zero(c) if isinstance(c, KMSymbol) else mw_is_zero(c)
                if d % 2 == 0:
                    c0 = random_mw(k, n - 1, rng)
                    ok &= mw_equal(pb1_class(point_divisor(curve, Place(K, None), c0)), c0)
                else:
                    # K^M_0 coefficients: the class is sum of rank * degree
                    pl = Place(K, _irreducible(k, rng.randint(1, 3), rng))
                    g = GWElement(pl.residue_field, [pl.residue_field.random_unit(rng) for _ in range(rng.randint(1, 3))])
                    D = point_divisor(curve, pl, from_gw(g))
                    ok &= pb1_class(D).integer_value() == g.rank * pl.degree
                counts[(q, d)] = counts.get((q, d), 0) + 1
                bad += not ok
        # forget / hyper compatibility with degrees
        curve = Curve.omega(k, K)
        for _ in range(10):
            cycle = {Place(K, _irreducible(k, rng.randint(1, 3), rng)): rng.randint(-3, 3) for _ in range(2)}
            cycle[Place(K, None)] = rng.randint(-2, 2)
            H = hyper_divisor(curve, cycle)
            deg = quadratic_degree(H)
            ok = mw_equal(deg, h_elem(k) * cycle_degree(cycle))
            ok &= gw_image(deg).rank == 2 * cycle_degree(cycle)
            ok &= forget_divisor(H) == {pl: 2 * m for pl, m in cycle.items() if m}
            bad += not ok
    ok = bad == 0 and min(counts.values()) >= 50
    _report(capsys, 11, ok, f"{sum(counts.values())} divisors, {bad} failures", start, 60)


def test_criterion_12_rules_suite(capsys):
    start = time.perf_counter()
    results = run_rules(50, seed=12)
    by_name = {r.name: r for r in results}
    required = ["R1a", "R1b", "R1c", "R2a", "R2b", "R2c", "R3a", "R3c", "R3d", "R3e", "R4a", "R3a+", "R1c+"]
    ok = all(by_name[n].ok and by_name[n].total >= 50 for n in required)
    ok &= by_name["R3b"].status.startswith("not implemented")
    with capsys.disabled():
        for r in results:
            print("  " + r.line())
    _report(capsys, 12, ok, f"{len(required)} rules", start, 60)
