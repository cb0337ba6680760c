"""Milnor-Witt transfers for finite extensions.

The glued transfer normalizes an element to its (Witt part, Milnor part) pair,
pushes the Witt part through the differential GW transfer and the Milnor part
through the norm, and lifts the resulting pair back to words.  The Bass-Tate
variant re-presents E/k as a tower of monogenic steps along a generator chain
and composes the glued transfers of the steps.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Sequence

from .errors import DomainError
from .exact import Field, FieldElement, Poly, RationalFunctionField, nullspace
from .fields import Extension, FieldMap, Place, Twist, omega_label
from .km import km_transfer
from .mw import (
    MWElement,
    bracket,
    forgetful,
    mu_prime,
    mw_from_pair,
    sym,
)
from .sstrace import apply_form, gw_transfer, relative_unit, ss_trace


def _split_omega(sigma: MWElement, E: Extension, k: Field) -> Twist:
    lab = omega_label(E, k)
    if lab not in sigma.twist.labels:
        raise DomainError(f"element must be twisted by {lab}, got {sigma.twist}")
    return sigma.twist.without(lab)


def mw_transfer(E: Extension, sigma: MWElement, over: Field | None = None) -> MWElement:
    """Glued transfer K^MW_n(E, omega_{E/k} (x) L) -> K^MW_n(k, L)."""
    k = over if over is not None else E.base
    if sigma.field is not E:
        raise DomainError(f"element lives over {sigma.field}, not {E}")
    rest = _split_omega(sigma, E, k)
    n = sigma.degree
    w = mu_prime(sigma)
    wk = gw_transfer(E, w, k).with_twist(Twist())
    if n < 0:
        return mw_from_pair(k, n, wk, None, rest)
    mk = km_transfer(forgetful(sigma), E, k)
    return mw_from_pair(k, n, wk, mk, rest)


def quadratic_degree_of_extension(E: Extension, over: Field | None = None) -> MWElement:
    """Tr(<1> (x) w) for E/k."""
    k = over if over is not None else E.base
    return mw_transfer(E, MWElement.const(E, 1, Twist.of(omega_label(E, k))), k)


# ---------------------------------------------------------------------------
# generator chains


@dataclass
class ChainTower:
    """A tower T of monogenic steps k(a_1)(a_2)... isomorphic to E."""

    E: Extension
    base: Field
    top: Field
    stages: list
    to_E: FieldMap
    to_T: FieldMap
    unit: FieldElement  # c in E with w_E = c * w_T


def _solve_in_span(vectors: list, target: list, F: Field):
    cols = vectors + [target]
    M = [[c[i] for c in cols] for i in range(len(target))]
    for v in nullspace(M, F):
        if v[-1]:
            inv = v[-1].inverse()
            return [-(x * inv) for x in v[:-1]]
    return None


def chain_tower(E: Extension, chain: Sequence, over: Field | None = None) -> ChainTower:
    k = over if over is not None else E.base
    P = E.presentation(k)
    chain = [E(a) for a in chain]
    sub_E = [E.one]          # k-basis of the current subfield, as elements of E
    current: Field = k
    sub_T: list = [k.one]    # same basis, as elements of the current tower stage
    stages = []
    for idx, alpha in enumerate(chain):
        vecs = [P.element_coords(b) for b in sub_E]
        power = alpha
        d = 1
        while True:
            coeffs = _solve_in_span(vecs, P.element_coords(power), k)
            if coeffs is not None:
                break
            vecs = vecs + [P.element_coords(b * power) for b in sub_E]
            power = power * alpha
            d += 1
        m = len(sub_E)
        cs = []
        for j in range(d):
            cj = current.zero
            for s in range(m):
                cj = cj + current(coeffs[j * m + s]) * sub_T[s]
            cs.append(-cj)
        minpoly = Poly(current, cs + [current.one])
        st = Extension(current, minpoly, f"a{idx + 1}")
        stages.append(st)
        g = st.gen()
        sub_T = [st(b) * g ** j for j in range(d) for b in sub_T]
        sub_E = [b * alpha ** j for j in range(d) for b in sub_E]
        current = st
    if len(sub_E) != P.rank:
        raise DomainError("generator chain does not generate the extension")
    T = current
    to_E = FieldMap.from_generator_images(T, E, chain, FieldMap.inclusion(k, E))
    basis_coords = [P.element_coords(b) for b in sub_E]
    from .exact import mat_solve

    A = [[basis_coords[j][i] for j in range(P.rank)] for i in range(P.rank)]

    def to_T_fn(x):
        c = mat_solve(A, P.element_coords(x), k)
        acc = T.zero
        for ci, b in zip(c, sub_T):
            acc = acc + T(ci) * b
        return acc

    to_T = FieldMap(E, T, to_T_fn, "chain^-1")
    tau_E = ss_trace(P)
    tau_T_on_E = lambda x: _tower_trace(T, to_T(x), k)
    c = relative_unit(E, tau_E, tau_T_on_E, k)
    return ChainTower(E, k, T, stages, to_E, to_T, c)


def _tower_trace(T: Field, x: FieldElement, k: Field) -> FieldElement:
    """tau_{K_1/k} o ... o tau_{K_n/K_{n-1}} applied to x."""
    while T is not k:
        P = T.presentation(T.parent)
        x = apply_form(P, ss_trace(P), P.element_to_poly(x))
        T = T.parent
    return x


def mw_transfer_bass_tate(E: Extension, sigma: MWElement, chain: Sequence, over: Field | None = None) -> MWElement:
    """Transfer along a chain of monogenic steps, each computed by the glued transfer."""
    k = over if over is not None else E.base
    rest = _split_omega(sigma, E, k)
    if not chain:
        raise DomainError("empty generator chain")
    ct = chain_tower(E, chain, k)
    x = (bracket(E, ct.unit) * sigma.with_twist(Twist())).map(ct.to_T)
    labels = [omega_label(st, st.parent) for st in ct.stages]
    x = x.with_twist(Twist.of(*labels) * rest)
    for st in reversed(ct.stages):
        x = mw_transfer(st, x, st.parent)
    return x


# ---------------------------------------------------------------------------
# transfers from closed points of A^1 / P^1


def transfer_from_point(place: Place, sigma: MWElement) -> MWElement:
    """Tr_{kappa_x/k} of a coefficient given relative to pi^* (x) dt (= w_{kappa_x/k})."""
    if place.is_infinite or place.degree == 1:
        return sigma.with_twist(Twist())
    kappa = place.residue_field
    return mw_transfer(kappa, sigma.with_twist(Twist.of(omega_label(kappa, place.k))), place.k)


def quadratic_degree(D) -> MWElement:
    """tdeg of an omega-twisted quadratic divisor on P^1: sum of transfers, identity at infinity."""

    if D.curve.kind != "P1" or not D.curve.is_omega:
        raise DomainError("quadratic degree needs a divisor on P^1 twisted by omega")
    k = D.curve.base
    out = MWElement.zero(k, D.q)
    for pl, c in D.sorted_items():
        out = out + transfer_from_point(pl, c)
    return out


# ---------------------------------------------------------------------------
# reciprocity


@dataclass
class ReciprocityReport:
    per_place: list = dc_field(default_factory=list)   # (place label, residue, transferred)
    total: MWElement | None = None
    ok: bool = False

    def as_dict(self) -> dict:
        return {
            "perPlace": [{"place": p, "residue": repr(r), "transfer": repr(t)} for p, r, t in self.per_place],
            "sum": "0" if self.ok else repr(self.total),
            "ok": self.ok,
        }


def reciprocity_check(f, K: RationalFunctionField | None = None, factors: Sequence[Poly] | None = None) -> ReciprocityReport:
    """Sum over all places of Tr o d_x(sigma (x) dt); must vanish in K^MW(k).

    ``f`` is a unit of k(t) (giving sigma = [f]) or a degree-1 MWElement over
    k(t).  Over Q the irreducible factors of the support must be supplied.
    """
    from .chowwitt import Curve, tdiv

    if isinstance(f, MWElement):
        sigma = f
        K = f.field
    else:
        K = K if K is not None else f.field
        sigma = sym(K, K(f))
    curve = Curve.omega(K.base, K)
    D = tdiv(sigma, curve, factors=factors)
    rep = ReciprocityReport()
    total = MWElement.zero(K.base, sigma.degree - 1)
    for pl, c in D.sorted_items():
        tr = transfer_from_point(pl, c)
        rep.per_place.append((pl.label, c, tr))
        total = total + tr
    rep.total = total
    from .mw import mw_is_zero

    rep.ok = mw_is_zero(total)
    return rep
