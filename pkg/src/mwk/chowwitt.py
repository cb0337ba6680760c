"""Quadratic divisors and Chow-Witt groups of A^1 and P^1.

A line bundle L of degree d on P^1 is trivialized by u on A^1 and by v near
infinity, glued by u = g * y^(-d) * v with y = 1/t and g = 1 (for O(d)) or
g = -1 (for omega, where dt = -y^(-2) dy).  Divisor coefficients are stored
relative to the distinguished generators pi^* (x) u at finite points and
y^* (x) v at infinity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import DomainError
from .exact import Field, Poly, RationalFunctionField, factor
from .fields import FieldMap, Place, Twist
from .km import KMSymbol, km_equal, km_transfer
from .mw import (
    MWElement,
    bracket,
    forgetful,
    gw_image,
    h_elem,
    mw_equal,
    mw_is_zero,
    mw_residue_raw,
    mw_simplify,
    mw_specialize,
)


@dataclass(frozen=True)
class Curve:
    kind: str                    # "A1", "P1" or "DVR"
    base: Field
    K: RationalFunctionField
    d: int = 0
    glue: int = 1                # sign g in u = g * y^(-d) * v
    place: Place | None = None   # the closed point of a DVR

    @staticmethod
    def a1(K: RationalFunctionField) -> "Curve":
        return Curve("A1", K.base, K)

    @staticmethod
    def p1(K: RationalFunctionField, d: int) -> "Curve":
        return Curve("P1", K.base, K, d, 1)

    @staticmethod
    def omega(k: Field, K: RationalFunctionField | None = None) -> "Curve":
        K = K if K is not None else RationalFunctionField(k, "t")
        return Curve("P1", k, K, -2, -1)

    @staticmethod
    def dvr(place: Place) -> "Curve":
        return Curve("DVR", place.k, place.K, 0, 1, place)

    @property
    def is_omega(self) -> bool:
        return self.kind == "P1" and self.d == -2 and self.glue == -1

    @property
    def line_labels(self) -> tuple[str, str]:
        return ("dt", "ds") if self.is_omega else ("u", "v")

    def twist_at(self, pl: Place) -> Twist:
        fin, inf = self.line_labels
        return Twist.of(pl.twist_label, inf if pl.is_infinite else fin)

    def __str__(self):
        if self.kind == "P1":
            return f"P1 over {self.base} with {'omega' if self.is_omega else f'O({self.d})'}"
        if self.kind == "DVR":
            return f"local ring of {self.K} at {self.place.label}"
        return f"A1 over {self.base}"


class QuadraticDivisor:
    """Finite sum of coefficients sigma_x in K^MW_q(kappa_x) at closed points."""

    def __init__(self, curve: Curve, q: int, coeffs: Mapping[Place, MWElement] | None = None):
        self.curve = curve
        self.q = q
        self.coeffs: dict[Place, MWElement] = {}
        for pl, c in (coeffs or {}).items():
            if pl.K is not curve.K:
                raise DomainError(f"{pl} is not a point of {curve}")
            if pl.is_infinite and curve.kind != "P1":
                raise DomainError("infinity is not a point of this curve")
            if c.degree != q:
                raise DomainError(f"coefficient at {pl.label} has degree {c.degree}, expected {q}")
            if c.field is not pl.residue_field:
                raise DomainError(f"coefficient at {pl.label} must live over its residue field")
            c = c.with_twist(Twist())
            if pl in self.coeffs:
                c = self.coeffs[pl] + c
            if c.terms:
                self.coeffs[pl] = c
            else:
                self.coeffs.pop(pl, None)

    def sorted_items(self) -> list[tuple[Place, MWElement]]:
        return sorted(self.coeffs.items(), key=lambda pc: pc[0].sort_key())

    def coefficient(self, pl: Place) -> MWElement:
        c = self.coeffs.get(pl, MWElement.zero(pl.residue_field, self.q))
        return c.with_twist(self.curve.twist_at(pl))

    def _check(self, o: "QuadraticDivisor"):
        if o.curve != self.curve or o.q != self.q:
            raise DomainError("divisors live on different curves or degrees")

    def __add__(self, o: "QuadraticDivisor") -> "QuadraticDivisor":
        self._check(o)
        merged = dict(self.coeffs)
        for pl, c in o.coeffs.items():
            merged[pl] = merged[pl] + c if pl in merged else c
        return QuadraticDivisor(self.curve, self.q, merged)

    def __neg__(self):
        return QuadraticDivisor(self.curve, self.q, {p: -c for p, c in self.coeffs.items()})

    def __sub__(self, o):
        return self + (-o)

    def equals(self, o: "QuadraticDivisor") -> bool:
        """Pointwise equality of coefficients (not rational equivalence)."""
        self._check(o)
        for pl in set(self.coeffs) | set(o.coeffs):
            z = MWElement.zero(pl.residue_field, self.q)
            if not mw_equal(self.coeffs.get(pl, z), o.coeffs.get(pl, z)):
                return False
        return True

    def to_json(self) -> list[dict]:
        return [{"point": point_json(pl), "coefficient": repr(mw_simplify(c)), "twist": str(self.curve.twist_at(pl))}
                for pl, c in self.sorted_items()]

    def __repr__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"({mw_simplify(c)})*{pl.label}" for pl, c in self.sorted_items())


def point_json(pl: Place):
    """Coefficient list (constant term first) of the monic irreducible, or "inf"."""
    if pl.is_infinite:
        return "inf"
    return [repr(c) for c in pl.pi.coeffs]


def point_divisor(curve: Curve, pl: Place, sigma: MWElement) -> QuadraticDivisor:
    """i_x,* sigma."""
    return QuadraticDivisor(curve, sigma.degree, {pl: sigma})


# ---------------------------------------------------------------------------
# divisors of functions


def finite_support(sigma: MWElement, factors: Sequence[Poly] | None = None) -> list[Place]:
    K = sigma.field
    if factors is not None:
        return sorted({Place(K, g.monic()) for g in factors if g.degree > 0}, key=Place.sort_key)
    found: dict = {}
    for _, us in sigma.terms:
        for u in us:
            for poly in (u.num, u.den):
                if poly.degree > 0:
                    for g, _ in factor(poly)[1]:
                        found[g] = Place(K, g)
    return sorted(found.values(), key=Place.sort_key)


def infinity_coefficient(sigma: MWElement, curve: Curve) -> MWElement:
    """d^y_inf(<g y^(-d)> sigma), the coefficient at infinity of sigma (x) u."""
    K = curve.K
    t = K.gen()
    unit = K(curve.glue) * t ** curve.d      # y^(-d) = t^d
    return mw_residue_raw(bracket(K, unit) * sigma.with_twist(Twist()), Place(K, None))


def tdiv(sigma: MWElement, curve: Curve, factors: Sequence[Poly] | None = None) -> QuadraticDivisor:
    """Divisor of sigma (x) u for sigma in K^MW_{q+1}(k(t))."""
    if sigma.field is not curve.K:
        raise DomainError(f"element lives over {sigma.field}, not {curve.K}")
    q = sigma.degree - 1
    base = sigma.with_twist(Twist())
    if curve.kind == "DVR":
        places = [curve.place]
    else:
        places = finite_support(base, factors)
    coeffs = {pl: mw_residue_raw(base, pl) for pl in places}
    if curve.kind == "P1":
        coeffs[Place(curve.K, None)] = infinity_coefficient(base, curve)
    return QuadraticDivisor(curve, q, coeffs)


def localization_residue(sigma: MWElement, places: Iterable[Place], curve: Curve) -> dict[Place, MWElement]:
    """Boundary of sigma in the localization sequence, restricted to ``places``."""
    out = {}
    for pl in places:
        if pl.is_infinite:
            out[pl] = infinity_coefficient(sigma, curve).with_twist(curve.twist_at(pl))
        else:
            out[pl] = mw_residue_raw(sigma.with_twist(Twist()), pl).with_twist(curve.twist_at(pl))
    return out


def constant_lift(c: MWElement, K: RationalFunctionField) -> MWElement:
    """phi_*: K^MW(k) -> K^MW(k(t))."""
    return c.map(FieldMap.inclusion(c.field, K), K)


def a1_decompose(sigma: MWElement, place: Place | None = None, uniformizer=None):
    """Split sigma into its specialization at a rational point and its divisor on A^1.

    Returns (s^pi_x(sigma), tdiv(sigma)); homotopy invariance says sigma is
    determined by the pair.
    """
    K = sigma.field
    if place is None:
        place = Place(K, Poly.x(K.base))
    if place.is_infinite or place.degree != 1:
        raise DomainError("a1_decompose needs a rational point of A^1")
    const = mw_specialize(sigma.with_twist(Twist()), place, uniformizer)
    return const, tdiv(sigma, Curve.a1(K))


def _lift_to_polynomial(K: RationalFunctionField, pl: Place, u):
    """The polynomial of degree < deg(pl) reducing to u in kappa(pl)."""
    k = K.base
    if pl.degree == 1:
        return K(Poly(k, [k(u)]))
    return K(Poly(k, list(u.c)))


def residue_lift(c: MWElement, place: Place) -> MWElement:
    """sigma = [pi] * lift(c), with raw residue c at ``place``.

    Units are lifted to polynomials of degree < deg(place), so every other
    finite residue of sigma sits at a place of strictly smaller degree.
    """
    K = place.K
    if place.is_infinite:
        raise DomainError("residue_lift needs a finite place")
    pi = place.uniformizer
    out = MWElement.zero(K, c.degree + 1)
    for (r, us), coeff in c.terms.items():
        out = out + MWElement.word(K, r, [pi] + [_lift_to_polynomial(K, place, u) for u in us], coeff)
    return out


def a1_lift(targets: Mapping[Place, MWElement], degree: int, K: RationalFunctionField) -> MWElement:
    """sigma in K^MW_degree(k(t)) whose raw residues on A^1 are exactly ``targets``.

    Induction on the degree of the places, highest first.
    """
    sigma = MWElement.zero(K, degree)
    remaining = {pl: c for pl, c in targets.items() if c.terms and not mw_is_zero(c)}
    while remaining:
        x = max(remaining, key=lambda pl: (pl.degree, pl.sort_key()))
        step = residue_lift(remaining[x].with_twist(Twist()), x)
        sigma = sigma + step
        for pl in finite_support(step):
            left = remaining.get(pl, MWElement.zero(pl.residue_field, degree - 1)) - mw_residue_raw(step, pl)
            if mw_is_zero(left):
                remaining.pop(pl, None)
            else:
                remaining[pl] = left
        if x in remaining:
            raise DomainError(f"residue at {x} did not cancel")
    return sigma


# ---------------------------------------------------------------------------
# the degree isomorphisms on P^1


def pb1_class(D: QuadraticDivisor):
    """Image of D in CHW^1(P^1, L)_q.

    d even: sigma_inf + <-g> * sum_x Tr(sigma_x) in K^MW_q(k); i_inf,* is the identity.
    d odd: F(sigma_inf) + sum_x N(F(sigma_x)) in K^M_q(k).
    """
    from .transfer import transfer_from_point

    curve = D.curve
    if curve.kind != "P1":
        raise DomainError("pb1_class needs a divisor on P^1")
    k = curve.base
    inf = Place(curve.K, None)
    if curve.d % 2 == 0:
        fin = MWElement.zero(k, D.q)
        for pl, c in D.sorted_items():
            if not pl.is_infinite:
                fin = fin + transfer_from_point(pl, c)
        return D.coeffs.get(inf, MWElement.zero(k, D.q)) + bracket(k, k(-curve.glue)) * fin
    if D.q < 0:
        raise DomainError("odd-degree classes live in K^M_q, which needs q >= 0")
    out = KMSymbol.zero(k, D.q)
    for pl, c in D.sorted_items():
        f = forgetful(c)
        if pl.is_infinite or pl.degree == 1:
            out = out + f.map(lambda x: k(x), k)
        else:
            out = out + km_transfer(f, pl.residue_field, k)
    return out


def pb1_equal(a, b) -> bool:
    if isinstance(a, KMSymbol):
        return km_equal(a, b)
    return mw_equal(a, b)


# ---------------------------------------------------------------------------
# classical cycles


def forget_divisor(D: QuadraticDivisor) -> dict[Place, int]:
    """Rank of each coefficient (degree-0 divisors only)."""
    if D.q != 0:
        raise DomainError("forget_divisor applies to K^MW_0 coefficients")
    out = {}
    for pl, c in D.sorted_items():
        r = gw_image(c).rank
        if r:
            out[pl] = r
    return out


def hyper_divisor(curve: Curve, cycle: Mapping[Place, int]) -> QuadraticDivisor:
    """n x -> n h x."""
    return QuadraticDivisor(curve, 0, {pl: h_elem(pl.residue_field) * n for pl, n in cycle.items()})


def cycle_degree(cycle: Mapping[Place, int]) -> int:
    return sum(pl.degree * n for pl, n in cycle.items())
