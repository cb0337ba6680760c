"""Milnor-Witt K-theory of fields.

An element is a Z-combination of words eta^r [u_1]...[u_m] of degree m - r,
stored as ``{(r, (u_1, ..., u_m)): coefficient}``; eta is central, so every
word is kept with its eta-power in front.  Equality goes through the cartesian
square: an element is determined by its Witt part mu'(x) and its Milnor part
F(x).  Here mu' sends [u] to the Pfister form <<u>> = 1 - <u> and eta to -<1>,
so <u> = 1 + eta[u] goes to <u> and h goes to 0.

Residues follow the Theta construction: a unit u = a pi^m maps to
[a] + m_eps <a> xi in K^MW(kappa)[xi] with xi^2 = [-1] xi, xi central.  The
xi-coefficient of a word is its residue, the constant term its specialization.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Sequence

from .errors import CapabilityError, DomainError
from .exact import Field, FieldElement
from .fields import Place, Twist
from .gw import GWElement, gw_equal, witt_equal
from .km import KMSymbol, km_equal

Word = tuple  # (r, units)


class MWElement:
    __slots__ = ("field", "degree", "terms", "twist")

    def __init__(self, field: Field, degree: int, terms: Mapping | None = None, twist: Twist = Twist()):
        self.field = field
        self.degree = degree
        self.twist = twist
        t: dict = {}
        one = field.one
        for (r, us), c in (terms or {}).items():
            if not c:
                continue
            if all(getattr(u, "field", None) is field for u in us):
                us = tuple(us)
            else:
                us = tuple(field(u) for u in us)
            if len(us) - r != degree or r < 0:
                raise DomainError(f"word eta^{r}{list(us)} does not have degree {degree}")
            if us:
                if not all(us):
                    raise DomainError("[0] is not a symbol; units only")
                if one in us:
                    continue  # [1] = 0
            t[(r, us)] = t.get((r, us), 0) + c
        self.terms = {w: c for w, c in t.items() if c}

    # constructors -------------------------------------------------------------
    @classmethod
    def word(cls, F: Field, r: int, units: Sequence = (), coeff: int = 1, twist: Twist = Twist()) -> "MWElement":
        return cls(F, len(units) - r, {(r, tuple(units)): coeff}, twist)

    @classmethod
    def zero(cls, F: Field, degree: int, twist: Twist = Twist()) -> "MWElement":
        return cls(F, degree, {}, twist)

    @classmethod
    def const(cls, F: Field, n: int, twist: Twist = Twist()) -> "MWElement":
        return cls(F, 0, {(0, ()): n}, twist)

    # arithmetic -------------------------------------------------------------
    def _check(self, o: "MWElement"):
        if o.field is not self.field:
            raise DomainError(f"field mismatch: {self.field} vs {o.field}")

    def _lift(self, o) -> "MWElement":
        if isinstance(o, MWElement):
            self._check(o)
            return o
        if isinstance(o, int):
            return MWElement.const(self.field, o)
        if isinstance(o, GWElement):
            return from_gw(o)
        raise TypeError(f"cannot combine MWElement with {type(o).__name__}")

    def __add__(self, o):
        o = self._lift(o)
        if o.degree != self.degree and o.terms and self.terms:
            raise DomainError(f"degree mismatch: {self.degree} vs {o.degree}")
        if o.twist != self.twist and o.terms and self.terms:
            raise DomainError(f"twist mismatch: {self.twist} vs {o.twist}")
        base = self if self.terms else o
        t = dict(self.terms)
        for w, c in o.terms.items():
            t[w] = t.get(w, 0) + c
        return MWElement(self.field, base.degree, t, base.twist)

    __radd__ = __add__

    def __neg__(self):
        return MWElement(self.field, self.degree, {w: -c for w, c in self.terms.items()}, self.twist)

    def __sub__(self, o):
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return self._lift(o) - self

    def __mul__(self, o):
        if isinstance(o, int):
            return MWElement(self.field, self.degree, {w: c * o for w, c in self.terms.items()}, self.twist)
        o = self._lift(o)
        t: dict = {}
        for (r1, u1), c1 in self.terms.items():
            for (r2, u2), c2 in o.terms.items():
                w = (r1 + r2, u1 + u2)
                t[w] = t.get(w, 0) + c1 * c2
        return MWElement(self.field, self.degree + o.degree, t, self.twist * o.twist)

    def __rmul__(self, o):
        if isinstance(o, int):
            return self * o
        return self._lift(o) * self

    def __pow__(self, n: int):
        r = MWElement.const(self.field, 1)
        for _ in range(n):
            r = r * self
        return r

    def with_twist(self, twist: Twist) -> "MWElement":
        return MWElement(self.field, self.degree, self.terms, twist)

    def map(self, phi, field: Field | None = None) -> "MWElement":
        """Base change along a field map (units pushed through phi)."""
        dst = field if field is not None else phi.dst
        t: dict = {}
        for (r, us), c in self.terms.items():
            w = (r, tuple(phi(u) for u in us))
            t[w] = t.get(w, 0) + c
        return MWElement(dst, self.degree, t, self.twist)

    def is_zero_formally(self) -> bool:
        return not self.terms

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda wc: (wc[0][0], tuple(repr(u) for u in wc[0][1])))

    def __repr__(self):
        if not self.terms:
            s = "0"
        else:
            parts = []
            for (r, us), c in self.sorted_terms():
                fac = []
                if r:
                    fac.append("eta" if r == 1 else f"eta^{r}")
                fac.extend(f"[{u!r}]" for u in us)
                body = "*".join(fac)
                if not body:
                    parts.append(("+" if c > 0 else "-") + str(abs(c)))
                elif abs(c) == 1:
                    parts.append(("+" if c > 0 else "-") + body)
                else:
                    parts.append(("+" if c > 0 else "-") + f"{abs(c)}*{body}")
            s = "".join(parts).lstrip("+")
        return s if not self.twist else f"({s}) (x) {self.twist}"


# ---------------------------------------------------------------------------
# named elements


def eta(F: Field) -> MWElement:
    return MWElement.word(F, 1)


def sym(F: Field, *units) -> MWElement:
    """[u_1][u_2]...[u_n]."""
    return MWElement.word(F, 0, units)


def bracket(F: Field, u) -> MWElement:
    """<u> = 1 + eta[u]."""
    return MWElement(F, 0, {(0, ()): 1, (1, (F(u),)): 1})


def h_elem(F: Field) -> MWElement:
    """h = 2 + eta[-1]."""
    return MWElement(F, 0, {(0, ()): 2, (1, (-F.one,)): 1})


def eps_elem(F: Field) -> MWElement:
    """epsilon = -<-1> = -1 - eta[-1]."""
    return MWElement(F, 0, {(0, ()): -1, (1, (-F.one,)): -1})


def n_eps_elem(n: int, F: Field) -> MWElement:
    if n < 0:
        return eps_elem(F) * n_eps_elem(-n, F)
    m, r = divmod(n, 2)
    return h_elem(F) * m + MWElement.const(F, r)


def from_gw(g: GWElement) -> MWElement:
    """Degree-0 element sum c <u> = sum c (1 + eta[u])."""
    F = g.field
    out = MWElement.zero(F, 0, g.twist)
    for u, c in g.terms.items():
        out = out + (bracket(F, u) * c).with_twist(g.twist)
    return out


# ---------------------------------------------------------------------------
# normalization


@dataclass
class NormalizedPair:
    degree: int
    witt: GWElement          # GW class for degree 0, Witt representative otherwise
    milnor: KMSymbol | None  # None in negative degrees


def mu_prime(a: MWElement) -> GWElement:
    """Witt part: [u] -> <<u>> = 1 - <u>, eta -> -<1>."""
    F = a.field
    t: dict = {}
    for (r, us), c in a.terms.items():
        sign = -1 if r % 2 else 1
        # expand prod (1 - <u_i>)
        m = len(us)
        for size in range(m + 1):
            for S in combinations(range(m), size):
                u = F.one
                for i in S:
                    u = u * us[i]
                t[u] = t.get(u, 0) + sign * c * (-1) ** size
    return GWElement(F, t, a.twist)


def forgetful(a: MWElement) -> KMSymbol | None:
    """F: eta -> 0, [u] -> {u}; None in negative degrees."""
    if a.degree < 0:
        return None
    t = {us: c for (r, us), c in a.terms.items() if r == 0}
    return KMSymbol(a.field, a.degree, t)


def mw_normalize(a: MWElement) -> NormalizedPair:
    return NormalizedPair(a.degree, mu_prime(a), forgetful(a))


def gw_image(a: MWElement) -> GWElement:
    if a.degree != 0:
        raise DomainError("only degree-0 elements have a GW image")
    return mu_prime(a)


def mw_equal(a: MWElement, b: MWElement) -> bool:
    if a.field is not b.field:
        raise DomainError(f"field mismatch: {a.field} vs {b.field}")
    if a.degree != b.degree and a.terms and b.terms:
        raise DomainError(f"degree mismatch: {a.degree} vs {b.degree}")
    if a.twist != b.twist and a.terms and b.terms:
        raise DomainError(f"twist mismatch: {a.twist} vs {b.twist}")
    n = a.degree if a.terms else b.degree
    d = (a - b).with_twist(Twist())
    if not d.terms:
        return True
    w = mu_prime(d)
    zero = GWElement(a.field)
    if n == 0:
        return gw_equal(w, zero)
    if not witt_equal(w, zero):
        return False
    if n < 0:
        return True
    return km_equal(forgetful(d), KMSymbol.zero(a.field, n))


def mw_is_zero(a: MWElement) -> bool:
    return mw_equal(a, MWElement.zero(a.field, a.degree, a.twist))


def hyperbolic(s: KMSymbol, twist: Twist = Twist()) -> MWElement:
    """H: {u_1..u_n} -> h [u_1]...[u_n]."""
    F = s.field
    out = MWElement.zero(F, s.degree, twist)
    h = h_elem(F)
    for w, c in s.terms.items():
        out = out + (h * sym(F, *w) * c).with_twist(twist)
    return out


# ---------------------------------------------------------------------------
# lifting pairs back to words


def mw_from_pair(F: Field, degree: int, witt: GWElement, milnor: KMSymbol | None, twist: Twist = Twist()) -> MWElement:
    """The element x with mu'(x) = witt (in W, or GW in degree 0) and F(x) = milnor."""
    if degree < 0:
        r = -degree
        out = MWElement.zero(F, degree)
        for u, c in witt.terms.items():
            out = out + MWElement(F, degree, {(r, ()): c * (-1) ** r, (r + 1, (u,)): c * (-1) ** r})
        return out.with_twist(twist)
    if degree == 0:
        return from_gw(witt.with_twist(Twist())).with_twist(twist)
    if degree == 1:
        if witt.rank % 2:
            raise DomainError("Witt part of a degree-1 element must lie in I")
        x = MWElement.zero(F, 1)
        prod = F.one
        for u, c in witt.terms.items():
            x = x - sym(F, u) * c
            prod = prod * u ** c
        r2 = witt.rank // 2
        if r2:
            # 2 = <<-1>> in W, so a rank-2k representative needs k[-1]
            x = x + sym(F, -F.one) * r2
            prod = prod * (-F.one) ** (-r2)
        target = milnor.unit_value() if milnor is not None else F.one
        z = target * prod
        try:
            b = F.sqrt(z)
        except CapabilityError:
            raise CapabilityError(f"square roots over {F} needed to lift a pair", "mw_from_pair")
        except DomainError:
            raise DomainError("pair is not compatible: Milnor and Witt parts disagree mod 2")
        x = x + h_elem(F) * sym(F, b)
        return x.with_twist(twist)
    if F.order is not None:
        return MWElement.zero(F, degree, twist)
    raise CapabilityError(f"lifting pairs in degree {degree} over {F}", "mw_from_pair")


# ---------------------------------------------------------------------------
# residues and specializations


def _theta_parts(units: Sequence, place: Place, uniformizer) -> list[tuple[int, FieldElement]]:
    return [place.decompose(u, uniformizer) for u in units]


def _theta_xi_coefficient(parts: Sequence[tuple[int, FieldElement]], R: Field) -> MWElement:
    """Coefficient c in prod_i ([a_i] + m_i,eps <a_i> xi) = s + xi c.

    xi has degree 1 and eps-commutes with symbols, and xi^2 = [-1] xi, so
    xi^k = eps^(k-1) xi [-1]^(k-1).
    """
    n = len(parts)
    eps = eps_elem(R)
    minus1 = sym(R, -R.one)
    out = MWElement.zero(R, n - 1)
    for size in range(1, n + 1):
        for S in combinations(range(n), size):
            if any(not parts[i][0] for i in S):
                continue
            swaps = sum(1 for i in S for j in range(i) if j not in S)
            term = MWElement.const(R, 1)
            for i in S:
                m, a = parts[i]
                term = term * n_eps_elem(m, R) * bracket(R, a)
            if (swaps + size - 1) % 2:
                term = term * eps
            for _ in range(size - 1):
                term = term * minus1
            for j in range(n):
                if j not in S:
                    term = term * sym(R, parts[j][1])
            out = out + term
    return out


def mw_residue_raw(a: MWElement, place: Place, uniformizer=None) -> MWElement:
    """Residue with respect to a chosen uniformizer, without the omega_v twist."""
    R = place.residue_field
    out = MWElement.zero(R, a.degree - 1)
    for (r, us), c in a.terms.items():
        q = _theta_xi_coefficient(_theta_parts(us, place, uniformizer), R)
        if q.terms:
            out = out + MWElement.word(R, r) * q * c
    return out


def mw_residue(a: MWElement, place: Place, uniformizer=None) -> MWElement:
    """Twisted residue: the result is tensored with the dual of the distinguished uniformizer.

    With a non-distinguished uniformizer u*pi the raw residue is rescaled by
    <u mod v> so that the twisted class does not depend on the choice.
    """
    raw = mw_residue_raw(a, place, uniformizer)
    if uniformizer is not None:
        ubar = place.unit_reduction(uniformizer)
        raw = bracket(place.residue_field, ubar) * raw
    return raw.with_twist(a.twist * Twist.of(place.twist_label))


def mw_specialize(a: MWElement, place: Place, uniformizer=None) -> MWElement:
    """s_v^pi: constant term of Theta_pi (a ring homomorphism)."""
    R = place.residue_field
    t: dict = {}
    for (r, us), c in a.terms.items():
        w = (r, tuple(place.decompose(u, uniformizer)[1] for u in us))
        t[w] = t.get(w, 0) + c
    return MWElement(R, a.degree, t, a.twist)


def mw_residue_twisted(a: MWElement, place: Place, scale=None, uniformizer=None) -> MWElement:
    """Residue of sigma (x) (scale * l0): renormalize to <scale> sigma (x) l0 first."""
    if scale is not None:
        a = bracket(a.field, scale) * a
    return mw_residue(a, place, uniformizer)


# ---------------------------------------------------------------------------
# twists


def twisted(a: MWElement, label: str, scale=None) -> MWElement:
    """sigma (x) (scale * l), stored as <scale> sigma (x) l."""
    if scale is not None:
        a = bracket(a.field, scale) * a
    return a.with_twist(a.twist * Twist.of(label))


def twist_eval(a: MWElement, label: str, scale=None) -> MWElement:
    """ev_{scale * l}: drop the line l, multiplying by <scale>."""
    if scale is not None and not a.field(scale):
        raise DomainError("generator must be nonzero")
    out = a.with_twist(a.twist.without(label))
    if scale is not None:
        out = bracket(a.field, scale) * out
    return out


# ---------------------------------------------------------------------------
# canonical representatives


def witt_canonical(g: GWElement) -> GWElement:
    """Representative of rank 0 or 1 of the Witt class of g over a finite field."""
    F = g.field
    if F.order is None:
        raise CapabilityError(f"canonical Witt representative over {F}", "witt_canonical")
    r = g.rank
    if F.characteristic == 2:
        return GWElement(F, {F.one: r % 2}, g.twist)
    disc = (-F.one) ** (r * (r - 1) // 2 % 2) * g.det()
    nu = F.nonsquare()
    if r % 2:
        return GWElement(F, {F.one if F.is_square(disc) else nu: 1}, g.twist)
    if F.is_square(disc):
        return GWElement(F, {}, g.twist)
    return GWElement(F, {F.one: 1, nu: -1}, g.twist)


def mw_simplify(a: MWElement) -> MWElement:
    """Canonical word representative over finite fields; other fields only collect terms."""
    F = a.field
    if F.order is None:
        return a
    n = a.degree
    if n >= 2:
        return MWElement.zero(F, n, a.twist)
    if n == 0:
        from .gw import gw_canonical

        return from_gw(gw_canonical(gw_image(a).with_twist(Twist()))).with_twist(a.twist)
    if n == 1:
        # K^MW_1 of a finite field is F^*: the element is [product of its Milnor part]
        b = F.one
        for us, c in forgetful(a).terms.items():
            b = b * us[0] ** c
        return sym(F, b).with_twist(a.twist) if b != F.one else MWElement.zero(F, 1, a.twist)
    w = witt_canonical(mu_prime(a).with_twist(Twist()))
    return mw_from_pair(F, n, w, None, a.twist)
