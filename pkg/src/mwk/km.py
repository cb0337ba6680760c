"""Milnor K-theory symbols {u_1,...,u_n}: residues, equality, norms."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from .errors import CapabilityError, DomainError
from .exact import QQ, Field, FieldElement, RationalFunctionField, factor, factor_int, mat_det
from .fields import Extension, Place


class KMSymbol:
    """Z-combination of words {u_1,...,u_n} in K^M_n(F); degree 0 is Z."""

    __slots__ = ("field", "degree", "terms")

    def __init__(self, field: Field, degree: int, terms: Mapping | None = None):
        if degree < 0:
            raise DomainError("Milnor K-theory lives in degrees >= 0")
        self.field = field
        self.degree = degree
        t: dict = {}
        for w, c in (terms or {}).items():
            w = tuple(field(u) for u in w)
            if len(w) != degree:
                raise DomainError(f"word {w} does not have length {degree}")
            if any(not u for u in w):
                raise DomainError("symbols need units")
            if not c or any(u == field.one for u in w):
                continue
            t[w] = t.get(w, 0) + c
        self.terms = {w: c for w, c in t.items() if c}

    @classmethod
    def symbol(cls, field: Field, *units, coeff: int = 1) -> "KMSymbol":
        return cls(field, len(units), {tuple(units): coeff})

    @classmethod
    def integer(cls, field: Field, n: int) -> "KMSymbol":
        return cls(field, 0, {(): n})

    @classmethod
    def zero(cls, field: Field, degree: int) -> "KMSymbol":
        return cls(field, degree)

    def _check(self, o: "KMSymbol"):
        if o.field is not self.field or o.degree != self.degree:
            raise DomainError("KM symbols must share field and degree")

    def __add__(self, o):
        if isinstance(o, int) and o == 0:
            return self
        self._check(o)
        t = dict(self.terms)
        for w, c in o.terms.items():
            t[w] = t.get(w, 0) + c
        return KMSymbol(self.field, self.degree, t)

    __radd__ = __add__

    def __neg__(self):
        return KMSymbol(self.field, self.degree, {w: -c for w, c in self.terms.items()})

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, o):
        if isinstance(o, int):
            return KMSymbol(self.field, self.degree, {w: c * o for w, c in self.terms.items()})
        if o.field is not self.field:
            raise DomainError("field mismatch")
        t: dict = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in o.terms.items():
                t[w1 + w2] = t.get(w1 + w2, 0) + c1 * c2
        return KMSymbol(self.field, self.degree + o.degree, t)

    __rmul__ = __mul__

    def integer_value(self) -> int:
        if self.degree != 0:
            raise DomainError("only degree-0 symbols are integers")
        return self.terms.get((), 0)

    def unit_value(self) -> FieldElement:
        """Degree 1: the unit prod u^c representing the class in F^x."""
        if self.degree != 1:
            raise DomainError("only degree-1 symbols are units")
        r = self.field.one
        for (u,), c in self.terms.items():
            r = r * u ** c
        return r

    def map(self, fn, field: Field) -> "KMSymbol":
        return KMSymbol(field, self.degree, {tuple(fn(u) for u in w): c for w, c in self.terms.items()})

    def __repr__(self):
        if self.degree == 0:
            return str(self.integer_value())
        if not self.terms:
            return "0"
        parts = []
        for w, c in sorted(self.terms.items(), key=lambda wc: tuple(repr(u) for u in wc[0])):
            sym = "{" + ", ".join(repr(u) for u in w) + "}"
            parts.append(("+" if c > 0 else "-") + (sym if abs(c) == 1 else f"{abs(c)}*{sym}"))
        return "".join(parts).lstrip("+")


# ---------------------------------------------------------------------------
# residues


def _theta_km(parts: Sequence[tuple[int, FieldElement]], R: Field) -> dict:
    """Milnor image of the Theta coefficient: eps becomes -1."""
    out: dict = {}
    n = len(parts)
    minus1 = -R.one
    for size in range(1, n + 1):
        for S in combinations(range(n), size):
            c = 1
            for i in S:
                c *= parts[i][0]
            if not c:
                continue
            swaps = sum(1 for i in S for j in range(i) if j not in S)
            if (swaps + size - 1) % 2:
                c = -c
            w = (minus1,) * (size - 1) + tuple(parts[i][1] for i in range(n) if i not in S)
            out[w] = out.get(w, 0) + c
    return out


def km_residue(s: KMSymbol, place: Place, uniformizer=None) -> KMSymbol:
    """Tame residue at a place of k(t); degree drops by one."""
    if s.degree < 1:
        raise DomainError("residue needs degree >= 1")
    R = place.residue_field
    t: dict = {}
    for w, c in s.terms.items():
        parts = [place.decompose(u, uniformizer) for u in w]
        for w2, c2 in _theta_km(parts, R).items():
            t[w2] = t.get(w2, 0) + c * c2
    return KMSymbol(R, s.degree - 1, t)


def km_specialize(s: KMSymbol, place: Place, uniformizer=None) -> KMSymbol:
    R = place.residue_field
    t: dict = {}
    for w, c in s.terms.items():
        w2 = tuple(place.decompose(u, uniformizer)[1] for u in w)
        t[w2] = t.get(w2, 0) + c
    return KMSymbol(R, s.degree, t)


def _km_support(s: KMSymbol) -> list[Place]:
    K = s.field
    found: dict = {}
    for w in s.terms:
        for u in w:
            for poly in (u.num, u.den):
                if poly.degree > 0:
                    for g, _ in factor(poly)[1]:
                        found[g] = Place(K, g)
    return sorted(found.values(), key=Place.sort_key)


def _tame_q(a: Fraction, b: Fraction, p: int) -> int:
    def split(x: Fraction):
        n, d = x.numerator, x.denominator
        v = 0
        while n % p == 0:
            n //= p
            v += 1
        while d % p == 0:
            d //= p
            v -= 1
        return v, n * pow(d, -1, p) % p

    al, u = split(a)
    be, v = split(b)
    sign = -1 if (al * be) % 2 else 1
    return sign * pow(u, be, p) * pow(v, -al, p) % p


def km_is_zero(s: KMSymbol) -> bool:
    F = s.field
    n = s.degree
    if n == 0:
        return s.integer_value() == 0
    if n == 1:
        return s.unit_value() == F.one
    if F.order is not None:
        return True
    if F is QQ and n == 2:
        from .gw import hilbert_symbol

        primes = set()
        for w in s.terms:
            for u in w:
                primes.update(factor_int(u.v.numerator * u.v.denominator))
        for p in sorted(primes - {2}):
            acc = 1
            for (a, b), c in s.terms.items():
                acc = acc * pow(_tame_q(a.v, b.v, p), c, p) % p
            if acc != 1:
                return False
        h = 1
        for (a, b), c in s.terms.items():
            if c % 2:
                h *= hilbert_symbol(a, b, 2)
        return h == 1
    if isinstance(F, RationalFunctionField):
        if F.base.order is None and F.base is not QQ:
            raise CapabilityError(f"K^M_{n} equality over {F}", "km_equal")
        for pl in _km_support(s):
            if not km_is_zero(km_residue(s, pl)):
                return False
        return km_is_zero(km_specialize(s, Place(F, None)))
    raise CapabilityError(f"K^M_{n} equality over {F} is outside the support matrix", "km_equal")


def km_equal(a: KMSymbol, b: KMSymbol) -> bool:
    a._check(b)
    return km_is_zero(a - b)


# ---------------------------------------------------------------------------
# transfers


def field_norm(E: Extension, u: FieldElement, over: Field | None = None) -> FieldElement:
    P = E.presentation(over)
    return mat_det(P.mul_matrix(P.element_to_poly(u)), P.base)


def km_transfer(s: KMSymbol, E: Extension, over: Field | None = None) -> KMSymbol:
    """Norm map K^M_n(E) -> K^M_n(k): degree multiplication, field norm, or 0 over finite fields."""
    k = over if over is not None else E.base
    if s.field is not E:
        raise DomainError(f"symbol lives over {s.field}, not {E}")
    n = s.degree
    if n == 0:
        return KMSymbol.integer(k, s.integer_value() * E.degree_over(k))
    if n == 1:
        t: dict = {}
        for (u,), c in s.terms.items():
            N = field_norm(E, u, k)
            t[(N,)] = t.get((N,), 0) + c
        return KMSymbol(k, 1, t)
    if E.order is not None:
        return KMSymbol.zero(k, n)
    raise CapabilityError(f"K^M_{n} transfer over the infinite field {k}", "km_transfer")


def km_support_matrix() -> dict:
    """Machine-readable description of what km_equal and km_transfer decide."""
    return {
        "km_equal": {
            "any field": "degrees 0 and 1",
            "finite": "all degrees (K^M_n = 0 for n >= 2)",
            "QQ": "degrees <= 2",
            "k(t), k finite": "all degrees",
            "QQ(t)": "degrees <= 2 (residue fields of degree-1 places)",
        },
        "km_transfer": {"any finite extension": "degrees 0 and 1", "finite fields": "all degrees"},
    }
