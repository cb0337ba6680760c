"""Grothendieck-Witt and Witt rings.

Elements are finite Z-combinations of rank-one classes <u>, keyed by a square
class representative whenever the field can compute one.  Equality is decided
by invariants:

* finite fields: rank, plus the determinant square class in odd characteristic;
* Q: Witt cancellation to a comparison of two actual forms, then rank,
  determinant, signature and Hasse invariants at 2 and the primes in the entries;
* k(t): second residues at every finite place in the support (recursively over
  the residue field), plus the specialization at infinity.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import CapabilityError, DomainError
from .exact import (
    QQ,
    Field,
    FieldElement,
    RationalFunction,
    RationalFunctionField,
    factor,
    factor_int,
    mat_det,
    squarefree_part,
)
from .fields import Place, Twist


def _canon_unit(F: Field, u: FieldElement) -> FieldElement:
    u = F(u)
    if not u:
        raise DomainError("<0> is not a rank-one form; units only")
    try:
        return F.square_class(u)
    except CapabilityError:
        return u


class GWElement:
    """sum n_i <u_i> in GW(F), optionally twisted by a product of named lines."""

    __slots__ = ("field", "terms", "twist")

    def __init__(self, field: Field, terms: Mapping | Iterable = (), twist: Twist = Twist()):
        self.field = field
        self.twist = twist
        acc: dict = {}
        items = terms.items() if isinstance(terms, Mapping) else ((u, 1) for u in terms)
        for u, n in items:
            if not n:
                continue
            k = _canon_unit(field, u)
            acc[k] = acc.get(k, 0) + n
        self.terms = {k: v for k, v in acc.items() if v}

    @classmethod
    def diag(cls, field: Field, units: Iterable, twist: Twist = Twist()) -> "GWElement":
        return cls(field, list(units), twist)

    @classmethod
    def const(cls, field: Field, n: int, twist: Twist = Twist()) -> "GWElement":
        return cls(field, {field.one: n}, twist)

    # arithmetic -------------------------------------------------------------
    def _check(self, o: "GWElement"):
        if o.field is not self.field:
            raise DomainError(f"field mismatch: {self.field} vs {o.field}")

    def _lift(self, o) -> "GWElement":
        if isinstance(o, GWElement):
            self._check(o)
            return o
        if isinstance(o, int):
            return GWElement.const(self.field, o, self.twist)
        raise TypeError(f"cannot combine GWElement with {type(o).__name__}")

    def __add__(self, o):
        o = self._lift(o)
        if o.twist != self.twist and o.terms and self.terms:
            raise DomainError(f"twist mismatch: {self.twist} vs {o.twist}")
        t = dict(self.terms)
        for k, v in o.terms.items():
            t[k] = t.get(k, 0) + v
        return GWElement(self.field, t, self.twist if self.terms or not o.terms else o.twist)

    __radd__ = __add__

    def __neg__(self):
        return GWElement(self.field, {k: -v for k, v in self.terms.items()}, self.twist)

    def __sub__(self, o):
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return self._lift(o) - self

    def __mul__(self, o):
        if isinstance(o, int):
            return GWElement(self.field, {k: v * o for k, v in self.terms.items()}, self.twist)
        self._check(o)
        t: dict = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in o.terms.items():
                k = _canon_unit(self.field, k1 * k2)
                t[k] = t.get(k, 0) + v1 * v2
        return GWElement(self.field, t, self.twist * o.twist)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        r = GWElement.const(self.field, 1)
        for _ in range(n):
            r = r * self
        return r

    def scale(self, u) -> "GWElement":
        """<u> * self."""
        return GWElement(self.field, {self.field(u) * k: v for k, v in self.terms.items()}, self.twist)

    def with_twist(self, twist: Twist) -> "GWElement":
        return GWElement(self.field, self.terms, twist)

    def map(self, fn, field: Field) -> "GWElement":
        """Push units through a field map (base change)."""
        t: dict = {}
        for k, v in self.terms.items():
            t[fn(k)] = t.get(fn(k), 0) + v
        return GWElement(field, t, self.twist)

    @property
    def rank(self) -> int:
        return sum(self.terms.values())

    def det(self) -> FieldElement:
        d = self.field.one
        for k, v in self.terms.items():
            d = d * k ** v
        return d

    def is_zero_formally(self) -> bool:
        return not self.terms

    def sorted_terms(self) -> list[tuple[FieldElement, int]]:
        return sorted(self.terms.items(), key=lambda kv: _unit_sort_key(kv[0]))

    def __repr__(self):
        if not self.terms:
            s = "0"
        else:
            parts = []
            for k, v in self.sorted_terms():
                sym = f"<{k!r}>"
                if v == 1:
                    parts.append(f"+{sym}")
                elif v == -1:
                    parts.append(f"-{sym}")
                else:
                    parts.append(f"{'+' if v > 0 else '-'}{abs(v)}*{sym}")
            s = "".join(parts).lstrip("+")
        return s if not self.twist else f"({s}) (x) {self.twist}"

    def __hash__(self):
        return hash((frozenset(self.terms.items()), self.twist))

    def same_terms(self, o: "GWElement") -> bool:
        return self.field is o.field and self.terms == o.terms and self.twist == o.twist


def _unit_sort_key(u: FieldElement):
    if isinstance(u, RationalFunction):
        return (0, u.num.sort_key(), u.den.sort_key())
    return (0, u._key()) if not isinstance(u._key(), tuple) else (1, u._key())


# ---------------------------------------------------------------------------
# constants


def one(F: Field, twist: Twist = Twist()) -> GWElement:
    return GWElement.const(F, 1, twist)


def bracket(F: Field, u, twist: Twist = Twist()) -> GWElement:
    return GWElement(F, {F(u): 1}, twist)


def hyperbolic(F: Field, twist: Twist = Twist()) -> GWElement:
    """h = <1> + <-1>."""
    return GWElement(F, [F.one, -F.one], twist)


def epsilon(F: Field) -> GWElement:
    """epsilon = -<-1>."""
    return GWElement(F, {-F.one: -1})


def pfister(F: Field, *units) -> GWElement:
    """<<u_1,...,u_n>> = prod (1 - <u_i>)."""
    r = one(F)
    for u in units:
        r = r * (one(F) - bracket(F, u))
    return r


def n_epsilon(n: int, F: Field) -> GWElement:
    """Quadratic multiplicity n_eps: m*h for n = 2m, m*h + 1 for n = 2m+1, eps*(-n)_eps for n < 0."""
    if n < 0:
        return epsilon(F) * n_epsilon(-n, F)
    m, r = divmod(n, 2)
    return hyperbolic(F) * m + GWElement.const(F, r)


# ---------------------------------------------------------------------------
# Hilbert symbols and invariants over Q


def _legendre(a: int, p: int) -> int:
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def _rat_to_int_class(x) -> int:
    v = Fraction(x.v) if hasattr(x, "v") else Fraction(x)
    return squarefree_part(v.numerator * v.denominator)


def hilbert_symbol(a, b, p) -> int:
    """(a, b)_p over Q for p prime or p = 'inf'."""
    a, b = _rat_to_int_class(a), _rat_to_int_class(b)
    if p == "inf":
        return -1 if a < 0 and b < 0 else 1

    def split(n):
        al = 0
        while n % p == 0:
            n //= p
            al += 1
        return al, n

    al, u = split(a)
    be, v = split(b)
    if p == 2:
        eps = lambda x: ((x - 1) // 2) % 2
        om = lambda x: ((x * x - 1) // 8) % 2
        e = eps(u) * eps(v) + al * om(v) + be * om(u)
        return -1 if e % 2 else 1
    s = (-1) ** (al * be * ((p - 1) // 2))
    return s * _legendre(u, p) ** be * _legendre(v, p) ** al


def hasse_invariant(entries: Sequence, p) -> int:
    s = 1
    for i in range(len(entries)):
        for j in range(i + 1, len(entries)):
            s *= hilbert_symbol(entries[i], entries[j], p)
    return s


def _expand_form(a: GWElement, positive: bool) -> list:
    out = []
    for k, v in a.sorted_terms():
        if (v > 0) == positive:
            out.extend([k] * abs(v))
    return out


def _relevant_primes(entries: Iterable) -> list[int]:
    ps = {2}
    for e in entries:
        n = _rat_to_int_class(e)
        ps.update(factor_int(n).keys())
    return sorted(ps)


def _q_forms_isometric(X: list, Y: list) -> bool:
    if len(X) != len(Y):
        return False
    if not X:
        return True
    dX = Fraction(1)
    dY = Fraction(1)
    for x in X:
        dX *= x.v
    for y in Y:
        dY *= y.v
    if squarefree_part(dX.numerator * dX.denominator) != squarefree_part(dY.numerator * dY.denominator):
        return False
    if sum(1 for x in X if x.v > 0) != sum(1 for y in Y if y.v > 0):
        return False
    for p in _relevant_primes(X + Y):
        if hasse_invariant(X, p) != hasse_invariant(Y, p):
            return False
    return True


# ---------------------------------------------------------------------------
# residues of GW elements over k(t)


def second_residue(a: GWElement, place: Place, uniformizer=None) -> GWElement:
    """Second residue: <u> with v(u) odd maps to <u * pi^{-v(u)} mod v>, even to 0 (in W)."""
    R = place.residue_field
    t: dict = {}
    for u, n in a.terms.items():
        m, abar = place.decompose(u, uniformizer)
        if m % 2:
            t[abar] = t.get(abar, 0) + n
    return GWElement(R, t, Twist.of(place.twist_label))


def specialize_gw(a: GWElement, place: Place, uniformizer=None) -> GWElement:
    """s_v^pi on GW: <a pi^m> maps to <abar>."""
    R = place.residue_field
    t: dict = {}
    for u, n in a.terms.items():
        _, abar = place.decompose(u, uniformizer)
        t[abar] = t.get(abar, 0) + n
    return GWElement(R, t)


def support_places(a: GWElement, seed: int | None = None) -> list[Place]:
    K = a.field
    found: dict = {}
    for u in a.terms:
        for poly in (u.num, u.den):
            if poly.degree > 0:
                for g, _ in factor(poly, seed)[1]:
                    found[g] = Place(K, g)
    return sorted(found.values(), key=Place.sort_key)


# ---------------------------------------------------------------------------
# decision procedures


def _field_kind(F: Field) -> str:
    if F.order is not None:
        return "finite"
    if F is QQ:
        return "QQ"
    if isinstance(F, RationalFunctionField):
        return "function"
    return "other"


def gw_is_zero(a: GWElement) -> bool:
    F = a.field
    kind = _field_kind(F)
    if kind == "finite":
        if a.rank != 0:
            return False
        if F.characteristic == 2:
            return True
        return F.is_square(a.det())
    if kind == "QQ":
        return _q_forms_isometric(_expand_form(a, True), _expand_form(a, False))
    if kind == "function":
        k = F.base
        if _field_kind(k) not in ("finite", "QQ"):
            raise CapabilityError(f"GW equality over {F} needs a finite or rational constant field", "gw_equal")
        for pl in support_places(a):
            if not witt_is_zero(second_residue(a, pl)):
                return False
        return gw_is_zero(specialize_gw(a, Place(F, None)))
    raise CapabilityError(f"GW equality over {F} is not decidable in this library", "gw_equal")


def witt_is_zero(a: GWElement) -> bool:
    r = a.rank
    if r % 2:
        return False
    return gw_is_zero(a - hyperbolic(a.field, a.twist) * (r // 2))


def gw_equal(a: GWElement, b: GWElement) -> bool:
    if a.field is not b.field:
        raise DomainError(f"field mismatch: {a.field} vs {b.field}")
    if a.terms and b.terms and a.twist != b.twist:
        raise DomainError(f"twist mismatch: {a.twist} vs {b.twist}")
    if a.same_terms(b):
        return True
    return gw_is_zero(a.with_twist(Twist()) - b.with_twist(Twist()))


def witt_equal(a: GWElement, b: GWElement) -> bool:
    if a.field is not b.field:
        raise DomainError(f"field mismatch: {a.field} vs {b.field}")
    return witt_is_zero(a.with_twist(Twist()) - b.with_twist(Twist()))


def gw_canonical(a: GWElement) -> GWElement:
    """Unique representative over a finite field: r<1> (char 2) or a<1> + b<nu>, b in {0,1}."""
    F = a.field
    if F.order is None:
        raise CapabilityError(f"canonical GW representative over {F}", "gw_canonical")
    r = a.rank
    if F.characteristic == 2:
        return GWElement(F, {F.one: r}, a.twist)
    b = 0 if F.is_square(a.det()) else 1
    return GWElement(F, {F.one: r - b, F.nonsquare(): b}, a.twist)


# ---------------------------------------------------------------------------
# invariants


@dataclass
class GWInvariants:
    rank: int
    disc: FieldElement | None = None
    signature: tuple[int, int] | None = None
    hasse: dict = dc_field(default_factory=dict)
    residue_profile: dict = dc_field(default_factory=dict)

    def as_dict(self) -> dict:
        out: dict = {"rank": self.rank}
        if self.disc is not None:
            out["disc"] = repr(self.disc)
        if self.signature is not None:
            out["signature"] = list(self.signature)
        if self.hasse:
            out["hasse"] = {str(p): s for p, s in self.hasse.items()}
        if self.residue_profile:
            out["residues"] = {k: v.as_dict() for k, v in self.residue_profile.items()}
        return out


def discriminant(a: GWElement) -> FieldElement:
    r = a.rank
    sign = -1 if (r * (r - 1) // 2) % 2 else 1
    return _canon_unit(a.field, a.det() * sign)


def gw_invariants(a: GWElement) -> GWInvariants:
    F = a.field
    kind = _field_kind(F)
    inv = GWInvariants(rank=a.rank)
    if kind == "finite":
        inv.disc = discriminant(a)
    elif kind == "QQ":
        inv.disc = discriminant(a)
        pos = sum(v for k, v in a.terms.items() if k.v > 0)
        neg = sum(v for k, v in a.terms.items() if k.v < 0)
        inv.signature = (pos, neg)
        # Hasse invariants of the Witt representative (-<u> replaced by <-u>)
        ents = []
        for k, v in a.sorted_terms():
            ents.extend([k if v > 0 else -k] * abs(v))
        # primes not listed have Hasse invariant +1; listing only the -1 primes
        # makes the map independent of the diagonal representative
        inv.hasse = {p: -1 for p in _relevant_primes(ents) if hasse_invariant(ents, p) == -1}
    elif kind == "function":
        inv.disc = discriminant(a)
        for pl in support_places(a):
            inv.residue_profile[pl.label] = gw_invariants(second_residue(a, pl).with_twist(Twist()))
        inv.residue_profile["specialization@inf"] = gw_invariants(specialize_gw(a, Place(F, None)))
    else:
        raise CapabilityError(f"invariants over {F}", "gw_invariants")
    return inv


# ---------------------------------------------------------------------------
# Gram matrices


@dataclass
class GramSpace:
    field: Field
    matrix: list
    twist: Twist = Twist()

    def __post_init__(self):
        M = self.matrix
        n = len(M)
        if any(len(r) != n for r in M):
            raise DomainError("Gram matrix must be square")
        self.matrix = [[self.field(x) for x in r] for r in M]
        for i in range(n):
            for j in range(i):
                if self.matrix[i][j] != self.matrix[j][i]:
                    raise DomainError("Gram matrix must be symmetric")


def gram_to_gw(g: GramSpace | Sequence, field: Field | None = None) -> GWElement:
    """Classify a symmetric non-degenerate bilinear form."""
    if not isinstance(g, GramSpace):
        g = GramSpace(field, g)
    F = g.field
    M = [list(r) for r in g.matrix]
    n = len(M)
    if n and not mat_det(M, F):
        raise DomainError("degenerate Gram matrix")
    diag: list = []
    hyper = 0
    while M:
        n = len(M)
        piv = next((i for i in range(n) if M[i][i]), None)
        if piv is None:
            if F.characteristic == 2:
                # alternating remainder: symplectic, rank 2m
                hyper += n // 2
                break
            j = next((j for j in range(1, n) if M[0][j]), None)
            # replace e_0 by e_0 + e_j
            for k in range(n):
                M[0][k] = M[0][k] + M[j][k]
            for k in range(n):
                M[k][0] = M[k][0] + M[k][j]
            piv = 0
        if piv != 0:
            M[0], M[piv] = M[piv], M[0]
            for r in M:
                r[0], r[piv] = r[piv], r[0]
        a = M[0][0]
        diag.append(a)
        inv = a.inverse()
        rest = []
        for i in range(1, n):
            f = M[i][0] * inv
            rest.append([M[i][j] - f * M[0][j] for j in range(1, n)])
        M = rest
    out = GWElement(F, diag, g.twist)
    if hyper:
        out = out + hyperbolic(F, g.twist) * hyper
    return out


def gram_of(a: GWElement) -> list:
    """Diagonal Gram matrix of an actual (nonnegative) form."""
    ents = _expand_form(a, True)
    if any(v < 0 for v in a.terms.values()):
        raise DomainError("virtual element has no Gram matrix")
    n = len(ents)
    F = a.field
    return [[ents[i] if i == j else F.zero for j in range(n)] for i in range(n)]


# ---------------------------------------------------------------------------
# fundamental ideal


def in_power_of_I(a: GWElement, n: int) -> bool:
    """Membership of the Witt class of a in I^n."""
    F = a.field
    if n <= 0:
        return True
    if a.rank % 2:
        return False
    if n == 1:
        return True
    kind = _field_kind(F)
    if not _disc_trivial(a):
        return False
    if n == 2:
        return True
    if kind == "finite":
        return witt_is_zero(a)
    if kind == "QQ":
        ents = []
        for k, v in a.sorted_terms():
            ents.extend([k if v > 0 else -k] * abs(v))
        if any(_clifford(ents, p) != 1 for p in _relevant_primes(ents)):
            return False
        sig = sum(v if k.v > 0 else -v for k, v in a.terms.items())
        return sig % (2 ** n) == 0
    if kind == "function" and _field_kind(F.base) == "finite":
        return all(in_power_of_I(second_residue(a, pl).with_twist(Twist()), n - 1) for pl in support_places(a)) \
            and in_power_of_I(specialize_gw(a, Place(F, None)), n)
    raise CapabilityError(f"I^{n} membership over {F}", "fundamental_image")


def _disc_trivial(a: GWElement) -> bool:
    F = a.field
    d = discriminant(a)
    if F.order is not None and F.characteristic == 2:
        return True
    try:
        return F.is_square(d)
    except CapabilityError:
        raise CapabilityError(f"discriminant test over {F}", "fundamental_image")


def _clifford(ents: list, p) -> int:
    """Witt invariant of an even-rank form with trivial discriminant."""
    s = hasse_invariant(ents, p)
    return s * hilbert_symbol(-1, -1, p) if len(ents) % 8 in (4, 6) else s


def fundamental_image(a: GWElement, n: int):
    """Image of a in gI^n = I^n / I^{n+1}.

    n = 0: rank mod 2.  n = 1: discriminant square class.  n >= 2 over finite
    fields: 0.  n = 2 over Q: the local Witt invariants {p: +-1}.  n >= 3 over Q:
    signature / 2^n mod 2.  Over F_q(t): residues at support places (level n-1).
    """
    if not in_power_of_I(a, n):
        raise DomainError(f"{a} is not in I^{n}")
    F = a.field
    if n == 0:
        return a.rank % 2
    if n == 1:
        return discriminant(a)
    kind = _field_kind(F)
    if kind == "finite":
        return 0
    if kind == "QQ":
        ents = []
        for k, v in a.sorted_terms():
            ents.extend([k if v > 0 else -k] * abs(v))
        if n == 2:
            return {p: _clifford(ents, p) for p in _relevant_primes(ents) + ["inf"]}
        sig = sum(v if k.v > 0 else -v for k, v in a.terms.items())
        return (sig // 2 ** n) % 2
    if kind == "function":
        out = {pl.label: fundamental_image(second_residue(a, pl).with_twist(Twist()), n - 1)
               for pl in support_places(a)}
        return {k: v for k, v in out.items() if v not in (0, {})}
    raise CapabilityError(f"gI^{n} over {F}", "fundamental_image")
