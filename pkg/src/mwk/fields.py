"""Finite extensions presented by triangular systems, places of k(t), and field maps.

An :class:`Extension` is one simple stage ``parent[x]/(f)``; towers are chains
of stages.  Every tower can be flattened into a :class:`Presentation` over any
field below it: variables t_1..t_n, one monic polynomial per stage, and the
monomial basis of the quotient.  The distinguished generator of the canonical
module of a presentation is w = (f_1 ^ ... ^ f_n)^* (x) dt_1 ^ ... ^ dt_n; all
omega-twisted data in the library is stored relative to that w.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .errors import CapabilityError, DomainError
from .exact import (
    QQ,
    Field,
    FieldElement,
    MPoly,
    Poly,
    RationalFunction,
    RationalFunctionField,
    _reduce,
    check_triangular,
    factor,
    factor_int,
    is_irreducible,
    poly_xgcd,
    rational_roots,
    squarefree_decomposition,
)


# ---------------------------------------------------------------------------
# simple extensions


class ExtElement(FieldElement):
    __slots__ = ("field", "c")

    def __init__(self, field: "Extension", c: tuple):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "c", c)

    def _key(self):
        return tuple(x._key() for x in self.c)

    def __bool__(self):
        return any(self.c)

    def _poly(self) -> Poly:
        return Poly._raw(self.field.parent, list(self.c))

    def _add(self, o):
        return self.field._from_poly_coeffs([a + b for a, b in zip(self.c, o.c)])

    def _neg(self):
        return self.field._from_poly_coeffs([-a for a in self.c])

    def _mul(self, o):
        return self.field._from_poly(self._poly() * o._poly())

    def _inv(self):
        g, s, _ = poly_xgcd(self._poly(), self.field.minpoly)
        if g.degree != 0:
            raise DomainError(f"{self} is not invertible (modulus is reducible)")
        return self.field._from_poly(s)

    def __lt__(self, o):
        return self._key() < o._key()

    def is_constant(self) -> bool:
        return not any(self.c[1:])


class Extension(Field):
    """parent[x]/(f) for a monic irreducible f over parent."""

    _counter = itertools.count()

    def __init__(self, parent: Field, minpoly: Poly, gen: str = "x"):
        if minpoly.field is not parent:
            minpoly = Poly(parent, minpoly.coeffs)
        if minpoly.degree < 1 or not minpoly.is_monic():
            raise DomainError("defining polynomial must be monic of positive degree")
        self.parent = parent
        self.minpoly = minpoly
        self.d = minpoly.degree
        self.gen_name = gen
        self.characteristic = parent.characteristic
        self.order = parent.order ** self.d if parent.order is not None else None
        self.separable = bool(minpoly.deriv())
        self.uid = next(Extension._counter)
        self.name = f"{parent.name}[{gen}]/({minpoly.format(gen)})"
        self._zero = ExtElement(self, tuple([parent.zero] * self.d))

    # construction -----------------------------------------------------------
    def _from_poly_coeffs(self, cs: list) -> ExtElement:
        return ExtElement(self, tuple(cs))

    def _from_poly(self, p: Poly) -> ExtElement:
        r = p % self.minpoly if p.degree >= self.d else p
        cs = list(r.coeffs) + [self.parent.zero] * (self.d - len(r.coeffs))
        return ExtElement(self, tuple(cs))

    def __call__(self, x) -> ExtElement:
        if isinstance(x, ExtElement) and x.field is self:
            return x
        if isinstance(x, (list, tuple)):
            if len(x) > self.d:
                raise DomainError("too many coordinates")
            cs = [self.parent(c) for c in x] + [self.parent.zero] * (self.d - len(x))
            return ExtElement(self, tuple(cs))
        if isinstance(x, Poly):
            return self._from_poly(Poly(self.parent, x.coeffs))
        c = self.parent(x)  # raises TypeError for foreign / higher elements
        return ExtElement(self, (c,) + tuple([self.parent.zero] * (self.d - 1)))

    @property
    def zero(self):
        return self._zero

    def gen(self) -> ExtElement:
        if self.d == 1:
            return self(-self.minpoly.coeffs[0])
        return self([0, 1])

    # tower structure ----------------------------------------------------------
    def stages(self) -> list["Extension"]:
        out = []
        F: Field = self
        while isinstance(F, Extension):
            out.append(F)
            F = F.parent
        return out[::-1]

    @property
    def base(self) -> Field:
        """Bottom (non-extension) field of the tower."""
        return self.stages()[0].parent

    def stages_over(self, k: Field) -> list["Extension"]:
        st = self.stages()
        if k is self:
            return []
        for i, s in enumerate(st):
            if s.parent is k:
                return st[i:]
        raise DomainError(f"{k} is not a field in the tower of {self}")

    def degree_over(self, k: Field) -> int:
        d = 1
        for s in self.stages_over(k):
            d *= s.d
        return d

    def contains(self, other: Field) -> bool:
        return other is self or self.parent is other or self.parent.contains(other)

    def presentation(self, over: Field | None = None) -> "Presentation":
        over = self.base if over is None else over
        key = id(over)
        cache = self.__dict__.setdefault("_pres", {})
        if key not in cache:
            cache[key] = Presentation.of_tower(self, over)
        return cache[key]

    # enumeration and randomness ------------------------------------------------
    def elements(self):
        if self.order is None:
            raise CapabilityError(f"{self} is not enumerable", "enumerate")
        for cs in itertools.product(list(self.parent.elements()), repeat=self.d):
            yield ExtElement(self, tuple(cs))

    def random_element(self, rng: random.Random):
        return ExtElement(self, tuple(self.parent.random_element(rng) for _ in range(self.d)))

    def format(self, a: ExtElement) -> str:
        return Poly(self.parent, a.c).format(self.gen_name)


def _is_power_const(k: Field, c: FieldElement, p: int) -> bool:
    if k.order is not None:
        q = k.order
        if k.characteristic == p:
            return True
        from math import gcd
        return c ** ((q - 1) // gcd(p, q - 1)) == k.one
    if k is QQ:
        v = c.v
        for n in (abs(v.numerator), v.denominator):
            r = round(n ** (1.0 / p))
            if not any((r + e) ** p == n for e in (-1, 0, 1)):
                return False
        return v > 0 or p % 2 == 1
    raise CapabilityError(f"p-th power test over {k}", "pth_power")


def _is_power_poly(f: Poly, p: int) -> bool:
    c, parts = squarefree_decomposition(f)
    return all(m % p == 0 for _, m in parts) and _is_power_const(f.field, c, p)


def _stage_irreducible(f: Poly) -> bool | None:
    """True/False when decidable, None when the library cannot tell."""
    F = f.field
    if f.degree == 1:
        return True
    if F.order is not None:
        return is_irreducible(f)
    if F is QQ and f.degree <= 3:
        return not rational_roots(f)
    if isinstance(F, RationalFunctionField):
        cs = f.coeffs
        d = f.degree
        if all(not c for c in cs[1:d]) and len(factor_int(d)) == 1 and sum(factor_int(d).values()) == 1:
            a = -cs[0]
            if not a:
                return False
            return not (_is_power_poly(a.num, d) and _is_power_poly(a.den, d))
        if d == 2 and F.characteristic != 2:
            disc = cs[1] * cs[1] - 4 * cs[0]
            return not F.is_square(disc)
    if f.degree == 2 and F.characteristic != 2:
        try:
            return not F.is_square(f.coeffs[1] ** 2 - 4 * f.coeffs[0])
        except CapabilityError:
            return None
    return None


def _stage_poly(f: MPoly, i: int, current: Field, gens: list[FieldElement]) -> Poly:
    d = f.degree_in(i)
    cs = [current.zero] * (d + 1)
    for e, c in f.terms.items():
        if any(e[j] for j in range(i + 1, f.nvars)):
            raise DomainError(f"stage {i + 1} involves later variables")
        val = current(c)
        for j in range(i):
            if e[j]:
                val = val * gens[j] ** e[j]
        cs[e[i]] = cs[e[i]] + val
    return Poly(current, cs)


def make_extension(base: Field, minimal_polys, names: Sequence[str] | None = None,
                   assume_irreducible: bool = False) -> Extension:
    """Build the tower base[t_1..t_n]/(f_1..f_n) and return its top stage.

    ``minimal_polys`` is a univariate Poly over ``base`` or a list of MPolys in
    n variables forming a triangular system monic in t_i at stage i.
    """
    if isinstance(minimal_polys, Poly):
        minimal_polys = [MPoly.from_poly(minimal_polys, 1, 0)]
    polys = list(minimal_polys)
    if not polys:
        raise DomainError("empty presentation")
    n = polys[0].nvars
    check_triangular(polys)
    names = list(names) if names else (["x"] if n == 1 else [f"x{i + 1}" for i in range(n)])
    current: Field = base
    gens: list[FieldElement] = []
    for i, f in enumerate(polys):
        g = _stage_poly(f, i, current, gens)
        ok = _stage_irreducible(g)
        if ok is False:
            detail = ""
            if current.order is not None:
                _, fs = factor(g)
                detail = f"; factor {fs[0][0].format(names[i])}"
            raise DomainError(f"stage {i + 1} polynomial {g.format(names[i])} is reducible{detail}")
        if ok is None and not assume_irreducible:
            raise CapabilityError(
                f"cannot decide irreducibility of {g.format(names[i])} over {current}; "
                "pass assume_irreducible=True to vouch for it", "irreducible")
        ext = Extension(current, g, names[i])
        current = ext
        gens = [ext(x) for x in gens] + [ext.gen()]
    return current  # type: ignore[return-value]


def etale_unit(ext: Extension) -> ExtElement:
    """f'(alpha) for a monogenic separable stage."""
    if not ext.separable:
        raise DomainError(f"{ext} is inseparable")
    return ext.minpoly.deriv()(ext.gen())


def omega_label(ext: Field, over: Field | None = None) -> str:
    over = over if over is not None else (ext.base if isinstance(ext, Extension) else ext)
    return f"w[{ext.name}/{over.name}]"


# ---------------------------------------------------------------------------
# presentations


class Presentation:
    """B = A[t_1..t_n]/(f_1..f_n) with f_i = scale_i * (monic in t_i)."""

    def __init__(self, base: Field, polys: Sequence[MPoly], scales: Sequence | None = None,
                 names: Sequence[str] | None = None):
        self.base = base
        self.polys = list(polys)
        self.n = len(self.polys)
        self.degs = check_triangular(self.polys)
        self.scales = [base(s) for s in scales] if scales is not None else [base.one] * self.n
        if any(not s for s in self.scales):
            raise DomainError("presentation scales must be units")
        self.names = list(names) if names else [f"t{i + 1}" for i in range(self.n)]
        self.basis = [tuple(reversed(e)) for e in itertools.product(*[range(d) for d in reversed(self.degs)])]
        self.index = {e: i for i, e in enumerate(self.basis)}
        self.rank = len(self.basis)
        self.tower: Extension | None = None

    @classmethod
    def of_tower(cls, top: Extension, over: Field) -> "Presentation":
        stages = top.stages_over(over)
        n = len(stages)
        polys = []
        for i, st in enumerate(stages):
            terms = MPoly(over, n)
            for j, c in enumerate(st.minpoly.coeffs):
                part = _flatten(c, stages[:i], over, n)
                terms = terms + part * MPoly.var(over, n, i) ** j
            polys.append(terms)
        P = cls(over, polys, names=[s.gen_name for s in stages])
        P.tower = top
        P._stages = stages
        return P

    def reduce(self, p: MPoly) -> MPoly:
        return _reduce(p, self.polys, list(range(self.n)), self.degs)

    def coords(self, p: MPoly) -> list[FieldElement]:
        r = self.reduce(p)
        v = [self.base.zero] * self.rank
        for e, c in r.terms.items():
            v[self.index[e]] = c
        return v

    def from_coords(self, v: Sequence[FieldElement]) -> MPoly:
        return MPoly(self.base, self.n, {e: c for e, c in zip(self.basis, v)})

    def monomial(self, i: int) -> MPoly:
        return MPoly(self.base, self.n, {self.basis[i]: 1})

    def mul_matrix(self, p: MPoly) -> list[list[FieldElement]]:
        cols = [self.coords(p * self.monomial(j)) for j in range(self.rank)]
        return [[cols[j][i] for j in range(self.rank)] for i in range(self.rank)]

    # tower interplay
    def element_to_poly(self, x: FieldElement) -> MPoly:
        if self.tower is None:
            raise DomainError("presentation is not attached to a tower")
        x = self.tower(x)
        return _flatten(x, self._stages, self.base, self.n)

    def poly_to_element(self, p: MPoly) -> FieldElement:
        if self.tower is None:
            raise DomainError("presentation is not attached to a tower")
        T = self.tower
        gens = []
        for st in self._stages:
            gens = [T(g) for g in gens] + [T(st.gen())]
        acc = T.zero
        for e, c in self.reduce(p).terms.items():
            term = T(c)
            for i, k in enumerate(e):
                if k:
                    term = term * gens[i] ** k
            acc = acc + term
        return acc

    def element_coords(self, x: FieldElement) -> list[FieldElement]:
        return self.coords(self.element_to_poly(x))

    def coords_to_element(self, v: Sequence[FieldElement]) -> FieldElement:
        return self.poly_to_element(self.from_coords(v))

    def rescaled(self, scales: Sequence) -> "Presentation":
        P = Presentation(self.base, self.polys, scales, self.names)
        P.tower = self.tower
        P._stages = getattr(self, "_stages", None)
        return P

    def __repr__(self):
        return f"Presentation({', '.join(f.format(self.names) for f in self.polys)} over {self.base})"


def _flatten(x: FieldElement, stages: Sequence[Extension], over: Field, n: int) -> MPoly:
    if not stages:
        return MPoly.const(over, n, over(x))
    top = stages[-1]
    x = top(x)
    i = len(stages) - 1
    acc = MPoly(over, n)
    ti = MPoly.var(over, n, i)
    for j, c in enumerate(x.c):
        if c:
            acc = acc + _flatten(c, stages[:-1], over, n) * ti ** j
    return acc


def compose_canonical(L: Extension, E: Field, k: Field, presentation: Presentation | None = None):
    """Unit c of L with w_{L/k} = c * (w_{L/E} (x) w_{E/k})."""
    from .sstrace import compose_canonical as _cc
    return _cc(L, E, k, presentation)


# ---------------------------------------------------------------------------
# twists


@dataclass(frozen=True)
class Twist:
    """A product of named lines, each with a distinguished generator.

    Twisted elements are always stored relative to the distinguished
    generators; a twisted element sigma (x) (u * l) is normalized to
    <u> sigma (x) l.
    """

    labels: tuple[str, ...] = ()

    @staticmethod
    def of(*labels: str) -> "Twist":
        return Twist(tuple(sorted(labels)))

    def __mul__(self, other: "Twist") -> "Twist":
        return Twist(tuple(sorted(self.labels + other.labels)))

    def without(self, label: str) -> "Twist":
        ls = list(self.labels)
        if label not in ls:
            raise DomainError(f"twist {self} does not contain {label}")
        ls.remove(label)
        return Twist(tuple(ls))

    def __bool__(self):
        return bool(self.labels)

    def __str__(self):
        return " (x) ".join(self.labels) if self.labels else "1"


# ---------------------------------------------------------------------------
# places of k(t)


class Place:
    """A place of K = k(t): finite (monic irreducible pi in k[t]) or infinity."""

    def __init__(self, K: RationalFunctionField, pi: Poly | None):
        self.K = K
        self.k = K.base
        if pi is not None:
            pi = Poly(K.base, pi.coeffs)
            if not pi.is_monic() or pi.degree < 1:
                raise DomainError("a finite place needs a monic polynomial of positive degree")
        self.pi = pi
        self._residue_field: Field | None = None
        self._root = None

    @property
    def is_infinite(self) -> bool:
        return self.pi is None

    @property
    def degree(self) -> int:
        return 1 if self.pi is None else self.pi.degree

    @property
    def label(self) -> str:
        return "inf" if self.pi is None else f"({self.pi.format(self.K.var)})"

    @property
    def twist_label(self) -> str:
        """Label of omega_v's distinguished generator (dual of the uniformizer class)."""
        return f"d[{self.label}]"

    def __eq__(self, o):
        return isinstance(o, Place) and o.K is self.K and o.pi == self.pi

    def __hash__(self):
        return hash((id(self.K), self.pi))

    def sort_key(self):
        return (1, ()) if self.pi is None else (0, self.pi.sort_key())

    def __repr__(self):
        return f"Place{self.label}"

    @property
    def uniformizer(self) -> RationalFunction:
        if self.pi is None:
            return self.K((Poly.const(self.k, 1), Poly.x(self.k)))
        return self.K(self.pi)

    @property
    def residue_field(self) -> Field:
        if self._residue_field is None:
            cache = self.K.__dict__.setdefault("_residue_fields", {})
            key = None if self.pi is None else self.pi.coeffs
            if key not in cache:
                if self.pi is None or self.pi.degree == 1:
                    F = self.k
                    root = self.k.zero if self.pi is None else -self.pi.coeffs[0]
                else:
                    F = make_extension(self.k, self.pi, names=["x"], assume_irreducible=True)
                    root = F.gen()
                cache[key] = (F, root)
            self._residue_field, self._root = cache[key]
        return self._residue_field

    @property
    def root(self):
        """Image of t in the residue field (finite places)."""
        self.residue_field
        return self._root

    def _vpoly(self, f: Poly) -> int:
        if not f:
            raise DomainError("valuation of zero")
        if self.pi is None:
            return -f.degree
        m = 0
        while True:
            q, r = divmod(f, self.pi)
            if r:
                return m
            f, m = q, m + 1

    def valuation(self, f) -> int:
        f = self.K(f)
        return self._vpoly(f.num) - self._vpoly(f.den)

    def _strip(self, f: Poly) -> Poly:
        while True:
            q, r = divmod(f, self.pi)
            if r:
                return f
            f = q

    def reduce(self, f) -> FieldElement:
        """Residue class of a v-integral element."""
        f = self.K(f)
        v = self.valuation(f)
        if v < 0:
            raise DomainError(f"{f} is not integral at {self}")
        if v > 0:
            return self.residue_field.zero
        if self.pi is None:
            if f.num.degree != f.den.degree:
                return self.residue_field.zero
            return self.k(f.num.lc / f.den.lc)
        R = self.residue_field
        x = self.root
        return R(f.num(x)) / R(f.den(x))

    def decompose(self, u, uniformizer=None) -> tuple[int, FieldElement]:
        """u = a * uniformizer^m with a a v-unit; returns (m, a mod v)."""
        u = self.K(u)
        if not u:
            raise DomainError("decompose needs a unit")
        m = self.valuation(u)
        if uniformizer is None:
            if self.pi is None:
                return m, self.k(u.num.lc / u.den.lc)
            a_num = self._strip(u.num)
            a_den = self._strip(u.den)
            R = self.residue_field
            x = self.root
            return m, R(a_num(x)) / R(a_den(x))
        p = self.K(uniformizer)
        if self.valuation(p) != 1:
            raise DomainError(f"{p} is not a uniformizer at {self}")
        return m, self.reduce(u / p ** m)

    def unit_reduction(self, uniformizer) -> FieldElement:
        """Class of uniformizer / pi_v (the distinguished uniformizer) in kappa_v."""
        return self.decompose(uniformizer)[1]


def places_of(f: RationalFunction, seed: int | None = None) -> list[Place]:
    """Places v with v(f) != 0 (finite ones from factoring num and den, plus infinity)."""
    K = f.field
    out = []
    for poly in (f.num, f.den):
        if poly.degree > 0:
            for g, _ in factor(poly, seed)[1]:
                P = Place(K, g)
                if P not in out:
                    out.append(P)
    if f.num.degree != f.den.degree:
        out.append(Place(K, None))
    return sorted(out, key=Place.sort_key)


def places_from_factors(K: RationalFunctionField, factors: Iterable[Poly], include_infinity: bool = True) -> list[Place]:
    out = [Place(K, g.monic()) for g in factors]
    if include_infinity:
        out.append(Place(K, None))
    return sorted(out, key=Place.sort_key)


# ---------------------------------------------------------------------------
# field maps


class FieldMap:
    """A homomorphism of fields given by an element function."""

    def __init__(self, src: Field, dst: Field, fn: Callable[[FieldElement], FieldElement], name: str = "phi"):
        self.src, self.dst, self.fn, self.name = src, dst, fn, name

    def __call__(self, x):
        return self.dst(self.fn(self.src(x)))

    def compose(self, inner: "FieldMap") -> "FieldMap":
        """self o inner."""
        if inner.dst is not self.src:
            raise DomainError("maps are not composable")
        return FieldMap(inner.src, self.dst, lambda x: self(inner(x)), f"{self.name}o{inner.name}")

    def __repr__(self):
        return f"FieldMap({self.name}: {self.src} -> {self.dst})"

    @staticmethod
    def inclusion(src: Field, dst: Field) -> "FieldMap":
        return FieldMap(src, dst, lambda x: dst(x), "incl")

    @staticmethod
    def identity(F: Field) -> "FieldMap":
        return FieldMap(F, F, lambda x: x, "id")

    @staticmethod
    def substitution(K: RationalFunctionField, dst: Field, image, base_map: "FieldMap | None" = None) -> "FieldMap":
        """k(t) -> dst sending t to ``image`` and constants through base_map."""
        image = dst(image)
        bm = base_map or FieldMap.inclusion(K.base, dst)

        def ev(p: Poly):
            acc = dst.zero
            for c in reversed(p.coeffs):
                acc = acc * image + bm(c)
            return acc

        return FieldMap(K, dst, lambda f: ev(f.num) / ev(f.den), f"t->{image}")

    @staticmethod
    def from_generator_images(E: Extension, dst: Field, images: Sequence, base_map: "FieldMap | None" = None) -> "FieldMap":
        """Map a tower E/k to dst by choosing images of the stage generators."""
        stages = E.stages()
        bm = base_map or FieldMap.inclusion(stages[0].parent, dst)
        imgs = [dst(x) for x in images]
        if len(imgs) != len(stages):
            raise DomainError("need one image per stage")

        def ev(x, level):
            if level < 0:
                return bm(x)
            st = stages[level]
            x = st(x)
            acc = dst.zero
            for c in reversed(x.c):
                acc = acc * imgs[level] + ev(c, level - 1)
            return acc

        for lvl, st in enumerate(stages):
            # check the minimal polynomial is respected
            val = dst.zero
            for c in reversed(st.minpoly.coeffs):
                val = val * imgs[lvl] + ev(c, lvl - 1)
            if val:
                raise DomainError(f"image of stage {lvl + 1} generator is not a root of its minimal polynomial")
        return FieldMap(E, dst, lambda x: ev(x, len(stages) - 1), "gens")


def minimal_polynomial_over(alpha: FieldElement, sub_basis: Sequence[FieldElement], P: Presentation) -> list[list[FieldElement]]:
    """Minimal polynomial of alpha over the subfield spanned (over P.base) by sub_basis.

    Returns the coefficients c_0..c_{d-1} of alpha^d = sum_j c_j alpha^j, each as
    a coordinate vector over sub_basis.
    """
    from .exact import nullspace

    vecs = []
    d = 0
    power = P.tower(1)
    while True:
        cand = vecs + [P.element_coords(b * power) for b in sub_basis]
        M = [[v[i] for v in cand] for i in range(P.rank)]
        ns = nullspace(M, P.base)
        if ns:
            v = ns[0]
            m = len(sub_basis)
            lead = v[d * m:(d + 1) * m]
            # normalize: lead combination must be a subfield unit; solve via coordinates
            return _normalize_relation(v, lead, sub_basis, P, d)
        vecs = cand
        power = power * alpha
        d += 1
        if d > P.rank:
            raise DomainError("minimal polynomial search failed")  # pragma: no cover


def _normalize_relation(v, lead, sub_basis, P, d):
    m = len(sub_basis)
    T = P.tower
    lead_el = sum((T(c) * b for c, b in zip(lead, sub_basis)), T.zero)
    inv = lead_el.inverse()
    out = []
    for j in range(d):
        cj = sum((T(c) * b for c, b in zip(v[j * m:(j + 1) * m], sub_basis)), T.zero)
        out.append(-(cj * inv))
    return out
