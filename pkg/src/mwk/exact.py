"""Exact arithmetic kernel.

Rationals, finite fields F_{p^e}, univariate and multivariate polynomials,
rational function fields, small dense linear algebra over any field, and
polynomial factorization over finite fields (plus rational roots over Q).

Every field is an object; its elements are immutable, hashable wrappers that
support the usual operators.  Ints (and Fractions in characteristic 0) are
coerced automatically.
"""

from __future__ import annotations

import os
import random
from fractions import Fraction
from math import gcd, isqrt
from typing import Iterable, Iterator, Sequence

from .errors import CapabilityError, DomainError

# ---------------------------------------------------------------------------
# integers


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def factor_int(n: int) -> dict[int, int]:
    """Trial-division factorization of |n| (n != 0)."""
    n = abs(n)
    if n == 0:
        raise DomainError("cannot factor 0")
    out: dict[int, int] = {}
    f = 2
    while f * f <= n:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += 1 if f == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_power(q: int) -> tuple[int, int]:
    fs = factor_int(q)
    if len(fs) != 1:
        raise DomainError(f"{q} is not a prime power")
    (p, e), = fs.items()
    return p, e


def squarefree_part(n: int) -> int:
    """Signed squarefree kernel of a nonzero integer."""
    s = -1 if n < 0 else 1
    out = 1
    for p, e in factor_int(n).items():
        if e % 2:
            out *= p
    return s * out


def default_seed() -> int:
    env = os.environ.get("MWK_SEED")
    return int(env) if env else 0


# ---------------------------------------------------------------------------
# fields and elements


class Field:
    """Abstract field.  Subclasses set characteristic, order (None if infinite)."""

    characteristic: int = 0
    order: int | None = None
    name: str = "?"

    def __call__(self, x) -> "FieldElement":
        raise NotImplementedError

    @property
    def zero(self) -> "FieldElement":
        return self(0)

    @property
    def one(self) -> "FieldElement":
        return self(1)

    def is_finite(self) -> bool:
        return self.order is not None

    def random_element(self, rng: random.Random) -> "FieldElement":
        raise NotImplementedError

    def random_unit(self, rng: random.Random) -> "FieldElement":
        while True:
            x = self.random_element(rng)
            if x:
                return x

    def elements(self) -> Iterator["FieldElement"]:
        raise CapabilityError(f"{self} is not enumerable", "enumerate")

    # square classes; finite fields get a generic implementation
    def is_square(self, u: "FieldElement") -> bool:
        if self.order is None:
            raise CapabilityError(f"square test over {self}", "is_square")
        if not u:
            return True
        if self.characteristic == 2:
            return True
        return u ** ((self.order - 1) // 2) == self.one

    def sqrt(self, u: "FieldElement") -> "FieldElement":
        if self.order is None:
            raise CapabilityError(f"square roots over {self}", "sqrt")
        return _ff_sqrt(self, u)

    def nonsquare(self) -> "FieldElement":
        if self.order is None or self.characteristic == 2:
            raise DomainError(f"{self} has no canonical non-square")
        cache = self.__dict__.setdefault("_nonsquare", [])
        if not cache:
            for x in self.elements():
                if x and not self.is_square(x):
                    cache.append(x)
                    break
        return cache[0]

    def square_class(self, u: "FieldElement") -> "FieldElement":
        """Canonical representative of u modulo squares (u itself if unknown)."""
        if self.order is None:
            return u
        if self.characteristic == 2 or self.is_square(u):
            return self.one
        return self.nonsquare()

    def contains(self, other: "Field") -> bool:
        return other is self

    def __repr__(self) -> str:
        return self.name


class FieldElement:
    __slots__ = ()
    field: Field

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field is self.field:
                return other
            try:
                return self.field(other)
            except (DomainError, TypeError):
                return NotImplemented
        if isinstance(other, (int, Fraction)):
            return self.field(other)
        return NotImplemented

    def __add__(self, o):
        o = self._coerce(o)
        return o if o is NotImplemented else self._add(o)

    __radd__ = __add__

    def __sub__(self, o):
        o = self._coerce(o)
        return o if o is NotImplemented else self._add(o._neg())

    def __rsub__(self, o):
        o = self._coerce(o)
        return o if o is NotImplemented else o._add(self._neg())

    def __mul__(self, o):
        o = self._coerce(o)
        return o if o is NotImplemented else self._mul(o)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = self._coerce(o)
        return o if o is NotImplemented else self._mul(o.inverse())

    def __rtruediv__(self, o):
        o = self._coerce(o)
        return o if o is NotImplemented else o._mul(self.inverse())

    def __neg__(self):
        return self._neg()

    def __pos__(self):
        return self

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one
        base = self
        while n:
            if n & 1:
                result = result._mul(base)
            base = base._mul(base)
            n >>= 1
        return result

    def inverse(self):
        if not self:
            raise DomainError("division by zero")
        return self._inv()

    def __eq__(self, o):
        if isinstance(o, (int, Fraction)) or (isinstance(o, FieldElement) and o.field is not self.field):
            c = self._coerce(o)
            if c is NotImplemented:
                return NotImplemented
            o = c
        elif not isinstance(o, FieldElement):
            return NotImplemented
        return self._key() == o._key()

    def __ne__(self, o):
        r = self.__eq__(o)
        return r if r is NotImplemented else not r

    def __hash__(self):
        return hash(self._key())

    def __lt__(self, o):
        # deterministic ordering for canonical printing only
        return self._key() < o._key()

    def __repr__(self):
        return self.field.format(self)

    # subclass hooks
    def _key(self):
        raise NotImplementedError

    def _add(self, o):
        raise NotImplementedError

    def _mul(self, o):
        raise NotImplementedError

    def _neg(self):
        raise NotImplementedError

    def _inv(self):
        raise NotImplementedError


# ---------------------------------------------------------------------------
# Q


class QQElement(FieldElement):
    __slots__ = ("v",)
    field: "RationalField"

    def __init__(self, v: Fraction):
        object.__setattr__(self, "v", v)

    @property
    def field(self):
        return QQ

    def _key(self):
        return self.v

    def _add(self, o):
        return QQElement(self.v + o.v)

    def _mul(self, o):
        return QQElement(self.v * o.v)

    def _neg(self):
        return QQElement(-self.v)

    def _inv(self):
        return QQElement(1 / self.v)

    def __bool__(self):
        return self.v != 0

    def __lt__(self, o):
        return self.v < o.v


class RationalField(Field):
    characteristic = 0
    order = None
    name = "QQ"

    def __call__(self, x) -> QQElement:
        if isinstance(x, QQElement):
            return x
        if isinstance(x, (int, Fraction)):
            return QQElement(Fraction(x))
        if isinstance(x, FieldElement):
            raise TypeError(f"cannot coerce {x!r} into QQ")
        return QQElement(Fraction(x))

    def format(self, a: QQElement) -> str:
        return str(a.v)

    def random_element(self, rng):
        return QQElement(Fraction(rng.randint(-12, 12), rng.randint(1, 6)))

    def random_unit(self, rng):
        while True:
            n = rng.randint(-30, 30)
            if n:
                return QQElement(Fraction(n, rng.choice((1, 1, 1, 2, 3, 5))))

    def is_square(self, u) -> bool:
        v = u.v
        if v < 0:
            return False
        if v == 0:
            return True
        return isqrt(v.numerator) ** 2 == v.numerator and isqrt(v.denominator) ** 2 == v.denominator

    def sqrt(self, u):
        if not self.is_square(u):
            raise DomainError(f"{u} is not a square in QQ")
        return QQElement(Fraction(isqrt(u.v.numerator), isqrt(u.v.denominator)))

    def square_class(self, u):
        v = u.v
        return QQElement(Fraction(squarefree_part(v.numerator * v.denominator)))


QQ = RationalField()


# ---------------------------------------------------------------------------
# finite fields


class FFElement(FieldElement):
    __slots__ = ("field", "c")

    def __init__(self, field: "FiniteField", c: int):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "c", c)

    def _key(self):
        return self.c

    def __hash__(self):
        return hash((self.field.q, self.c))

    def __bool__(self):
        return self.c != 0

    def _add(self, o):
        return self.field._elt(self.field._addc(self.c, o.c))

    def _neg(self):
        return self.field._elt(self.field._negc(self.c))

    def _mul(self, o):
        return self.field._elt(self.field._mulc(self.c, o.c))

    def _inv(self):
        return self.field._elt(self.field._invc(self.c))

    def __lt__(self, o):
        return self.c < o.c


def _digits_mulmod(a: list[int], b: list[int], mod: list[int], p: int) -> list[int]:
    e = len(mod) - 1
    prod = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    for k in range(len(prod) - 1, e - 1, -1):
        c = prod[k]
        if c:
            for i in range(e + 1):
                prod[k - e + i] = (prod[k - e + i] - c * mod[i]) % p
    prod = prod[:e] + [0] * (e - len(prod))
    return prod


class FiniteField(Field):
    """F_{p^e} with elements encoded as integers 0..q-1 (base-p digits)."""

    def __init__(self, p: int, e: int = 1, modulus: Sequence[int] | None = None, gen: str = "a"):
        if not is_prime(p):
            raise DomainError(f"{p} is not prime")
        self.p, self.e, self.q = p, e, p ** e
        self.characteristic = p
        self.order = self.q
        self.gen_name = gen
        self.name = f"GF({self.q})"
        self._cache: dict[int, FFElement] = {}
        if e == 1:
            self.modulus = (0, 1)
            return
        if modulus is None:
            modulus = lowest_irreducible(p, e)
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != e + 1 or modulus[-1] != 1:
            raise DomainError("modulus must be monic of degree e")
        Fp = GF(p)
        if not is_irreducible(Poly(Fp, [Fp(c) for c in modulus])):
            raise DomainError(f"modulus {modulus} is reducible over GF({p})")
        self.modulus = modulus
        self._digits = [tuple((c // p ** i) % p for i in range(e)) for c in range(self.q)]
        self._pw = [p ** i for i in range(e)]
        self._build_log_tables()

    def _encode(self, digits) -> int:
        return sum(d * w for d, w in zip(digits, self._pw))

    def _build_log_tables(self):
        mod = list(self.modulus)
        for g in range(1, self.q):
            exp = [1]
            cur = [1] + [0] * (self.e - 1)
            gd = list(self._digits[g])
            ok = True
            for _ in range(self.q - 2):
                cur = _digits_mulmod(cur, gd, mod, self.p)
                c = self._encode(cur)
                if c == 1:
                    ok = False
                    break
                exp.append(c)
            if ok:
                self._exp = exp
                self._log = {c: i for i, c in enumerate(exp)}
                self.primitive = g
                return
        raise DomainError("no primitive element found")  # pragma: no cover

    def _elt(self, c: int) -> FFElement:
        el = self._cache.get(c)
        if el is None:
            el = FFElement(self, c)
            self._cache[c] = el
        return el

    def _addc(self, a, b):
        if self.e == 1:
            return (a + b) % self.p
        da, db = self._digits[a], self._digits[b]
        return self._encode([(x + y) % self.p for x, y in zip(da, db)])

    def _negc(self, a):
        if self.e == 1:
            return (-a) % self.p
        return self._encode([(-x) % self.p for x in self._digits[a]])

    def _mulc(self, a, b):
        if self.e == 1:
            return (a * b) % self.p
        if a == 0 or b == 0:
            return 0
        return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]

    def _invc(self, a):
        if self.e == 1:
            return pow(a, self.p - 2, self.p)
        return self._exp[(-self._log[a]) % (self.q - 1)]

    def __call__(self, x) -> FFElement:
        if isinstance(x, FFElement):
            if x.field is self:
                return x
            if x.field.q == self.p and self.e > 1:
                return self._elt(x.c)
            raise TypeError(f"cannot coerce {x!r} into {self}")
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise DomainError(f"{x} has no image in {self}")
            return self(x.numerator) / self(x.denominator)
        if isinstance(x, int):
            return self._elt(x % self.p)
        if isinstance(x, (list, tuple)):
            if len(x) > self.e:
                raise DomainError("too many digits")
            return self._elt(self._encode([int(d) % self.p for d in x]) if self.e > 1 else int(x[0]) % self.p)
        raise TypeError(f"cannot coerce {x!r} into {self}")

    def gen(self) -> FFElement:
        return self._elt(self.p if self.e > 1 else 1)

    def digits(self, a: FFElement) -> tuple[int, ...]:
        return self._digits[a.c] if self.e > 1 else (a.c,)

    def elements(self):
        for c in range(self.q):
            yield self._elt(c)

    def units(self):
        for c in range(1, self.q):
            yield self._elt(c)

    def random_element(self, rng):
        return self._elt(rng.randrange(self.q))

    def random_unit(self, rng):
        return self._elt(rng.randrange(1, self.q))

    def is_square(self, u) -> bool:
        if not u or self.p == 2:
            return True
        if self.e == 1:
            return pow(u.c, (self.p - 1) // 2, self.p) == 1
        return self._log[u.c] % 2 == 0

    def log(self, u) -> int:
        if self.e == 1:
            raise CapabilityError("discrete log only tabulated for e > 1")
        return self._log[u.c]

    def format(self, a: FFElement) -> str:
        if self.e == 1:
            return str(a.c)
        ds = self._digits[a.c]
        parts = []
        for i in range(self.e - 1, -1, -1):
            d = ds[i]
            if not d:
                continue
            mono = "" if i == 0 else (self.gen_name if i == 1 else f"{self.gen_name}^{i}")
            if not mono:
                parts.append(str(d))
            elif d == 1:
                parts.append(mono)
            else:
                parts.append(f"{d}*{mono}")
        return "+".join(parts) if parts else "0"


_GF_CACHE: dict = {}


def GF(q: int, modulus: Sequence[int] | None = None) -> FiniteField:
    """Cached constructor for F_q (lowest-lexicographic modulus by default)."""
    key = (q, tuple(modulus) if modulus is not None else None)
    F = _GF_CACHE.get(key)
    if F is None:
        p, e = prime_power(q)
        F = FiniteField(p, e, modulus)
        _GF_CACHE[key] = F
    return F


def lowest_irreducible(p: int, e: int) -> tuple[int, ...]:
    """First monic irreducible x^e + c_{e-1}x^{e-1} + ... + c_0 over F_p when the
    coefficient vector (c_{e-1}, ..., c_0) is read as a base-p number."""
    Fp = GF(p)
    for k in range(p ** e):
        cs = [(k // p ** i) % p for i in range(e)] + [1]
        if is_irreducible(Poly(Fp, [Fp(c) for c in cs])):
            return tuple(cs)
    raise DomainError("no irreducible polynomial found")  # pragma: no cover


def _ff_sqrt(F: Field, u: FieldElement) -> FieldElement:
    """Square root in a finite field (Tonelli-Shanks; Frobenius in char 2)."""
    q = F.order
    if not u:
        return u
    if F.characteristic == 2:
        return u ** (q // 2)
    if not F.is_square(u):
        raise DomainError(f"{u} is not a square in {F}")
    s, m = 0, q - 1
    while m % 2 == 0:
        s, m = s + 1, m // 2
    z = F.nonsquare()
    c = z ** m
    x = u ** ((m + 1) // 2)
    t = u ** m
    while t != F.one:
        i, t2 = 0, t
        while t2 != F.one:
            t2 = t2 * t2
            i += 1
        b = c ** (2 ** (s - i - 1))
        x, c, t, s = x * b, b * b, t * b * b, i
    return x


# ---------------------------------------------------------------------------
# univariate polynomials


class Poly:
    """Dense univariate polynomial over a field; coefficients low to high."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: Field, coeffs: Iterable = ()):
        cs = [c if isinstance(c, FieldElement) and c.field is field else field(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    @classmethod
    def _raw(cls, field: Field, coeffs: list) -> "Poly":
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        p = cls.__new__(cls)
        p.field = field
        p.coeffs = tuple(coeffs)
        return p

    @classmethod
    def x(cls, field: Field) -> "Poly":
        return cls._raw(field, [field.zero, field.one])

    @classmethod
    def const(cls, field: Field, c) -> "Poly":
        return cls(field, [c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self) -> FieldElement:
        if not self.coeffs:
            raise DomainError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __bool__(self):
        return bool(self.coeffs)

    def is_one(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0] == self.field.one

    def coeff(self, i: int) -> FieldElement:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else self.field.zero

    def _lift(self, o) -> "Poly":
        if isinstance(o, Poly):
            if o.field is not self.field:
                return Poly(self.field, o.coeffs)
            return o
        return Poly(self.field, [o])

    def __add__(self, o):
        o = self._lift(o)
        a, b = self.coeffs, o.coeffs
        if len(a) < len(b):
            a, b = b, a
        return Poly._raw(self.field, [x + b[i] if i < len(b) else x for i, x in enumerate(a)])

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.field, [-c for c in self.coeffs])

    def __sub__(self, o):
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return self._lift(o) - self

    def __mul__(self, o):
        o = self._lift(o)
        a, b = self.coeffs, o.coeffs
        if not a or not b:
            return Poly._raw(self.field, [])
        out = [self.field.zero] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] = out[i + j] + x * y
        return Poly._raw(self.field, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        r = Poly.const(self.field, 1)
        b = self
        while n:
            if n & 1:
                r = r * b
            b = b * b
            n >>= 1
        return r

    def __divmod__(self, o):
        o = self._lift(o)
        if not o:
            raise DomainError("polynomial division by zero")
        r = list(self.coeffs)
        db = o.degree
        if len(r) - 1 < db:
            return Poly._raw(self.field, []), self
        inv = o.lc.inverse()
        q = [self.field.zero] * (len(r) - db)
        for k in range(len(r) - 1, db - 1, -1):
            c = r[k]
            if c:
                c = c * inv
                q[k - db] = c
                for i, y in enumerate(o.coeffs):
                    r[k - db + i] = r[k - db + i] - c * y
        return Poly._raw(self.field, q), Poly._raw(self.field, r[:db])

    def __floordiv__(self, o):
        return divmod(self, o)[0]

    def __mod__(self, o):
        return divmod(self, o)[1]

    def exact_div(self, o) -> "Poly":
        q, r = divmod(self, o)
        if r:
            raise DomainError("inexact polynomial division")
        return q

    def monic(self) -> "Poly":
        if not self.coeffs:
            return self
        inv = self.lc.inverse()
        return Poly._raw(self.field, [c * inv for c in self.coeffs])

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.lc == self.field.one

    def deriv(self) -> "Poly":
        return Poly._raw(self.field, [c * i for i, c in enumerate(self.coeffs)][1:])

    def __call__(self, x):
        """Evaluate at x (an element of a field containing ours, or a Poly)."""
        acc = None
        for c in reversed(self.coeffs):
            acc = c if acc is None else acc * x + c
        if acc is None:
            return x * 0 if not isinstance(x, Poly) else Poly._raw(x.field, [])
        if isinstance(x, FieldElement) and isinstance(acc, FieldElement) and acc.field is not x.field:
            acc = x.field(acc)
        if isinstance(x, Poly) and not isinstance(acc, Poly):
            acc = Poly(x.field, [acc])
        return acc

    def pow_mod(self, n: int, m: "Poly") -> "Poly":
        r = Poly.const(self.field, 1)
        b = self % m
        while n:
            if n & 1:
                r = (r * b) % m
            b = (b * b) % m
            n >>= 1
        return r

    def map_coeffs(self, fn, field: Field) -> "Poly":
        return Poly(field, [fn(c) for c in self.coeffs])

    def __eq__(self, o):
        if isinstance(o, Poly):
            return self.coeffs == o.coeffs
        if isinstance(o, (int, FieldElement)):
            return self == self._lift(o)
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def sort_key(self):
        return (self.degree, tuple(c._key() for c in reversed(self.coeffs)))

    def format(self, var: str = "t") -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            cs = repr(c)
            mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
            neg = cs.startswith("-") and not any(ch in cs[1:] for ch in "+-")
            if neg:
                cs = cs[1:]
            if any(ch in cs for ch in "+-") and mono:
                cs = f"({cs})"
            if not mono:
                term = cs
            elif cs == "1":
                term = mono
            else:
                term = f"{cs}*{mono}"
            parts.append(("-" if neg else "+") + term)
        s = "".join(parts)
        return s[1:] if s.startswith("+") else s

    def __repr__(self):
        return self.format()


def poly_gcd(a: Poly, b: Poly) -> Poly:
    if a and b and isinstance(a.field, RationalFunctionField):
        return _gcd_over_function_field(a, b)
    while b:
        a, b = b, a % b
    return a.monic()


# Euclid over k(s) swells the coefficients; a primitive pseudo-remainder
# sequence over k[s] keeps them small.

def _primitive(cs: list) -> list:
    g = None
    for c in cs:
        if c:
            g = c if g is None else poly_gcd(g, c)
            if g.degree == 0:
                return cs
    return [c // g for c in cs]


def _cleared(p: Poly) -> list:
    base = p.field.base
    den = Poly.const(base, 1)
    for c in p.coeffs:
        den = den * (c.den // poly_gcd(den, c.den))
    return _primitive([c.num * (den // c.den) for c in p.coeffs])


def _pseudo_remainder(A: list, B: list) -> list:
    R = list(A)
    lb = B[-1]
    while len(R) >= len(B):
        lr = R[-1]
        shift = len(R) - len(B)
        R = [c * lb for c in R]
        for i, c in enumerate(B):
            R[i + shift] = R[i + shift] - c * lr
        while R and not R[-1]:
            R.pop()
    return R


def _gcd_over_function_field(a: Poly, b: Poly) -> Poly:
    K = a.field
    A, B = _cleared(a), _cleared(b)
    if len(A) < len(B):
        A, B = B, A
    while B:
        R = _pseudo_remainder(A, B)
        A, B = B, (_primitive(R) if R else [])
    return Poly(K, [K(c) for c in A]).monic()


def poly_xgcd(a: Poly, b: Poly) -> tuple[Poly, Poly, Poly]:
    """Return (g, s, t) with s*a + t*b = g, g monic."""
    F = a.field
    r0, r1 = a, b
    s0, s1 = Poly.const(F, 1), Poly(F, [])
    t0, t1 = Poly(F, []), Poly.const(F, 1)
    while r1:
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if not r0:
        return r0, s0, t0
    inv = r0.lc.inverse()
    return r0 * inv, s0 * inv, t0 * inv


# ---------------------------------------------------------------------------
# dense linear algebra over a field


def mat_rank(M: list[list[FieldElement]]) -> int:
    A = [list(r) for r in M]
    rank, cols = 0, len(A[0]) if A else 0
    for c in range(cols):
        piv = next((i for i in range(rank, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = A[rank][c].inverse()
        for i in range(len(A)):
            if i != rank and A[i][c]:
                f = A[i][c] * inv
                A[i] = [x - f * y for x, y in zip(A[i], A[rank])]
        rank += 1
    return rank


def mat_det(M: list[list[FieldElement]], F: Field) -> FieldElement:
    A = [list(r) for r in M]
    n = len(A)
    det = F.one
    for c in range(n):
        piv = next((i for i in range(c, n) if A[i][c]), None)
        if piv is None:
            return F.zero
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            det = -det
        det = det * A[c][c]
        inv = A[c][c].inverse()
        for i in range(c + 1, n):
            if A[i][c]:
                f = A[i][c] * inv
                A[i] = [x - f * y for x, y in zip(A[i], A[c])]
    return det


def mat_solve(A: list[list[FieldElement]], b: list[FieldElement], F: Field) -> list[FieldElement]:
    """Solve A x = b for square nonsingular A."""
    n = len(A)
    M = [list(A[i]) + [b[i]] for i in range(n)]
    for c in range(n):
        piv = next((i for i in range(c, n) if M[i][c]), None)
        if piv is None:
            raise DomainError("singular linear system")
        M[c], M[piv] = M[piv], M[c]
        inv = M[c][c].inverse()
        M[c] = [x * inv for x in M[c]]
        for i in range(n):
            if i != c and M[i][c]:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    return [M[i][n] for i in range(n)]


def mat_inv(A: list[list[FieldElement]], F: Field) -> list[list[FieldElement]]:
    n = len(A)
    cols = [mat_solve(A, [F.one if i == j else F.zero for i in range(n)], F) for j in range(n)]
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def mat_mul(A, B, F: Field):
    m = len(B[0]) if B else 0
    return [[sum((A[i][k] * B[k][j] for k in range(len(B))), F.zero) for j in range(m)] for i in range(len(A))]


def mat_transpose(A):
    return [list(r) for r in zip(*A)] if A else []


def nullspace(A: list[list[FieldElement]], F: Field) -> list[list[FieldElement]]:
    """Basis of {x : A x = 0}."""
    if not A:
        return []
    rows, cols = len(A), len(A[0])
    M = [list(r) for r in A]
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = M[r][c].inverse()
        M[r] = [x * inv for x in M[r]]
        for i in range(rows):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [F.zero] * cols
        v[fc] = F.one
        for i, pc in enumerate(pivots):
            v[pc] = -M[i][fc]
        basis.append(v)
    return basis


# ---------------------------------------------------------------------------
# multivariate polynomials and triangular normal forms


class MPoly:
    """Sparse multivariate polynomial: exponent tuple -> nonzero coefficient."""

    __slots__ = ("field", "nvars", "terms")

    def __init__(self, field: Field, nvars: int, terms: dict | None = None):
        self.field = field
        self.nvars = nvars
        t = {}
        for e, c in (terms or {}).items():
            if len(e) != nvars:
                raise DomainError("exponent vector has wrong length")
            c = field(c) if not (isinstance(c, FieldElement) and c.field is field) else c
            if c:
                t[tuple(e)] = c
        self.terms = t

    @classmethod
    def _raw(cls, field, nvars, terms):
        p = cls.__new__(cls)
        p.field, p.nvars, p.terms = field, nvars, terms
        return p

    @classmethod
    def var(cls, field: Field, nvars: int, i: int) -> "MPoly":
        e = [0] * nvars
        e[i] = 1
        return cls._raw(field, nvars, {tuple(e): field.one})

    @classmethod
    def const(cls, field: Field, nvars: int, c) -> "MPoly":
        return cls(field, nvars, {(0,) * nvars: c})

    @classmethod
    def from_poly(cls, p: Poly, nvars: int, i: int) -> "MPoly":
        terms = {}
        for k, c in enumerate(p.coeffs):
            if c:
                e = [0] * nvars
                e[i] = k
                terms[tuple(e)] = c
        return cls._raw(p.field, nvars, terms)

    def __bool__(self):
        return bool(self.terms)

    def _lift(self, o) -> "MPoly":
        if isinstance(o, MPoly):
            return o
        return MPoly.const(self.field, self.nvars, o)

    def __add__(self, o):
        o = self._lift(o)
        t = dict(self.terms)
        for e, c in o.terms.items():
            s = t.get(e)
            s = c if s is None else s + c
            if s:
                t[e] = s
            else:
                t.pop(e, None)
        return MPoly._raw(self.field, self.nvars, t)

    __radd__ = __add__

    def __neg__(self):
        return MPoly._raw(self.field, self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, o):
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return self._lift(o) - self

    def __mul__(self, o):
        o = self._lift(o)
        t: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = t.get(e)
                s = c1 * c2 if s is None else s + c1 * c2
                if s:
                    t[e] = s
                else:
                    t.pop(e, None)
        return MPoly._raw(self.field, self.nvars, t)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        r = MPoly.const(self.field, self.nvars, 1)
        for _ in range(n):
            r = r * self
        return r

    def __eq__(self, o):
        if isinstance(o, MPoly):
            return self.terms == o.terms
        if isinstance(o, (int, FieldElement)):
            return self == self._lift(o)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def degree_in(self, i: int) -> int:
        return max((e[i] for e in self.terms), default=-1)

    def involves(self) -> set[int]:
        return {i for e in self.terms for i, k in enumerate(e) if k}

    def coefficient_in(self, i: int, k: int) -> "MPoly":
        """Coefficient of t_i^k, as a polynomial in the remaining variables."""
        t = {}
        for e, c in self.terms.items():
            if e[i] == k:
                e2 = list(e)
                e2[i] = 0
                t[tuple(e2)] = c
        return MPoly._raw(self.field, self.nvars, t)

    def constant(self) -> FieldElement:
        return self.terms.get((0,) * self.nvars, self.field.zero)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def embed(self, nvars: int, index_map: Sequence[int]) -> "MPoly":
        """Rename variable i to index_map[i] in a ring with nvars variables."""
        t = {}
        for e, c in self.terms.items():
            e2 = [0] * nvars
            for i, k in enumerate(e):
                if k:
                    e2[index_map[i]] += k
            t[tuple(e2)] = c
        return MPoly._raw(self.field, nvars, t)

    def evaluate(self, values: Sequence, one=None):
        """Substitute values[i] for t_i (values live in a ring containing the field)."""
        acc = None
        for e, c in self.terms.items():
            term = c
            for i, k in enumerate(e):
                if k:
                    term = term * values[i] ** k
            acc = term if acc is None else acc + term
        if acc is None:
            return one * 0 if one is not None else self.field.zero
        return acc

    def div_linear(self, i: int, j: int) -> "MPoly":
        """Exact quotient by (t_i - t_j)."""
        q = MPoly._raw(self.field, self.nvars, {})
        r = self
        ti = MPoly.var(self.field, self.nvars, i)
        tj = MPoly.var(self.field, self.nvars, j)
        lin = ti - tj
        while r:
            d = r.degree_in(i)
            if d <= 0:
                break
            lead = r.coefficient_in(i, d)
            mono = lead * (ti ** (d - 1))
            q = q + mono
            r = r - mono * lin
        if r:
            raise DomainError("inexact division by a linear form")
        return q

    def format(self, names: Sequence[str] | None = None) -> str:
        names = names or [f"t{i + 1}" for i in range(self.nvars)]
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(names[i] if k == 1 else f"{names[i]}^{k}" for i, k in enumerate(e) if k)
            cs = repr(c)
            if any(ch in cs[1:] for ch in "+-") and mono:
                cs = f"({cs})"
            parts.append(mono if cs == "1" and mono else (f"{cs}*{mono}" if mono else cs))
        return " + ".join(parts)

    def __repr__(self):
        return self.format()


def check_triangular(T: Sequence[MPoly], main: Sequence[int] | None = None) -> list[int]:
    """Validate a triangular monic system and return the stage degrees."""
    main = list(main) if main is not None else list(range(len(T)))
    degs = []
    for k, (f, i) in enumerate(zip(T, main)):
        allowed = set(main[: k + 1])
        extra = f.involves() - allowed
        if extra:
            raise DomainError(f"stage {k + 1} involves later variables {sorted(extra)}")
        d = f.degree_in(i)
        if d < 1:
            raise DomainError(f"stage {k + 1} has no positive degree in its main variable")
        lead = f.coefficient_in(i, d)
        if lead != MPoly.const(f.field, f.nvars, 1):
            raise DomainError(f"stage {k + 1} is not monic in its main variable")
        degs.append(d)
    return degs


def _reduce(p: MPoly, T: Sequence[MPoly], main: Sequence[int], degs: Sequence[int]) -> MPoly:
    terms = dict(p.terms)
    F = p.field
    for f, i, d in reversed(list(zip(T, main, degs))):
        tail = [(e, -c) for e, c in f.terms.items() if e[i] < d]
        while True:
            hi = [e for e in terms if e[i] >= d]
            if not hi:
                break
            e = max(hi, key=lambda x: x[i])
            c = terms.pop(e)
            base = list(e)
            base[i] -= d
            for e2, c2 in tail:
                ne = tuple(a + b for a, b in zip(base, e2))
                s = terms.get(ne)
                s = c * c2 if s is None else s + c * c2
                if s:
                    terms[ne] = s
                else:
                    terms.pop(ne, None)
    return MPoly._raw(F, p.nvars, terms)


def normal_form(p: MPoly, T: Sequence[MPoly]) -> MPoly:
    """Reduce p modulo a triangular system f_1..f_n, f_i monic in t_i."""
    degs = check_triangular(T)
    return _reduce(p, T, list(range(len(T))), degs)


# ---------------------------------------------------------------------------
# rational function fields


class RationalFunction(FieldElement):
    __slots__ = ("field", "num", "den")

    def __init__(self, field: "RationalFunctionField", num: Poly, den: Poly, normalized: bool = False):
        if not den:
            raise DomainError("zero denominator")
        if not normalized:
            g = poly_gcd(num, den) if num else den.monic()
            if g.degree > 0:
                num, den = num // g, den // g
            if not den.is_monic():
                c = den.lc.inverse()
                num, den = num * c, den * c
            if not num:
                den = Poly.const(num.field, 1)
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def _key(self):
        return (self.num.coeffs, self.den.coeffs)

    def __bool__(self):
        return bool(self.num)

    def _add(self, o):
        if self.den == o.den:
            return RationalFunction(self.field, self.num + o.num, self.den)
        return RationalFunction(self.field, self.num * o.den + o.num * self.den, self.den * o.den)

    def _neg(self):
        return RationalFunction(self.field, -self.num, self.den, True)

    def _mul(self, o):
        return RationalFunction(self.field, self.num * o.num, self.den * o.den)

    def _inv(self):
        return RationalFunction(self.field, self.den, self.num)

    def __lt__(self, o):
        return (self.num.sort_key(), self.den.sort_key()) < (o.num.sort_key(), o.den.sort_key())

    @property
    def degree(self) -> int:
        """deg(num) - deg(den) = -v_infinity."""
        return self.num.degree - self.den.degree

    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def is_constant(self) -> bool:
        return self.den.degree == 0 and self.num.degree <= 0


class RationalFunctionField(Field):
    """k(t) for an exact field k."""

    def __init__(self, base: Field, var: str = "t"):
        self.base = base
        self.var = var
        self.characteristic = base.characteristic
        self.order = None
        self.name = f"{base.name}({var})"

    def __call__(self, x) -> RationalFunction:
        if isinstance(x, RationalFunction):
            if x.field is self:
                return x
            if x.field is self.base:
                return RationalFunction(self, Poly.const(self.base, x), Poly.const(self.base, 1))
            raise TypeError(f"cannot coerce {x!r} into {self}")
        if isinstance(x, Poly):
            return RationalFunction(self, Poly(self.base, x.coeffs), Poly.const(self.base, 1))
        if isinstance(x, tuple) and len(x) == 2 and isinstance(x[0], Poly):
            return RationalFunction(self, Poly(self.base, x[0].coeffs), Poly(self.base, x[1].coeffs))
        c = self.base(x)
        return RationalFunction(self, Poly(self.base, [c]), Poly.const(self.base, 1), True)

    def gen(self) -> RationalFunction:
        return self(Poly.x(self.base))

    def poly_ring_x(self) -> Poly:
        return Poly.x(self.base)

    def contains(self, other: Field) -> bool:
        return other is self or other is self.base or (hasattr(self.base, "contains") and self.base.contains(other))

    def format(self, a: RationalFunction) -> str:
        n = a.num.format(self.var)
        if a.den.is_one():
            return n
        d = a.den.format(self.var)
        if a.num.degree > 0 and len([c for c in a.num.coeffs if c]) > 1:
            n = f"({n})"
        if a.den.degree > 0 and len([c for c in a.den.coeffs if c]) > 1:
            d = f"({d})"
        return f"{n}/{d}"

    def random_poly(self, rng: random.Random, max_deg: int = 3) -> Poly:
        d = rng.randint(0, max_deg)
        cs = [self.base.random_element(rng) for _ in range(d)] + [self.base.random_unit(rng)]
        return Poly(self.base, cs)

    def random_element(self, rng):
        num = self.random_poly(rng)
        den = self.random_poly(rng, 2).monic()
        return RationalFunction(self, num, den)

    def random_unit(self, rng):
        return self.random_element(rng)

    def is_square(self, u) -> bool:
        if not u:
            return True
        c, parts = squarefree_decomposition(u.num * u.den)
        if any(m % 2 for _, m in parts):
            return False
        return self.base.is_square(c)

    def sqrt(self, u):
        if not u:
            return u
        P = u.num * u.den
        c, parts = squarefree_decomposition(P)
        if any(m % 2 for _, m in parts):
            raise DomainError(f"{u} is not a square in {self}")
        r = Poly.const(self.base, self.base.sqrt(c))
        for g, m in parts:
            r = r * g ** (m // 2)
        return RationalFunction(self, r, u.den)

    def square_class(self, u):
        """c * (odd-multiplicity squarefree part) of num*den, c a base square class."""
        P = u.num * u.den
        c, parts = squarefree_decomposition(P)
        r = Poly.const(self.base, self.base.square_class(c))
        for g, m in parts:
            if m % 2:
                r = r * g
        return RationalFunction(self, r, Poly.const(self.base, 1), True)


# ---------------------------------------------------------------------------
# factorization


def _pth_root_coeff(F: Field, c: FieldElement) -> FieldElement:
    p = F.characteristic
    if F.order is None:
        raise CapabilityError(f"p-th roots over {F}", "pth_root")
    return c ** (F.order // p)


def squarefree_decomposition(f: Poly) -> tuple[FieldElement, list[tuple[Poly, int]]]:
    """f = c * prod g_i^{m_i} with g_i monic squarefree, pairwise coprime."""
    F = f.field
    if not f:
        raise DomainError("squarefree decomposition of the zero polynomial")
    c = f.lc
    f = f.monic()
    if f.degree < 1:
        return c, []
    p = F.characteristic
    out: list[tuple[Poly, int]] = []
    if p == 0:
        g = poly_gcd(f, f.deriv())
        w = f // g
        i = 1
        while w.degree > 0:
            y = poly_gcd(w, g)
            z = w // y
            if z.degree > 0:
                out.append((z, i))
            g = g // y
            w = y
            i += 1
        return c, out
    n = 1
    while True:
        D = f.deriv()
        done = False
        if D:
            g = poly_gcd(f, D)
            h = f // g
            i = 1
            while not h.is_one():
                G = poly_gcd(g, h)
                H = h // G
                if H.degree > 0:
                    out.append((H, i * n))
                g, h, i = g // G, G, i + 1
            if g.is_one():
                done = True
            else:
                f = g
        if done:
            break
        # f is now a p-th power
        cs = [_pth_root_coeff(F, f.coeffs[i * p]) for i in range(f.degree // p + 1)]
        f = Poly(F, cs)
        n *= p
        if f.degree < 1:
            break
    # merge equal factors that may appear at different passes
    merged: dict[Poly, int] = {}
    for g, m in out:
        merged[g] = merged.get(g, 0) + m
    return c, sorted(merged.items(), key=lambda gm: (gm[1], gm[0].sort_key()))


def is_irreducible(f: Poly) -> bool:
    """Rabin's test over a finite field; rational-root test in low degree over Q."""
    F = f.field
    if f.degree < 1:
        return False
    if f.degree == 1:
        return True
    if F.order is None:
        if F is QQ and f.degree <= 3:
            return not rational_roots(f)
        raise CapabilityError(f"irreducibility test over {F}", "irreducible")
    q = F.order
    n = f.degree
    f = f.monic()
    x = Poly.x(F)
    primes = list(factor_int(n))
    for r in primes:
        h = x.pow_mod(q ** (n // r), f) - x
        if poly_gcd(f, h).degree > 0:
            return False
    return (x.pow_mod(q ** n, f) - x) % f == Poly(F, [])


def _ddf(f: Poly) -> list[tuple[Poly, int]]:
    F = f.field
    q = F.order
    x = Poly.x(F)
    h = x
    out = []
    i = 1
    while 2 * i <= f.degree:
        h = h.pow_mod(q, f)
        g = poly_gcd(f, h - x)
        if g.degree > 0:
            out.append((g, i))
            f = f // g
            h = h % f if f.degree > 0 else h
        i += 1
    if f.degree > 0:
        out.append((f, f.degree))
    return out


def _edf(f: Poly, d: int, rng: random.Random) -> list[Poly]:
    F = f.field
    q = F.order
    if f.degree == d:
        return [f]
    while True:
        a = Poly(F, [F.random_element(rng) for _ in range(f.degree)])
        if a.degree < 1:
            continue
        if F.characteristic == 2:
            e = q.bit_length() - 1  # q = 2^e
            t = a
            acc = a
            for _ in range(e * d - 1):
                t = (t * t) % f
                acc = acc + t
            b = acc
        else:
            b = a.pow_mod((q ** d - 1) // 2, f) - Poly.const(F, 1)
        g = poly_gcd(f, b)
        if 0 < g.degree < f.degree:
            return _edf(g, d, rng) + _edf(f // g, d, rng)


def rational_roots(f: Poly) -> list[QQElement]:
    """All rational roots of f over Q (no multiplicities)."""
    if f.field is not QQ:
        raise DomainError("rational_roots expects a polynomial over QQ")
    den = 1
    for c in f.coeffs:
        den = den * c.v.denominator // gcd(den, c.v.denominator)
    ints = [int(c.v * den) for c in f.coeffs]
    roots = []
    if ints[0] == 0:
        roots.append(QQ(0))
        k = next(i for i, c in enumerate(ints) if c)
        ints = ints[k:]
    if len(ints) <= 1:
        return roots
    a0, an = ints[0], ints[-1]

    def divisors(n):
        n = abs(n)
        ds = [1]
        for p, e in factor_int(n).items():
            ds = [d * p ** k for d in ds for k in range(e + 1)]
        return ds

    g = Poly(QQ, ints)
    for pn in divisors(a0):
        for qd in divisors(an):
            for s in (1, -1):
                r = QQ(Fraction(s * pn, qd))
                if r not in roots and not g(r):
                    roots.append(r)
    return sorted(roots)


def factor(f: Poly, seed: int | None = None) -> tuple[FieldElement, list[tuple[Poly, int]]]:
    """Factor f into unit * prod(monic irreducible ^ multiplicity).

    Finite fields: squarefree + distinct-degree + equal-degree splitting with a
    seeded generator.  Q: content, rational roots, and residual factors of
    degree <= 3; anything larger needs pre-factored input.
    """
    F = f.field
    if not f:
        raise DomainError("cannot factor the zero polynomial")
    if isinstance(F, RationalFunctionField) or (F.order is None and F is not QQ):
        raise CapabilityError(f"factorization over {F}", "factor")
    rng = random.Random(default_seed() if seed is None else seed)
    unit, sqf = squarefree_decomposition(f)
    out: list[tuple[Poly, int]] = []
    for g, m in sqf:
        if F is QQ:
            roots = rational_roots(g)
            x = Poly.x(QQ)
            rest = g
            for r in roots:
                lin = x - Poly.const(QQ, r)
                out.append((lin, m))
                rest = rest // lin
            if rest.degree > 0:
                if rest.degree > 3:
                    raise CapabilityError(
                        "full factorization over QQ is not supported; supply the polynomial pre-factored",
                        "factor_QQ")
                out.append((rest.monic(), m))
            continue
        for part, d in _ddf(g):
            for h in _edf(part, d, rng):
                out.append((h.monic(), m))
    out.sort(key=lambda gm: (gm[0].sort_key(), gm[1]))
    return unit, out


def expand_factorization(unit: FieldElement, factors: Sequence[tuple[Poly, int]]) -> Poly:
    r = Poly.const(unit.field, unit)
    for g, m in factors:
        r = r * g ** m
    return r
