"""The ``mwk`` command line: a small script language over fields and symbols.

Example script::

    field F3 = GF(3)
    ext E = F3[x]/(x^2+1)
    elem one : KMW(0, E, w) = 1
    transfer one from E

Statements are one per line; ``#`` starts a comment.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from dataclasses import dataclass, field as dc_field
from typing import Any

from .chowwitt import Curve, QuadraticDivisor, pb1_class, tdiv
from .errors import CapabilityError, DomainError, MWKError
from .exact import GF, QQ, Field, Poly, RationalFunctionField, factor_int
from .fields import Extension, Place, Twist, make_extension, omega_label
from .gw import GWElement, gw_canonical, gw_equal, gw_invariants
from .km import KMSymbol
from .mw import (
    MWElement,
    bracket,
    eps_elem,
    eta,
    forgetful,
    from_gw,
    gw_image,
    h_elem,
    mu_prime,
    mw_equal,
    mw_residue,
    mw_simplify,
    mw_specialize,
    n_eps_elem,
    sym,
)
from .transfer import mw_transfer, mw_transfer_bass_tate, quadratic_degree, reciprocity_check


class ScriptError(DomainError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        super().__init__(f"line {line}, column {col}: {msg}" if line else msg)
        self.line, self.col = line, col


# ---------------------------------------------------------------------------
# tokens

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()\[\]<>,=:;@]))")


@dataclass
class Tok:
    kind: str   # num, name, op, end
    text: str
    line: int
    col: int


def tokenize(text: str, line: int) -> list[Tok]:
    out = []
    pos = 0
    text = text.split("#", 1)[0].rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            col = pos + 1 + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ScriptError(f"unexpected character {text[col - 1]!r}", line, col)
        kind = m.lastgroup
        out.append(Tok(kind, m.group(kind), line, m.start(kind) + 1))
        pos = m.end()
    out.append(Tok("end", "", line, len(text) + 1))
    return out


class Stream:
    def __init__(self, toks: list[Tok]):
        self.toks = toks
        self.i = 0

    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def peek(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("op", "name")

    def take(self) -> Tok:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> Tok:
        if not self.peek(text):
            self.error(f"expected {text!r}")
        return self.take()

    def accept(self, text: str) -> bool:
        if self.peek(text):
            self.i += 1
            return True
        return False

    def name(self) -> str:
        if self.tok.kind != "name":
            self.error("expected a name")
        return self.take().text

    def integer(self) -> int:
        sign = -1 if self.accept("-") else 1
        if self.tok.kind != "num":
            self.error("expected an integer")
        return sign * int(self.take().text)

    def at_end(self) -> bool:
        return self.tok.kind == "end"

    def end(self):
        if not self.at_end():
            self.error(f"unexpected {self.tok.text!r}")

    def error(self, msg: str):
        raise ScriptError(msg + (f", found {self.tok.text!r}" if self.tok.text else ""), self.tok.line, self.tok.col)


# ---------------------------------------------------------------------------
# expression trees: ("num", n) ("name", s) ("neg", a) ("add"|"sub"|"mul"|"div", a, b)
# ("pow", a, n) ("sym", [f..]) ("brk", [f..]) ("eta",) ("h",) ("eps",) ("neps", n)

RESERVED = {"eta", "h", "eps", "neps", "dt"}


def parse_fexpr(s: Stream):
    node = _f_term(s)
    while s.peek("+") or s.peek("-"):
        op = s.take().text
        node = ("add" if op == "+" else "sub", node, _f_term(s), )
    return node


def _f_term(s: Stream):
    if s.accept("-"):
        return ("neg", _f_term(s))
    node = _f_factor(s)
    while s.peek("*") or s.peek("/"):
        op = s.take().text
        node = ("mul" if op == "*" else "div", node, _f_factor(s))
    return node


def _f_factor(s: Stream):
    base = _f_atom(s)
    if s.accept("^"):
        return ("pow", base, s.integer())
    return base


def _f_atom(s: Stream):
    t = s.tok
    if t.kind == "num":
        s.take()
        return ("num", int(t.text))
    if t.kind == "name":
        s.take()
        return ("name", t.text, t.line, t.col)
    if s.accept("("):
        node = parse_fexpr(s)
        s.expect(")")
        return node
    if s.accept("-"):
        return ("neg", _f_atom(s))
    s.error("expected a field element")


def parse_mw(s: Stream):
    node = _mw_term(s)
    while s.peek("+") or s.peek("-"):
        op = s.take().text
        node = ("add" if op == "+" else "sub", node, _mw_term(s))
    return node


def _mw_term(s: Stream):
    if s.accept("-"):
        return ("neg", _mw_term(s))
    node = _mw_factor(s)
    while s.accept("*"):
        node = ("mul", node, _mw_factor(s))
    return node


def _mw_factor(s: Stream):
    base = _mw_atom(s)
    if s.accept("^"):
        return ("pow", base, s.integer())
    return base


def _unit_list(s: Stream, close: str) -> list:
    items = [parse_fexpr(s)]
    while s.accept(","):
        items.append(parse_fexpr(s))
    s.expect(close)
    return items


def _mw_atom(s: Stream):
    t = s.tok
    if t.kind == "num":
        s.take()
        return ("num", int(t.text))
    if s.accept("["):
        return ("sym", _unit_list(s, "]"), t.line, t.col)
    if s.accept("<"):
        return ("brk", _unit_list(s, ">"), t.line, t.col)
    if s.accept("("):
        node = parse_mw(s)
        s.expect(")")
        return node
    if t.kind == "name":
        s.take()
        if t.text in ("eta", "h", "eps"):
            return (t.text,)
        if t.text == "neps":
            s.expect("(")
            n = s.integer()
            s.expect(")")
            return ("neps", n)
        return ("name", t.text, t.line, t.col)
    s.error("expected a Milnor-Witt term")


# ---------------------------------------------------------------------------
# printing


def format_element(a) -> str:
    """Canonical text of an element, without its twist; parses back to an equal element."""
    if isinstance(a, KMSymbol):
        return repr(a)
    if isinstance(a, GWElement):
        a = from_gw(a.with_twist(Twist()))
    a = mw_simplify(a.with_twist(Twist()))
    if a.degree != 0:
        return repr(a)
    g = gw_image(a)
    if a.field.order is not None:
        g = gw_canonical(g)
    n = g.rank // 2
    if n and not g.rank % 2:
        F = a.field
        if gw_equal(g, GWElement(F, {F.one: n, -F.one: n})):
            return {1: "h", -1: "-h"}.get(n, f"{n}*h")
    return repr(g) if g.terms else "0"


# ---------------------------------------------------------------------------
# interpreter


@dataclass
class Divisor:
    D: QuadraticDivisor


@dataclass
class Interpreter:
    fields: dict = dc_field(default_factory=dict)
    values: dict = dc_field(default_factory=dict)
    last_field: Field | None = None
    records: list = dc_field(default_factory=list)

    # -- field helpers --------------------------------------------------------
    def field_names(self, F: Field) -> dict:
        """Generator names visible in F (tower and function-field variables)."""
        out: dict = {}
        chain = []
        cur = F
        while True:
            chain.append(cur)
            if isinstance(cur, Extension):
                cur = cur.parent
            elif isinstance(cur, RationalFunctionField):
                cur = cur.base
            else:
                break
        for G in reversed(chain):
            if isinstance(G, Extension):
                out = {k: G(v) for k, v in out.items()}
                out[G.gen_name] = G.gen()
            elif isinstance(G, RationalFunctionField):
                out = {k: G(v) for k, v in out.items()}
                out[G.var] = G.gen()
            elif G.order is not None and getattr(G, "e", 1) > 1:
                out[G.gen_name] = G.gen()
        return {k: F(v) if v.field is not F else v for k, v in out.items()}

    def eval_f(self, node, F: Field, names: dict | None = None):
        names = self.field_names(F) if names is None else names
        kind = node[0]
        if kind == "num":
            return F.one * node[1]
        if kind == "name":
            if node[1] not in names:
                raise ScriptError(f"unknown generator {node[1]!r} in {F}", node[2], node[3])
            return names[node[1]]
        if kind == "neg":
            return -self.eval_f(node[1], F, names)
        if kind == "pow":
            return self.eval_f(node[1], F, names) ** node[2]
        a, b = self.eval_f(node[1], F, names), self.eval_f(node[2], F, names)
        if kind == "add":
            return a + b
        if kind == "sub":
            return a - b
        if kind == "mul":
            return a * b
        if not b:
            raise DomainError("division by zero")
        return a / b

    def eval_poly(self, node, base: Field, var: str) -> Poly:
        x = Poly.x(base)
        names = {k: Poly.const(base, v) for k, v in self.field_names(base).items()}
        names[var] = x

        def ev(n):
            kind = n[0]
            if kind == "num":
                return Poly.const(base, base.one * n[1])
            if kind == "name":
                if n[1] not in names:
                    raise ScriptError(f"unknown name {n[1]!r} in polynomial", n[2], n[3])
                return names[n[1]]
            if kind == "neg":
                return -ev(n[1])
            if kind == "pow":
                return ev(n[1]) ** n[2]
            a, b = ev(n[1]), ev(n[2])
            if kind == "add":
                return a + b
            if kind == "sub":
                return a - b
            if kind == "mul":
                return a * b
            if b.degree != 0:
                raise DomainError("polynomials may only be divided by constants")
            return a * Poly.const(base, b.coeffs[0].inverse())

        return ev(node)

    def fields_in(self, node, acc: list):
        if not isinstance(node, tuple):
            return acc
        if node[0] == "name" and node[1] in self.values:
            v = self.values[node[1]]
            if isinstance(v, MWElement):
                acc.append(v.field)
        for child in node[1:]:
            if isinstance(child, tuple):
                self.fields_in(child, acc)
            elif isinstance(child, list):
                for c in child:
                    self.fields_in(c, acc)
        return acc

    def eval_mw(self, node, F: Field) -> MWElement:
        kind = node[0]
        if kind == "num":
            return MWElement.const(F, node[1])
        if kind == "eta":
            return eta(F)
        if kind == "h":
            return h_elem(F)
        if kind == "eps":
            return eps_elem(F)
        if kind == "neps":
            return n_eps_elem(node[1], F)
        if kind == "sym":
            return sym(F, *[self._unit(n, F, node) for n in node[1]])
        if kind == "brk":
            out = MWElement.zero(F, 0)
            for n in node[1]:
                out = out + bracket(F, self._unit(n, F, node))
            return out
        if kind == "name":
            v = self.values.get(node[1])
            if not isinstance(v, MWElement):
                raise ScriptError(f"unbound element {node[1]!r}", node[2], node[3])
            if v.field is not F:
                raise ScriptError(f"{node[1]} lives over {v.field}, not {F}", node[2], node[3])
            return v
        if kind == "neg":
            return -self.eval_mw(node[1], F)
        if kind == "pow":
            if node[2] < 0:
                raise DomainError("negative powers of Milnor-Witt elements")
            return self.eval_mw(node[1], F) ** node[2]
        a, b = self.eval_mw(node[1], F), self.eval_mw(node[2], F)
        if kind == "mul":
            return a * b
        if a.degree != b.degree:
            raise DomainError(f"degree mismatch: {a.degree} vs {b.degree}")
        if a.twist != b.twist:
            raise DomainError(f"twist mismatch: {a.twist} vs {b.twist}")
        return a + b if kind == "add" else a - b

    def _unit(self, n, F, at):
        u = self.eval_f(n, F)
        if not u:
            raise ScriptError("symbols need units, got 0", at[2], at[3])
        return u

    def parse_field_spec(self, s: Stream) -> Field:
        t = s.tok
        nm = s.name()
        if nm == "GF":
            s.expect("(")
            q = s.integer()
            s.expect(")")
            pe = factor_int(q)
            if len(pe) != 1:
                raise ScriptError(f"{q} is not a prime power", t.line, t.col)
            return GF(q)
        if nm == "QQ":
            return QQ
        if nm not in self.fields:
            raise ScriptError(f"unknown field {nm!r}", t.line, t.col)
        F = self.fields[nm]
        if s.accept("("):
            var = s.name()
            s.expect(")")
            return RationalFunctionField(F, var)
        return F

    def field_ref(self, s: Stream) -> Field:
        t = s.tok
        nm = s.name()
        if nm not in self.fields:
            raise ScriptError(f"unknown field {nm!r}", t.line, t.col)
        return self.fields[nm]

    def point(self, s: Stream, K: RationalFunctionField) -> Place:
        if s.accept("inf"):
            return Place(K, None)
        s.expect("(")
        p = self.eval_poly(parse_fexpr(s), K.base, K.var)
        s.expect(")")
        if p.degree < 1:
            raise DomainError("a point needs a polynomial of positive degree")
        return Place(K, p.monic())

    def element(self, s: Stream) -> MWElement:
        t = s.tok
        nm = s.name()
        v = self.values.get(nm)
        if not isinstance(v, MWElement):
            raise ScriptError(f"unbound element {nm!r}", t.line, t.col)
        return v

    def curve_spec(self, s: Stream, K: RationalFunctionField, default: Curve) -> Curve:
        if s.accept("on"):
            kind = s.name()
            if kind == "A1":
                return Curve.a1(K)
            if kind != "P1":
                s.error("expected A1 or P1")
        if s.accept("twist"):
            if s.accept("omega"):
                return Curve.omega(K.base, K)
            s.expect("O")
            s.expect("(")
            d = s.integer()
            s.expect(")")
            return Curve.p1(K, d)
        return default

    # -- statements -----------------------------------------------------------
    def run_line(self, text: str, line: int):
        toks = tokenize(text, line)
        if toks[0].kind == "end":
            return
        s = Stream(toks)
        head = s.name()
        handler = getattr(self, f"do_{head}", None)
        if handler is None:
            raise ScriptError(f"unknown statement {head!r}", toks[0].line, toks[0].col)
        handler(s, text.strip())

    def record(self, command: str, inputs: str, result: Any, **extra):
        rec = {"command": command, "inputs": inputs, "result": result}
        rec.update({k: v for k, v in extra.items() if v is not None})
        self.records.append(rec)

    def do_field(self, s: Stream, src: str):
        nm = s.name()
        s.expect("=")
        F = self.parse_field_spec(s)
        s.end()
        self.fields[nm] = F
        self.last_field = F

    def do_ext(self, s: Stream, src: str):
        nm = s.name()
        s.expect("=")
        base = self.field_ref(s)
        s.expect("[")
        var = s.name()
        s.expect("]")
        s.expect("/")
        s.expect("(")
        f = self.eval_poly(parse_fexpr(s), base, var)
        s.expect(")")
        assume = s.accept("assume")
        s.end()
        if f.degree < 1:
            raise DomainError("extension needs a polynomial of positive degree")
        E = make_extension(base, f.monic(), names=[var], assume_irreducible=assume)
        self.fields[nm] = E
        self.last_field = E

    def _twist(self, s: Stream, F: Field) -> Twist:
        if not s.accept(","):
            return Twist()
        t = s.tok
        if s.accept("w"):
            over = None
            if s.accept("/"):
                over = self.field_ref(s)
            if not isinstance(F, Extension):
                raise ScriptError("w needs a finite extension", t.line, t.col)
            return Twist.of(omega_label(F, over if over is not None else F.parent))
        return Twist.of(s.name())

    def do_elem(self, s: Stream, src: str):
        nm = s.name()
        if nm in RESERVED:
            s.error(f"{nm} is reserved")
        s.expect(":")
        s.expect("KMW")
        s.expect("(")
        n = s.integer()
        s.expect(",")
        F = self.field_ref(s)
        tw = self._twist(s, F)
        s.expect(")")
        s.expect("=")
        start = s.tok
        node = parse_mw(s)
        s.end()
        a = self.eval_mw(node, F)
        if a.terms and a.degree != n:
            raise ScriptError(f"expression has degree {a.degree}, declared {n}", start.line, start.col)
        self.values[nm] = MWElement(F, n, a.terms, tw)

    def do_gw(self, s: Stream, src: str):
        nm = s.name()
        F = self.last_field
        if s.accept(":"):
            s.expect("GW")
            s.expect("(")
            F = self.field_ref(s)
            s.expect(")")
        if F is None:
            s.error("no field declared")
        s.expect("=")
        a = self.eval_mw(parse_mw(s), F)
        s.end()
        if a.terms and a.degree != 0:
            raise DomainError("GW elements have degree 0")
        self.values[nm] = MWElement(F, 0, a.terms)

    def do_divisor(self, s: Stream, src: str):
        nm = s.name()
        s.expect("on")
        K = self.field_ref(s)
        if not isinstance(K, RationalFunctionField):
            raise DomainError("divisors live on curves over k(t)")
        curve = self.curve_spec(s, K, Curve.p1(K, 0))
        s.expect("=")
        if s.accept("tdiv"):
            D = tdiv(self.element(s), curve)
        else:
            coeffs: dict = {}
            q = None
            while True:
                s.expect("at")
                pl = self.point(s, K)
                s.expect(":")
                c = self.eval_mw(parse_mw(s), pl.residue_field)
                q = c.degree if q is None else q
                coeffs[pl] = coeffs[pl] + c if pl in coeffs else c
                if not s.accept(";"):
                    break
            D = QuadraticDivisor(curve, q, coeffs)
        s.end()
        self.values[nm] = Divisor(D)

    # -- commands -------------------------------------------------------------
    def _with_field(self, s: Stream, nodes: list) -> Field:
        if s.accept("over"):
            return self.parse_field_spec(s)
        found = []
        for n in nodes:
            self.fields_in(n, found)
        if found:
            return found[0]
        if self.last_field is None:
            s.error("cannot infer the field; add 'over FIELD'")
        return self.last_field

    def _emit_element(self, command: str, src: str, a, **extra):
        tw = str(a.twist) if isinstance(a, (MWElement, GWElement)) and a.twist else None
        self.record(command, src, format_element(a), twist=tw, **extra)

    def do_eval(self, s: Stream, src: str):
        node = parse_mw(s)
        F = self._with_field(s, [node])
        s.end()
        self._emit_element("eval", src, self.eval_mw(node, F))

    do_show = do_eval

    def do_equal(self, s: Stream, src: str):
        a_node = parse_mw(s)
        s.expect(",")
        b_node = parse_mw(s)
        F = self._with_field(s, [a_node, b_node])
        s.end()
        a, b = self.eval_mw(a_node, F), self.eval_mw(b_node, F)
        if a.degree != b.degree and a.terms and b.terms:
            raise DomainError(f"degree mismatch: {a.degree} vs {b.degree}")
        if not a.terms:
            a = MWElement.zero(F, b.degree, b.twist)
        if not b.terms:
            b = MWElement.zero(F, a.degree, a.twist)
        self.record("equal", src, mw_equal(a, b.with_twist(a.twist)))

    def do_normalize(self, s: Stream, src: str):
        a = self.element(s)
        s.end()
        m = forgetful(a)
        self.record("normalize", src, {"witt": repr(mu_prime(a).with_twist(Twist())),
                                       "milnor": None if m is None else repr(m)})

    def _place_cmd(self, s: Stream):
        a = self.element(s)
        K = a.field
        if not isinstance(K, RationalFunctionField):
            raise DomainError("residues need an element over k(t)")
        s.expect("at")
        pl = self.point(s, K)
        unif = None
        if s.accept("with"):
            unif = self.eval_f(parse_fexpr(s), K)
        s.end()
        return a, pl, unif

    def do_residue(self, s: Stream, src: str):
        a, pl, unif = self._place_cmd(s)
        self._emit_element("residue", src, mw_residue(a, pl, unif))

    def do_specialize(self, s: Stream, src: str):
        a, pl, unif = self._place_cmd(s)
        self._emit_element("specialize", src, mw_specialize(a, pl, unif))

    def do_transfer(self, s: Stream, src: str):
        a = self.element(s)
        s.expect("from")
        E = self.field_ref(s)
        if not isinstance(E, Extension) or a.field is not E:
            raise DomainError("transfer needs an element over the named extension")
        over = E.parent
        if s.accept("over"):
            over = self.field_ref(s)
        lab = omega_label(E, over)
        if s.accept("with"):
            s.expect("w")
        if lab not in a.twist.labels:
            a = a.with_twist(a.twist * Twist.of(lab))
        chain = None
        if s.accept("via"):
            chain = [self.eval_f(parse_fexpr(s), E)]
            while s.accept(","):
                chain.append(self.eval_f(parse_fexpr(s), E))
        s.end()
        r = mw_transfer(E, a, over) if chain is None else mw_transfer_bass_tate(E, a, chain, over)
        self._emit_element("transfer", src, r)

    def _divisor_of(self, s: Stream, default_omega: bool) -> QuadraticDivisor:
        t = s.tok
        nm = s.name()
        v = self.values.get(nm)
        if isinstance(v, Divisor):
            D = v.D
            if s.at_end():
                return D
            curve = self.curve_spec(s, D.curve.K, D.curve)
            if curve != D.curve:
                raise DomainError(f"divisor {nm} lives on {D.curve}, not {curve}")
            return D
        if not isinstance(v, MWElement) or not isinstance(v.field, RationalFunctionField):
            raise ScriptError(f"{nm} is neither a divisor nor an element over k(t)", t.line, t.col)
        K = v.field
        default = Curve.omega(K.base, K) if default_omega else Curve.p1(K, 0)
        return tdiv(v, self.curve_spec(s, K, default))

    def do_tdiv(self, s: Stream, src: str):
        D = self._divisor_of(s, False)
        s.end()
        self.record("tdiv", src, D.to_json())

    def do_tdeg(self, s: Stream, src: str):
        D = self._divisor_of(s, True)
        s.end()
        self._emit_element("tdeg", src, quadratic_degree(D))

    def do_pb1(self, s: Stream, src: str):
        D = self._divisor_of(s, False)
        s.end()
        r = pb1_class(D)
        self.record("pb1", src, format_element(r), parity="even" if D.curve.d % 2 == 0 else "odd")

    def do_reciprocity(self, s: Stream, src: str):
        s.expect("[")
        fnode = parse_fexpr(s)
        s.expect("]")
        s.expect("*")
        s.expect("dt")
        s.expect("over")
        k = self.parse_field_spec(s)
        K = next((F for F in self.fields.values() if isinstance(F, RationalFunctionField) and F.base is k), None)
        K = K if K is not None else RationalFunctionField(k, "t")
        factors = None
        if s.accept("factors"):
            factors = [self.eval_poly(parse_fexpr(s), k, K.var)]
            while s.accept(","):
                factors.append(self.eval_poly(parse_fexpr(s), k, K.var))
        s.end()
        f = self.eval_f(fnode, K)
        if not f:
            raise DomainError("reciprocity needs a unit")
        rep = reciprocity_check(f, K, factors)
        per = [{"place": p, "residue": format_element(r), "transfer": format_element(t)} for p, r, t in rep.per_place]
        self.record("reciprocity", src, "0" if rep.ok else format_element(rep.total), ok=rep.ok,
                    sum="0" if rep.ok else format_element(rep.total), perPlace=per)

    def do_invariants(self, s: Stream, src: str):
        a = self.element(s)
        s.end()
        if a.degree != 0:
            raise DomainError("invariants are defined for GW elements (degree 0)")
        g = gw_image(a.with_twist(Twist()))
        self.record("invariants", src, format_element(a), invariants=gw_invariants(g).as_dict())

    def do_suite(self, s: Stream, src: str):
        only = s.name() if not s.at_end() else None
        s.end()
        from .rules import run_rules

        res = run_rules(only=only)
        self.record("suite", src, {r.name: r.line() for r in res}, ok=all(r.ok or r.status != "ok" for r in res))


# ---------------------------------------------------------------------------
# entry points


def run_script(text: str, interp: Interpreter | None = None) -> tuple[Interpreter, int, dict | None]:
    """Run all lines; returns (interpreter, exit code, error record or None)."""
    interp = interp or Interpreter()
    for no, line in enumerate(text.splitlines(), start=1):
        try:
            interp.run_line(line, no)
        except CapabilityError as e:
            return interp, 2, {"error": str(e), "kind": "capability", "capability": e.capability, "line": no}
        except (MWKError, ValueError, ZeroDivisionError, TypeError) as e:
            if isinstance(e, ScriptError) and not e.line:
                e = ScriptError(str(e), no, 1)
            return interp, 1, {"error": str(e), "kind": "domain", "line": no}
    return interp, 0, None


def _text(rec: dict) -> str:
    res = rec["result"]
    if isinstance(res, (dict, list)):
        res = json.dumps(res)
    out = f"{rec['command']}: {res}"
    if rec.get("twist"):
        out += f"  (x) {rec['twist']}"
    if "perPlace" in rec:
        for p in rec["perPlace"]:
            out += f"\n  {p['place']}: {p['residue']} -> {p['transfer']}"
    if "invariants" in rec:
        out += f"\n  {json.dumps(rec['invariants'])}"
    return out


def emit(interp: Interpreter, code: int, err: dict | None, as_json: bool, out=None):
    out = out if out is not None else sys.stdout
    if as_json:
        payload: dict = {"results": interp.records}
        if err:
            payload["error"] = err
        out.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        for rec in interp.records:
            out.write(_text(rec) + "\n")
        if err:
            out.write(f"error ({err['kind']}): {err['error']}\n")


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="mwk", description="Exact Milnor-Witt K-theory computations.")
    sub = ap.add_subparsers(dest="cmd", required=True)
    run = sub.add_parser("run", help="run a .mwk script")
    run.add_argument("script")
    run.add_argument("--json", action="store_true")
    run.add_argument("--seed", type=int)
    suite = sub.add_parser("suite", help="run the randomized rules suite")
    suite.add_argument("--filter")
    suite.add_argument("--instances", type=int, default=50)
    suite.add_argument("--seed", type=int)
    sub.add_parser("repl", help="interactive session")
    args = ap.parse_args(argv)

    if getattr(args, "seed", None) is not None:
        os.environ["MWK_SEED"] = str(args.seed)

    if args.cmd == "run":
        with open(args.script, encoding="utf-8") as fh:
            text = fh.read()
        interp, code, err = run_script(text)
        emit(interp, code, err, args.json)
        return code
    if args.cmd == "suite":
        from .rules import run_rules

        results = run_rules(args.instances, args.seed, args.filter)
        for r in results:
            print(r.line())
        return 0 if all(r.ok or r.status != "ok" for r in results) else 1
    return repl()


def repl() -> int:
    interp = Interpreter()
    while True:
        try:
            line = input("mwk> ")
        except EOFError:
            print()
            return 0
        if line.strip() in ("quit", "exit"):
            return 0
        before = len(interp.records)
        _, code, err = run_script(line, interp)
        for rec in interp.records[before:]:
            print(_text(rec))
        if err:
            print(f"error ({err['kind']}): {err['error']}")


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
