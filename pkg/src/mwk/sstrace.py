"""Bezoutians and Scheja-Storch traces of triangular presentations.

For B = A[t]/(f) the Bezoutian Delta_f in B (x) B is the determinant of the
divided-difference matrix c_ij; the Scheja-Storch form tau_f is the unique
A-linear form with sum_ab c_ab tau_f(m_a) m_b = 1.  The differential trace of
b * w (w the presentation's canonical generator) is tau_f(b), so GW transfers
are Gram matrices (x, y) -> tau_f(u b x y).
"""

from __future__ import annotations

from typing import Sequence

from .errors import DomainError
from .exact import Field, FieldElement, MPoly, _reduce, mat_rank, mat_solve
from .fields import Extension, Presentation, Twist, omega_label
from .gw import GWElement, GramSpace, gram_to_gw


def _shift_vars(p: MPoly, n: int, upto: int) -> MPoly:
    """Rename t_1..t_upto to t'_1..t'_upto inside a 2n-variable ring."""
    return _prime_vars(p, n, range(upto))


def _prime_vars(p: MPoly, n: int, primed) -> MPoly:
    primed = set(primed)
    return p.embed(2 * n, [i + n if i in primed else i for i in range(n)])


def divided_differences(P: Presentation, order: Sequence[int] | None = None) -> list[list[MPoly]]:
    """c_ij with sum_j c_ij (t_j - t'_j) = f_i(t) - f_i(t') in 2n variables.

    ``order`` is the sequence in which the variables are swapped for their
    primed copies (default t_1, ..., t_n).
    """
    n = P.n
    order = list(range(n)) if order is None else list(order)
    if sorted(order) != list(range(n)):
        raise DomainError("order must be a permutation of the variables")
    C = []
    for f in P.polys:
        row: list = [None] * n
        done: list[int] = []
        prev = _prime_vars(f, n, done)
        for j in order:
            done.append(j)
            cur = _prime_vars(f, n, done)
            row[j] = (prev - cur).div_linear(j, n + j)
            prev = cur
        C.append(row)
    return C


def _det_mpoly(M: list[list[MPoly]]) -> MPoly:
    n = len(M)
    if n == 1:
        return M[0][0]
    acc = None
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = M[0][j] * _det_mpoly(minor)
        if j % 2:
            term = -term
        acc = term if acc is None else acc + term
    return acc


def _double_system(P: Presentation) -> tuple[list[MPoly], list[int]]:
    n = P.n
    T = [f.embed(2 * n, list(range(n))) for f in P.polys] + [_shift_vars(f, n, n) for f in P.polys]
    return T, P.degs + P.degs


def bezoutian(P: Presentation, order: Sequence[int] | None = None) -> MPoly:
    """Delta_f reduced modulo (f(t), f(t')) in 2n variables (t' are t_{n+1}..t_{2n})."""
    n = P.n
    C = divided_differences(P, order)
    D = _det_mpoly(C)
    scale = P.base.one
    for s in P.scales:
        scale = scale * s
    D = D * scale
    T, degs = _double_system(P)
    return _reduce(D, T, list(range(2 * n)), degs)


def bezoutian_matrix(P: Presentation) -> list[list[FieldElement]]:
    """Coefficients c_ab of Delta = sum c_ab m_a (x) m'_b over the monomial basis."""
    n = P.n
    D = bezoutian(P)
    M = [[P.base.zero] * P.rank for _ in range(P.rank)]
    for e, c in D.terms.items():
        a = P.index[e[:n]]
        b = P.index[e[n:]]
        M[a][b] = c
    return M


def ss_trace(P: Presentation) -> list[FieldElement]:
    """tau_f as its values on the monomial basis."""
    cache = P.__dict__.setdefault("_tau", None)
    if cache is not None:
        return cache
    M = bezoutian_matrix(P)
    # sum_a c_ab tau_a = delta_{b,0}
    A = [[M[a][b] for a in range(P.rank)] for b in range(P.rank)]
    rhs = [P.base.one if b == 0 else P.base.zero for b in range(P.rank)]
    try:
        tau = mat_solve(A, rhs, P.base)
    except DomainError:
        raise DomainError("singular Bezoutian system: invalid presentation")
    P._tau = tau
    return tau


def apply_form(P: Presentation, form: Sequence[FieldElement], p: MPoly) -> FieldElement:
    return sum((a * b for a, b in zip(form, P.coords(p))), P.base.zero)


def residue_symbol(lam: MPoly, P: Presentation) -> FieldElement:
    """Res[lam dt_1..dt_n / f_1..f_n] = tau_f(lam mod f)."""
    return apply_form(P, ss_trace(P), lam)


def usual_trace(P: Presentation, b: MPoly) -> FieldElement:
    M = P.mul_matrix(b)
    return sum((M[i][i] for i in range(P.rank)), P.base.zero)


def trace_form_matrix(P: Presentation) -> list[list[FieldElement]]:
    return [[usual_trace(P, P.monomial(i) * P.monomial(j)) for j in range(P.rank)] for i in range(P.rank)]


def is_etale(P: Presentation) -> bool:
    return mat_rank(trace_form_matrix(P)) == P.rank


def gram_matrix(P: Presentation, u: MPoly | None = None, form: Sequence[FieldElement] | None = None) -> list[list[FieldElement]]:
    """G_ij = form(u m_i m_j); form defaults to tau_f."""
    form = ss_trace(P) if form is None else form
    u = u if u is not None else MPoly.const(P.base, P.n, 1)
    return [[apply_form(P, form, u * P.monomial(i) * P.monomial(j)) for j in range(P.rank)] for i in range(P.rank)]


# ---------------------------------------------------------------------------
# transfers on extensions


def omega_twist(E: Extension, over: Field | None = None) -> Twist:
    return Twist.of(omega_label(E, over if over is not None else E.base))


def form_on_field(E: Extension, form: Sequence[FieldElement], over: Field | None = None):
    P = E.presentation(over)
    return lambda x: apply_form(P, form, P.element_to_poly(x))


def scharlau_transfer(E: Extension, sigma: GWElement, form: Sequence[FieldElement], over: Field | None = None,
                      twist: Twist = Twist()) -> GWElement:
    """Transfer along the linear form ``form``: <u> -> class of (x, y) -> form(u x y)."""
    P = E.presentation(over)
    out = GWElement(P.base, {}, twist)
    for u, c in sigma.terms.items():
        G = gram_matrix(P, P.element_to_poly(u), form)
        out = out + gram_to_gw(GramSpace(P.base, G)).with_twist(twist) * c
    return out


def gw_transfer(E: Extension, sigma: GWElement, over: Field | None = None) -> GWElement:
    """Differential transfer GW(E, omega_{E/k}) -> GW(k); sigma is relative to w."""
    k = over if over is not None else E.base
    if sigma.field is not E:
        raise DomainError(f"element lives over {sigma.field}, not {E}")
    lab = omega_label(E, k)
    if lab not in sigma.twist.labels:
        raise DomainError(f"element must be twisted by {lab}, got {sigma.twist}")
    rest = sigma.twist.without(lab)
    P = E.presentation(k)
    return scharlau_transfer(E, sigma, ss_trace(P), k, rest)


def linear_form_to_omega(E: Extension, phi: Sequence[FieldElement], over: Field | None = None) -> FieldElement:
    """b in E with b * tau_f = phi, so that phi corresponds to b * w."""
    P = E.presentation(over)
    G = gram_matrix(P)
    x = mat_solve([[G[i][j] for i in range(P.rank)] for j in range(P.rank)], list(phi), P.base)
    return P.coords_to_element(x)


def dual_basis_form(P: Presentation, index: int) -> list[FieldElement]:
    """(m_index)^*: 1 on the index-th monomial, 0 elsewhere."""
    return [P.base.one if i == index else P.base.zero for i in range(P.rank)]


def relative_unit(E: Extension, form_a: Sequence[FieldElement], form_b_fn, over: Field | None = None) -> FieldElement:
    """c in E with form_a = c * form_b (form_b given as a function on E)."""
    P = E.presentation(over)
    mons = [P.coords_to_element(dual_basis_form(P, i)) for i in range(P.rank)]
    A = [[form_b_fn(mons[i] * mons[j]) for i in range(P.rank)] for j in range(P.rank)]
    x = mat_solve(A, list(form_a), P.base)
    return P.coords_to_element(x)


def compose_canonical(L: Extension, E: Field, k: Field, presentation: Presentation | None = None) -> FieldElement:
    """Unit c of L with w_{L/k} = c * (w_{L/E} (x) w_{E/k}).

    Characterized by trace compatibility: tau_{L/k} = c * (tau_{E/k} o tau_{L/E}).
    """
    PLk = presentation if presentation is not None else L.presentation(k)
    PLE = L.presentation(E)
    tauLE = ss_trace(PLE)

    def composite(x):
        y = apply_form(PLE, tauLE, PLE.element_to_poly(x))
        if isinstance(E, Extension):
            PEk = E.presentation(k)
            return apply_form(PEk, ss_trace(PEk), PEk.element_to_poly(y))
        return y

    tauLk = ss_trace(PLk)
    mons = [PLk.coords_to_element(dual_basis_form(PLk, i)) for i in range(PLk.rank)]
    A = [[composite(mons[i] * mons[j]) for i in range(PLk.rank)] for j in range(PLk.rank)]
    x = mat_solve(A, list(tauLk), PLk.base)
    return PLk.coords_to_element(x)
