"""Bicomplex differentials, the interior Euler projector and the variational operator."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Literal

from .forms import (
    THETA,
    Form,
    SourceForm,
    _acc,
    from_contact_basis,
    gen_dx,
    gen_dy,
    gen_theta,
    lie_total,
    lie_total_iterated,
    sort_word,
    theta,
    to_contact_basis,
    volume,
    volume_contract,
    wedge,
    word_bidegree,
)
from .jetcore import (
    BASE,
    ZERO,
    Bundle,
    Expr,
    JetVar,
    MultiIndex,
    as_expr,
    partial,
    total_derivative,
    total_derivative_iterated,
)


def d_H(phi: Form) -> Form:
    """Horizontal differential ``dx^lam ^ d_lam(phi)``."""
    phi = to_contact_basis(phi)
    out: dict[tuple, Expr] = {}
    for lam in range(phi.bundle.n):
        g = gen_dx(lam)
        for w, c in lie_total(phi, lam)._t.items():
            sign, word = sort_word((g,) + w)
            if sign:
                _acc(out, word, c if sign > 0 else -c)
    return Form(phi.bundle, out)


def d_V(phi: Form) -> Form:
    """Vertical differential ``theta^i_Lam ^ partial^Lam_i(phi)``."""
    phi = to_contact_basis(phi)
    out: dict[tuple, Expr] = {}
    for w, c in phi._t.items():
        for v in c.jet_vars():
            dc = partial(c, v)
            if dc.is_zero():
                continue
            sign, word = sort_word((gen_theta(v.fiber, v.index),) + w)
            if sign:
                _acc(out, word, dc if sign > 0 else -dc)
    return Form(phi.bundle, out)


def exterior_d(phi: Form) -> Form:
    """Exterior derivative, computed in the ``dy`` basis and converted back.

    This route is independent of :func:`d_H` and :func:`d_V`; their sum is
    checked against it in the test-suite.
    """
    bundle = phi.bundle
    raw = from_contact_basis(phi)
    out: dict[tuple, Expr] = {}
    for w, c in raw._t.items():
        for atom in sorted(c.all_atoms()):
            if atom[0] == BASE:
                g = gen_dx(atom[1])
                dc = partial(c, atom[1])
            else:
                g = gen_dy(atom[1], atom[3])
                dc = partial(c, JetVar(atom[1], MultiIndex(atom[3])))
            sign, word = sort_word((g,) + w)
            if sign and not dc.is_zero():
                _acc(out, word, dc if sign > 0 else -dc)
    return to_contact_basis(Form(bundle, out))


def tau_bar(phi: Form) -> Form:
    """``sum_{i,Lam} (-1)^|Lam| theta^i ^ d_Lam(contract_{i,Lam} phi)``."""
    phi = to_contact_basis(phi)
    bundle = phi.bundle
    grouped: dict[tuple, dict] = {}
    for w, c in phi._t.items():
        for pos, g in enumerate(w):
            if g[0] != THETA:
                continue
            bucket = grouped.setdefault((g[1], g[3]), {})
            _acc(bucket, w[:pos] + w[pos + 1:], c if pos % 2 == 0 else -c)
    out = Form.zero(bundle)
    for (i, idx), terms in sorted(grouped.items()):
        inner = lie_total_iterated(Form(bundle, terms), idx)
        piece = wedge(theta(bundle, i), inner)
        out = out + (piece if len(idx) % 2 == 0 else -piece)
    return out


def tau(phi: Form) -> Form:
    """Interior Euler projector ``sum_{k>0} (1/k) tau_bar h_k h^n``."""
    phi = to_contact_basis(phi)
    n = phi.bundle.n
    by_k: dict[int, dict] = {}
    for w, c in phi._t.items():
        k, s = word_bidegree(w)
        if k > 0 and s == n:
            by_k.setdefault(k, {})[w] = c
    out = Form.zero(phi.bundle)
    for k, terms in sorted(by_k.items()):
        out = out + tau_bar(Form(phi.bundle, terms)) * Expr.const(Fraction(1, k))
    return out


def _require_top_degree(phi: Form) -> None:
    n = phi.bundle.n
    for w in phi._t:
        if word_bidegree(w)[1] != n:
            raise ValueError(f"variational operator needs forms of horizontal degree {n}")


def delta(phi: Form | SourceForm) -> Form:
    """``tau . d`` on forms of horizontal degree n (Euler-Lagrange / Helmholtz map)."""
    if isinstance(phi, SourceForm):
        phi = phi.to_form()
    phi = to_contact_basis(phi)
    _require_top_degree(phi)
    return tau(exterior_d(phi))


def lagrangian(bundle: Bundle, density) -> Form:
    """``L = density * omega``."""
    return volume(bundle) * as_expr(density)


def density(L: Form) -> Expr:
    """The coefficient of ``omega`` in a horizontal density."""
    L = to_contact_basis(L)
    omega = tuple(gen_dx(lam) for lam in range(L.bundle.n))
    if any(w != omega for w in L._t):
        raise ValueError("expected a Lagrangian of bidegree (0, n)")
    return L.coefficient(omega)


def euler_lagrange(L: Form) -> SourceForm:
    """``E_i = sum_Lam (-1)^|Lam| d_Lam(partial^Lam_i density)`` over the support of ``L``."""
    lag = density(L)
    comps = [ZERO] * L.bundle.m
    for v in lag.jet_vars():
        term = total_derivative_iterated(partial(lag, v), v.index)
        comps[v.fiber] = comps[v.fiber] + (term if v.index.order % 2 == 0 else -term)
    return SourceForm(L.bundle, tuple(comps))


@dataclass(frozen=True)
class VariationalSplit:
    """``dL = source + d_H(boundary)``."""

    source: SourceForm
    boundary: Form


def first_variational_split(L: Form, peel: Literal["min", "max"] = "min") -> VariationalSplit:
    """Integrate ``dL`` by parts down to undifferentiated contact forms.

    Each step rewrites ``c theta^i_{lam+Lam} ^ omega`` as
    ``-d_H(c theta^i_Lam ^ omega_lam) - d_lam(c) theta^i_Lam ^ omega``,
    always treating the highest-order contact factor first and peeling the
    smallest (``peel="min"``) or largest base index from it.
    """
    bundle = L.bundle
    lag = density(L)
    pending: dict[tuple[int, tuple], Expr] = {}
    for v in lag.jet_vars():
        pending[(v.fiber, v.index.indices)] = partial(lag, v)
    boundary = Form.zero(bundle)
    while True:
        live = [key for key, c in pending.items() if key[1] and not c.is_zero()]
        if not live:
            break
        key = max(live, key=lambda kv: (len(kv[1]), -kv[0], tuple(-j for j in kv[1])))
        i, idx = key
        c = pending.pop(key)
        lam = min(idx) if peel == "min" else max(idx)
        rest = list(idx)
        rest.remove(lam)
        rest = tuple(rest)
        boundary = boundary - wedge(theta(bundle, i, rest), volume_contract(bundle, lam)) * c
        pending[(i, rest)] = pending.get((i, rest), ZERO) - total_derivative(c, lam)
    comps = [ZERO] * bundle.m
    for (i, idx), c in pending.items():
        if not idx:
            comps[i] = comps[i] + c
    split = VariationalSplit(SourceForm(bundle, tuple(comps)), boundary)
    residual = exterior_d(L) - split.source.to_form() - d_H(split.boundary)
    if not residual.is_zero():
        raise ArithmeticError("first variational formula failed to close; this is a bug")
    return split
