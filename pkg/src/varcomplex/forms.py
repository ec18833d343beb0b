"""Exterior forms on jet space in the contact basis.

A form is a finite sum ``coeff * g1 ^ g2 ^ ...`` over generators::

    (DX, lam)               dx^lam
    (THETA, i, order, Lam)  theta^i_Lam = dy^i_Lam - y^i_{lam+Lam} dx^lam
    (DY, i, order, Lam)     dy^i_Lam  (only at the parser boundary)

Words are strictly increasing in this tuple order, so every ``dx`` precedes
every ``theta`` and the horizontal part of a word is a prefix.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .jetcore import (
    ONE,
    ZERO,
    Bundle,
    Expr,
    MultiIndex,
    as_expr,
    total_derivative,
)

DX, THETA, DY = 0, 1, 2


class BundleMismatch(ValueError):
    pass


def gen_dx(lam: int) -> tuple:
    return (DX, lam)


def gen_theta(i: int, index: MultiIndex | tuple[int, ...] = ()) -> tuple:
    idx = index.indices if isinstance(index, MultiIndex) else tuple(sorted(index))
    return (THETA, i, len(idx), idx)


def gen_dy(i: int, index: MultiIndex | tuple[int, ...] = ()) -> tuple:
    idx = index.indices if isinstance(index, MultiIndex) else tuple(sorted(index))
    return (DY, i, len(idx), idx)


def sort_word(gens: Iterable[tuple]) -> tuple[int, tuple | None]:
    """Sort generators, returning ``(sign, word)``; ``(0, None)`` on a repeat."""
    w = list(gens)
    sign = 1
    for a in range(1, len(w)):
        b = a
        while b > 0 and w[b - 1] > w[b]:
            w[b - 1], w[b] = w[b], w[b - 1]
            sign = -sign
            b -= 1
        if b > 0 and w[b - 1] == w[b]:
            return 0, None
    return sign, tuple(w)


def word_bidegree(word: tuple) -> tuple[int, int]:
    s = sum(1 for g in word if g[0] == DX)
    return len(word) - s, s


def _acc(d: dict, word: tuple, c: Expr) -> None:
    if c.is_zero():
        return
    v = d.get(word)
    v = c if v is None else v + c
    if v.is_zero():
        d.pop(word, None)
    else:
        d[word] = v


class Form:
    """Immutable exterior form with :class:`Expr` coefficients."""

    __slots__ = ("bundle", "_t")

    def __init__(self, bundle: Bundle, terms: Mapping[tuple, Expr] | None = None) -> None:
        self.bundle = bundle
        self._t: dict[tuple, Expr] = {w: c for w, c in (terms or {}).items() if not c.is_zero()}

    @classmethod
    def from_terms(cls, bundle: Bundle, pairs: Iterable[tuple[Expr, Iterable[tuple]]]) -> "Form":
        """Build from ``(coeff, generators)`` pairs in any generator order."""
        d: dict[tuple, Expr] = {}
        for c, gens in pairs:
            sign, word = sort_word(gens)
            if sign:
                _acc(d, word, as_expr(c) if sign > 0 else -as_expr(c))
        return cls(bundle, d)

    @classmethod
    def scalar(cls, bundle: Bundle, c) -> "Form":
        return cls(bundle, {(): as_expr(c)})

    @classmethod
    def zero(cls, bundle: Bundle) -> "Form":
        return cls(bundle)

    # -- inspection ---------------------------------------------------------
    @property
    def terms(self) -> Mapping[tuple, Expr]:
        return self._t

    def items(self) -> list[tuple[tuple, Expr]]:
        return sorted(self._t.items(), key=lambda kv: (len(kv[0]), kv[0]))

    def is_zero(self) -> bool:
        return not self._t

    def coefficient(self, word: tuple) -> Expr:
        return self._t.get(word, ZERO)

    def has_dy(self) -> bool:
        return any(g[0] == DY for w in self._t for g in w)

    def is_polynomial(self) -> bool:
        return all(c.is_polynomial() for c in self._t.values())

    # -- algebra ------------------------------------------------------------
    def _check(self, other: "Form") -> None:
        if other.bundle != self.bundle:
            raise BundleMismatch("forms live on different bundles")

    def __add__(self, other) -> "Form":
        if isinstance(other, (Expr, int, Fraction)):
            other = Form.scalar(self.bundle, other)
        if not isinstance(other, Form):
            return NotImplemented
        self._check(other)
        d = dict(self._t)
        for w, c in other._t.items():
            _acc(d, w, c)
        return Form(self.bundle, d)

    __radd__ = __add__

    def __neg__(self) -> "Form":
        return Form(self.bundle, {w: -c for w, c in self._t.items()})

    def __sub__(self, other) -> "Form":
        return self + (-other)

    def __rsub__(self, other) -> "Form":
        return (-self) + other

    def __mul__(self, other) -> "Form":
        if isinstance(other, (Expr, int, Fraction)):
            c = as_expr(other)
            return Form(self.bundle, {w: v * c for w, v in self._t.items()})
        if isinstance(other, Form):
            return wedge(self, other)
        return NotImplemented

    __rmul__ = __mul__

    def __xor__(self, other: "Form") -> "Form":
        return wedge(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Form):
            return NotImplemented
        return self.bundle == other.bundle and self._t == other._t

    def __hash__(self) -> int:
        return hash((self.bundle, frozenset(self._t.items())))

    def __repr__(self) -> str:
        from .grammar import format_form

        return f"Form({format_form(self)})"


def wedge(a: Form, b: Form) -> Form:
    """Graded-anticommutative exterior product."""
    if a.bundle != b.bundle:
        raise BundleMismatch("forms live on different bundles")
    d: dict[tuple, Expr] = {}
    for w1, c1 in a._t.items():
        for w2, c2 in b._t.items():
            sign, word = sort_word(w1 + w2)
            if sign:
                c = c1 * c2
                _acc(d, word, c if sign > 0 else -c)
    return Form(a.bundle, d)


def wedge_all(bundle: Bundle, forms: Iterable[Form]) -> Form:
    out = Form.scalar(bundle, 1)
    for f in forms:
        out = wedge(out, f)
    return out


def dx(bundle: Bundle, lam: int) -> Form:
    bundle.check_base(lam)
    return Form(bundle, {(gen_dx(lam),): ONE})


def theta(bundle: Bundle, i: int, index: MultiIndex | tuple[int, ...] = ()) -> Form:
    bundle.check_fiber(i)
    return Form(bundle, {(gen_theta(i, index),): ONE})


def dy(bundle: Bundle, i: int, index: MultiIndex | tuple[int, ...] = ()) -> Form:
    bundle.check_fiber(i)
    return Form(bundle, {(gen_dy(i, index),): ONE})


def volume(bundle: Bundle) -> Form:
    """``omega = dx^1 ^ ... ^ dx^n``."""
    return Form(bundle, {tuple(gen_dx(lam) for lam in range(bundle.n)): ONE})


def volume_contract(bundle: Bundle, lam: int) -> Form:
    """``omega_lam`` with ``dx^lam ^ omega_lam = omega``."""
    bundle.check_base(lam)
    word = tuple(gen_dx(mu) for mu in range(bundle.n) if mu != lam)
    return Form(bundle, {word: ONE if lam % 2 == 0 else -ONE})


def bidegree(phi: Form) -> set[tuple[int, int]]:
    """``(contact degree, horizontal degree)`` pairs present in ``phi``."""
    return {word_bidegree(w) for w in phi._t}


def project(phi: Form, k: int | None = None, s: int | None = None) -> Form:
    """``h_k`` and/or ``h^s``: keep terms of the given contact/horizontal degree."""
    if s is not None and not 0 <= s <= phi.bundle.n:
        raise ValueError(f"horizontal degree {s} outside 0..{phi.bundle.n}")
    if k is not None and k < 0:
        raise ValueError("contact degree must be nonnegative")
    phi = to_contact_basis(phi)
    keep = {}
    for w, c in phi._t.items():
        kk, ss = word_bidegree(w)
        if (k is None or kk == k) and (s is None or ss == s):
            keep[w] = c
    return Form(phi.bundle, keep)


def _substitute_generators(phi: Form, kind: int, image: Callable[[tuple], Form]) -> Form:
    if not any(g[0] == kind for w in phi._t for g in w):
        return phi
    out = Form.zero(phi.bundle)
    for w, c in phi._t.items():
        term = Form.scalar(phi.bundle, c)
        for g in w:
            term = wedge(term, image(g) if g[0] == kind else Form(phi.bundle, {(g,): ONE}))
        out = out + term
    return out


def to_contact_basis(phi: Form) -> Form:
    """Substitute ``dy^i_Lam = theta^i_Lam + y^i_{lam+Lam} dx^lam``."""
    bundle = phi.bundle

    def image(g: tuple) -> Form:
        _, i, _, idx = g
        d = {(gen_theta(i, idx),): ONE}
        for lam in range(bundle.n):
            d[(gen_dx(lam),)] = Expr.jet_var(i, idx + (lam,))
        return Form(bundle, d)

    return _substitute_generators(phi, DY, image)


def from_contact_basis(phi: Form) -> Form:
    """Substitute ``theta^i_Lam = dy^i_Lam - y^i_{lam+Lam} dx^lam``."""
    bundle = phi.bundle

    def image(g: tuple) -> Form:
        _, i, _, idx = g
        d = {(gen_dy(i, idx),): ONE}
        for lam in range(bundle.n):
            d[(gen_dx(lam),)] = -Expr.jet_var(i, idx + (lam,))
        return Form(bundle, d)

    return _substitute_generators(phi, THETA, image)


def horizontalize(phi: Form) -> Form:
    """``h_0``: replace ``dy^i_Lam`` by ``y^i_{lam+Lam} dx^lam`` and drop contact terms."""
    return project(to_contact_basis(phi), k=0)


def odd_derivation(phi: Form, value: Callable[[tuple], Expr | None]) -> Form:
    """Graded derivation of degree -1 fixed by its values on generators.

    ``value(g)`` gives the scalar a generator is sent to (``None`` for zero).
    """
    d: dict[tuple, Expr] = {}
    for w, c in phi._t.items():
        for pos, g in enumerate(w):
            v = value(g)
            if v is None or v.is_zero():
                continue
            cc = c * v
            _acc(d, w[:pos] + w[pos + 1:], cc if pos % 2 == 0 else -cc)
    return Form(phi.bundle, d)


def contract_theta(phi: Form, i: int, index: MultiIndex | tuple[int, ...] = ()) -> Form:
    """Interior product with the vector dual to ``theta^i_Lam``."""
    phi.bundle.check_fiber(i)
    target = gen_theta(i, index)
    return odd_derivation(to_contact_basis(phi), lambda g: ONE if g == target else None)


def lie_total(phi: Form, lam: int) -> Form:
    """Total derivative ``d_lam`` acting on a contact-basis form.

    Coefficients get ``d_lam``; ``theta^i_Lam`` goes to ``theta^i_{lam+Lam}``;
    ``dx`` is inert.
    """
    d: dict[tuple, Expr] = {}
    for w, c in phi._t.items():
        _acc(d, w, total_derivative(c, lam))
        for pos, g in enumerate(w):
            if g[0] != THETA:
                continue
            sign, word = sort_word(w[:pos] + (gen_theta(g[1], g[3] + (lam,)),) + w[pos + 1:])
            if sign:
                _acc(d, word, c if sign > 0 else -c)
    return Form(phi.bundle, d)


def lie_total_iterated(phi: Form, index: MultiIndex | tuple[int, ...]) -> Form:
    idx = index.indices if isinstance(index, MultiIndex) else index
    for lam in idx:
        phi = lie_total(phi, lam)
    return phi


@dataclass(frozen=True)
class SourceForm:
    """``sum_i E_i theta^i ^ omega``, an element of ``E_1``."""

    bundle: Bundle
    components: tuple[Expr, ...]

    def __post_init__(self) -> None:
        comps = tuple(as_expr(c) for c in self.components)
        if len(comps) != self.bundle.m:
            raise ValueError(f"source form needs {self.bundle.m} components, got {len(comps)}")
        object.__setattr__(self, "components", comps)

    @classmethod
    def zero(cls, bundle: Bundle) -> "SourceForm":
        return cls(bundle, (ZERO,) * bundle.m)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def to_form(self) -> Form:
        bundle = self.bundle
        omega = tuple(gen_dx(lam) for lam in range(bundle.n))
        sign = -1 if bundle.n % 2 else 1
        return Form(bundle, {omega + (gen_theta(i, ()),): c if sign > 0 else -c
                             for i, c in enumerate(self.components)})

    @classmethod
    def from_form(cls, phi: Form) -> "SourceForm":
        bundle = phi.bundle
        phi = to_contact_basis(phi)
        omega = tuple(gen_dx(lam) for lam in range(bundle.n))
        sign = -1 if bundle.n % 2 else 1
        comps = [ZERO] * bundle.m
        for w, c in phi._t.items():
            if len(w) != bundle.n + 1 or w[:-1] != omega or w[-1][0] != THETA or w[-1][2] != 0:
                raise ValueError("form is not of source type sum E_i theta^i ^ omega")
            comps[w[-1][1]] = c if sign > 0 else -c
        return cls(bundle, tuple(comps))

    def __getitem__(self, i: int) -> Expr:
        return self.components[i]


def form_coordinates(phi: Form) -> dict[tuple, Fraction]:
    """Coordinates on the monomial-times-word basis; keys are ``(word, monomial)``."""
    phi = to_contact_basis(phi)
    if not phi.is_polynomial():
        raise ValueError("coordinates exist only for polynomial coefficients")
    return {(w, mono): q for w, c in phi._t.items() for mono, q in c.terms.items()}


def form_from_coordinates(bundle: Bundle, coords: Mapping[tuple, Fraction]) -> Form:
    d: dict[tuple, dict] = {}
    for (w, mono), q in coords.items():
        if q:
            d.setdefault(w, {})[mono] = Fraction(q)
    return Form(bundle, {w: Expr(t) for w, t in d.items()})


def form_jet_order(phi: Form) -> int:
    """Highest jet order among coefficients and contact generators; -1 if none."""
    from .jetcore import jet_order

    phi = to_contact_basis(phi)
    out = -1
    for w, c in phi._t.items():
        out = max(out, jet_order(c), *(g[2] for g in w if g[0] == THETA))
    return out
