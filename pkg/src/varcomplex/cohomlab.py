"""Finite slices of the variational bicomplex as exact rational matrices.

A :class:`TruncationSpec` bounds jet order, degree in the jet coordinates and
degree in the base coordinates.  Basis elements are ``monomial * word`` with
coefficient 1; a form's coordinates are keyed by ``(word, monomial)``.

Cohomology shadows are ``dim ker(M_p) - dim(im(M_{p-1}) & dom_p)``: the
incoming map runs on an enlarged domain (one more base degree for ``d_H``,
one more jet degree for ``d_V`` and for Lagrangians feeding ``delta``) and its
image is intersected with the truncated domain at ``p``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Callable, Literal

from . import linalg
from .forms import Form, form_coordinates, form_from_coordinates, gen_dx, gen_theta
from .jetcore import BASE, Bundle, jet_key, monomials, multi_indices
from .linalg import SparseMatrix
from .varops import d_H, d_V, delta, euler_lagrange

Operator = Literal["d_H", "d_V", "delta", "el"]


class TruncationError(ValueError):
    """The image of an operator does not fit the codomain truncation."""


@dataclass(frozen=True)
class TruncationSpec:
    max_jet_order: int
    max_poly_degree: int
    base_poly_degree: int = 0

    def __post_init__(self) -> None:
        if min(self.max_jet_order, self.max_poly_degree, self.base_poly_degree) < 0:
            raise ValueError("truncation bounds must be nonnegative")


def _coefficient_monomials(bundle: Bundle, spec: TruncationSpec) -> list[tuple]:
    jets = [jet_key(i, mi.indices) for i in range(bundle.m)
            for mi in multi_indices(bundle.n, spec.max_jet_order)]
    base = [(BASE, lam) for lam in range(bundle.n)]
    out = []
    for bm in monomials(base, spec.base_poly_degree):
        for jm in monomials(jets, spec.max_poly_degree):
            out.append(tuple(sorted(bm + jm)))
    return sorted(out, key=lambda mono: (sum(e for _, e in mono), mono))


def _words(bundle: Bundle, spec: TruncationSpec, k: int, s: int) -> list[tuple]:
    thetas = [gen_theta(i, mi.indices) for i in range(bundle.m)
              for mi in multi_indices(bundle.n, spec.max_jet_order)]
    out = []
    for dxs in itertools.combinations(range(bundle.n), s):
        for ths in itertools.combinations(sorted(thetas), k):
            out.append(tuple(gen_dx(lam) for lam in dxs) + ths)
    return out


def basis_keys(bundle: Bundle, spec: TruncationSpec, k: int, s: int) -> list[tuple]:
    if not 0 <= s <= bundle.n:
        raise ValueError(f"horizontal degree {s} outside 0..{bundle.n}")
    if k < 0:
        raise ValueError("contact degree must be nonnegative")
    monos = _coefficient_monomials(bundle, spec)
    return [(w, mono) for w in _words(bundle, spec, k, s) for mono in monos]


def source_basis_keys(bundle: Bundle, spec: TruncationSpec) -> list[tuple]:
    """Basis of source forms ``E_i theta^i ^ omega`` within the truncation."""
    omega = tuple(gen_dx(lam) for lam in range(bundle.n))
    monos = _coefficient_monomials(bundle, spec)
    return [(omega + (gen_theta(i, ()),), mono) for i in range(bundle.m) for mono in monos]


def enumerate_basis(bundle: Bundle, spec: TruncationSpec, k: int, s: int) -> list[Form]:
    """Deterministically ordered basis of ``(k, s)`` forms within ``spec``."""
    return [form_from_coordinates(bundle, {key: 1}) for key in basis_keys(bundle, spec, k, s)]


def _matrix(bundle: Bundle, domain: list[tuple], op: Callable[[Form], Form],
            codomain: list[tuple] | None = None) -> SparseMatrix:
    cols = [form_coordinates(op(form_from_coordinates(bundle, {key: 1}))) for key in domain]
    if codomain is None:
        rows = sorted({r for c in cols for r in c})
    else:
        rows = codomain
        allowed = set(codomain)
        for key, col in zip(domain, cols):
            if any(r not in allowed for r in col):
                raise TruncationError(f"image of basis element {key!r} leaves the codomain truncation")
    return SparseMatrix(rows, list(domain), cols)


def operator_matrix(op: Operator, bundle: Bundle, spec: TruncationSpec, k: int, s: int) -> SparseMatrix:
    """Exact matrix of ``op`` on the ``(k, s)`` slice.

    ``d_H`` lands in order ``+1``; ``d_V`` in contact degree ``+1``.  For
    ``delta`` the domain at ``k = 1`` is the source-form slice and the rows are
    whatever keys the image uses; ``el`` is the Euler-Lagrange map on (0, n).
    """
    if op == "d_H":
        dom = basis_keys(bundle, spec, k, s)
        if s == bundle.n:
            return SparseMatrix([], dom, [{} for _ in dom])
        cod = basis_keys(bundle, replace(spec, max_jet_order=spec.max_jet_order + 1), k, s + 1)
        return _matrix(bundle, dom, d_H, cod)
    if op == "d_V":
        dom = basis_keys(bundle, spec, k, s)
        cod = basis_keys(bundle, spec, k + 1, s)
        return _matrix(bundle, dom, d_V, cod)
    if op == "delta":
        if s != bundle.n:
            raise ValueError("delta acts on forms of top horizontal degree")
        dom = source_basis_keys(bundle, spec) if k == 1 else basis_keys(bundle, spec, k, s)
        return _matrix(bundle, dom, delta)
    if op == "el":
        dom = basis_keys(bundle, spec, 0, bundle.n)
        return _matrix(bundle, dom, lambda L: euler_lagrange(L).to_form())
    raise ValueError(f"unknown operator {op!r}")


@dataclass
class BettiReport:
    operator: str
    spec: TruncationSpec
    positions: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "operator": self.operator,
            "truncation": {
                "max_jet_order": self.spec.max_jet_order,
                "max_poly_degree": self.spec.max_poly_degree,
                "base_poly_degree": self.spec.base_poly_degree,
            },
            "positions": self.positions,
        }

    def table(self) -> str:
        head = f"{'position':>10} {'dim':>6} {'rank':>6} {'kernel':>7} {'cohom':>6}"
        lines = [f"operator {self.operator}", head]
        for p in self.positions:
            lines.append(f"{p['position']:>10} {p['dim_domain']:>6} {p['rank']:>6} "
                         f"{p['dim_kernel']:>7} {p['dim_cohomology']:>6}")
        return "\n".join(lines)

    def csv(self) -> str:
        lines = ["position,dim_domain,rank,dim_kernel,dim_cohomology"]
        for p in self.positions:
            lines.append(f"{p['position']},{p['dim_domain']},{p['rank']},{p['dim_kernel']},{p['dim_cohomology']}")
        return "\n".join(lines)


def _position(label: str, outgoing: SparseMatrix, incoming: SparseMatrix | None) -> dict:
    dim = len(outgoing.col_keys)
    r = outgoing.rank()
    kernel = dim - r
    image = 0
    if incoming is not None and incoming.columns:
        image = linalg.intersection_dim(incoming.columns, set(outgoing.col_keys))
    return {"position": label, "dim_domain": dim, "rank": r, "dim_kernel": kernel,
            "dim_cohomology": kernel - image}


def _enlarge(spec: TruncationSpec, base: int = 0, degree: int = 0) -> TruncationSpec:
    return replace(spec, base_poly_degree=spec.base_poly_degree + base,
                   max_poly_degree=spec.max_poly_degree + degree)


def betti(op: str, bundle: Bundle, spec: TruncationSpec, *, k: int = 0, s: int = 0,
          max_k: int = 2) -> BettiReport:
    """Cohomology shadows along a row or column of the truncated bicomplex.

    ``op="d_H"``: the row of contact degree ``k``, positions ``s = 0..n``.
    ``op="d_V"``: the column of horizontal degree ``s``, positions ``k = 0..max_k``.
    ``op="variational"``: the ``k = 0`` row continued by ``delta`` through
    ``E_1``; positions ``0..n`` and ``E1``.
    """
    report = BettiReport(op, spec)
    n = bundle.n
    if op == "d_H":
        for p in range(n + 1):
            out = operator_matrix("d_H", bundle, spec, k, p)
            inc = operator_matrix("d_H", bundle, _enlarge(spec, base=1), k, p - 1) if p > 0 else None
            report.positions.append(_position(f"s={p}", out, inc))
    elif op == "d_V":
        for p in range(max_k + 1):
            out = operator_matrix("d_V", bundle, spec, p, s)
            inc = operator_matrix("d_V", bundle, _enlarge(spec, degree=1), p - 1, s) if p > 0 else None
            report.positions.append(_position(f"k={p}", out, inc))
    elif op == "variational":
        for p in range(n):
            out = operator_matrix("d_H", bundle, spec, 0, p)
            inc = operator_matrix("d_H", bundle, _enlarge(spec, base=1), 0, p - 1) if p > 0 else None
            report.positions.append(_position(f"s={p}", out, inc))
        out = operator_matrix("delta", bundle, spec, 0, n)
        inc = operator_matrix("d_H", bundle, _enlarge(spec, base=1), 0, n - 1)
        report.positions.append(_position(f"s={n}", out, inc))
        out = operator_matrix("delta", bundle, spec, 1, n)
        inc = operator_matrix("el", bundle, _enlarge(spec, degree=1), 0, n)
        report.positions.append(_position("E1", out, inc))
    else:
        raise ValueError(f"unknown row/column operator {op!r}")
    return report


def delta_exactness(bundle: Bundle, spec: TruncationSpec) -> tuple[int, bool]:
    """Helmholtz kernel on truncated source forms, and whether it lies in the
    image of the Euler-Lagrange matrix on Lagrangians of one more jet degree."""
    dm = operator_matrix("delta", bundle, spec, 1, bundle.n)
    kernel = [{dm.col_keys[j]: c for j, c in vec.items()} for vec in dm.nullspace()]
    el = operator_matrix("el", bundle, _enlarge(spec, degree=1), 0, bundle.n)
    r = linalg.rank(el.columns)
    return len(kernel), linalg.rank(list(el.columns) + kernel) == r
