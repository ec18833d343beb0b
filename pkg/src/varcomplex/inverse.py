"""The inverse problem of the calculus of variations, constructively.

* :func:`helmholtz_check` - is a source form locally variational?
* :func:`reconstruct_lagrangian` - vertical homotopy ``L = int_0^1 y.E(x, t y) dt``.
* :func:`horizontal_antiderivative` - solve ``d_H xi = sigma`` exactly on a
  finite graded slice of forms.
* :func:`triviality_witness` - ``L = h_0(phi0) + d_H xi`` for null Lagrangians.

The reconstruction is valid when the fibre is star-shaped about the zero
section; this is not checked.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .forms import (
    DX,
    THETA,
    Form,
    SourceForm,
    bidegree,
    form_coordinates,
    form_from_coordinates,
    form_jet_order,
    from_contact_basis,
    gen_dx,
    gen_theta,
    horizontalize,
    to_contact_basis,
)
from .jetcore import (
    BASE,
    JET,
    ZERO,
    Expr,
    is_zero,
    jet_degree,
    jet_key,
    jet_order,
    multi_indices,
    scaling_components,
)
from .varops import d_H, delta, density, euler_lagrange, exterior_d, lagrangian


@dataclass(frozen=True)
class AntiderivativeConfig:
    max_jet_order: int
    max_poly_degree: int

    def __post_init__(self) -> None:
        if self.max_jet_order < 0 or self.max_poly_degree < 0:
            raise ValueError("truncation bounds must be nonnegative")


class NotExactInTruncation(Exception):
    """No antiderivative exists within the configured bounds."""

    def __init__(self, residual: Form, config: AntiderivativeConfig) -> None:
        self.residual = residual
        self.config = config
        super().__init__(
            f"not d_H-exact within max_jet_order={config.max_jet_order}, "
            f"max_poly_degree={config.max_poly_degree}"
        )

    def to_dict(self) -> dict:
        from .render import form_records

        return {
            "error": "NotExactInTruncation",
            "residual": form_records(self.residual),
            "max_jet_order": self.config.max_jet_order,
            "max_poly_degree": self.config.max_poly_degree,
        }


class NotClosedError(ValueError):
    """The input to the antiderivative is not ``d_H``-closed."""


class HelmholtzError(ValueError):
    def __init__(self, certificate: Form) -> None:
        self.certificate = certificate
        super().__init__("source form fails the Helmholtz condition")


@dataclass(frozen=True)
class HelmholtzResult:
    """``passes`` is ``None`` when zero-testing was inconclusive (transcendental terms)."""

    passes: bool | None
    certificate: Form

    @property
    def exact(self) -> bool:
        return self.passes is not None


def helmholtz_check(E: SourceForm) -> HelmholtzResult:
    cert = delta(E)
    verdicts = [is_zero(c) for c in cert.terms.values()]
    if not verdicts:
        return HelmholtzResult(True, cert)
    if any(v is False for v in verdicts):
        return HelmholtzResult(False, cert)
    return HelmholtzResult(None, cert)


def is_variationally_trivial(L: Form) -> bool:
    return euler_lagrange(L).is_zero()


def reconstruct_lagrangian(E: SourceForm) -> Form:
    """Lagrangian ``sum_i y^i int_0^1 E_i(x, t y) dt`` for a Helmholtz source form."""
    check = helmholtz_check(E)
    if check.passes is not True:
        raise HelmholtzError(check.certificate)
    dens = ZERO
    for i, comp in enumerate(E.components):
        parts = scaling_components(comp)
        integral = ZERO
        for deg, piece in parts.items():
            integral = integral + piece * Expr.const(Fraction(1, deg + 1))
        dens = dens + Expr.jet_var(i) * integral
    L = lagrangian(E.bundle, dens)
    if euler_lagrange(L) != E:
        raise ArithmeticError("reconstructed Lagrangian does not reproduce the source form")
    return L


# ---------------------------------------------------------------------------
# horizontal antiderivative


def _grading(bundle, word: tuple, mono: tuple) -> tuple:
    """Invariants of a basis term preserved by ``d_lam`` (fiber degrees) and the
    per-direction weight ``#lam in indices - deg_{x^lam} + #dx^lam``."""
    n, m = bundle.n, bundle.m
    jd = [0] * m
    td = [0] * m
    weight = [0] * n
    for atom, e in mono:
        if atom[0] == JET:
            jd[atom[1]] += e
            for lam in atom[3]:
                weight[lam] += e
        elif atom[0] == BASE:
            weight[atom[1]] -= e
    for g in word:
        if g[0] == THETA:
            td[g[1]] += 1
            for lam in g[3]:
                weight[lam] += 1
        else:
            weight[g[1]] += 1
    return tuple(jd), tuple(td), tuple(weight)


def _graded_basis(bundle, k: int, s: int, grading: tuple, max_order: int) -> list[tuple]:
    """All ``(word, monomial)`` pairs of bidegree (k, s) with the given grading."""
    jd, td, weight = grading
    n, m = bundle.n, bundle.m
    indices = [mi.indices for mi in multi_indices(n, max_order)]
    per_fiber_jets = []
    per_fiber_thetas = []
    for i in range(m):
        per_fiber_jets.append(list(itertools.combinations_with_replacement(indices, jd[i])))
        per_fiber_thetas.append(list(itertools.combinations(indices, td[i])))
    out = []
    for dxs in itertools.combinations(range(n), s):
        for thetas in itertools.product(*per_fiber_thetas):
            theta_gens = tuple(gen_theta(i, idx) for i, group in enumerate(thetas) for idx in group)
            if len(theta_gens) != k:
                continue
            for jets in itertools.product(*per_fiber_jets):
                counts = [0] * n
                for group in list(jets) + list(thetas):
                    for idx in group:
                        for lam in idx:
                            counts[lam] += 1
                for lam in dxs:
                    counts[lam] += 1
                base_exp = [counts[lam] - weight[lam] for lam in range(n)]
                if any(e < 0 for e in base_exp):
                    continue
                powers: dict = {}
                for i, group in enumerate(jets):
                    for idx in group:
                        key = jet_key(i, idx)
                        powers[key] = powers.get(key, 0) + 1
                for lam, e in enumerate(base_exp):
                    if e:
                        powers[(BASE, lam)] = e
                mono = tuple(sorted(powers.items()))
                word = tuple(gen_dx(lam) for lam in dxs) + tuple(sorted(theta_gens))
                out.append((word, mono))
    return out


def horizontal_antiderivative(sigma: Form, cfg: AntiderivativeConfig | None = None) -> Form:
    """Solve ``d_H(xi) = sigma`` exactly.

    The unknown ranges over all ``(k, s-1)`` forms whose grading can reach a
    term of ``sigma`` under ``d_H``, with jet order and jet degree bounded by
    ``cfg``.  Raises :class:`NotClosedError` if ``d_H sigma != 0`` and
    :class:`NotExactInTruncation` if the bounded system has no solution.
    """
    bundle = sigma.bundle
    sigma = to_contact_basis(sigma)
    if sigma.is_zero():
        return Form.zero(bundle)
    degs = bidegree(sigma)
    if len(degs) != 1:
        raise ValueError("antiderivative needs a homogeneous bidegree")
    (k, s), = degs
    if s < 1:
        raise ValueError("horizontal degree of the input must be at least 1")
    if not d_H(sigma).is_zero():
        raise NotClosedError("input is not d_H-closed")
    target = form_coordinates(sigma)
    if cfg is None:
        cfg = AntiderivativeConfig(
            max_jet_order=form_jet_order(sigma) + 1,
            max_poly_degree=max(jet_degree(mono) for _, mono in target),
        )
    gradings = set()
    for word, mono in target:
        jd, td, weight = _grading(bundle, word, mono)
        if sum(jd) > cfg.max_poly_degree:
            continue
        for lam in range(bundle.n):
            w = list(weight)
            w[lam] -= 2
            gradings.add((jd, td, tuple(w)))
    basis: list[tuple] = []
    for grading in sorted(gradings):
        basis.extend(_graded_basis(bundle, k, s - 1, grading, cfg.max_jet_order))
    columns = [form_coordinates(d_H(form_from_coordinates(bundle, {key: 1}))) for key in basis]
    x, residual = linalg.solve(columns, target)
    if x is None:
        raise NotExactInTruncation(form_from_coordinates(bundle, residual), cfg)
    xi = form_from_coordinates(bundle, {basis[j]: c for j, c in x.items()})
    if d_H(xi) != sigma:
        raise ArithmeticError("antiderivative check failed; this is a bug")
    return xi


@dataclass(frozen=True)
class TrivialityWitness:
    xi: Form
    closed_part: Form


def triviality_witness(L: Form, phi0: Form | None = None,
                       cfg: AntiderivativeConfig | None = None) -> TrivialityWitness:
    """Write a null Lagrangian as ``h_0(phi0) + d_H(xi)``.

    ``phi0`` is a closed n-form on ``Y`` supplied by the caller (default 0); it
    is checked for closedness, never searched for.
    """
    bundle = L.bundle
    if not is_variationally_trivial(L):
        raise ValueError("Lagrangian is not variationally trivial")
    closed_part = Form.zero(bundle)
    if phi0 is not None:
        flat = from_contact_basis(phi0)
        if any(jet_order(c) > 0 or any(g[0] != DX and g[2] > 0 for g in w) for w, c in flat.items()):
            raise ValueError("phi0 must be a form on Y (jet order 0)")
        phi0 = to_contact_basis(phi0)
        if not exterior_d(phi0).is_zero():
            raise ValueError("phi0 is not closed")
        closed_part = horizontalize(phi0)
        if not closed_part.is_zero():
            density(closed_part)
    xi = horizontal_antiderivative(to_contact_basis(L) - closed_part, cfg)
    return TrivialityWitness(xi, closed_part)
