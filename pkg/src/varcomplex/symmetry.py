"""Evolutionary vector fields, Lie derivatives and Noether currents."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

from .forms import THETA, Form, odd_derivation, to_contact_basis
from .jetcore import (
    ZERO,
    Bundle,
    Expr,
    as_expr,
    jet_order,
    partial,
    total_derivative_iterated,
)
from .varops import d_H, density, exterior_d, first_variational_split


@dataclass(frozen=True)
class EvolutionaryField:
    """``u = u^i d/dy^i``; components may depend on jets (generalized symmetry)."""

    bundle: Bundle
    components: tuple[Expr, ...]

    def __post_init__(self) -> None:
        comps = tuple(as_expr(c) for c in self.components)
        if len(comps) != self.bundle.m:
            raise ValueError(f"field needs {self.bundle.m} components, got {len(comps)}")
        object.__setattr__(self, "components", comps)

    @property
    def generalized(self) -> bool:
        return any(jet_order(c) >= 1 for c in self.components)

    def prolonged(self, i: int, index: tuple[int, ...]) -> Expr:
        """``d_Lam u^i``, the component of the prolongation along ``y^i_Lam``."""
        return total_derivative_iterated(self.components[i], index)


def prolong_apply(u: EvolutionaryField, f: Expr) -> Expr:
    """``J^oo u (f) = sum d_Lam(u^i) partial^Lam_i f``."""
    out = ZERO
    for v in f.jet_vars():
        df = partial(f, v)
        if not df.is_zero():
            out = out + u.prolonged(v.fiber, v.index.indices) * df
    return out


def contract(u: EvolutionaryField, phi: Form) -> Form:
    """Interior product with ``J^oo u``: ``theta^i_Lam -> d_Lam u^i``, ``dx -> 0``."""
    phi = to_contact_basis(phi)
    return odd_derivation(phi, lambda g: u.prolonged(g[1], g[3]) if g[0] == THETA else None)


def lie_derivative(u: EvolutionaryField, phi: Form) -> Form:
    """Cartan formula ``i_u d phi + d i_u phi``."""
    return contract(u, exterior_d(phi)) + exterior_d(contract(u, phi))


def noether_current(u: EvolutionaryField, L: Form, peel: Literal["min", "max"] = "min") -> Form:
    """Symmetry current ``J_u = -i_u(phi)`` with ``phi`` from the first variational formula."""
    split = first_variational_split(L, peel)
    return -contract(u, split.boundary)


@dataclass(frozen=True)
class ConservationReport:
    is_symmetry: bool
    identity_holds: bool
    on_shell_divergence: Expr
    current: Form


def conservation_check(u: EvolutionaryField, L: Form) -> ConservationReport:
    """Check ``L_u L = u.delta L - d_H(i_u phi)`` and the weak conservation law.

    ``on_shell_divergence`` is the density of ``d_H J_u + sum_i u^i E_i omega``,
    which vanishes identically exactly when ``u`` is a symmetry of ``L``.
    """
    split = first_variational_split(L)
    lie = lie_derivative(u, L)
    source = split.source.to_form()
    rhs = contract(u, source) - d_H(contract(u, split.boundary))
    current = -contract(u, split.boundary)
    divergence = d_H(current) + contract(u, source)
    return ConservationReport(
        is_symmetry=lie.is_zero(),
        identity_holds=(lie - rhs).is_zero(),
        on_shell_divergence=density(divergence) if not divergence.is_zero() else ZERO,
        current=current,
    )
