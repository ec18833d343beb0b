"""Exact variational bicomplex on jet bundles."""

from .forms import Form, SourceForm
from .jetcore import Bundle, Expr
from .grammar import parse_expr, parse_form
from .varops import d_H, d_V, delta, euler_lagrange, exterior_d, first_variational_split, lagrangian, tau
from .inverse import helmholtz_check, reconstruct_lagrangian, triviality_witness
from .symmetry import EvolutionaryField, conservation_check, noether_current

__version__ = "0.1.0"

__all__ = [
    "Bundle", "Expr", "Form", "SourceForm", "parse_expr", "parse_form",
    "d_H", "d_V", "delta", "euler_lagrange", "exterior_d", "first_variational_split", "lagrangian", "tau",
    "helmholtz_check", "reconstruct_lagrangian", "triviality_witness",
    "EvolutionaryField", "conservation_check", "noether_current",
]
