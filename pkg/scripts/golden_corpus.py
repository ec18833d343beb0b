"""Print the golden corpus: EL operator, boundary term, and current for each entry.

Output is JSON (one object per Lagrangian) so it can be diffed between runs.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass

from varcomplex.grammar import format_form, parse_expr
from varcomplex.jetcore import Bundle
from varcomplex.inverse import is_variationally_trivial
from varcomplex.render import form_records, source_record
from varcomplex.symmetry import EvolutionaryField, conservation_check
from varcomplex.varops import first_variational_split, lagrangian


@dataclass(frozen=True)
class Entry:
    name: str
    base: tuple[str, ...]
    fiber: tuple[str, ...]
    density: str
    field: tuple[str, ...] = ("1",)


CORPUS = (
    Entry("string", ("x",), ("u",), "1/2*u_x^2"),
    Entry("wave", ("t", "x"), ("u",), "1/2*(u_t^2 - u_x^2)"),
    Entry("beam", ("x",), ("u",), "1/2*u_xx^2"),
    Entry("null", ("x",), ("u",), "u*u_x"),
    Entry("free particle", ("t",), ("u",), "1/2*u_t^2"),
    Entry("mechanics h0(dF), F=t*u^2", ("t",), ("u",), "u^2 + 2*t*u*u_t"),
    Entry("coupled", ("t", "x"), ("u", "v"), "u_t*v_x - u*v", ("v", "-u")),
)


def describe(e: Entry) -> dict:
    b = Bundle(e.base, e.fiber)
    L = lagrangian(b, parse_expr(e.density, b))
    split = first_variational_split(L)
    rep = conservation_check(EvolutionaryField(b, tuple(parse_expr(c, b) for c in e.field)), L)
    return {
        "name": e.name,
        "lagrangian": format_form(L),
        "euler_lagrange": source_record(split.source),
        "boundary": form_records(split.boundary),
        "null": is_variationally_trivial(L),
        "field": list(e.field),
        "symmetry": rep.is_symmetry,
        "current": format_form(rep.current),
    }


if __name__ == "__main__":
    json.dump([describe(e) for e in CORPUS], sys.stdout, indent=2)
    sys.stdout.write("\n")
