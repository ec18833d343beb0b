"""Reports and their text / JSON / LaTeX renderings."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .forms import DX, THETA, Form, SourceForm
from .grammar import format_expr, format_generator, parse_expr, parse_generator
from .jetcore import BASE, JET, Bundle, Expr, _atom_arg


@dataclass
class Report:
    command: str
    data: dict
    text: list[str] = field(default_factory=list)
    latex: list[str] = field(default_factory=list)
    exit_code: int = 0


def render(report: Report, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps({"command": report.command, **report.data}, indent=2, sort_keys=True) + "\n"
    if fmt == "latex":
        return "\n".join(report.latex) + "\n"
    if fmt == "text":
        return "\n".join(report.text) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


# ---------------------------------------------------------------------------
# JSON records


def form_records(phi: Form) -> list[dict]:
    b = phi.bundle
    return [{"coeff": format_expr(c, b), "word": [format_generator(g, b) for g in w]}
            for w, c in phi.items()]


def form_from_records(records: list[dict], bundle: Bundle) -> Form:
    pairs = []
    for rec in records:
        coeff = parse_expr(rec["coeff"], bundle)
        pairs.append((coeff, [parse_generator(g, bundle) for g in rec["word"]]))
    return Form.from_terms(bundle, pairs)


def source_record(E: SourceForm) -> dict:
    return {name: format_expr(c, E.bundle) for name, c in zip(E.bundle.fiber, E.components)}


def source_from_record(rec: dict, bundle: Bundle) -> SourceForm:
    return SourceForm(bundle, tuple(parse_expr(rec[name], bundle) for name in bundle.fiber))


# ---------------------------------------------------------------------------
# LaTeX


def _latex_coeff(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else rf"\frac{{{q.numerator}}}{{{q.denominator}}}"


def _latex_atom(atom: tuple, bundle: Bundle) -> str:
    if atom[0] == BASE:
        return bundle.base[atom[1]]
    if atom[0] == JET:
        name = bundle.fiber[atom[1]]
        return f"{name}_{{{bundle.subscript(atom[3])}}}" if atom[3] else name
    return rf"\{atom[1]}\left({latex_expr(_atom_arg(atom), bundle)}\right)"


def latex_expr(e: Expr, bundle: Bundle) -> str:
    if e.is_zero():
        return "0"
    parts = []
    for idx, (mono, c) in enumerate(e.items()):
        neg = c < 0
        a = -c if neg else c
        factors = " ".join(_latex_atom(atom, bundle) + (f"^{{{p}}}" if p != 1 else "")
                           for atom, p in mono)
        if not factors:
            body = _latex_coeff(a)
        elif a == 1:
            body = factors
        else:
            body = f"{_latex_coeff(a)} {factors}"
        if idx == 0:
            parts.append(f"-{body}" if neg else body)
        else:
            parts.append(f" - {body}" if neg else f" + {body}")
    return "".join(parts)


def latex_generator(g: tuple, bundle: Bundle) -> str:
    if g[0] == DX:
        return f"d{bundle.base[g[1]]}"
    name = bundle.fiber[g[1]]
    if g[0] == THETA:
        sub = f"_{{{bundle.subscript(g[3])}}}" if g[3] else ""
        return rf"\theta^{{{name}}}{sub}"
    sub = f"_{{{bundle.subscript(g[3])}}}" if g[3] else ""
    return f"d{name}{sub}"


def _latex_term(c: Expr, word_tex: str, first: bool, bundle: Bundle) -> str:
    neg = False
    if len(c.terms) == 1:
        (_, q), = c.terms.items()
        if q < 0:
            neg, c = True, -c
    ctex = latex_expr(c, bundle)
    if len(c.terms) > 1:
        ctex = rf"\left({ctex}\right)"
    if not word_tex:
        body = ctex
    elif ctex == "1":
        body = word_tex
    else:
        body = rf"{ctex}\,{word_tex}"
    if first:
        return f"-{body}" if neg else body
    return f" - {body}" if neg else f" + {body}"


def latex_form(phi: Form) -> str:
    b = phi.bundle
    if phi.is_zero():
        return "0"
    return "".join(_latex_term(c, r"\wedge ".join(latex_generator(g, b) for g in w), idx == 0, b)
                   for idx, (w, c) in enumerate(phi.items()))


def latex_source(E: SourceForm) -> str:
    """``sum E_i theta^i ^ omega``, written with the contact factor first."""
    b = E.bundle
    omega = r"\wedge ".join(f"d{name}" for name in b.base)
    parts = []
    for i, c in enumerate(E.components):
        if c.is_zero():
            continue
        word = rf"\theta^{{{b.fiber[i]}}}\wedge {omega}"
        parts.append(_latex_term(c, word, not parts, b))
    return "".join(parts) or "0"


def text_source(E: SourceForm) -> list[str]:
    return [f"E_{name} = {format_expr(c, E.bundle)}" for name, c in zip(E.bundle.fiber, E.components)]
