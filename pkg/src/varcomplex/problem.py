"""JSON problem files.

::

    {
      "bundle": {"base": ["x"], "fiber": ["u"]},
      "lagrangian": "1/2*u_x^2",
      "source_form": {"u": "-u_xx"},
      "vector_field": {"u": "1"},
      "closed_form": "u*dt^du",
      "form": "u*th(u;x)^dx",
      "truncation": {"max_jet_order": 3, "max_poly_degree": 3, "base_poly_degree": 2},
      "options": {"operator": "d_H", "k": 0, "s": 0, "seed": 1, "cases": 100}
    }

Only ``bundle`` is mandatory at this level; each command states what else it
needs.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .cohomlab import TruncationSpec
from .forms import Form, SourceForm
from .grammar import GrammarError, UnknownVariableError, parse_expr, parse_form
from .jetcore import Bundle, Expr
from .symmetry import EvolutionaryField
from .varops import lagrangian


class ProblemError(ValueError):
    """Invalid problem document; ``kind`` is ``syntax``, ``schema`` or ``unknown-variable``."""

    def __init__(self, kind: str, message: str, path: str = "", line: int | None = None,
                 column: int | None = None, name: str | None = None) -> None:
        self.kind = kind
        self.path = path
        self.line = line
        self.column = column
        self.name = name
        where = []
        if path:
            where.append(f"at {path}")
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        super().__init__(f"{kind} error: {message}" + (f" ({', '.join(where)})" if where else ""))


OPTION_KEYS = {"operator", "k", "s", "max_k", "seed", "cases", "peel"}
TOP_KEYS = {"bundle", "lagrangian", "source_form", "vector_field", "closed_form", "form",
            "truncation", "options"}


@dataclass
class ProblemFile:
    bundle: Bundle
    lagrangian: Form | None = None
    source_form: SourceForm | None = None
    vector_field: EvolutionaryField | None = None
    closed_form: Form | None = None
    form: Form | None = None
    truncation: TruncationSpec | None = None
    options: dict = field(default_factory=dict)

    def require(self, *names: str) -> None:
        for name in names:
            if getattr(self, name) is None:
                raise ProblemError("schema", f"field {name!r} is required for this command", f"$.{name}")


def _expr(text, bundle: Bundle, path: str) -> Expr:
    if not isinstance(text, str):
        raise ProblemError("schema", "expected an expression string", path)
    try:
        return parse_expr(text, bundle)
    except UnknownVariableError as exc:
        raise ProblemError("unknown-variable", f"unknown variable {exc.name!r}", path,
                           column=exc.column, name=exc.name) from None
    except GrammarError as exc:
        raise ProblemError("syntax", str(exc), path, column=exc.column) from None


def _form(text, bundle: Bundle, path: str) -> Form:
    if not isinstance(text, str):
        raise ProblemError("schema", "expected a form string", path)
    try:
        return parse_form(text, bundle)
    except UnknownVariableError as exc:
        raise ProblemError("unknown-variable", f"unknown variable {exc.name!r}", path,
                           column=exc.column, name=exc.name) from None
    except GrammarError as exc:
        raise ProblemError("syntax", str(exc), path, column=exc.column) from None


def _components(value, bundle: Bundle, path: str) -> tuple[Expr, ...]:
    if not isinstance(value, dict):
        raise ProblemError("schema", "expected an object mapping fiber names to expressions", path)
    for name in value:
        if name not in bundle.fiber:
            raise ProblemError("unknown-variable", f"unknown fiber variable {name!r}", f"{path}.{name}", name=name)
    return tuple(_expr(value.get(name, "0"), bundle, f"{path}.{name}") for name in bundle.fiber)


def _names(value, path: str) -> list[str]:
    if not isinstance(value, list) or not value or not all(isinstance(v, str) for v in value):
        raise ProblemError("schema", "expected a nonempty list of names", path)
    return value


def _int(value, path: str, minimum: int = 0) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise ProblemError("schema", f"expected an integer >= {minimum}", path)
    return value


def problem_from_dict(doc) -> ProblemFile:
    if not isinstance(doc, dict) or not doc:
        raise ProblemError("schema", "problem must be a nonempty JSON object", "$")
    for key in doc:
        if key not in TOP_KEYS:
            raise ProblemError("schema", f"unexpected field {key!r}", f"$.{key}")
    if "bundle" not in doc:
        raise ProblemError("schema", "missing field 'bundle'", "$.bundle")
    b = doc["bundle"]
    if not isinstance(b, dict):
        raise ProblemError("schema", "expected an object", "$.bundle")
    try:
        bundle = Bundle(tuple(_names(b.get("base"), "$.bundle.base")),
                        tuple(_names(b.get("fiber"), "$.bundle.fiber")))
    except ProblemError:
        raise
    except ValueError as exc:
        raise ProblemError("schema", str(exc), "$.bundle") from None
    pf = ProblemFile(bundle)
    if "lagrangian" in doc:
        pf.lagrangian = lagrangian(bundle, _expr(doc["lagrangian"], bundle, "$.lagrangian"))
    if "source_form" in doc:
        pf.source_form = SourceForm(bundle, _components(doc["source_form"], bundle, "$.source_form"))
    if "vector_field" in doc:
        pf.vector_field = EvolutionaryField(bundle, _components(doc["vector_field"], bundle, "$.vector_field"))
    if "closed_form" in doc:
        pf.closed_form = _form(doc["closed_form"], bundle, "$.closed_form")
    if "form" in doc:
        pf.form = _form(doc["form"], bundle, "$.form")
    if "truncation" in doc:
        t = doc["truncation"]
        if not isinstance(t, dict):
            raise ProblemError("schema", "expected an object", "$.truncation")
        for key in t:
            if key not in ("max_jet_order", "max_poly_degree", "base_poly_degree"):
                raise ProblemError("schema", f"unexpected field {key!r}", f"$.truncation.{key}")
        for key in ("max_jet_order", "max_poly_degree"):
            if key not in t:
                raise ProblemError("schema", f"missing field {key!r}", f"$.truncation.{key}")
        pf.truncation = TruncationSpec(
            _int(t["max_jet_order"], "$.truncation.max_jet_order"),
            _int(t["max_poly_degree"], "$.truncation.max_poly_degree"),
            _int(t.get("base_poly_degree", 0), "$.truncation.base_poly_degree"),
        )
    if "options" in doc:
        opts = doc["options"]
        if not isinstance(opts, dict):
            raise ProblemError("schema", "expected an object", "$.options")
        for key in opts:
            if key not in OPTION_KEYS:
                raise ProblemError("schema", f"unexpected option {key!r}", f"$.options.{key}")
        pf.options = dict(opts)
    return pf


def parse_problem(text: str) -> ProblemFile:
    """Parse and resolve a JSON problem document."""
    if not text.strip():
        raise ProblemError("schema", "empty document", "$")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemError("syntax", exc.msg, line=exc.lineno, column=exc.colno) from None
    return problem_from_dict(doc)
