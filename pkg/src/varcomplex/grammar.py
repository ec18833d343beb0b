"""Text grammar for expressions and forms, and its canonical printer.

Expressions: integers, ``/`` by constants, ``+ - * ^``, ``sin(...)``,
``cos(...)``, ``exp(...)``, base names, fiber names and jet variables
``u_tx`` (subscript order is irrelevant).

Forms: ``dx`` for horizontal generators, ``du`` / ``du_x`` for ``dy``
generators (rewritten into the contact basis on the spot), ``th(u)`` and
``th(u;xx)`` for contact generators.  ``^`` is the wedge as soon as one side
is a form of positive degree, otherwise a power.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .forms import DX, THETA, Form, dx, dy, theta, to_contact_basis
from .jetcore import (
    BASE,
    FUNCTIONS,
    JET,
    Bundle,
    CoordinateError,
    Expr,
    _atom_arg,
    apply_function,
)


class GrammarError(ValueError):
    def __init__(self, message: str, column: int | None = None, text: str | None = None) -> None:
        self.column = column
        self.text = text
        where = f" at column {column}" if column is not None else ""
        super().__init__(f"{message}{where}")


class UnknownVariableError(GrammarError):
    def __init__(self, name: str, column: int | None = None, text: str | None = None) -> None:
        self.name = name
        super().__init__(f"unknown variable {name!r}", column, text)


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z][A-Za-z0-9]*(?:_[A-Za-z0-9]+)?)|(?P<op>[-+*/^();,]))")


@dataclass
class _Tok:
    kind: str
    text: str
    col: int


def _tokenize(text: str) -> list[_Tok]:
    pos = 0
    out = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise GrammarError(f"unexpected character {text[pos]!r}", pos + 1, text)
        kind = m.lastgroup
        start = m.start(kind)
        out.append(_Tok(kind, m.group(kind), start + 1))
        pos = m.end()
    out.append(_Tok("end", "", len(text) + 1))
    return out


class _Parser:
    def __init__(self, text: str, bundle: Bundle) -> None:
        self.text = text
        self.bundle = bundle
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> _Tok:
        t = self.take()
        if t.text != text:
            raise GrammarError(f"expected {text!r}, found {t.text or 'end of input'!r}", t.col, self.text)
        return t

    def error(self, msg: str, tok: _Tok | None = None) -> GrammarError:
        tok = tok or self.peek()
        return GrammarError(msg, tok.col, self.text)

    def parse(self):
        if self.peek().kind == "end":
            raise self.error("empty expression")
        value = self.sum()
        if self.peek().kind != "end":
            raise self.error(f"unexpected {self.peek().text!r}")
        return value

    def sum(self):
        value = self.product()
        while self.peek().text in ("+", "-"):
            op = self.take().text
            rhs = self.product()
            value = _add(value, rhs) if op == "+" else _add(value, _neg(rhs))
        return value

    def product(self):
        value = self.unary()
        while self.peek().text in ("*", "/"):
            tok = self.take()
            rhs = self.unary()
            if tok.text == "*":
                value = _mul(value, rhs)
            else:
                if not isinstance(rhs, Expr) or not rhs.is_constant():
                    raise GrammarError("division is only by rational constants", tok.col, self.text)
                if rhs.is_zero():
                    raise GrammarError("division by zero", tok.col, self.text)
                value = _mul(value, Expr.const(1 / rhs.constant_value()))
        return value

    def unary(self):
        if self.peek().text == "-":
            self.take()
            return _neg(self.unary())
        if self.peek().text == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        value = self.atom()
        if self.peek().text == "^":
            tok = self.take()
            rhs = self.unary()
            if isinstance(value, Form) or isinstance(rhs, Form):
                return _mul(_as_form(value, self.bundle), _as_form(rhs, self.bundle))
            if not rhs.is_constant() or rhs.constant_value().denominator != 1:
                raise GrammarError("exponent must be an integer", tok.col, self.text)
            e = int(rhs.constant_value())
            try:
                return value ** e
            except ValueError as exc:
                raise GrammarError(str(exc), tok.col, self.text) from None
        return value

    def atom(self):
        tok = self.take()
        if tok.kind == "num":
            return Expr.const(int(tok.text))
        if tok.text == "(":
            value = self.sum()
            self.expect(")")
            return value
        if tok.kind == "name":
            if tok.text in FUNCTIONS and self.peek().text == "(":
                self.take()
                arg = self.sum()
                self.expect(")")
                if isinstance(arg, Form):
                    raise GrammarError(f"{tok.text}() of a form", tok.col, self.text)
                return apply_function(tok.text, arg)
            if tok.text == "th" and self.peek().text == "(":
                return self.theta()
            return self.name(tok)
        raise self.error(f"unexpected {tok.text or 'end of input'!r}", tok)

    def theta(self):
        self.expect("(")
        ntok = self.take()
        if ntok.kind != "name":
            raise self.error("expected a fiber name", ntok)
        i = self._fiber(ntok.text, ntok)
        index = ()
        if self.peek().text == ";":
            self.take()
            stok = self.take()
            if stok.kind != "name":
                raise self.error("expected a subscript", stok)
            index = self._subscript(stok.text, stok)
        self.expect(")")
        return theta(self.bundle, i, index)

    def _fiber(self, name: str, tok: _Tok) -> int:
        if name not in self.bundle.fiber:
            raise UnknownVariableError(name, tok.col, self.text)
        return self.bundle.fiber.index(name)

    def _subscript(self, text: str, tok: _Tok) -> tuple[int, ...]:
        try:
            return self.bundle.parse_subscript(text).indices
        except CoordinateError:
            raise GrammarError(f"bad subscript {text!r}", tok.col, self.text) from None

    def name(self, tok: _Tok):
        b = self.bundle
        head, _, sub = tok.text.partition("_")
        if not sub:
            if head in b.base:
                return Expr.base_var(b.base.index(head))
            if head in b.fiber:
                return Expr.jet_var(b.fiber.index(head))
            if head.startswith("d") and head[1:] in b.base:
                return dx(b, b.base.index(head[1:]))
            if head.startswith("d") and head[1:] in b.fiber:
                return to_contact_basis(dy(b, b.fiber.index(head[1:])))
            raise UnknownVariableError(head, tok.col, self.text)
        if head in b.fiber:
            return Expr.jet_var(b.fiber.index(head), self._subscript(sub, tok))
        if head.startswith("d") and head[1:] in b.fiber:
            return to_contact_basis(dy(b, b.fiber.index(head[1:]), self._subscript(sub, tok)))
        raise UnknownVariableError(head, tok.col, self.text)


def _as_form(v, bundle: Bundle) -> Form:
    return v if isinstance(v, Form) else Form.scalar(bundle, v)


def _add(a, b):
    if isinstance(a, Form) or isinstance(b, Form):
        bundle = a.bundle if isinstance(a, Form) else b.bundle
        return _as_form(a, bundle) + _as_form(b, bundle)
    return a + b


def _neg(a):
    return -a


def _mul(a, b):
    if isinstance(a, Form) and isinstance(b, Form):
        return a ^ b
    if isinstance(a, Form):
        return a * b
    if isinstance(b, Form):
        return b * a
    return a * b


def parse_expr(text: str, bundle: Bundle) -> Expr:
    value = _Parser(text, bundle).parse()
    if isinstance(value, Form):
        if set(value.terms) <= {()}:
            return value.coefficient(())
        raise GrammarError("expected a scalar expression, found a form", None, text)
    return value


def parse_form(text: str, bundle: Bundle) -> Form:
    value = _Parser(text, bundle).parse()
    return _as_form(value, bundle)


# ---------------------------------------------------------------------------
# printing


def _atom_text(atom: tuple, bundle: Bundle) -> str:
    if atom[0] == BASE:
        return bundle.base[atom[1]]
    if atom[0] == JET:
        name = bundle.fiber[atom[1]]
        return f"{name}_{bundle.subscript(atom[3])}" if atom[3] else name
    return f"{atom[1]}({format_expr(_atom_arg(atom), bundle)})"


def _mono_text(mono: tuple, bundle: Bundle) -> str:
    return "*".join(_atom_text(a, bundle) + (f"^{e}" if e != 1 else "") for a, e in mono)


def _coeff_text(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_expr(e: Expr, bundle: Bundle) -> str:
    """Canonical text, readable back by :func:`parse_expr`."""
    if e.is_zero():
        return "0"
    parts = []
    for idx, (mono, c) in enumerate(e.items()):
        neg = c < 0
        a = -c if neg else c
        body = _mono_text(mono, bundle)
        if not body:
            text = _coeff_text(a)
        elif a == 1:
            text = body
        else:
            text = f"{_coeff_text(a)}*{body}"
        if idx == 0:
            parts.append(f"-{text}" if neg else text)
        else:
            parts.append(f" - {text}" if neg else f" + {text}")
    return "".join(parts)


def format_generator(g: tuple, bundle: Bundle) -> str:
    if g[0] == DX:
        return "d" + bundle.base[g[1]]
    name = bundle.fiber[g[1]]
    sub = bundle.subscript(g[3])
    if g[0] == THETA:
        return f"th({name};{sub})" if sub else f"th({name})"
    return f"d{name}_{sub}" if sub else f"d{name}"


def format_word(word: tuple, bundle: Bundle) -> str:
    return "^".join(format_generator(g, bundle) for g in word)


def format_form(phi: Form) -> str:
    """Canonical text, readable back by :func:`parse_form`."""
    bundle = phi.bundle
    if phi.is_zero():
        return "0"
    parts = []
    for idx, (w, c) in enumerate(phi.items()):
        neg = False
        if len(c.terms) == 1:
            (mono, q), = c.terms.items()
            neg = q < 0
            if neg:
                c = -c
        ctext = format_expr(c, bundle)
        if not w:
            text = ctext if len(c.terms) == 1 else f"({ctext})"
        elif ctext == "1":
            text = format_word(w, bundle)
        elif len(c.terms) == 1:
            text = f"{ctext}*{format_word(w, bundle)}"
        else:
            text = f"({ctext})*{format_word(w, bundle)}"
        if idx == 0:
            parts.append(f"-{text}" if neg else text)
        else:
            parts.append(f" - {text}" if neg else f" + {text}")
    return "".join(parts)


def parse_generator(text: str, bundle: Bundle) -> tuple:
    """Inverse of :func:`format_generator`, used by the JSON reader."""
    from .forms import gen_dx, gen_dy, gen_theta

    m = re.fullmatch(r"th\(([A-Za-z][A-Za-z0-9]*)(?:;([A-Za-z0-9]+))?\)", text)
    if m:
        i = bundle.fiber_index(m.group(1))
        return gen_theta(i, bundle.parse_subscript(m.group(2) or ""))
    head, _, sub = text.partition("_")
    if head.startswith("d"):
        name = head[1:]
        if not sub and name in bundle.base:
            return gen_dx(bundle.base.index(name))
        if name in bundle.fiber:
            return gen_dy(bundle.fiber.index(name), bundle.parse_subscript(sub))
    raise GrammarError(f"bad generator {text!r}")
