"""Exact scalars on jet space.

An :class:`Expr` is a polynomial with rational coefficients in *atoms*.  Atoms
are base coordinates ``x^lam``, jet coordinates ``y^i_Lam`` and applications
of ``sin``/``cos``/``exp`` to an inner :class:`Expr`.  Expressions are always
held fully expanded and canonically ordered, so two differential polynomials
are equal iff their term tables are equal.

Atom keys are plain tuples so that they sort and hash cheaply::

    (BASE, lam)
    (JET, i, order, Lam)        # Lam a sorted tuple of base positions
    (FUNC, name, arg_key)
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Mapping, NamedTuple, Sequence

BASE, JET, FUNC = 0, 1, 2
FUNCTIONS = ("sin", "cos", "exp")
_RESERVED = set(FUNCTIONS) | {"th"}
_NAME = re.compile(r"[A-Za-z][A-Za-z0-9]*\Z")


class CoordinateError(ValueError):
    """A base or fiber index does not belong to the bundle."""


@dataclass(frozen=True)
class Bundle:
    """Coordinates ``(x^lam, y^i)`` of a fibred manifold ``Y -> X``."""

    base: tuple[str, ...]
    fiber: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "base", tuple(self.base))
        object.__setattr__(self, "fiber", tuple(self.fiber))
        if not self.base or not self.fiber:
            raise ValueError("bundle needs at least one base and one fiber coordinate")
        names = self.base + self.fiber
        if len(set(names)) != len(names):
            raise ValueError(f"coordinate names must be unique: {names}")
        for name in names:
            if not _NAME.match(name) or name in _RESERVED:
                raise ValueError(f"invalid coordinate name {name!r}")
            if "d" + name in names:
                raise ValueError(f"name {'d' + name!r} clashes with the differential of {name!r}")
        for a in self.base:
            for b in self.base:
                if a != b and b.startswith(a):
                    raise ValueError(f"base name {a!r} is a prefix of {b!r}; subscripts would be ambiguous")

    @property
    def n(self) -> int:
        return len(self.base)

    @property
    def m(self) -> int:
        return len(self.fiber)

    def base_index(self, name: str) -> int:
        try:
            return self.base.index(name)
        except ValueError:
            raise CoordinateError(f"unknown base coordinate {name!r}") from None

    def fiber_index(self, name: str) -> int:
        try:
            return self.fiber.index(name)
        except ValueError:
            raise CoordinateError(f"unknown fiber coordinate {name!r}") from None

    def check_base(self, lam: int) -> None:
        if not 0 <= lam < self.n:
            raise CoordinateError(f"base index {lam} out of range for n={self.n}")

    def check_fiber(self, i: int) -> None:
        if not 0 <= i < self.m:
            raise CoordinateError(f"fiber index {i} out of range for m={self.m}")

    def subscript(self, index: "MultiIndex | tuple[int, ...]") -> str:
        idx = index.indices if isinstance(index, MultiIndex) else index
        return "".join(self.base[lam] for lam in idx)

    def parse_subscript(self, text: str) -> "MultiIndex":
        """Split ``"tx"`` into base positions by longest match."""
        out = []
        pos = 0
        while pos < len(text):
            for lam in sorted(range(self.n), key=lambda j: -len(self.base[j])):
                name = self.base[lam]
                if text.startswith(name, pos):
                    out.append(lam)
                    pos += len(name)
                    break
            else:
                raise CoordinateError(f"cannot read subscript {text!r} over base {self.base}")
        return MultiIndex(tuple(out))


@dataclass(frozen=True)
class MultiIndex:
    """Symmetric multi-index, stored as a sorted tuple of base positions."""

    indices: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        idx = tuple(sorted(self.indices))
        if any(i < 0 for i in idx):
            raise ValueError("multi-index entries must be nonnegative")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def from_counts(cls, counts: Mapping[int, int]) -> "MultiIndex":
        out: list[int] = []
        for lam, c in counts.items():
            if c < 0:
                raise ValueError("multi-index counts must be nonnegative")
            out.extend([lam] * c)
        return cls(tuple(out))

    @property
    def counts(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for lam in self.indices:
            out[lam] = out.get(lam, 0) + 1
        return out

    @property
    def order(self) -> int:
        return len(self.indices)

    def __len__(self) -> int:
        return len(self.indices)

    def add(self, lam: int) -> "MultiIndex":
        return MultiIndex(self.indices + (lam,))

    def sort_key(self) -> tuple:
        return (len(self.indices), self.indices)

    def __lt__(self, other: "MultiIndex") -> bool:
        return self.sort_key() < other.sort_key()


def mi_add(index: MultiIndex, lam: int, bundle: Bundle | None = None) -> MultiIndex:
    """``lam + Lam``; the order grows by exactly one."""
    if bundle is not None:
        bundle.check_base(lam)
    elif lam < 0:
        raise CoordinateError(f"invalid base index {lam}")
    return index.add(lam)


class JetVar(NamedTuple):
    fiber: int
    index: MultiIndex = MultiIndex()


def _add_index(idx: tuple[int, ...], lam: int) -> tuple[int, ...]:
    return tuple(sorted(idx + (lam,)))


def jet_key(i: int, idx: tuple[int, ...]) -> tuple:
    return (JET, i, len(idx), idx)


# ---------------------------------------------------------------------------
# monomials: sorted tuples of (atom, exponent)


def _mono_mul(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for atom, e in b:
        d[atom] = d.get(atom, 0) + e
    return tuple(sorted(d.items()))


def _mono_degree(mono: tuple) -> int:
    return sum(e for _, e in mono)


def _term_order(item: tuple) -> tuple:
    mono = item[0]
    return (_mono_degree(mono), mono)


class Expr:
    """Immutable canonical polynomial over atoms with ``Fraction`` coefficients."""

    __slots__ = ("_t", "_hash", "_key")

    def __init__(self, terms: Mapping[tuple, Fraction] | None = None) -> None:
        # caller guarantees: no zero coefficients, canonical monomials
        self._t: dict[tuple, Fraction] = dict(terms) if terms else {}
        self._hash: int | None = None
        self._key: tuple | None = None

    # -- constructors -------------------------------------------------------
    @classmethod
    def const(cls, q) -> "Expr":
        q = Fraction(q)
        return cls({(): q}) if q else ZERO

    @classmethod
    def base_var(cls, lam: int) -> "Expr":
        return cls({(((BASE, lam), 1),): Fraction(1)})

    @classmethod
    def jet_var(cls, i: int, index: MultiIndex | tuple[int, ...] = ()) -> "Expr":
        idx = index.indices if isinstance(index, MultiIndex) else tuple(sorted(index))
        return _jet_expr(i, idx)

    @classmethod
    def from_atom(cls, atom: tuple) -> "Expr":
        return cls({((atom, 1),): Fraction(1)})

    # -- inspection ---------------------------------------------------------
    @property
    def terms(self) -> Mapping[tuple, Fraction]:
        return self._t

    def items(self) -> list[tuple[tuple, Fraction]]:
        """Terms in canonical (graded) order."""
        return sorted(self._t.items(), key=_term_order)

    def key(self) -> tuple:
        if self._key is None:
            self._key = tuple(self.items())
        return self._key

    def is_zero(self) -> bool:
        return not self._t

    def is_constant(self) -> bool:
        return not self._t or (len(self._t) == 1 and () in self._t)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("expression is not constant")
        return self._t.get((), Fraction(0))

    def atoms(self) -> set[tuple]:
        """Atoms occurring at top level (function atoms are not opened)."""
        return {atom for mono in self._t for atom, _ in mono}

    def all_atoms(self) -> set[tuple]:
        """Base and jet atoms occurring anywhere, including inside function arguments."""
        out: set[tuple] = set()
        for atom in self.atoms():
            if atom[0] == FUNC:
                out |= _atom_arg(atom).all_atoms()
            else:
                out.add(atom)
        return out

    def jet_vars(self) -> list[JetVar]:
        keys = sorted(a for a in self.all_atoms() if a[0] == JET)
        return [JetVar(a[1], MultiIndex(a[3])) for a in keys]

    def is_polynomial(self) -> bool:
        return all(atom[0] != FUNC for atom in self.atoms())

    def degree(self) -> int:
        return max((_mono_degree(m) for m in self._t), default=0)

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other) -> "Expr":
        if isinstance(other, (int, Fraction)):
            other = Expr.const(other)
        elif not isinstance(other, Expr):
            return NotImplemented
        if not other._t:
            return self
        if not self._t:
            return other
        d = dict(self._t)
        for mono, c in other._t.items():
            v = d.get(mono, 0) + c
            if v:
                d[mono] = v
            else:
                d.pop(mono, None)
        return Expr(d)

    __radd__ = __add__

    def __neg__(self) -> "Expr":
        return Expr({m: -c for m, c in self._t.items()})

    def __sub__(self, other) -> "Expr":
        if not isinstance(other, (int, Fraction, Expr)):
            return NotImplemented
        return self + (-as_expr(other))

    def __rsub__(self, other) -> "Expr":
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        return as_expr(other) - self

    def __mul__(self, other) -> "Expr":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Expr):
            return NotImplemented
        if not self._t or not other._t:
            return ZERO
        d: dict[tuple, Fraction] = {}
        for m1, c1 in self._t.items():
            for m2, c2 in other._t.items():
                m = _mono_mul(m1, m2)
                v = d.get(m, 0) + c1 * c2
                if v:
                    d[m] = v
                else:
                    d.pop(m, None)
        return Expr(d)

    def __rmul__(self, other) -> "Expr":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other) -> "Expr":
        if isinstance(other, Expr):
            other = other.constant_value()
        q = Fraction(other)
        if not q:
            raise ZeroDivisionError("division of an expression by zero")
        return self.scale(1 / q)

    def __pow__(self, e: int) -> "Expr":
        if not isinstance(e, int) or e < 0:
            if self.is_constant() and isinstance(e, int) and self.constant_value():
                return Expr.const(self.constant_value() ** e)
            raise ValueError("only nonnegative integer powers of expressions are supported")
        out = ONE
        base = self
        while e:
            if e & 1:
                out = out * base
            e >>= 1
            if e:
                base = base * base
        return out

    def scale(self, q) -> "Expr":
        q = Fraction(q)
        if not q:
            return ZERO
        return Expr({m: c * q for m, c in self._t.items()})

    # -- comparison ---------------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Expr.const(other)
        if not isinstance(other, Expr):
            return NotImplemented
        return self._t == other._t

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._t.items()))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self._t)

    def __repr__(self) -> str:
        return f"Expr({_debug_str(self)})"

    # -- evaluation ---------------------------------------------------------
    def evaluate(self, base: Sequence[float], jet: Callable[[int, MultiIndex], float]) -> float:
        """Floating-point value with base coordinates and a jet-value callback."""
        cache: dict[tuple, float] = {}

        def atom_value(atom: tuple) -> float:
            if atom in cache:
                return cache[atom]
            if atom[0] == BASE:
                v = float(base[atom[1]])
            elif atom[0] == JET:
                v = float(jet(atom[1], MultiIndex(atom[3])))
            else:
                v = getattr(math, atom[1])(_atom_arg(atom).evaluate(base, jet))
            cache[atom] = v
            return v

        total = 0.0
        for mono, c in self._t.items():
            term = float(c)
            for atom, e in mono:
                term *= atom_value(atom) ** e
            total += term
        return total


ZERO = Expr()
ONE = Expr({(): Fraction(1)})


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, Fraction)):
        return Expr.const(value)
    raise TypeError(f"cannot use {type(value).__name__} as an expression")


@lru_cache(maxsize=None)
def _jet_expr(i: int, idx: tuple[int, ...]) -> Expr:
    return Expr({((jet_key(i, idx), 1),): Fraction(1)})


def _atom_arg(atom: tuple) -> Expr:
    return Expr(dict(atom[2]))


def apply_function(name: str, arg: Expr) -> Expr:
    """``sin``/``cos``/``exp`` of an expression; folds only the zero argument."""
    if name not in FUNCTIONS:
        raise ValueError(f"unknown function {name!r}")
    if arg.is_zero():
        return ZERO if name == "sin" else ONE
    return Expr.from_atom((FUNC, name, arg.key()))


def sin(e: Expr) -> Expr:
    return apply_function("sin", e)


def cos(e: Expr) -> Expr:
    return apply_function("cos", e)


def exp(e: Expr) -> Expr:
    return apply_function("exp", e)


def _debug_str(e: Expr) -> str:
    if not e._t:
        return "0"
    parts = []
    for mono, c in e.items():
        factors = []
        for atom, p in mono:
            if atom[0] == BASE:
                s = f"x{atom[1]}"
            elif atom[0] == JET:
                s = f"y{atom[1]}" + ("_" + "".join(map(str, atom[3])) if atom[3] else "")
            else:
                s = f"{atom[1]}({_debug_str(_atom_arg(atom))})"
            factors.append(s if p == 1 else f"{s}^{p}")
        parts.append("*".join([str(c)] + factors))
    return " + ".join(parts)


# ---------------------------------------------------------------------------
# derivations


def _function_derivative(atom: tuple) -> Expr:
    name = atom[1]
    arg = _atom_arg(atom)
    if name == "sin":
        return cos(arg)
    if name == "cos":
        return -sin(arg)
    return Expr.from_atom(atom)


def derive(f: Expr, rule: Callable[[tuple], Expr | None]) -> Expr:
    """Apply the derivation fixed by its values ``rule(atom)`` on base/jet atoms.

    Function atoms are differentiated by the chain rule.  ``rule`` returns
    ``None`` for atoms it annihilates.
    """
    memo: dict[tuple, Expr | None] = {}

    def atom_image(atom: tuple) -> Expr | None:
        if atom in memo:
            return memo[atom]
        if atom[0] == FUNC:
            inner = derive(_atom_arg(atom), rule)
            out = None if inner.is_zero() else _function_derivative(atom) * inner
        else:
            out = rule(atom)
            if out is not None and out.is_zero():
                out = None
        memo[atom] = out
        return out

    acc: dict[tuple, Fraction] = {}
    for mono, c in f._t.items():
        for pos, (atom, e) in enumerate(mono):
            da = atom_image(atom)
            if da is None:
                continue
            if e == 1:
                rest = mono[:pos] + mono[pos + 1:]
            else:
                rest = mono[:pos] + ((atom, e - 1),) + mono[pos + 1:]
            k = c * e
            for m2, c2 in da._t.items():
                m = _mono_mul(rest, m2)
                v = acc.get(m, 0) + k * c2
                if v:
                    acc[m] = v
                else:
                    acc.pop(m, None)
    return Expr(acc)


def partial(f: Expr, v: JetVar | int) -> Expr:
    """Partial derivative treating every jet coordinate as independent.

    ``v`` is a :class:`JetVar` or a base position.
    """
    if isinstance(v, JetVar):
        target = jet_key(v.fiber, v.index.indices)
    elif isinstance(v, int):
        if v < 0:
            raise CoordinateError(f"invalid base index {v}")
        target = (BASE, v)
    else:
        raise TypeError("partial() takes a JetVar or a base index")
    return _partial_atom(f, target)


@lru_cache(maxsize=1 << 16)
def _partial_atom(f: Expr, target: tuple) -> Expr:
    return derive(f, lambda atom: ONE if atom == target else None)


@lru_cache(maxsize=1 << 16)
def total_derivative(f: Expr, lam: int) -> Expr:
    """``d_lam f = partial_lam f + sum y^i_{lam+Lam} partial f / partial y^i_Lam``.

    The sum runs over the jet coordinates actually present in ``f``.
    """
    if lam < 0:
        raise CoordinateError(f"invalid base index {lam}")

    def rule(atom: tuple) -> Expr | None:
        if atom[0] == BASE:
            return ONE if atom[1] == lam else None
        return _jet_expr(atom[1], _add_index(atom[3], lam))

    return derive(f, rule)


def total_derivative_iterated(f: Expr, index: MultiIndex | Iterable[int]) -> Expr:
    idx = index.indices if isinstance(index, MultiIndex) else tuple(sorted(index))
    for lam in idx:
        f = total_derivative(f, lam)
    return f


def normalize(f: Expr) -> Expr:
    """Canonical form.  Expressions are kept canonical on construction."""
    return Expr(f._t)


def jet_order(f: Expr) -> int:
    """Highest ``|Lam|`` among jet coordinates; -1 for pull-backs from the base."""
    return max((a[2] for a in f.all_atoms() if a[0] == JET), default=-1)


def is_zero(f: Expr) -> bool | None:
    """``True``/``False`` for differential polynomials; ``None`` when undecided."""
    if f.is_zero():
        return True
    return False if f.is_polynomial() else None


def jet_degree(mono: tuple) -> int:
    return sum(e for atom, e in mono if atom[0] == JET)


def scaling_components(f: Expr) -> dict[int, Expr]:
    """Split ``f`` by degree in the jet coordinates.

    The coefficient of ``t^d`` in ``f(x, t*y)``, valid for expressions whose jet
    dependence is polynomial.
    """
    out: dict[int, dict] = {}
    for mono, c in f._t.items():
        for atom, _ in mono:
            if atom[0] == FUNC and any(a[0] == JET for a in _atom_arg(atom).all_atoms()):
                raise ValueError("jet dependence inside a transcendental function is not polynomial")
        out.setdefault(jet_degree(mono), {})[mono] = c
    return {d: Expr(t) for d, t in sorted(out.items())}


def substitute_scaling(f: Expr, t) -> Expr:
    """Replace every jet coordinate ``y^i_Lam`` by ``t*y^i_Lam``.

    ``t`` is a rational or an :class:`Expr` (e.g. a formal parameter built by
    the caller); base coordinates are left alone.
    """
    t = as_expr(t)
    powers: dict[int, Expr] = {0: ONE}

    def power(d: int) -> Expr:
        if d not in powers:
            powers[d] = t ** d
        return powers[d]

    out = ZERO
    for mono, c in f._t.items():
        factor = Expr({(): c})
        plain = []
        for atom, e in mono:
            if atom[0] == FUNC:
                inner = substitute_scaling(_atom_arg(atom), t)
                factor = factor * apply_function(atom[1], inner) ** e
            else:
                plain.append((atom, e))
        out = out + factor * Expr({tuple(plain): Fraction(1)}) * power(jet_degree(tuple(plain)))
    return out


def monomials(variables: Sequence[tuple], max_degree: int) -> Iterator[tuple]:
    """All monomials (as canonical tuples) of total degree <= ``max_degree``."""
    variables = sorted(variables)

    def rec(start: int, left: int, acc: list) -> Iterator[tuple]:
        yield tuple(acc)
        for j in range(start, len(variables)):
            if left == 0:
                return
            atom = variables[j]
            for e in range(1, left + 1):
                acc.append((atom, e))
                yield from rec(j + 1, left - e, acc)
                acc.pop()

    yield from rec(0, max_degree, [])


def multi_indices(n: int, max_order: int) -> list[MultiIndex]:
    """All symmetric multi-indices over ``n`` base positions up to ``max_order``, graded-lex."""
    out = [MultiIndex()]
    layer = [()]
    for _ in range(max_order):
        nxt = sorted({tuple(sorted(idx + (lam,))) for idx in layer for lam in range(n)})
        out.extend(MultiIndex(idx) for idx in nxt)
        layer = nxt
    return out
