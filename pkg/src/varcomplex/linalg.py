"""Exact sparse linear algebra over the rationals.

Vectors are dicts ``row_key -> Fraction`` with totally ordered keys.  The
eliminator keeps every pivot vector normalised to 1 at its largest key, so a
vector is reduced by repeatedly cancelling its largest pivot entry; each step
only introduces smaller keys, which makes the reduction terminate and the
whole procedure deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Sequence

Vector = dict


def _axpy(y: dict, a: Fraction, x: dict) -> None:
    """``y += a*x`` in place."""
    for k, v in x.items():
        t = y.get(k, 0) + a * v
        if t:
            y[k] = t
        else:
            y.pop(k, None)


class Eliminator:
    """Incremental column echelon basis that remembers combinations of inputs."""

    def __init__(self) -> None:
        self.pivots: dict[Hashable, tuple[dict, dict]] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, vec: dict, combo: dict | None = None) -> tuple[dict, dict]:
        v = dict(vec)
        comb = dict(combo or {})
        while True:
            hits = [k for k in v if k in self.pivots]
            if not hits:
                return v, comb
            k = max(hits)
            a = -v[k]
            pv, pc = self.pivots[k]
            _axpy(v, a, pv)
            _axpy(comb, a, pc)

    def add(self, vec: dict, label: Hashable) -> dict | None:
        """Insert a column; returns a kernel combination if it was dependent."""
        v, comb = self.reduce(vec, {label: Fraction(1)})
        if not v:
            return comb
        k = max(v)
        inv = 1 / Fraction(v[k])
        self.pivots[k] = ({r: c * inv for r, c in v.items()}, {r: c * inv for r, c in comb.items()})
        return None


def rank(columns: Iterable[dict]) -> int:
    e = Eliminator()
    for j, col in enumerate(columns):
        e.add(col, j)
    return e.rank


def nullspace(columns: Sequence[dict]) -> list[dict]:
    """Basis of ``{x : sum_j x_j col_j = 0}`` as sparse dicts over column indices."""
    e = Eliminator()
    out = []
    for j, col in enumerate(columns):
        comb = e.add(col, j)
        if comb is not None:
            out.append(comb)
    return out


def solve(columns: Sequence[dict], rhs: dict) -> tuple[dict | None, dict]:
    """Find ``x`` with ``sum_j x_j col_j = rhs``.

    Returns ``(x, {})`` on success and ``(None, residual)`` otherwise, where the
    residual is ``rhs`` reduced against the column space.
    """
    e = Eliminator()
    for j, col in enumerate(columns):
        e.add(col, j)
    res, comb = e.reduce(rhs)
    if res:
        return None, res
    return {j: -c for j, c in comb.items()}, {}


def project_out(columns: Iterable[dict], keep: set) -> list[dict]:
    """Drop the coordinates in ``keep``: the image of each column in the complement."""
    return [{k: v for k, v in col.items() if k not in keep} for col in columns]


def intersection_dim(columns: Sequence[dict], subspace_keys: set) -> int:
    """``dim(span(columns) & span(e_k : k in subspace_keys))``."""
    return rank(columns) - rank(project_out(columns, subspace_keys))


@dataclass
class SparseMatrix:
    """Columns over labelled rows and columns; entries are exact rationals."""

    row_keys: list
    col_keys: list
    columns: list[dict] = field(default_factory=list)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.row_keys), len(self.col_keys)

    def rank(self) -> int:
        return rank(self.columns)

    def nullspace(self) -> list[dict]:
        return nullspace(self.columns)

    def to_dense(self) -> list[list[Fraction]]:
        pos = {k: r for r, k in enumerate(self.row_keys)}
        out = [[Fraction(0)] * len(self.col_keys) for _ in self.row_keys]
        for j, col in enumerate(self.columns):
            for k, v in col.items():
                out[pos[k]][j] = Fraction(v)
        return out

    def compose(self, first: "SparseMatrix") -> "SparseMatrix":
        """``self @ first``, matching ``first.row_keys`` against ``self.col_keys``."""
        index = {k: j for j, k in enumerate(self.col_keys)}
        cols = []
        for col in first.columns:
            acc: dict = {}
            for k, v in col.items():
                if k not in index:
                    raise KeyError(f"row {k!r} of the first map is not a column of the second")
                _axpy(acc, Fraction(v), self.columns[index[k]])
            cols.append(acc)
        return SparseMatrix(list(self.row_keys), list(first.col_keys), cols)

    def is_zero(self) -> bool:
        return all(not c for c in self.columns)
