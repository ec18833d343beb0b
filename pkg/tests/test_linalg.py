import random
from fractions import Fraction

import sympy as sp
from hypothesis import given, settings, strategies as st

from varcomplex.linalg import SparseMatrix, intersection_dim, nullspace, rank, solve


def _random_columns(rng: random.Random, rows: int, cols: int, density: float = 0.4) -> list[dict]:
    out = []
    for _ in range(cols):
        col = {}
        for r in range(rows):
            if rng.random() < density:
                col[r] = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
        out.append({k: v for k, v in col.items() if v})
    # force some dependence
    if cols >= 3:
        a, b = rng.sample(range(cols - 1), 2)
        merged = dict(out[a])
        for k, v in out[b].items():
            merged[k] = merged.get(k, 0) + 2 * v
        out[-1] = {k: v for k, v in merged.items() if v}
    return out


def _dense(cols: list[dict], rows: int) -> sp.Matrix:
    return sp.Matrix(rows, len(cols), lambda r, c: sp.Rational(cols[c].get(r, 0)))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 7), st.integers(1, 7))
def test_rank_matches_sympy(seed, rows, cols):
    rng = random.Random(seed)
    columns = _random_columns(rng, rows, cols)
    assert rank(columns) == _dense(columns, rows).rank()


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 6), st.integers(1, 7))
def test_nullspace_is_kernel_basis(seed, rows, cols):
    rng = random.Random(seed)
    columns = _random_columns(rng, rows, cols)
    kernel = nullspace(columns)
    assert len(kernel) == cols - rank(columns)
    for vec in kernel:
        acc: dict = {}
        for j, c in vec.items():
            for r, v in columns[j].items():
                acc[r] = acc.get(r, 0) + c * v
        assert not any(acc.values())
    if kernel:
        dense = sp.Matrix([[sp.Rational(v.get(j, 0)) for j in range(cols)] for v in kernel])
        assert dense.rank() == len(kernel)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_solve(seed):
    rng = random.Random(seed)
    columns = _random_columns(rng, 5, 4)
    x = {j: Fraction(rng.randint(-2, 2)) for j in range(4)}
    rhs: dict = {}
    for j, c in x.items():
        for r, v in columns[j].items():
            rhs[r] = rhs.get(r, 0) + c * v
    rhs = {k: v for k, v in rhs.items() if v}
    sol, res = solve(columns, rhs)
    assert sol is not None and not res
    back: dict = {}
    for j, c in sol.items():
        for r, v in columns[j].items():
            back[r] = back.get(r, 0) + c * v
    assert {k: v for k, v in back.items() if v} == rhs


def test_solve_reports_residual():
    sol, res = solve([{0: Fraction(1)}], {1: Fraction(1)})
    assert sol is None and res == {1: 1}


def test_intersection_dim():
    cols = [{0: Fraction(1), 1: Fraction(1)}, {1: Fraction(1)}, {2: Fraction(1)}]
    # span contains e0, e1, e2; intersect with span(e0, e1)
    assert intersection_dim(cols, {0, 1}) == 2
    assert intersection_dim([{0: Fraction(1), 2: Fraction(1)}], {0, 1}) == 0


def test_sparse_matrix_compose_and_dense():
    a = SparseMatrix(["p", "q"], ["x", "y"], [{"p": Fraction(1)}, {"q": Fraction(2)}])
    b = SparseMatrix(["r"], ["p", "q"], [{"r": Fraction(1)}, {"r": Fraction(-1, 2)}])
    ab = b.compose(a)
    assert ab.to_dense() == [[Fraction(1), Fraction(-1)]]
    assert not ab.is_zero()
    assert a.shape == (2, 2) and a.rank() == 2
