import pytest

from varcomplex.cohomlab import (
    TruncationError,
    TruncationSpec,
    _matrix,
    basis_keys,
    betti,
    delta_exactness,
    enumerate_basis,
    operator_matrix,
)
from varcomplex.grammar import format_form
from varcomplex.jetcore import Bundle
from varcomplex.varops import d_H


def test_enumerate_basis_examples(line):
    names = [format_form(f) for f in enumerate_basis(line, TruncationSpec(0, 1, 0), 0, 0)]
    assert names == ["1", "u"]
    names = [format_form(f) for f in enumerate_basis(line, TruncationSpec(0, 1, 1), 0, 0)]
    # base and jet degrees are bounded separately, so x*u is in as well
    assert sorted(names) == ["1", "u", "x", "x*u"]
    basis = enumerate_basis(line, TruncationSpec(1, 1, 0), 1, 0)
    assert sorted(format_form(f) for f in basis) == sorted(
        ["th(u)", "th(u;x)", "u*th(u)", "u*th(u;x)", "u_x*th(u)", "u_x*th(u;x)"])
    with pytest.raises(ValueError):
        enumerate_basis(line, TruncationSpec(1, 1, 0), 0, 2)


def test_basis_is_deterministic(plane):
    spec = TruncationSpec(1, 2, 1)
    assert basis_keys(plane, spec, 1, 1) == basis_keys(plane, spec, 1, 1)


@pytest.mark.parametrize("k", [0, 1])
def test_d_H_matrices_compose_to_zero(plane, k):
    spec = TruncationSpec(1, 2, 1)
    first = operator_matrix("d_H", plane, spec, k, 0)
    second = operator_matrix("d_H", plane, TruncationSpec(2, 2, 1), k, 1)
    assert second.compose(first).is_zero()


def test_d_V_matrices_compose_to_zero(plane):
    spec = TruncationSpec(1, 2, 0)
    first = operator_matrix("d_V", plane, spec, 0, 1)
    second = operator_matrix("d_V", plane, spec, 1, 1)
    assert second.compose(first).is_zero()


def test_d_V_on_constants_and_u(line):
    m = operator_matrix("d_V", line, TruncationSpec(0, 1, 0), 0, 0)
    assert m.col_keys == [((), ()), ((), (((1, 0, 0, ()), 1),))]
    assert m.columns[0] == {}
    assert list(m.columns[1].values()) == [1]


def test_truncation_error(line):
    spec = TruncationSpec(1, 1, 0)
    dom = basis_keys(line, spec, 0, 0)
    with pytest.raises(TruncationError):
        _matrix(line, dom, d_H, basis_keys(line, spec, 0, 1))


def test_line_shadows():
    b = Bundle(("x",), ("u",))
    spec = TruncationSpec(3, 3, 2)
    row = betti("d_H", b, spec).positions
    assert row[0]["dim_kernel"] == 1 and row[0]["dim_cohomology"] == 1
    col = betti("d_V", b, spec, s=0).positions
    assert col[0]["dim_kernel"] == spec.base_poly_degree + 1
    assert [p["dim_cohomology"] for p in col[1:]] == [0, 0]
    var = betti("variational", b, spec).positions
    assert [p["dim_cohomology"] for p in var] == [1, 0, 0]
    kernel, contained = delta_exactness(b, spec)
    assert kernel > 0 and contained


def test_contact_row_exact_in_the_interior():
    b = Bundle(("t", "x"), ("u",))
    rep = betti("d_H", b, TruncationSpec(1, 1, 1), k=1)
    assert rep.positions[0]["dim_cohomology"] == 0
    assert rep.positions[1]["dim_cohomology"] == 0


def test_report_serialisations():
    b = Bundle(("x",), ("u",))
    rep = betti("d_H", b, TruncationSpec(1, 1, 1))
    assert rep.csv().splitlines()[0] == "position,dim_domain,rank,dim_kernel,dim_cohomology"
    assert len(rep.csv().splitlines()) == 1 + len(rep.positions)
    assert rep.to_dict()["truncation"]["base_poly_degree"] == 1
    assert "operator d_H" in rep.table()
