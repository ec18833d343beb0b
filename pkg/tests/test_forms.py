import random

import pytest
from hypothesis import given, settings, strategies as st

from varcomplex.forms import (
    Form,
    SourceForm,
    bidegree,
    contract_theta,
    dx,
    dy,
    from_contact_basis,
    horizontalize,
    project,
    theta,
    to_contact_basis,
    volume,
    wedge,
)
from varcomplex.jetcore import Expr
from varcomplex.props import Limits, random_bundle, random_form


def test_wedge_antisymmetry(plane, fm):
    assert wedge(dx(plane, 1), dx(plane, 1)).is_zero()
    assert wedge(dx(plane, 1), dx(plane, 0)) == -wedge(dx(plane, 0), dx(plane, 1))
    assert fm("u*dx", plane) ^ fm("u_x*dt", plane) == fm("u*u_x*dx^dt", plane)


def test_bidegree(line, plane, fm):
    assert bidegree(fm("th(u;x)^dx", line)) == {(1, 1)}
    assert bidegree(fm("dx^dt + th(u)^th(u;x)", plane)) == {(0, 2), (2, 0)}
    assert bidegree(Form.zero(line)) == set()


def test_project(plane, fm):
    phi = fm("th(u)^dx + dx^dt", plane)
    assert project(phi, k=0) == fm("dx^dt", plane)
    assert project(fm("dx^dt", plane), s=1).is_zero()
    with pytest.raises(ValueError):
        project(phi, s=3)


def test_horizontalize(line, fm):
    assert horizontalize(dy(line, 0)) == fm("u_x*dx", line)
    assert horizontalize(dx(line, 0)) == dx(line, 0)


def test_horizontalize_mechanics_closed_form(fm):
    from varcomplex.jetcore import Bundle

    b = Bundle(("t",), ("u",))
    # F = t*u^2: dF = u^2 dt + 2 t u du
    assert horizontalize(fm("u^2*dt + 2*t*u*du", b)) == fm("(u^2 + 2*t*u*u_t)*dt", b)


def test_contact_basis_conversions(line, fm):
    assert to_contact_basis(dy(line, 0)) == theta(line, 0) + fm("u_x*dx", line)
    assert to_contact_basis(dy(line, 0, (0,)) ^ dx(line, 0)) == theta(line, 0, (0,)) ^ dx(line, 0)
    assert to_contact_basis(dx(line, 0)) == dx(line, 0)


def test_contract_theta(line, plane, fm):
    assert contract_theta(fm("th(u;x)^dx", line), 0, (0,)) == dx(line, 0)
    assert contract_theta(fm("dx^th(u;x)", line), 0, (0,)) == -dx(line, 0)
    assert contract_theta(fm("dx^dt", plane), 0, ()).is_zero()


def test_source_form_roundtrip(plane, ex):
    E = SourceForm(plane, (ex("-u_tt + u_xx", plane),))
    assert SourceForm.from_form(E.to_form()) == E
    assert E.to_form() == wedge(theta(plane, 0), volume(plane)) * ex("-u_tt + u_xx", plane)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_projections_sum_to_identity(seed):
    rng = random.Random(seed)
    b = random_bundle(rng)
    phi = random_form(rng, b, rng.randint(0, 2), rng.randint(0, b.n)) + random_form(rng, b, 1, 0)
    total = Form.zero(b)
    for k in range(4):
        total = total + project(phi, k=k)
    assert total == phi


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_basis_change_roundtrip(seed):
    rng = random.Random(seed)
    b = random_bundle(rng)
    phi = random_form(rng, b, rng.randint(0, 2), rng.randint(0, b.n), Limits(max_terms=3))
    assert to_contact_basis(from_contact_basis(phi)) == phi


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_wedge_graded_commutativity(seed):
    rng = random.Random(seed)
    b = random_bundle(rng)
    a = random_form(rng, b, rng.randint(0, 1), rng.randint(0, 1))
    c = random_form(rng, b, rng.randint(0, 1), rng.randint(0, 1))
    (ka, sa), = bidegree(a) or {(0, 0)}
    (kc, sc), = bidegree(c) or {(0, 0)}
    sign = -1 if ((ka + sa) * (kc + sc)) % 2 else 1
    assert wedge(a, c) == wedge(c, a) * Expr.const(sign)
