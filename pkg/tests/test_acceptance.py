"""Acceptance criteria, one test each.

Every test records a ``PASS``/``FAIL`` line (shown in the pytest terminal
summary, and printed directly when this file is run as a script).
"""

from __future__ import annotations

import json
import random
import subprocess
import sys
import time

from conftest import ACCEPTANCE_LINES
from oracles import gateaux_check
from varcomplex.cohomlab import TruncationSpec, betti, delta_exactness
from varcomplex.forms import SourceForm, dx, dy, horizontalize
from varcomplex.grammar import format_expr, parse_expr, parse_form
from varcomplex.inverse import (
    helmholtz_check,
    is_variationally_trivial,
    reconstruct_lagrangian,
    triviality_witness,
)
from varcomplex.jetcore import Bundle, JetVar, MultiIndex, partial
from varcomplex.props import (
    Limits,
    property_suite,
    random_bundle,
    random_expr,
    random_form,
    random_lagrangian,
)
from varcomplex.render import form_from_records, source_from_record
from varcomplex.symmetry import EvolutionaryField, conservation_check, noether_current
from varcomplex.varops import (
    d_H,
    density,
    euler_lagrange,
    exterior_d,
    first_variational_split,
    lagrangian,
)


def record(number: int, ok: bool, detail: str) -> None:
    text = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    ACCEPTANCE_LINES.append(text)
    print(text)


LINE = Bundle(("x",), ("u",))
PLANE = Bundle(("t", "x"), ("u",))
MECH = Bundle(("t",), ("u",))


def _mechanics_family() -> list[tuple[Bundle, str]]:
    """Densities of ``h_0(dF) + d_t(xi)`` on ``Y = R x R``; all are null."""
    out = []
    for F, xi in (("t*u^2", "0"), ("t*sin(u)", "u*u_t"), ("exp(t*u)", "t^2*u_t"), ("t^2*u^3 + u", "u_t^2")):
        f = parse_expr(F, MECH)
        closed = dx(MECH, 0) * partial(f, 0) + dy(MECH, 0) * partial(f, JetVar(0, MultiIndex(())))
        L = horizontalize(closed) + d_H(parse_form(xi, MECH))
        out.append((MECH, format_expr(density(L), MECH)))
    return out


CORPUS = [
    (LINE, "1/2*u_x^2"),
    (PLANE, "1/2*(u_t^2 - u_x^2)"),
    (LINE, "1/2*u_xx^2"),
    (LINE, "u*u_x"),
]
NULL = {"u*u_x"}


def test_criterion_1_operator_identities():
    start = time.perf_counter()
    rep = property_suite(1, 500)
    elapsed = time.perf_counter() - start
    required = {"d^2 = 0", "d_H^2 = 0", "d_V^2 = 0", "d_H d_V + d_V d_H = 0", "tau^2 = tau",
                "tau d_H = 0", "delta^2 = 0", "delta tau = tau d", "h0 d = d_H h0"}
    ok = rep.all_passed and required <= set(rep.results) and elapsed < 60
    failed = [n for n, r in rep.results.items() if r["failed"]]
    record(1, ok, f"{len(rep.results)} identities x 500 cases, seed 1, {elapsed:.1f}s"
           + (f"; failing: {failed}" if failed else ""))
    assert ok


def test_criterion_2_euler_lagrange_oracle():
    rng = random.Random(2)
    checked = 0
    problems = []
    corpus = CORPUS + [(b, t) for b, t in _mechanics_family()]
    for b, text in corpus:
        L = lagrangian(b, parse_expr(text, b))
        E = euler_lagrange(L)
        comps = {name: format_expr(c, b) for name, c in zip(b.fiber, E.components)}
        null = text in NULL or b is MECH
        if null and not E.is_zero():
            problems.append(f"{text}: expected exact zero")
        try:
            gateaux_check(text, comps, b.base, b.fiber, rng, trials=3, rtol=1e-6)
        except AssertionError as exc:
            problems.append(str(exc))
        checked += 1
    ok = not problems
    record(2, ok, f"{checked} golden Lagrangians vs Gateaux oracle at 1e-6"
           + (f"; {problems}" if problems else ""))
    assert ok


def test_criterion_3_inverse_round_trip():
    start = time.perf_counter()
    lim = Limits(max_order=2, max_degree=3, base_degree=1, max_terms=3)
    bad = 0
    for case in range(100):
        rng = random.Random(3_000 + case)
        b = random_bundle(rng)
        L = random_lagrangian(rng, b, lim)
        E = euler_lagrange(L)
        if helmholtz_check(E).passes is not True:
            bad += 1
            continue
        if euler_lagrange(reconstruct_lagrangian(E)) != E:
            bad += 1
    elapsed = time.perf_counter() - start
    ok = bad == 0 and elapsed < 120
    record(3, ok, f"100 random Lagrangians, {bad} failures, {elapsed:.1f}s")
    assert ok


def test_criterion_4_triviality():
    lim = Limits(max_order=2, max_degree=2, base_degree=1, max_terms=2)
    done = bad = 0
    case = 0
    while done < 100:
        rng = random.Random(4_000 + case)
        case += 1
        b = random_bundle(rng)
        L = d_H(random_form(rng, b, 0, b.n - 1, lim))
        if L.is_zero():
            continue
        done += 1
        if not is_variationally_trivial(L) or d_H(triviality_witness(L).xi) != L:
            bad += 1
    wave = lagrangian(PLANE, parse_expr("1/2*(u_t^2 - u_x^2)", PLANE))
    particle = lagrangian(MECH, parse_expr("1/2*u_t^2", MECH))
    negatives_ok = not is_variationally_trivial(wave) and not is_variationally_trivial(particle)
    ok = bad == 0 and negatives_ok
    record(4, ok, f"{done} random d_H(xi) recovered with {bad} failures; wave/free particle non-trivial: {negatives_ok}")
    assert ok


def test_criterion_5_first_variational_formula():
    lags = [lagrangian(b, parse_expr(t, b)) for b, t in CORPUS + _mechanics_family()]
    lim = Limits(max_order=3, max_degree=3, base_degree=1, max_terms=3)
    for case in range(100):
        rng = random.Random(5_000 + case)
        lags.append(random_lagrangian(rng, random_bundle(rng), lim))
    bad = 0
    for L in lags:
        for peel in ("min", "max"):
            split = first_variational_split(L, peel)
            residual = exterior_d(L) - split.source.to_form() - d_H(split.boundary)
            bad += not residual.is_zero()
    ok = bad == 0
    record(5, ok, f"dL - delta L - d_H phi = 0 for {len(lags)} Lagrangians, both peel orders; {bad} failures")
    assert ok


def test_criterion_6_conservation():
    L = lagrangian(MECH, parse_expr("1/2*u_t^2", MECH))
    u = EvolutionaryField(MECH, (parse_expr("1", MECH),))
    J = noether_current(u, L)
    E = euler_lagrange(L)
    divergence = density(d_H(J)) + u.components[0] * E[0]
    particle_ok = divergence.is_zero() and conservation_check(u, L).is_symmetry
    bad = symmetric = 0
    for case in range(100):
        rng = random.Random(6_000 + case)
        b = random_bundle(rng)
        L = random_lagrangian(rng, b, Limits(max_order=2, max_degree=3))
        field = EvolutionaryField(b, tuple(random_expr(rng, b, Limits(max_order=1, max_degree=2))
                                           for _ in range(b.m)))
        rep = conservation_check(field, L)
        bad += not rep.identity_holds
        symmetric += rep.is_symmetry
    ok = particle_ok and bad == 0
    record(6, ok, f"free particle d_t J + u.E = 0: {particle_ok}; identity on 100 random (u, L) "
                  f"({100 - symmetric} non-symmetries), {bad} failures")
    assert ok


def test_criterion_7_cohomology_shadows():
    start = time.perf_counter()
    spec = TruncationSpec(max_jet_order=3, max_poly_degree=3, base_poly_degree=2)
    row = betti("d_H", LINE, spec).positions
    contact_row = betti("d_H", LINE, spec, k=1).positions
    column = betti("d_V", LINE, spec, s=0).positions
    variational = betti("variational", LINE, spec).positions
    kernel, contained = delta_exactness(LINE, spec)
    elapsed = time.perf_counter() - start
    checks = {
        "H0(d_H) = 1": row[0]["dim_cohomology"] == 1,
        "contact row exact": all(p["dim_cohomology"] == 0 for p in contact_row[:-1]),
        "d_V kernel at k=0 = base degree + 1": column[0]["dim_kernel"] == spec.base_poly_degree + 1,
        "d_V column exact for k>0": all(p["dim_cohomology"] == 0 for p in column[1:]),
        "variational row interior": [p["dim_cohomology"] for p in variational] == [1, 0, 0],
        "Helmholtz kernel in EL image": kernel > 0 and contained,
        "runtime": elapsed < 300,
    }
    ok = all(checks.values())
    failed = [k for k, v in checks.items() if not v]
    record(7, ok, f"n=m=1 at (3,3,2): {len(checks) - len(failed)}/{len(checks)} checks, "
                  f"Helmholtz kernel dim {kernel}, {elapsed:.1f}s" + (f"; failing {failed}" if failed else ""))
    assert ok


def _cli(*argv: str, stdin: str | None = None) -> tuple[int, str, str]:
    proc = subprocess.run([sys.executable, "-m", "varcomplex", *argv], capture_output=True, text=True, input=stdin)
    return proc.returncode, proc.stdout, proc.stderr


def test_criterion_8_cli_contract():
    runs = {
        "el": (["el", "--base", "x", "--fiber", "u", "--lagrangian", "1/2*u_x^2"], 0),
        "el-json": (["el", "--base", "t,x", "--fiber", "u", "--lagrangian", "1/2*(u_t^2-u_x^2)", "--format", "json"], 0),
        "helmholtz-fail": (["helmholtz", "--base", "x", "--fiber", "u", "--source", "u=u_x"], 1),
        "trivial-no": (["trivial", "--base", "t", "--fiber", "u", "--lagrangian", "1/2*u_t^2"], 1),
        "noether": (["noether", "--base", "t", "--fiber", "u", "--lagrangian", "1/2*u_t^2", "--field", "u=1",
                     "--format", "latex"], 0),
        "split": (["split", "--base", "x", "--fiber", "u", "--lagrangian", "1/2*u_xx^2", "--format", "json"], 0),
        "betti": (["betti", "--base", "x", "--fiber", "u", "--max-order", "2", "--max-degree", "2", "--csv"], 0),
        "props": (["props", "--seed", "1", "--cases", "100"], 0),
        "usage": (["el", "--base", "x", "--fiber", "u", "--lagrangian", "v_x"], 2),
        "bad-flag": (["el", "--nope"], 2),
    }
    problems = []
    outputs = {}
    for name, (argv, code) in runs.items():
        first, second = _cli(*argv), _cli(*argv)
        if first != second:
            problems.append(f"{name}: output differs between runs")
        if first[0] != code:
            problems.append(f"{name}: exit {first[0]} != {code}")
        outputs[name] = first[1]
    data = json.loads(outputs["el-json"])
    if source_from_record(data["source"], PLANE) != SourceForm(PLANE, (parse_expr("-u_tt + u_xx", PLANE),)):
        problems.append("el json does not round-trip")
    data = json.loads(outputs["split"])
    split = first_variational_split(lagrangian(LINE, parse_expr("1/2*u_xx^2", LINE)))
    if form_from_records(data["boundary"], LINE) != split.boundary:
        problems.append("split json does not round-trip")
    ok = not problems
    record(8, ok, f"{len(runs)} commands byte-identical with documented exit codes; JSON round trips"
           + (f"; {problems}" if problems else ""))
    assert ok


if __name__ == "__main__":
    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failures += 1
    sys.exit(1 if failures else 0)
