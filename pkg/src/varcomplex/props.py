"""Randomised differential-polynomial forms and the operator-identity battery.

Every case draws from its own ``random.Random`` seeded by ``(seed, case)``, so
the stream is reproducible and cases can be sharded across processes.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .forms import (
    Form,
    SourceForm,
    gen_dx,
    gen_dy,
    gen_theta,
    horizontalize,
    project,
)
from .grammar import format_form
from .jetcore import BASE, Bundle, Expr, jet_key
from .varops import d_H, d_V, delta, euler_lagrange, exterior_d, tau

BASES = (("x",), ("t", "x"))
FIBERS = (("u",), ("u", "v"))


@dataclass(frozen=True)
class Limits:
    max_order: int = 3
    max_degree: int = 3
    base_degree: int = 1
    max_terms: int = 2


def random_bundle(rng: random.Random, max_n: int = 2, max_m: int = 2) -> Bundle:
    return Bundle(BASES[rng.randrange(max_n)], FIBERS[rng.randrange(max_m)])


def random_coefficient(rng: random.Random) -> Fraction:
    return Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.choice([1, 1, 2, 3]))


def random_index(rng: random.Random, n: int, max_order: int) -> tuple[int, ...]:
    return tuple(sorted(rng.randrange(n) for _ in range(rng.randint(0, max_order))))


def random_monomial(rng: random.Random, bundle: Bundle, lim: Limits) -> tuple:
    powers: dict = {}
    for _ in range(rng.randint(0, lim.max_degree)):
        key = jet_key(rng.randrange(bundle.m), random_index(rng, bundle.n, lim.max_order))
        powers[key] = powers.get(key, 0) + 1
    for _ in range(rng.randint(0, lim.base_degree)):
        key = (BASE, rng.randrange(bundle.n))
        powers[key] = powers.get(key, 0) + 1
    return tuple(sorted(powers.items()))


def random_expr(rng: random.Random, bundle: Bundle, lim: Limits = Limits(), terms: int | None = None) -> Expr:
    terms = rng.randint(1, lim.max_terms) if terms is None else terms
    d: dict = {}
    for _ in range(terms):
        mono = random_monomial(rng, bundle, lim)
        d[mono] = d.get(mono, 0) + random_coefficient(rng)
    return Expr({m: c for m, c in d.items() if c})


def random_word(rng: random.Random, bundle: Bundle, k: int, s: int, lim: Limits, dy: bool = False) -> tuple:
    dxs = sorted(rng.sample(range(bundle.n), s))
    make = gen_dy if dy else gen_theta
    gens: set = set()
    while len(gens) < k:
        gens.add(make(rng.randrange(bundle.m), random_index(rng, bundle.n, lim.max_order)))
    return tuple(gen_dx(lam) for lam in dxs) + tuple(sorted(gens))


def random_form(rng: random.Random, bundle: Bundle, k: int, s: int, lim: Limits = Limits(),
                dy: bool = False) -> Form:
    pairs = []
    for _ in range(rng.randint(1, lim.max_terms)):
        pairs.append((random_expr(rng, bundle, lim), random_word(rng, bundle, k, s, lim, dy)))
    return Form.from_terms(bundle, pairs)


def random_lagrangian(rng: random.Random, bundle: Bundle, lim: Limits = Limits()) -> Form:
    return random_form(rng, bundle, 0, bundle.n, lim)


# ---------------------------------------------------------------------------
# the battery


def _zero(f: Form) -> bool:
    return f.is_zero()


IDENTITIES: dict[str, tuple[Callable, Callable[[Form], bool]]] = {}


def _identity(name: str, draw: Callable[[random.Random, Bundle, Limits], Form]):
    def register(check: Callable[[Form], bool]):
        IDENTITIES[name] = (draw, check)
        return check
    return register


def _any_degree(rng: random.Random, b: Bundle, lim: Limits) -> Form:
    return random_form(rng, b, rng.randint(0, 2), rng.randint(0, b.n), lim)


def _top(kmin: int, kmax: int):
    return lambda rng, b, lim: random_form(rng, b, rng.randint(kmin, kmax), b.n, lim)


@_identity("d^2 = 0", _any_degree)
def _dd(phi: Form) -> bool:
    return exterior_d(exterior_d(phi)).is_zero()


@_identity("d = d_H + d_V", _any_degree)
def _split(phi: Form) -> bool:
    return exterior_d(phi) == d_H(phi) + d_V(phi)


@_identity("d_H^2 = 0", _any_degree)
def _hh(phi: Form) -> bool:
    return d_H(d_H(phi)).is_zero()


@_identity("d_V^2 = 0", _any_degree)
def _vv(phi: Form) -> bool:
    return d_V(d_V(phi)).is_zero()


@_identity("d_H d_V + d_V d_H = 0", _any_degree)
def _hv(phi: Form) -> bool:
    return (d_H(d_V(phi)) + d_V(d_H(phi))).is_zero()


@_identity("tau^2 = tau", _top(1, 2))
def _tt(phi: Form) -> bool:
    t = tau(phi)
    return tau(t) == t


@_identity("tau d_H = 0", lambda rng, b, lim: random_form(rng, b, rng.randint(0, 2), b.n - 1, lim))
def _th(phi: Form) -> bool:
    return tau(d_H(phi)).is_zero()


@_identity("delta^2 = 0", _top(0, 1))
def _deldel(phi: Form) -> bool:
    return delta(delta(phi)).is_zero()


@_identity("delta tau = tau d", _top(1, 2))
def _deltau(phi: Form) -> bool:
    return delta(tau(phi)) == tau(exterior_d(phi))


@_identity("h0 d = d_H h0", lambda rng, b, lim: random_form(rng, b, rng.randint(0, 2), rng.randint(0, b.n - 1), lim, dy=True))
def _h0(phi: Form) -> bool:
    return project(exterior_d(phi), k=0) == d_H(horizontalize(phi))


@_identity("euler_lagrange = delta", _top(0, 0))
def _el(phi: Form) -> bool:
    return euler_lagrange(phi) == SourceForm.from_form(delta(phi))


def shrink(phi: Form, holds: Callable[[Form], bool]) -> Form:
    """Greedily drop monomials while the identity keeps failing."""
    changed = True
    while changed:
        changed = False
        for w, c in phi.items():
            for mono in list(c.terms):
                terms = dict(phi.terms)
                rest = dict(c.terms)
                del rest[mono]
                if rest:
                    terms[w] = Expr(rest)
                else:
                    del terms[w]
                smaller = Form(phi.bundle, terms)
                if not smaller.is_zero() and not holds(smaller):
                    phi = smaller
                    changed = True
                    break
            if changed:
                break
    return phi


@dataclass
class SuiteReport:
    seed: int
    cases: int
    results: dict[str, dict] = field(default_factory=dict)

    @property
    def all_passed(self) -> bool:
        return all(r["failed"] == 0 for r in self.results.values())

    def to_dict(self) -> dict:
        return {"seed": self.seed, "cases": self.cases, "all_passed": self.all_passed,
                "identities": self.results}

    def lines(self) -> list[str]:
        out = []
        for name, r in self.results.items():
            status = "PASS" if r["failed"] == 0 else "FAIL"
            line = f"{status}  {name:<24} {r['checked'] - r['failed']}/{r['checked']}"
            if r["counterexample"]:
                line += f"  counterexample: {r['counterexample']}"
            out.append(line)
        return out


def case_rng(seed: int, case: int) -> random.Random:
    return random.Random(seed * 1_000_003 + case)


def run_case(seed: int, case: int, limits: Limits = Limits()) -> dict[str, tuple[bool, str | None]]:
    """All identities on the forms drawn for one case."""
    rng = case_rng(seed, case)
    bundle = random_bundle(rng)
    out = {}
    for name, (draw, check) in IDENTITIES.items():
        phi = draw(rng, bundle, limits)
        if check(phi):
            out[name] = (True, None)
        else:
            small = shrink(phi, check)
            out[name] = (False, f"{bundle.base}/{bundle.fiber}: {format_form(small)}")
    return out


def _run_chunk(args: tuple[int, list[int], Limits]) -> list[dict]:
    seed, cases, limits = args
    return [run_case(seed, c, limits) for c in cases]


def property_suite(seed: int, cases: int, workers: int = 1, limits: Limits = Limits()) -> SuiteReport:
    if cases < 1:
        raise ValueError("cases must be at least 1")
    if workers > 1:
        chunks = [(seed, list(range(w, cases, workers)), limits) for w in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, chunks))
        by_case: dict[int, dict] = {}
        for (_, idx, _), res in zip(chunks, parts):
            by_case.update(zip(idx, res))
        outcomes = [by_case[c] for c in range(cases)]
    else:
        outcomes = [run_case(seed, c, limits) for c in range(cases)]
    report = SuiteReport(seed, cases)
    for name in IDENTITIES:
        failed = [o[name][1] for o in outcomes if not o[name][0]]
        report.results[name] = {"checked": cases, "failed": len(failed),
                                "counterexample": failed[0] if failed else None}
    return report
