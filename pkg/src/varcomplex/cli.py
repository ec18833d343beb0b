"""``varcomplex`` command-line front end.

Exit status: 0 success, 1 mathematical negative (Helmholtz fails, Lagrangian
not trivial, field not a symmetry, property failure, no antiderivative in the
truncation), 2 usage error.  Reports go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Callable

from .cohomlab import BettiReport, TruncationSpec, betti
from .forms import Form, horizontalize, to_contact_basis
from .grammar import format_expr, format_form
from .inverse import (
    AntiderivativeConfig,
    HelmholtzError,
    NotClosedError,
    NotExactInTruncation,
    helmholtz_check,
    is_variationally_trivial,
    reconstruct_lagrangian,
    triviality_witness,
)
from .jetcore import CoordinateError
from .problem import ProblemError, ProblemFile, parse_problem, problem_from_dict
from .props import Limits, property_suite
from .render import (
    Report,
    form_records,
    latex_expr,
    latex_form,
    latex_source,
    render,
    source_record,
    text_source,
)
from .symmetry import conservation_check
from .varops import d_H, d_V, delta, euler_lagrange, exterior_d, first_variational_split, tau

COMMANDS = ("el", "helmholtz", "trivial", "reconstruct", "noether", "split", "apply", "betti", "props")

OPERATORS: dict[str, Callable[[Form], Form]] = {
    "d": exterior_d,
    "d_H": d_H,
    "d_V": d_V,
    "tau": tau,
    "delta": delta,
    "h0": lambda phi: horizontalize(phi),
    "contact": to_contact_basis,
}


class UsageError(Exception):
    pass


def _yes(flag: bool) -> str:
    return "yes" if flag else "no"


def _opt(pf: ProblemFile, args: argparse.Namespace, name: str, default=None):
    value = getattr(args, name, None)
    if value is not None:
        return value
    return pf.options.get(name, default)


# ---------------------------------------------------------------------------
# commands


def cmd_el(pf: ProblemFile, args) -> Report:
    pf.require("lagrangian")
    E = euler_lagrange(pf.lagrangian)
    return Report("el", {"source": source_record(E)}, text_source(E), [latex_source(E)])


def cmd_helmholtz(pf: ProblemFile, args) -> Report:
    pf.require("source_form")
    res = helmholtz_check(pf.source_form)
    verdict = {True: "pass", False: "fail", None: "undecided"}[res.passes]
    text = [f"Helmholtz conditions: {verdict}"]
    latex = [rf"\text{{Helmholtz conditions: {verdict}}}"]
    if res.passes is not True:
        text.append(f"certificate: {format_form(res.certificate)}")
        latex.append(rf"\delta E = {latex_form(res.certificate)}")
    data = {"passes": res.passes, "certificate": form_records(res.certificate)}
    return Report("helmholtz", data, text, latex, 0 if res.passes else 1)


def _antiderivative_config(args) -> AntiderivativeConfig | None:
    if args.max_order is None and args.max_degree is None:
        return None
    if args.max_order is None or args.max_degree is None:
        raise UsageError("--max-order and --max-degree must be given together for trivial")
    return AntiderivativeConfig(args.max_order, args.max_degree)


def cmd_trivial(pf: ProblemFile, args) -> Report:
    pf.require("lagrangian")
    L = pf.lagrangian
    if not is_variationally_trivial(L):
        E = euler_lagrange(L)
        return Report("trivial", {"trivial": False, "source": source_record(E)},
                      ["variationally trivial: no", *text_source(E)],
                      [r"\text{not variationally trivial}", latex_source(E)], 1)
    try:
        w = triviality_witness(L, pf.closed_form, _antiderivative_config(args))
    except NotExactInTruncation as exc:
        return Report("trivial", {"trivial": True, "witness": None, **exc.to_dict()},
                      ["variationally trivial: yes", f"no witness: {exc}",
                       f"residual: {format_form(exc.residual)}"],
                      [r"\text{variationally trivial; no witness in truncation}"], 1)
    data = {"trivial": True, "witness": {"xi": form_records(w.xi), "closed_part": form_records(w.closed_part)}}
    text = ["variationally trivial: yes", f"xi = {format_form(w.xi)}",
            f"closed part = {format_form(w.closed_part)}"]
    latex = [rf"\xi = {latex_form(w.xi)}", rf"h_0\varphi = {latex_form(w.closed_part)}"]
    return Report("trivial", data, text, latex)


def cmd_reconstruct(pf: ProblemFile, args) -> Report:
    pf.require("source_form")
    try:
        L = reconstruct_lagrangian(pf.source_form)
    except HelmholtzError as exc:
        return Report("reconstruct", {"lagrangian": None, "certificate": form_records(exc.certificate)},
                      ["Helmholtz conditions: fail", f"certificate: {format_form(exc.certificate)}"],
                      [rf"\delta E = {latex_form(exc.certificate)}"], 1)
    return Report("reconstruct", {"lagrangian": form_records(L)},
                  [f"L = {format_form(L)}"], [rf"\mathcal{{L}} = {latex_form(L)}"])


def _peel(pf: ProblemFile, args) -> str:
    peel = _opt(pf, args, "peel", "min")
    if peel not in ("min", "max"):
        raise UsageError(f"peel must be 'min' or 'max', got {peel!r}")
    return peel


def cmd_noether(pf: ProblemFile, args) -> Report:
    pf.require("lagrangian", "vector_field")
    rep = conservation_check(pf.vector_field, pf.lagrangian)
    b = pf.bundle
    data = {
        "is_symmetry": rep.is_symmetry,
        "identity_holds": rep.identity_holds,
        "on_shell_divergence": format_expr(rep.on_shell_divergence, b),
        "current": form_records(rep.current),
    }
    text = [f"symmetry: {_yes(rep.is_symmetry)}", f"identity holds: {_yes(rep.identity_holds)}",
            f"J = {format_form(rep.current)}",
            f"d_H J + u.E = {format_expr(rep.on_shell_divergence, b)}"]
    latex = [rf"J_u = {latex_form(rep.current)}",
             rf"d_H J_u + u\cdot E = {latex_expr(rep.on_shell_divergence, b)}"]
    return Report("noether", data, text, latex, 0 if rep.is_symmetry else 1)


def cmd_split(pf: ProblemFile, args) -> Report:
    pf.require("lagrangian")
    sp = first_variational_split(pf.lagrangian, _peel(pf, args))
    data = {"source": source_record(sp.source), "boundary": form_records(sp.boundary)}
    text = [*text_source(sp.source), f"boundary = {format_form(sp.boundary)}"]
    latex = [rf"\delta\mathcal{{L}} = {latex_source(sp.source)}", rf"\varphi = {latex_form(sp.boundary)}"]
    return Report("split", data, text, latex)


def cmd_apply(pf: ProblemFile, args) -> Report:
    pf.require("form")
    name = _opt(pf, args, "operator")
    if name not in OPERATORS:
        raise UsageError(f"apply needs --operator in {sorted(OPERATORS)}")
    out = OPERATORS[name](pf.form)
    return Report("apply", {"operator": name, "result": form_records(out)},
                  [f"{name}(phi) = {format_form(out)}"], [latex_form(out)])


def _truncation(pf: ProblemFile, args) -> TruncationSpec:
    base = pf.truncation or TruncationSpec(3, 3, 0)
    return TruncationSpec(
        args.max_order if args.max_order is not None else base.max_jet_order,
        args.max_degree if args.max_degree is not None else base.max_poly_degree,
        args.base_degree if args.base_degree is not None else base.base_poly_degree,
    )


def _betti_latex(rep: BettiReport) -> list[str]:
    out = [r"\begin{tabular}{lrrrr}", r"position & dim & rank & kernel & cohomology \\ \hline"]
    for p in rep.positions:
        out.append(f"{p['position']} & {p['dim_domain']} & {p['rank']} & {p['dim_kernel']} & {p['dim_cohomology']} \\\\")
    out.append(r"\end{tabular}")
    return out


def cmd_betti(pf: ProblemFile, args) -> Report:
    op = _opt(pf, args, "operator", "d_H")
    if op not in ("d_H", "d_V", "variational"):
        raise UsageError(f"betti operator must be d_H, d_V or variational, got {op!r}")
    rep = betti(op, pf.bundle, _truncation(pf, args), k=_opt(pf, args, "k", 0),
                s=_opt(pf, args, "s", 0), max_k=_opt(pf, args, "max_k", 2))
    text = (rep.csv() if args.csv else rep.table()).splitlines()
    return Report("betti", rep.to_dict(), text, _betti_latex(rep))


def cmd_props(pf: ProblemFile | None, args) -> Report:
    opts = pf.options if pf is not None else {}
    seed = args.seed if args.seed is not None else opts.get("seed", 1)
    cases = args.cases if args.cases is not None else opts.get("cases", 100)
    lim = Limits(max_order=args.max_order if args.max_order is not None else 3,
                 max_degree=args.max_degree if args.max_degree is not None else 3)
    rep = property_suite(seed, cases, workers=args.workers, limits=lim)
    text = [f"seed {seed}, {cases} cases", *rep.lines(),
            "all identities hold" if rep.all_passed else "FAILURES"]
    latex = [rf"\text{{{name}: {r['checked'] - r['failed']}/{r['checked']}}}\\"
             for name, r in rep.results.items()]
    return Report("props", rep.to_dict(), text, latex, 0 if rep.all_passed else 1)


HANDLERS = {
    "el": cmd_el,
    "helmholtz": cmd_helmholtz,
    "trivial": cmd_trivial,
    "reconstruct": cmd_reconstruct,
    "noether": cmd_noether,
    "split": cmd_split,
    "apply": cmd_apply,
    "betti": cmd_betti,
    "props": cmd_props,
}


def run_command(cmd: str, pf: ProblemFile | None, args: argparse.Namespace | None = None) -> Report:
    if cmd not in HANDLERS:
        raise UsageError(f"unknown command {cmd!r}")
    args = args or build_parser().parse_args([cmd])
    if pf is None and cmd != "props":
        raise UsageError("a bundle is required: use --problem FILE or --base/--fiber")
    return HANDLERS[cmd](pf, args)


# ---------------------------------------------------------------------------
# argument handling


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="varcomplex", description="Variational bicomplex calculator.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--problem", metavar="FILE", help="JSON problem file ('-' for stdin)")
    p.add_argument("--format", choices=("text", "json", "latex"), default="text")
    p.add_argument("--seed", type=int)
    p.add_argument("--cases", type=int)
    p.add_argument("--max-order", type=int)
    p.add_argument("--max-degree", type=int)
    p.add_argument("--base-degree", type=int)
    p.add_argument("--base", help="comma-separated base coordinates, e.g. t,x")
    p.add_argument("--fiber", help="comma-separated fiber coordinates, e.g. u,v")
    p.add_argument("--lagrangian", help="Lagrangian density")
    p.add_argument("--source", action="append", metavar="NAME=EXPR", help="source-form component")
    p.add_argument("--field", action="append", metavar="NAME=EXPR", help="vector-field component")
    p.add_argument("--form", help="form in the form grammar")
    p.add_argument("--closed-form", help="closed form on Y for trivial")
    p.add_argument("--operator", help="operator for apply or betti")
    p.add_argument("--k", type=int, help="contact degree (betti d_H row)")
    p.add_argument("--s", type=int, help="horizontal degree (betti d_V column)")
    p.add_argument("--max-k", type=int)
    p.add_argument("--peel", choices=("min", "max"))
    p.add_argument("--csv", action="store_true", help="betti: one CSV row per position")
    p.add_argument("--workers", type=int, default=1, help="props: worker processes")
    return p


def _components(items: list[str], flag: str) -> dict:
    out = {}
    for item in items:
        name, sep, expr = item.partition("=")
        if not sep or not name.strip():
            raise UsageError(f"{flag} expects NAME=EXPR, got {item!r}")
        out[name.strip()] = expr
    return out


def _document(args) -> dict | None:
    doc: dict = {}
    if args.problem:
        try:
            text = sys.stdin.read() if args.problem == "-" else open(args.problem, encoding="utf-8").read()
        except OSError as exc:
            raise UsageError(f"cannot read problem file: {exc}") from None
        if not text.strip():
            raise ProblemError("schema", "empty document", "$")
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ProblemError("syntax", exc.msg, line=exc.lineno, column=exc.colno) from None
        if not isinstance(doc, dict):
            raise ProblemError("schema", "problem must be a JSON object", "$")
    if args.base or args.fiber:
        bundle = dict(doc.get("bundle") or {})
        if args.base:
            bundle["base"] = [s.strip() for s in args.base.split(",")]
        if args.fiber:
            bundle["fiber"] = [s.strip() for s in args.fiber.split(",")]
        doc["bundle"] = bundle
    for key, value in (("lagrangian", args.lagrangian), ("form", args.form), ("closed_form", args.closed_form)):
        if value is not None:
            doc[key] = value
    if args.source:
        doc["source_form"] = _components(args.source, "--source")
    if args.field:
        doc["vector_field"] = _components(args.field, "--field")
    if not doc and not args.problem:
        return None
    return doc


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        doc = _document(args)
        pf = problem_from_dict(doc) if doc is not None else None
        report = run_command(args.command, pf, args)
    except (ProblemError, UsageError, CoordinateError, NotClosedError, ValueError) as exc:
        print(f"varcomplex: error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(render(report, args.format))
    return report.exit_code


__all__ = ["main", "run_command", "build_parser", "parse_problem", "UsageError"]

if __name__ == "__main__":
    sys.exit(main())
