"""Command-line front end.

Exit codes: 0 success or pass, 1 negative verdict on well-formed input,
2 input error, 3 search exhausted.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .arith import parse_rational
from .errors import (
    BudgetExceeded,
    DegenerateSplit,
    FactorizationError,
    InvalidInput,
    K3LGError,
    MissingPlace,
    NotRepresentable,
    OutOfRange,
    SearchExhausted,
)
from .jsonio import (
    digest,
    lattice_from_dict,
    period_from_dict,
    period_to_dict,
    plain,
    quadspace_from_dict,
    read_json,
    sublattice_to_dict,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_EXHAUSTED = 0, 1, 2, 3


class Outcome:
    def __init__(self, verdicts=None, payload=None, warnings=None, steps=None, code=EXIT_OK):
        self.verdicts = verdicts or {}
        self.payload = payload or {}
        self.warnings = warnings or []
        self.steps = steps or []
        self.code = code


def _coeffs(text: str) -> list:
    try:
        return [parse_rational(t) for t in text.split(",")]
    except InvalidInput as exc:
        raise InvalidInput(f"bad coefficient list {text!r}: {exc}") from None


def _k3_space():
    from .k3lattice import k3_gram

    return k3_gram().to_quadspace()


# -- quadform -----------------------------------------------------------------


def cmd_qf_invariants(args, inputs):
    from .quadform import INF, diagonalize, disc_class, relevant_primes, signature, witt_index_local
    from .quadform import _hasse_of_entries

    V = quadspace_from_dict(inputs["input"])
    e = diagonalize(V).entries
    places = [INF] + relevant_primes(V)
    return Outcome(payload={
        "n": V.n,
        "det": V.det(),
        "signature": list(signature(V)),
        "disc_class": disc_class(V),
        "diagonal": e,
        "hasse": {str(v): _hasse_of_entries(e, v) for v in places},
        "witt_index": {str(v): witt_index_local(V, v) for v in places},
    })


def cmd_qf_isometric(args, inputs):
    from .quadform import isometric_over_Q

    ok = isometric_over_Q(quadspace_from_dict(inputs["a"]), quadspace_from_dict(inputs["b"]))
    return Outcome({"isometric": ok}, code=EXIT_OK if ok else EXIT_FAIL)


def _target(inputs):
    return quadspace_from_dict(inputs["ambient"]) if "ambient" in inputs else _k3_space()


def cmd_qf_represents(args, inputs):
    from .quadform import local_obstructions

    obs = local_obstructions(quadspace_from_dict(inputs["input"]), _target(inputs))
    return Outcome({"represents": not obs}, {"obstructions": obs}, code=EXIT_FAIL if obs else EXIT_OK)


def cmd_qf_embed(args, inputs):
    from .quadform import embed_space

    B = embed_space(quadspace_from_dict(inputs["input"]), _target(inputs), args.height, args.seed)
    return Outcome({"embedded": True, "gram_check": "exact"}, {"B": B})


# -- lattices -------------------------------------------------------------------


def _ambient_lattice(inputs):
    from .k3lattice import k3_gram

    return lattice_from_dict(inputs["ambient"]) if "ambient" in inputs else k3_gram()


def cmd_lattice_saturate(args, inputs):
    from .k3lattice import saturate

    data = inputs["input"]
    span = data.get("span") if isinstance(data, dict) else None
    if span is None:
        raise InvalidInput('expected {"span": [[...], ...]}')
    T = saturate(_ambient_lattice(inputs), [[parse_rational(x) for x in r] for r in span])
    return Outcome({"primitive": True}, sublattice_to_dict(T))


def cmd_lattice_genus(args, inputs):
    from .k3lattice import genus_summary

    return Outcome(payload=genus_summary(lattice_from_dict(inputs["input"])).as_dict())


def cmd_lattice_discgroup(args, inputs):
    from .k3lattice import disc_group

    return Outcome(payload={"elementary_divisors": disc_group(lattice_from_dict(inputs["input"]))})


def cmd_lattice_same_class(args, inputs):
    from .k3lattice import same_rational_class

    ok = same_rational_class(lattice_from_dict(inputs["a"]), lattice_from_dict(inputs["b"]))
    return Outcome({"same_rational_class": ok}, code=EXIT_OK if ok else EXIT_FAIL)


# -- hodge ----------------------------------------------------------------------


def _period(inputs):
    if "period" in inputs:
        return period_from_dict(inputs["period"])
    data = inputs["input"]
    if isinstance(data, dict) and "period" in data:
        return period_from_dict(data["period"])
    return None


def cmd_hodge_validate(args, inputs):
    from .hodge import validate_k3_type

    w = _period(inputs)
    if w is None:
        raise InvalidInput("a period is required (-p FILE or a 'period' key)")
    r = validate_k3_type(quadspace_from_dict(inputs["input"]), w)
    verdicts = {
        "signature_ok": r.signature_ok,
        "isotropy_ok": r.isotropy_ok,
        "positivity_ok": r.positivity_ok,
        "irreducible": r.irreducible,
    }
    payload = {"algebraic_kernel": r.algebraic_kernel, "rho_implied": r.rho_implied}
    return Outcome(verdicts, payload, code=EXIT_OK if r.valid else EXIT_FAIL)


def cmd_hodge_split(args, inputs):
    from .hodge import transcendental_split

    w = _period(inputs)
    if w is None:
        raise InvalidInput("a period is required (-p FILE or a 'period' key)")
    s = transcendental_split(quadspace_from_dict(inputs["input"]), w)
    return Outcome({"split": True}, {
        "algebraic_basis": s.algebraic_basis,
        "algebraic_gram": s.algebraic.gram if s.algebraic else [],
        "transcendental_basis": s.transcendental_basis,
        "transcendental_gram": s.transcendental.gram,
        "period": period_to_dict(s.period),
    })


# -- pipeline -------------------------------------------------------------------


def cmd_prop32_run(args, inputs):
    from .pipeline import prop32_run

    V = quadspace_from_dict(inputs["input"])
    res = prop32_run(V, _period(inputs), args.height, args.diagnose, args.seed)
    payload = {"rho": res.rho, "label": res.label, "rational_class_tag": res.rational_class_tag}
    if res.split:
        payload["split"] = res.split
    if res.diagnosis is not None:
        payload["diagnosis"] = res.diagnosis
        code = EXIT_OK if res.diagnosis["representable"] else EXIT_FAIL
        return Outcome({"representable": res.diagnosis["representable"]}, payload, res.warnings,
                       res.paper_steps, code)
    payload.update({
        "B": res.embedding,
        "T": sublattice_to_dict(res.T),
        "genus": res.genus.as_dict(),
    })
    if res.period_in_T is not None:
        payload["period_in_T"] = period_to_dict(res.period_in_T)
    return Outcome({"embedded": True, "primitive": True}, payload, res.warnings, res.paper_steps)


def _place_arg(text: str):
    if "," in text:
        p, f = text.split(",", 1)
        return int(p), int(f)
    return text


def cmd_thm13_precheck(args, inputs):
    from .compat import system_from_dict
    from .pipeline import theorem13_precheck

    s = system_from_dict(inputs["input"])
    r = theorem13_precheck(s, args.rho, _place_arg(args.place), args.ell)
    ok = r.dim_ok and r.condition3.get("pass", False)
    return Outcome(
        {"dim_ok": r.dim_ok, "condition1": r.condition1, "condition2": r.condition2,
         "condition3": r.condition3.get("pass", False)},
        {"condition3": r.condition3, "notes": r.notes},
        code=EXIT_OK if ok else EXIT_FAIL,
    )


# -- compat ---------------------------------------------------------------------


def cmd_compat_check(args, inputs):
    from .compat import check_weak_compatibility, system_from_dict

    rep = check_weak_compatibility(system_from_dict(inputs["input"]))
    return Outcome({"compatible": rep["ok"]}, rep, code=EXIT_OK if rep["ok"] else EXIT_FAIL)


def cmd_compat_weil(args, inputs):
    from .compat import weil_weight_check

    rep = weil_weight_check(_coeffs(args.coeffs), args.q)
    return Outcome({"weight_two": rep["ok"]}, rep, code=EXIT_OK if rep["ok"] else EXIT_FAIL)


def cmd_compat_polygon(args, inputs):
    from .compat import newton_polygon, newton_vs_hodge

    P = _coeffs(args.coeffs)
    N = newton_polygon(P, args.p, args.f)
    payload = {"newton_vertices": [list(v) for v in N.vertices], "newton_slopes": N.slopes()}
    if args.rho is None:
        return Outcome(payload=payload)
    v = newton_vs_hodge(P, args.p, args.f, args.rho)
    payload["comparison"] = v
    return Outcome({"newton_above_hodge": v["pass"]}, payload, code=EXIT_OK if v["pass"] else EXIT_FAIL)


def cmd_compat_cyclotomic(args, inputs):
    from .compat import cyclotomic_algebraic_bound

    bound, ms = cyclotomic_algebraic_bound(_coeffs(args.coeffs), args.q, args.m_max)
    return Outcome(payload={"bound": bound, "m": ms})


def cmd_compat_irred(args, inputs):
    from .compat import irreducibility_certificate

    rep = irreducibility_certificate(_coeffs(args.coeffs))
    return Outcome({"verdict": rep["verdict"]}, rep)


def cmd_count_quartic(args, inputs):
    from .compat import count_points_diagonal_quartic

    a = [int(parse_rational(t)) for t in args.coeffs.split(",")]
    rep = count_points_diagonal_quartic(a, args.p, args.k, args.workers)
    return Outcome(payload=rep, warnings=rep["warnings"])


def cmd_selftest(args, inputs):
    from .acceptance import run_all

    only = None if not args.only else {int(t) for t in args.only.split(",")}
    results = run_all(only)
    for r in results:
        print(r.line(), file=sys.stderr)
    ok = all(r.passed for r in results)
    return Outcome(
        {f"criterion_{r.number}": r.passed for r in results},
        {"results": [{"number": r.number, "name": r.name, "passed": r.passed, "detail": r.detail} for r in results]},
        code=EXIT_OK if ok else EXIT_FAIL,
    )


# -- parser ---------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="k3lg", description="Quadratic spaces, K3 lattice embeddings and Frobenius data.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--output", choices=("json", "text"), default="json")
    groups = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def sub(group, name, func, files=(), **kw):
        p = group.add_parser(name, **kw)
        for flag, dest, required in files:
            p.add_argument(*flag, dest=dest, required=required, metavar="FILE")
        p.set_defaults(func=func, files=[dest for _, dest, _ in files])
        p.add_argument("--output", choices=("json", "text"), default=argparse.SUPPRESS)
        return p

    inp = (("-i", "--input"), "input", True)
    amb = (("-w", "--ambient"), "ambient", False)
    pair = [(("-a",), "a", True), (("-b",), "b", True)]

    qf = groups.add_parser("qf").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    sub(qf, "invariants", cmd_qf_invariants, [inp])
    sub(qf, "isometric", cmd_qf_isometric, pair)
    sub(qf, "represents", cmd_qf_represents, [inp, amb])
    p = sub(qf, "embed", cmd_qf_embed, [inp, amb])
    p.add_argument("--height", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)

    lat = groups.add_parser("lattice").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    sub(lat, "saturate", cmd_lattice_saturate, [inp, (("--ambient",), "ambient", False)])
    sub(lat, "genus", cmd_lattice_genus, [inp])
    sub(lat, "discgroup", cmd_lattice_discgroup, [inp])
    sub(lat, "same-class", cmd_lattice_same_class, pair)

    per = (("-p", "--period"), "period", False)
    hod = groups.add_parser("hodge").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    sub(hod, "validate", cmd_hodge_validate, [inp, per])
    sub(hod, "split", cmd_hodge_split, [inp, per])

    pr = groups.add_parser("prop32").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    p = sub(pr, "run", cmd_prop32_run, [inp, per])
    p.add_argument("--height", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--diagnose", action="store_true")

    th = groups.add_parser("thm13").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    p = sub(th, "precheck", cmd_thm13_precheck, [inp])
    p.add_argument("--rho", type=int, required=True)
    p.add_argument("--place", required=True, help="place label or p,f")
    p.add_argument("--ell", type=int, required=True)

    co = groups.add_parser("compat").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    sub(co, "check", cmd_compat_check, [inp])
    p = sub(co, "weil", cmd_compat_weil)
    p.add_argument("--coeffs", required=True)
    p.add_argument("-q", type=int, required=True)
    p = sub(co, "polygon", cmd_compat_polygon)
    p.add_argument("--coeffs", required=True)
    p.add_argument("-p", type=int, required=True)
    p.add_argument("-f", type=int, default=1)
    p.add_argument("--rho", type=int)
    p = sub(co, "cyclotomic", cmd_compat_cyclotomic)
    p.add_argument("--coeffs", required=True)
    p.add_argument("-q", type=int, required=True)
    p.add_argument("--m-max", type=int, default=66)
    p = sub(co, "irred", cmd_compat_irred)
    p.add_argument("--coeffs", required=True)

    cnt = groups.add_parser("count").add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    p = sub(cnt, "quartic", cmd_count_quartic)
    p.add_argument("--coeffs", required=True)
    p.add_argument("-p", type=int, required=True)
    p.add_argument("-k", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)

    p = groups.add_parser("selftest")
    p.set_defaults(func=cmd_selftest, files=[])
    p.add_argument("--only", help="comma-separated criterion numbers")
    p.add_argument("--output", choices=("json", "text"), default=argparse.SUPPRESS)
    return parser


def _render_text(report: dict) -> str:
    lines = []

    def walk(prefix, value):
        if isinstance(value, dict) and value:
            for k in sorted(value):
                walk(f"{prefix}.{k}" if prefix else str(k), value[k])
        else:
            lines.append(f"{prefix}: {json.dumps(value) if isinstance(value, (list, dict)) else value}")

    walk("", report)
    return "\n".join(lines)


def _emit(report: dict, fmt: str):
    text = _render_text(report) if fmt == "text" else json.dumps(report, sort_keys=True, indent=2)
    print(text)


def _error_code(exc: Exception) -> int:
    if isinstance(exc, SearchExhausted):
        return EXIT_EXHAUSTED
    if isinstance(exc, (NotRepresentable, DegenerateSplit)):
        return EXIT_FAIL
    if isinstance(exc, (InvalidInput, OutOfRange, MissingPlace, BudgetExceeded, FactorizationError)):
        return EXIT_INPUT
    return EXIT_FAIL


def dispatch(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    command = args.group if args.group == "selftest" else f"{args.group} {args.cmd}"
    report = {"command": command, "verdicts": {}, "warnings": [], "paper_steps": [], "payload": {}}
    try:
        inputs = {dest: read_json(getattr(args, dest)) for dest in args.files if getattr(args, dest, None)}
        flags = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "files", "output")}
        report["inputs_digest"] = digest({"files": inputs, "flags": flags})
        out = args.func(args, inputs)
        report.update(verdicts=out.verdicts, warnings=out.warnings, paper_steps=out.steps,
                      payload=out.payload)
        code = out.code
    except K3LGError as exc:
        code = _error_code(exc)
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        for attr in ("place", "invariants", "height_bound", "entry"):
            if getattr(exc, attr, None) is not None:
                report["error"][attr] = getattr(exc, attr)
        print(f"k3lg: {type(exc).__name__}: {exc}", file=sys.stderr)
    report["exit_code"] = code
    _emit(plain(report), args.output)
    return code


def main(argv=None):
    raise SystemExit(dispatch(argv))


if __name__ == "__main__":
    main()
