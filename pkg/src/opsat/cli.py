"""Command line front end.

Every command prints one JSON report on standard output.  Exit status:
0 success / SAT / valid, 1 UNSAT / invalid witness / no gap, 2 input
error, 3 a size cap was exceeded.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from . import classify, closure, contextuality, gadget, gallery, solve
from .errors import CapExceeded, InputError, OpsatError, VerificationError
from .fourier import fmt_fraction, indicator_poly
from .matrix import assignment_from_json, operator_value, validate_assignment
from .model import ConstraintLanguage, Instance, cube, dumps, instance_from_json, language_from_json, load_json

SCHEMA = "opsat-report/1"

EXIT_OK, EXIT_NO, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


def _read(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}", code="io") from None
    return load_json(text)


def _payload(doc, *keys):
    """Unwrap the payload of one of our own reports, so reports can be fed back in."""
    if isinstance(doc, dict) and doc.get("schema") == SCHEMA:
        for k in keys:
            if k in doc:
                return doc[k]
        raise InputError(f"report carries none of {', '.join(keys)}", code="malformed")
    return doc


def _assignment(path: str):
    return assignment_from_json(_payload(_read(path), "operators", "model"), path)


def _hypergraph(path: str):
    return contextuality.hypergraph_from_json(_payload(_read(path), "hypergraph"))


def _language(path: str) -> ConstraintLanguage:
    doc = _read(path)
    if not isinstance(doc, dict) or "language" not in doc:
        raise InputError("language file needs a top-level 'language' object", code="malformed", context=path)
    return language_from_json(doc["language"])


def _instance(path: str) -> Instance:
    return instance_from_json(_payload(_read(path), "instance"))


def _report(command: str, verdict: str, **fields) -> dict:
    out = {"schema": SCHEMA, "command": command, "verdict": verdict}
    out.update(fields)
    return out


def _tok(x: int) -> str:
    return "+1" if x == 1 else "-1"


def _lit(lit) -> str:
    v, s = lit
    return str(v) if s == 1 else f"~{v}"


def _clause(c) -> list[str]:
    return [_lit(l) for l in c]


# ---------------------------------------------------------------- commands

def cmd_classify(args) -> tuple[int, dict]:
    lang = _language(args.language)
    v = classify.gap_verdict(lang)
    rep = _report("classify", v.kind, flags=v.flags.to_json(), statements=list(v.statements),
                  **classify.clone_report(lang))
    return EXIT_OK, rep


def _solve_certificate(method: str, res, names) -> dict:
    if method == "2sat":
        clauses, cert = res.certificate
        if cert.empty_clause is not None:
            return {"empty_clause": cert.empty_clause, "clauses": [_clause(c) for c in clauses]}
        return {
            "variable": cert.variable,
            "path_to_negation": [_lit(l) for l in cert.path_to_neg],
            "path_back": [_lit(l) for l in cert.path_to_pos],
            "clauses": [_clause(c) for c in clauses],
        }
    if method in ("horn", "dualhorn"):
        clauses, steps = res.certificate
        return {
            "clauses": [_clause(c) for c in clauses],
            "derivation": [
                {"clause": _clause(st.clause),
                 "from": (["input", st.source[1]] if st.source[0] == "input" else list(st.source))}
                for st in steps
            ],
        }
    if method == "gf2":
        sys_, rows = res.certificate
        return {
            "rows": list(rows),
            "equations": [{"vars": [names[i] for i in sorted(sys_.rows[k][0])], "rhs": _tok(sys_.rows[k][1])}
                          for k in rows],
        }
    return {}


def cmd_solve(args) -> tuple[int, dict]:
    inst = _instance(args.instance)
    method = args.method
    if method == "brute":
        value, witness = solve.solve_brute(inst)
        verdict = "SAT" if value == 1 else "UNSAT"
        rep = _report("solve", verdict, method=method, value=fmt_fraction(value),
                      witness={v: _tok(x) for v, x in witness.items()})
        return (EXIT_OK if value == 1 else EXIT_NO), rep
    res = solve.solve_instance(inst, method)
    if res.sat:
        return EXIT_OK, _report("solve", "SAT", method=method, witness={v: _tok(x) for v, x in res.witness.items()})
    rep = _report("solve", "UNSAT", method=method, certificate=_solve_certificate(method, res, inst.variables))
    return EXIT_NO, rep


def cmd_verify(args) -> tuple[int, dict]:
    inst = _instance(args.instance)
    f = _assignment(args.operators)
    report = validate_assignment(f, inst)
    if not report.ok:
        return EXIT_NO, _report("verify", "invalid", dim=f.dim, validation=report.to_json())
    value = operator_value(f, inst)
    verdict = "satisfying" if value == 1 else "not-satisfying"
    rep = _report("verify", verdict, dim=f.dim, value=fmt_fraction(value), validation=report.to_json())
    return (EXIT_OK if value == 1 else EXIT_NO), rep


def cmd_transform(args) -> tuple[int, dict]:
    lang = _language(args.language)
    if args.relation not in lang:
        raise InputError(f"unknown relation {args.relation!r}", code="unknown_relation")
    poly = indicator_poly(lang[args.relation])
    return EXIT_OK, _report("transform", "ok", relation=args.relation, polynomial=poly.to_json())


def _defs(path: str, inst: Instance) -> gadget.PpDefinitionSet:
    return gadget.definitions_from_json(_read(path), inst.language)


def cmd_reduce(args) -> tuple[int, dict]:
    inst = _instance(args.instance)
    defs = _defs(args.defs, inst)
    out = gadget.build_J_hat(inst, defs) if args.extended else gadget.build_J(inst, defs)
    return EXIT_OK, _report("reduce", "ok", extended=out.extended, reduction=out.to_json())


def cmd_lift(args) -> tuple[int, dict]:
    inst = _instance(args.instance)
    defs = _defs(args.defs, inst)
    f = _assignment(args.operators)
    out = gadget.build_J_hat(inst, defs) if args.extended else gadget.build_J(inst, defs)
    report = validate_assignment(f, inst)
    if not report.ok or operator_value(f, inst) != 1:
        return EXIT_NO, _report("lift", "not-satisfying", validation=report.to_json())
    g = gadget.lift(f, inst, defs, out)
    rep = _report("lift", "ok", extended=out.extended, dim=g.dim,
                  value=fmt_fraction(operator_value(g, out.instance)),
                  block_commuting=gadget.block_commutes(g, out.blocks),
                  reduction=out.to_json(), operators=g.to_json())
    return EXIT_OK, rep


def _operation(spec: str) -> classify.BooleanOperation:
    if spec in classify.BUILTINS or spec.startswith("proj"):
        return classify.builtin(spec)
    doc = _read(spec)
    if not isinstance(doc, dict) or "arity" not in doc or "outputs" not in doc:
        raise InputError("operation file needs 'arity' and 'outputs'", code="malformed", context=spec)
    m, outs = doc["arity"], doc["outputs"]
    if not isinstance(m, int) or m < 1 or not isinstance(outs, list) or len(outs) != 2 ** m:
        raise InputError("operation table has the wrong size", code="arity_mismatch", context=spec)
    try:
        return classify.BooleanOperation(m, dict(zip(cube(m), outs)), name=Path(spec).stem)
    except ValueError as exc:
        raise InputError(str(exc), code="invalid_value", context=spec) from None


def cmd_closure(args) -> tuple[int, dict]:
    f = _operation(args.op)
    assignments = [_assignment(p) for p in args.assignments]
    rel = None
    if args.relation:
        if not args.language:
            raise InputError("--relation needs --language", code="usage")
        lang = _language(args.language)
        if args.relation not in lang:
            raise InputError(f"unknown relation {args.relation!r}", code="unknown_relation")
        rel = lang[args.relation]
    names = list(assignments[0].assign) if assignments else []
    out = closure.apply_closure_assignments(f, assignments, rel, names)
    return EXIT_OK, _report("closure", "ok", operation=f.name or args.op, dim=out.dim,
                            relation_preserved=(None if rel is None else True), operators=out.to_json())


def cmd_scenario(args) -> tuple[int, dict]:
    if args.from_3sat:
        h = contextuality.threesat_to_scenario(_instance(args.from_3sat))
        return EXIT_OK, _report("scenario", "ok", hypergraph=h.to_json())
    if args.decide_2:
        h = _hypergraph(args.decide_2)
        res = contextuality.two_allows_decide(h)
        if res.allowed:
            return EXIT_OK, _report("scenario", "allowed", model=res.model.to_json())
        c = res.certificate
        cert = ({"empty_clause": c.empty_clause} if c.empty_clause is not None else
                {"variable": c.variable, "path_to_negation": [_lit(l) for l in c.path_to_neg],
                 "path_back": [_lit(l) for l in c.path_to_pos]})
        cert["clauses"] = [_clause(cl) for cl in res.clauses]
        return EXIT_NO, _report("scenario", "not-allowed", certificate=cert)
    if args.search_d1:
        h = _hypergraph(args.search_d1)
        labels = contextuality.find_d1_model(h)
        if labels is None:
            return EXIT_NO, _report("scenario", "no-d1-model")
        return EXIT_OK, _report("scenario", "d1-model", model=contextuality.labelling_model(h, labels).to_json())
    h_path, p_path = args.verify
    h = _hypergraph(h_path)
    p = _assignment(p_path)
    rep = contextuality.verify_quantum_model(h, p)
    return (EXIT_OK if rep.ok else EXIT_NO), _report("scenario", "valid" if rep.ok else "invalid",
                                                      dim=p.dim, report=rep.to_json())


def cmd_mermin(args) -> tuple[int, dict | str]:
    if args.emit == "instance":
        return EXIT_OK, gallery.mermin_instance().to_json()
    if args.emit == "witness":
        return EXIT_OK, gallery.mermin_witness().to_json()
    cert = gallery.mermin_certificate()
    gf2 = solve.solve_instance(cert.instance, "gf2")
    rep = _report("mermin", "gap-of-the-first-kind", certificate=cert.to_json(),
                  parity_refutation=list(gf2.certificate[1]),
                  ordinary_product=closure.ordinary_product_counterexample())
    return EXIT_OK, rep


# ---------------------------------------------------------------- wiring

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="opsat", description="Exact operator-assignment satisfiability toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("classify", help="Schaefer flags, minimal clones and gap verdict of a language")
    s.add_argument("--language", required=True)
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("solve", help="decide Boolean satisfiability")
    s.add_argument("--instance", required=True)
    s.add_argument("--method", required=True, choices=["brute", "2sat", "horn", "dualhorn", "gf2"])
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("verify", help="check an operator assignment against an instance")
    s.add_argument("--instance", required=True)
    s.add_argument("--operators", required=True)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("transform", help="indicator polynomial of a relation")
    s.add_argument("--relation", required=True)
    s.add_argument("--language", required=True)
    s.set_defaults(func=cmd_transform)

    s = sub.add_parser("reduce", help="gadget reduction through pp-definitions")
    s.add_argument("--instance", required=True)
    s.add_argument("--defs", required=True)
    s.add_argument("--extended", action="store_true")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("lift", help="lift a satisfying operator assignment through a reduction")
    s.add_argument("--instance", required=True)
    s.add_argument("--defs", required=True)
    s.add_argument("--operators", required=True)
    s.add_argument("--extended", action="store_true")
    s.set_defaults(func=cmd_lift)

    s = sub.add_parser("closure", help="Kronecker closure of operator assignments")
    s.add_argument("--op", required=True, help="built-in name or operation table file")
    s.add_argument("--assignments", required=True, nargs="+")
    s.add_argument("--relation")
    s.add_argument("--language")
    s.set_defaults(func=cmd_closure)

    s = sub.add_parser("scenario", help="contextuality scenarios")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--from-3sat", metavar="I.json")
    g.add_argument("--decide-2", metavar="H.json")
    g.add_argument("--search-d1", metavar="H.json")
    g.add_argument("--verify", nargs=2, metavar=("H.json", "P.json"))
    s.set_defaults(func=cmd_scenario)

    s = sub.add_parser("mermin", help="emit the magic-square instance, witness or gap report")
    s.add_argument("--emit", required=True, choices=["instance", "witness", "report"])
    s.set_defaults(func=cmd_mermin)
    return p


def _error_report(exc: OpsatError, command: str | None) -> dict:
    err = {"code": exc.code, "message": str(exc.args[0]) if exc.args else ""}
    if exc.context:
        err["context"] = exc.context
    return {"schema": SCHEMA, "command": command, "verdict": "error", "error": err}


def run(argv: Sequence[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        code, rep = args.func(args)
    except CapExceeded as exc:
        code, rep = EXIT_CAP, _error_report(exc, args.command)
    except VerificationError as exc:
        code, rep = EXIT_NO, _error_report(exc, args.command)
    except OpsatError as exc:
        code, rep = EXIT_INPUT, _error_report(exc, args.command)
    stdout.write(dumps(rep))
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
