"""Batch command-line front end.

Subcommands: check, eval, sat, fuzz, henkin, termmodel.  Exit status is 0
when the verdict is ok, 1 when a check fails, 2 on usage or parse errors.
Reports print as key/value lines, or as a single JSON document with --json.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field

from . import fileio
from .signature import PROP, SignatureError, fresh_vars
from .syntax import ExprError, parse_expr, print_expr
from .subst import fv
from .calculus import CalculusError, check_proof, used_axioms
from .semantics import SemanticsError, evaluate, satisfies, satisfies_theory
from .henkin import (
    HenkinError, ThOracle, TermModelContext, build_term_structure,
    check_cm_expr, check_ded_sat, henkin_extend, extend_structure_for_henkin,
    default_size_bound,
)
from .gen import SUITES


@dataclass
class RunReport:
    command: str
    verdict: str = "ok"
    cases: int = 0
    failures: int = 0
    detail: str = ""
    extra: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.verdict == "ok"

    def stable(self) -> dict:
        """Everything except wall time; two runs with the same inputs and
        seed produce identical stable views."""
        return {"command": self.command, "verdict": self.verdict,
                "cases": self.cases, "failures": self.failures,
                "detail": self.detail, "extra": dict(self.extra)}

    def emit(self, as_json: bool):
        if as_json:
            doc = self.stable()
            doc["seconds"] = round(self.seconds, 3)
            print(json.dumps(doc, indent=2))
            return
        print(f"command:  {self.command}")
        print(f"verdict:  {self.verdict}")
        print(f"cases:    {self.cases}")
        print(f"failures: {self.failures}")
        if self.detail:
            print(f"detail:   {self.detail}")
        for k, v in self.extra.items():
            print(f"{k}: {v}")
        print(f"seconds:  {self.seconds:.3f}")


class UsageError(Exception):
    pass


def _load_theory(path):
    with open(path) as fh:
        return fileio.parse_theory(fh.read())


def _load_structure(path):
    with open(path) as fh:
        return fileio.parse_structure(fh.read())


def cmd_check(args) -> RunReport:
    rep = RunReport("check")
    theory = _load_theory(args.theory)
    with open(args.proof) as fh:
        proof = fileio.parse_proof(fh.read(), theory)
    rep.cases = len(proof.lines)
    result = check_proof(proof)
    if result:
        used = used_axioms(proof)
        rep.extra["conclusion"] = print_expr(proof.conclusion)
        rep.extra["used_axioms"] = [print_expr(a) for a in used]
    else:
        rep.verdict = "fail"
        rep.failures = 1
        rep.detail = f"{args.proof}:{(result.line or 0) + 1}: {result.reason}"
    return rep


def cmd_eval(args) -> RunReport:
    rep = RunReport("eval")
    s = _load_structure(args.structure)
    e = parse_expr(s.signature, args.expr)
    persp = tuple(x for x in (args.persp or "").split(",") if x)
    val = evaluate(s, e, persp)
    rep.cases = 1
    if not persp:
        rep.extra["value"] = val
    elif args.args:
        point = tuple(args.args.split(","))
        rep.extra["value"] = val.apply(point)
    else:
        rep.extra["table"] = {",".join(a): v for a, v in val.rows}
    return rep


def cmd_sat(args) -> RunReport:
    rep = RunReport("sat")
    s = _load_structure(args.structure)
    theory = _load_theory(args.theory)
    rep.cases = len(theory.axioms)
    for i, a in enumerate(theory.axioms):
        if not satisfies(s, a):
            rep.verdict = "fail"
            rep.failures += 1
            if not rep.detail:
                rep.detail = f"axiom {i} not satisfied: {print_expr(a)}"
    return rep


def cmd_fuzz(args) -> RunReport:
    rep = RunReport(f"fuzz {args.suite}")
    suite = SUITES.get(args.suite)
    if suite is None:
        raise UsageError(f"unknown suite {args.suite!r}; "
                         f"choose from {', '.join(sorted(SUITES))}")
    result = suite(args.n, args.seed)
    rep.cases = result.cases
    rep.failures = result.failures
    rep.detail = result.first_detail
    rep.extra["seed"] = args.seed
    if result.failures:
        rep.verdict = "fail"
    return rep


def cmd_henkin(args) -> RunReport:
    rep = RunReport("henkin")
    theory = _load_theory(args.theory)
    depth = args.depth if args.depth is not None else default_size_bound()
    ext = henkin_extend(theory, args.levels, depth)
    out = args.out or os.path.splitext(args.theory)[0] + ".henkin.flt"
    fileio.save(out, fileio.print_theory(ext.theory))
    reparsed = fileio.parse_theory(fileio.print_theory(ext.theory))
    rep.cases = len(ext.constants)
    rep.extra["levels"] = args.levels
    rep.extra["depth"] = depth
    rep.extra["constants"] = len(ext.constants)
    rep.extra["axioms"] = len(ext.theory.axioms)
    rep.extra["out"] = out
    if reparsed != ext.theory:
        rep.verdict = "fail"
        rep.detail = "emitted theory did not re-parse identically"
    return rep


def cmd_termmodel(args) -> RunReport:
    rep = RunReport("termmodel")
    s = _load_structure(args.structure)
    sig = s.signature
    if not s.full:
        raise UsageError("oracle source must be a full structure")
    constants = {name for name, spec in sig.user_ops().items() if spec.arity == 0}
    for sort, atoms in s.carriers.items():
        if sort == PROP:
            continue
        named = {s.interp[c] for c in constants if sig.opsig(c).result == sort}
        unnamed = [a for a in atoms if a not in named]
        if unnamed:
            raise UsageError(
                f"element-not-named: {unnamed[0]!r} of sort {sort!r} is not "
                "the value of any constant")
    depth = args.depth if args.depth is not None else default_size_bound()
    ctx = TermModelContext(sig, ThOracle(s), size_bound=depth)
    tm = build_term_structure(ctx)

    failures = 0
    cases = 0
    detail = ""
    for sort in sorted(sig.sorts):
        scopes = [()]
        for vs in sorted(sig.var_sorts):
            scopes.append(fresh_vars(sig, (vs,), ()))
        for scope in scopes:
            for e in ctx.scoped(sort, scope):
                xs = tuple(x for x in scope if x in fv(e))
                cases += 1
                v = check_cm_expr(tm, e, xs)
                if not v:
                    failures += 1
                    detail = detail or f"cm_expr: {v.detail}"
    cm_cases = cases
    for phi in ctx.closed(PROP):
        cases += 1
        v = check_ded_sat(tm, phi)
        if not v:
            failures += 1
            detail = detail or f"ded=sat: {v.detail}"

    out = args.out or os.path.splitext(args.structure)[0] + ".termmodel.fls"
    text = fileio.print_structure(tm.structure)
    fileio.save(out, text)
    reparsed = fileio.parse_structure(text)
    if fileio.print_structure(reparsed) != text:
        failures += 1
        detail = detail or "emitted structure did not re-parse identically"

    rep.cases = cases
    rep.failures = failures
    rep.detail = detail
    rep.extra["depth"] = depth
    rep.extra["cm_expr_cases"] = cm_cases
    rep.extra["ded_sat_cases"] = cases - cm_cases
    rep.extra["carriers"] = {srt: len(a) for srt, a in tm.structure.carriers.items()}
    rep.extra["out"] = out
    if failures:
        rep.verdict = "fail"
    return rep


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="funlog")
    ap.add_argument("--json", action="store_true",
                    help="emit the report as a single JSON document")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("check", help="check a proof file against a theory")
    p.add_argument("theory")
    p.add_argument("proof")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("eval", help="evaluate an expression in a structure")
    p.add_argument("structure")
    p.add_argument("--expr", required=True)
    p.add_argument("--persp", default="",
                   help="comma-separated perspective variables")
    p.add_argument("--args", default="",
                   help="carrier elements to apply the resulting table to")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("sat", help="check a structure against a theory")
    p.add_argument("structure")
    p.add_argument("theory")
    p.set_defaults(fn=cmd_sat)

    p = sub.add_parser("fuzz", help="run a randomized property suite")
    p.add_argument("suite")
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_fuzz)

    p = sub.add_parser("henkin", help="emit a witness-saturated theory")
    p.add_argument("theory")
    p.add_argument("--levels", type=int, default=1)
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_henkin)

    p = sub.add_parser("termmodel",
                       help="build and audit the term structure of a model")
    p.add_argument("structure")
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_termmodel)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    t0 = time.time()
    try:
        rep = args.fn(args)
    except (UsageError, fileio.FormatError, ExprError, OSError,
            SignatureError, CalculusError, SemanticsError, HenkinError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    rep.seconds = time.time() - t0
    rep.emit(args.json)
    return 0 if rep.ok else 1


if __name__ == "__main__":
    sys.exit(main())
