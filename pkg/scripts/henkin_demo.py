#!/usr/bin/env python3
"""Witness-constant saturation demo.

Extends a toy theory by one level of special constants, interprets the new
constants over the source structure, and verifies the extended structure
models the extended theory.  Then runs the bounded completion pass against
the structure's theory-oracle.
"""
import argparse

from funlog.signature import PROP, make_signature
from funlog.syntax import parse_expr
from funlog.calculus import Theory, is_consistent_up_to
from funlog.semantics import make_full_structure, satisfies_theory, restrict_structure
from funlog.henkin import (
    ThOracle, henkin_extend, extend_structure_for_henkin, saturate_bounded,
)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--levels", type=int, default=1)
    ap.add_argument("--depth", type=int, default=3)
    args = ap.parse_args()

    sig = make_signature(["a"], ["a"], {"ca": "a", "cb": "a", "f": "(a)a"})
    m = make_full_structure(
        sig, {"a": ("0", "1")},
        {"ca": "0", "cb": "1", "f": lambda v: "1" if v == "0" else "0"})
    theory = Theory(sig, (parse_expr(sig, "eq_a(f(ca),cb)"),))

    ext = henkin_extend(theory, args.levels, args.depth)
    print(f"levels={args.levels} depth={args.depth}: "
          f"{len(ext.constants)} witness constants, "
          f"{len(ext.theory.axioms)} axioms")

    big = extend_structure_for_henkin(m, ext)
    print("extended structure models extended theory:",
          satisfies_theory(big, ext.theory))
    print("reduct still models the original theory:",
          satisfies_theory(restrict_structure(big, sig), theory))

    oracle = ThOracle(big)
    print("consistent up to the oracle:",
          is_consistent_up_to(ext.theory, oracle))
    from funlog.henkin import enumerate_exprs
    candidates = enumerate_exprs(ext.theory.signature, PROP, (), 3)
    completed = saturate_bounded(ext.theory, candidates, oracle)
    print(f"bounded completion over {len(candidates)} candidates: "
          f"{len(completed.axioms)} axioms")


if __name__ == "__main__":
    main()
