import random

import pytest

from funlog.signature import PROP, make_signature
from funlog.syntax import parse_expr, print_expr, size, top, bot, mk_eq
from funlog.subst import fv, gv
from funlog.calculus import Theory
from funlog.semantics import satisfies, satisfies_theory, restrict_structure, check_closure
from funlog.henkin import (
    ThOracle, special_constant, HenkinExtension, henkin_extend,
    saturate_bounded, extend_structure_for_henkin, enumerate_exprs,
    TermModelContext, TermModel, order_key, norm, build_term_structure,
    check_cm_expr, check_ded_sat, default_size_bound,
    NotSingleFree, NoRepresentativeInBound,
)


@pytest.fixture
def oracle(small_structure):
    return ThOracle(small_structure)


@pytest.fixture
def ctx(small_sig, oracle):
    return TermModelContext(small_sig, oracle, size_bound=4)


class TestThOracle:
    def test_decides_by_satisfaction(self, small_sig, oracle):
        assert oracle.decide(parse_expr(small_sig, "eq_a(f(ca),cb)")) == "provable"
        assert oracle.decide(parse_expr(small_sig, "eq_a(ca,cb)")) == "refutable"
        assert oracle.decide(parse_expr(small_sig, "bot")) == "refutable"


class TestSpecialConstants:
    def test_name_deterministic(self, small_sig):
        phi = parse_expr(small_sig, "eq_a(v0^a,cb)")
        _, n1, _ = special_constant(small_sig, phi, "v0^a")
        _, n2, _ = special_constant(small_sig, phi, "v0^a")
        assert n1 == n2 and n1.startswith("c_") and len(n1) == 14

    def test_axiom_shape(self, small_sig):
        phi = parse_expr(small_sig, "eq_a(v0^a,cb)")
        sig2, name, axiom = special_constant(small_sig, phi, "v0^a")
        assert name in sig2.ops
        assert print_expr(axiom) == (
            f"imp(exists^a((v0^a): eq_a(v0^a,cb)),eq_a({name},cb))")

    def test_extra_free_variable_rejected(self, small_sig):
        phi = parse_expr(small_sig, "eq_a(v0^a,v1^a)")
        with pytest.raises(NotSingleFree):
            special_constant(small_sig, phi, "v0^a")

    def test_non_variable_rejected(self, small_sig):
        with pytest.raises(NotSingleFree):
            special_constant(small_sig, parse_expr(small_sig, "top"), "ca")


class TestHenkinExtend:
    def test_level_zero_identity(self, small_sig):
        thy = Theory(small_sig, (parse_expr(small_sig, "eq_a(f(ca),cb)"),))
        ext = henkin_extend(thy, 0, 3)
        assert ext.theory == thy and ext.constants == ()

    def test_one_level_counts(self, small_sig):
        thy = Theory(small_sig, ())
        ext = henkin_extend(thy, 1, 3)
        assert len(ext.constants) == len(ext.theory.axioms)
        assert len(ext.constants) > 0
        # one constant per enumerated (phi, x) pair, each axiom a conditional
        for name, phi, x in ext.constants:
            assert name in ext.theory.signature.ops
            assert fv(phi) <= {x}

    def test_deterministic(self, small_sig):
        thy = Theory(small_sig, ())
        e1 = henkin_extend(thy, 1, 3)
        e2 = henkin_extend(thy, 1, 3)
        assert e1 == e2

    def test_extended_structure_models_extension(self, small_sig, small_structure):
        thy = Theory(small_sig, (parse_expr(small_sig, "eq_a(f(ca),cb)"),))
        ext = henkin_extend(thy, 1, 3)
        big = extend_structure_for_henkin(small_structure, ext)
        assert satisfies_theory(big, ext.theory)

    def test_restriction_recovers_original(self, small_sig, small_structure):
        thy = Theory(small_sig, (parse_expr(small_sig, "eq_a(f(ca),cb)"),))
        ext = henkin_extend(thy, 1, 3)
        big = extend_structure_for_henkin(small_structure, ext)
        back = restrict_structure(big, small_sig)
        for phi in thy.axioms:
            assert satisfies(back, phi)


class TestSaturate:
    def test_adds_formula_or_negation(self, small_sig, oracle):
        thy = Theory(small_sig, ())
        cands = [parse_expr(small_sig, t)
                 for t in ("eq_a(f(ca),cb)", "eq_a(ca,cb)", "top")]
        sat = saturate_bounded(thy, cands, oracle)
        assert parse_expr(small_sig, "eq_a(f(ca),cb)") in sat.axioms
        assert parse_expr(small_sig, "not(eq_a(ca,cb))") in sat.axioms
        for a in sat.axioms:
            assert oracle.decide(a) == "provable"


class TestEnumeration:
    def test_sizes_within_bound(self, small_sig):
        for e in enumerate_exprs(small_sig, "a", (), 4):
            assert size(e) <= 4 and fv(e) == frozenset()

    def test_sorted_and_unique(self, small_sig):
        es = enumerate_exprs(small_sig, PROP, (), 4)
        keys = [order_key(e) for e in es]
        assert keys == sorted(keys)
        assert len(set(keys)) == len(keys)

    def test_scope_variables_available(self, small_sig):
        es = enumerate_exprs(small_sig, "a", ("v0^a",), 2)
        assert parse_expr(small_sig, "v0^a") in es
        assert parse_expr(small_sig, "f(v0^a)") in es

    def test_canonical_binder_naming(self, small_sig):
        # binders avoid the scope, so each renaming class appears once
        for e in enumerate_exprs(small_sig, PROP, ("v0^a",), 4):
            assert "v0^a" not in gv(e)

    def test_monotone_in_bound(self, small_sig):
        small = set(enumerate_exprs(small_sig, "a", (), 3))
        big = set(enumerate_exprs(small_sig, "a", (), 4))
        assert small <= big


class TestNorm:
    def test_formulas_go_to_truth_values(self, small_sig, ctx):
        assert norm(ctx, parse_expr(small_sig, "eq_a(f(ca),cb)")) == top(small_sig)
        assert norm(ctx, parse_expr(small_sig, "eq_a(ca,cb)")) == bot(small_sig)

    def test_terms_get_least_representative(self, small_sig, ctx):
        assert norm(ctx, parse_expr(small_sig, "f(f(ca))")) == \
            parse_expr(small_sig, "ca")
        assert norm(ctx, parse_expr(small_sig, "f(ca)")) == \
            parse_expr(small_sig, "cb")

    def test_idempotent(self, small_sig, ctx):
        for text in ("ca", "f(ca)", "f(f(f(cb)))", "eq_a(ca,ca)"):
            n = norm(ctx, parse_expr(small_sig, text))
            assert norm(ctx, n) == n

    def test_norm_provably_equal(self, small_sig, ctx):
        e = parse_expr(small_sig, "f(f(cb))")
        n = norm(ctx, e)
        assert ctx.oracle.decide(mk_eq(small_sig, n, e)) == "provable"

    def test_open_rejected(self, small_sig, ctx):
        with pytest.raises(Exception):
            norm(ctx, parse_expr(small_sig, "f(v0^a)"))

    def test_no_representative(self, oracle):
        # a sort whose only closed terms exceed the bound: no constants at all
        sig = make_signature(["a"], ["a"], {"g": "(a)a"})
        s_ctx = TermModelContext(sig, oracle, size_bound=2)
        with pytest.raises(NoRepresentativeInBound):
            build_term_structure(s_ctx)

    def test_default_bound_env(self, monkeypatch):
        monkeypatch.setenv("FLC_DEPTH_DEFAULT", "9")
        assert default_size_bound() == 9
        monkeypatch.delenv("FLC_DEPTH_DEFAULT")
        assert default_size_bound() == 6


class TestTermStructure:
    def test_carriers_are_norms(self, small_sig, ctx):
        tm = build_term_structure(ctx)
        assert tm.structure.carriers["a"] == ("ca", "cb")
        assert tm.structure.carriers[PROP] == ("bot", "top")
        for atom in tm.structure.carriers["a"]:
            n = tm.expr_of("a", atom)
            assert print_expr(norm(ctx, n)) == atom

    def test_operations_act_by_norm(self, small_sig, ctx):
        tm = build_term_structure(ctx)
        assert tm.structure.interp["f"][("ca",)] == "cb"
        assert tm.structure.interp["f"][("cb",)] == "ca"

    def test_closure(self, small_sig, ctx):
        tm = build_term_structure(ctx)
        rep = check_closure(tm.structure, cap=1)
        assert rep.ok, rep.violations

    def test_cm_expr_exhaustive(self, small_sig, ctx):
        tm = build_term_structure(ctx)
        for sort in sorted(small_sig.sorts):
            for e in ctx.closed(sort):
                assert check_cm_expr(tm, e, ())
            for e in ctx.scoped(sort, ("v0^a",)):
                xs = ("v0^a",) if "v0^a" in fv(e) else ()
                assert check_cm_expr(tm, e, xs)

    def test_ded_sat_exhaustive(self, small_sig, ctx):
        tm = build_term_structure(ctx)
        for phi in ctx.closed(PROP):
            assert check_ded_sat(tm, phi)

    def test_satisfies_source_theory(self, small_sig, ctx):
        thy = Theory(small_sig, (
            parse_expr(small_sig, "eq_a(f(ca),cb)"),
            parse_expr(small_sig, "forall v0^a. eq_a(f(f(v0^a)),v0^a)")))
        assert satisfies_theory(ThOracle(ctx.oracle.structure).structure, thy)
        tm = build_term_structure(ctx)
        assert satisfies_theory(tm.structure, thy)

    def test_deterministic(self, small_sig, oracle):
        t1 = build_term_structure(TermModelContext(small_sig, oracle, size_bound=4))
        t2 = build_term_structure(TermModelContext(small_sig, oracle, size_bound=4))
        assert t1.structure.carriers == t2.structure.carriers
        assert t1.structure.interp == t2.structure.interp
        assert t1.structure.selected == t2.structure.selected
