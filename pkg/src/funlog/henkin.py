"""Desk-scale Henkin machinery: special constants, bounded saturation, the
norm of closed expressions over a provability oracle, and the term structure.

The unbounded enumeration of the classical construction is replaced by a
deterministic total order on closed expressions — node count first, then the
canonical print string — cut off at a size bound.  Oracles used in practice
are complete theories of finite structures in which every carrier element is
named by a constant; against such an oracle the whole pipeline is executable
and the term structure can be compared against the source structure.
"""
from __future__ import annotations

import hashlib
import itertools
import os
from dataclasses import dataclass, field

from .signature import (
    PROP, Signature, OpSig, fresh_vars, variable_sort, eq_op,
)
from .syntax import (
    Expr, mk, var, top, bot, imp, exists, mk_eq, print_expr, size,
)
from .subst import fv, substitute, substitute1
from .calculus import Theory, OracleUndecided, sorted_vars
from .semantics import (
    Structure, FnTable, evaluate, satisfies, _fill_distinguished,
)


class HenkinError(Exception):
    pass


class NotSingleFree(HenkinError):
    pass


class NoRepresentativeInBound(HenkinError):
    pass


class OracleInconsistent(HenkinError):
    pass


def default_size_bound() -> int:
    """Expression-size cutoff (node count) for bounded enumerations; the
    FLC_DEPTH_DEFAULT environment variable overrides it."""
    return int(os.environ.get("FLC_DEPTH_DEFAULT", "6"))


# --- oracles ----------------------------------------------------------------

class ThOracle:
    """The complete theory of a finite structure: a formula is provable iff
    the structure satisfies it.  Consistent and complete by construction."""

    def __init__(self, structure: Structure):
        self.structure = structure

    def decide(self, phi: Expr) -> str:
        return "provable" if satisfies(self.structure, phi) else "refutable"


# --- special constants and saturation ---------------------------------------

def special_constant(sig: Signature, phi: Expr, x: str) -> tuple[Signature, str, Expr]:
    """Extend sig by the witness constant of (phi, x) and return it together
    with the axiom  exists x phi -> phi[x <- c]."""
    xsort = variable_sort(sig, x)
    if xsort is None:
        raise NotSingleFree(f"{x!r} is not a variable")
    if not fv(phi) <= {x}:
        raise NotSingleFree(f"free variables {sorted(fv(phi) - {x})} besides {x!r}")
    digest = hashlib.sha256(f"{print_expr(phi)}|{x}".encode()).hexdigest()[:12]
    name = f"c_{digest}"
    new_ops = dict(sig.ops)
    new_ops[name] = OpSig(xsort)
    new_sig = Signature(sig.sorts, sig.var_sorts, new_ops)
    axiom = imp(new_sig, exists(new_sig, x, phi),
                substitute1(new_sig, phi, x, mk(new_sig, name)))
    return new_sig, name, axiom


@dataclass(frozen=True)
class HenkinExtension:
    theory: Theory
    constants: tuple[tuple[str, Expr, str], ...]  # (constant name, phi, x)


def henkin_extend(theory: Theory, levels: int, size_bound: int | None = None) -> HenkinExtension:
    """Iterate the special-constant construction: per level, walk every
    formula with at most one free (canonical) variable within the size bound
    and add its witness constant and axiom."""
    if size_bound is None:
        size_bound = default_size_bound()
    sig = theory.signature
    axioms = list(theory.axioms)
    constants: list[tuple[str, Expr, str]] = []
    known: set[tuple[str, str]] = set()
    for _ in range(levels):
        batch = []
        for srt in sorted(sig.var_sorts):
            x = fresh_vars(sig, (srt,), ())[0]
            for phi in enumerate_exprs(sig, PROP, (x,), size_bound):
                key = (print_expr(phi), x)
                if key not in known:
                    known.add(key)
                    batch.append((phi, x))
        for phi, x in batch:
            sig, name, axiom = special_constant(sig, phi, x)
            constants.append((name, phi, x))
            axioms.append(axiom)
    return HenkinExtension(Theory(sig, tuple(axioms)), tuple(constants))


def saturate_bounded(theory: Theory, candidates, oracle) -> Theory:
    """Bounded stand-in for the maximal-consistent-extension construction:
    walk the candidate list, adjoining each formula or its negation according
    to the oracle's verdict."""
    from .syntax import neg
    axioms = list(theory.axioms)
    for phi in candidates:
        verdict = oracle.decide(phi)
        if verdict == "undecided":
            raise OracleUndecided(f"oracle undecided on {print_expr(phi)}")
        chosen = phi if verdict == "provable" else neg(theory.signature, phi)
        if chosen not in axioms:
            axioms.append(chosen)
    return Theory(theory.signature, tuple(axioms))


def extend_structure_for_henkin(s: Structure, ext: HenkinExtension) -> Structure:
    """Interpret the special constants over the source structure: each one
    names the first carrier element witnessing its formula, or the first
    carrier element if there is none."""
    cur = Structure(ext.theory.signature, dict(s.carriers), dict(s.interp),
                    s.full, dict(s.selected))
    _fill_distinguished(cur)
    for name, phi, x in ext.constants:
        xsort = variable_sort(cur.signature, x)
        carrier = cur.carriers[xsort]
        value = carrier[0]
        tbl = evaluate(cur, phi, (x,)) if x in fv(phi) else None
        if tbl is not None:
            for w in carrier:
                if tbl.apply((w,)) == cur.true_atom:
                    value = w
                    break
        elif evaluate(cur, phi, ()) != cur.true_atom:
            value = carrier[0]
        cur.interp[name] = value
    return cur


# --- bounded expression enumeration -----------------------------------------

def _compositions(total: int, parts: int):
    """All ways of writing total as an ordered sum of ``parts`` positives."""
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_exprs(sig: Signature, sort: str, scope, max_size: int,
                    _memo=None) -> list[Expr]:
    """All expressions of the sort whose free variables lie in ``scope``, of
    node count <= max_size, in size-then-print order.  Binder lists use the
    first variables of the required sorts not present in the enclosing scope,
    so each renaming class contributes one representative."""
    scope = tuple(scope)
    memo = _memo if _memo is not None else {}

    def exact(sort, scope, n):
        key = (sort, frozenset(scope), n)
        if key in memo:
            return memo[key]
        out = []
        if n == 1:
            for v in scope:
                if variable_sort(sig, v) == sort:
                    out.append(var(sig, v))
            for name, spec in sig.ops.items():
                if spec.arity == 0 and spec.result == sort:
                    out.append(mk(sig, name))
        else:
            for name, spec in sig.ops.items():
                if spec.arity == 0 or spec.result != sort:
                    continue
                if spec.arity > n - 1:
                    continue
                slot_scopes = []
                slot_binders = []
                for arg_sort, bsorts in spec.args:
                    binders = fresh_vars(sig, bsorts, scope)
                    slot_binders.append(binders)
                    slot_scopes.append(scope + binders)
                for sizes in _compositions(n - 1, spec.arity):
                    pools = [exact(a_sort, slot_scopes[i], sizes[i])
                             for i, (a_sort, _) in enumerate(spec.args)]
                    for bodies in itertools.product(*pools):
                        out.append(mk(sig, name,
                                      tuple((slot_binders[i], b)
                                            for i, b in enumerate(bodies))))
        memo[key] = out
        return out

    result = []
    for n in range(1, max_size + 1):
        result.extend(sorted(exact(sort, scope, n), key=print_expr))
    return result


# --- the term-model context and norm ----------------------------------------

@dataclass
class TermModelContext:
    signature: Signature
    oracle: object
    size_bound: int = field(default_factory=default_size_bound)
    persp_cap: int = 1
    norm_cache: dict = field(default_factory=dict)
    _enum_memo: dict = field(default_factory=dict)
    _closed: dict = field(default_factory=dict)

    def closed(self, sort: str) -> list[Expr]:
        if sort not in self._closed:
            self._closed[sort] = enumerate_exprs(
                self.signature, sort, (), self.size_bound, self._enum_memo)
        return self._closed[sort]

    def scoped(self, sort: str, scope) -> list[Expr]:
        return enumerate_exprs(self.signature, sort, scope, self.size_bound,
                               self._enum_memo)


def order_key(e: Expr):
    return (size(e), print_expr(e))


def norm(ctx: TermModelContext, e: Expr) -> Expr:
    """The canonical representative of e's provable-equality class: truth
    value for formulas, otherwise the order-least provably equal closed
    expression within the bound."""
    if fv(e):
        raise HenkinError(f"norm of open expression {print_expr(e)}")
    key = print_expr(e)
    if key in ctx.norm_cache:
        return ctx.norm_cache[key]
    sig = ctx.signature

    if e.sort == PROP:
        verdict = ctx.oracle.decide(e)
        if verdict == "undecided":
            raise OracleUndecided(f"oracle undecided on {key}")
        result = top(sig) if verdict == "provable" else bot(sig)
        ctx.norm_cache[key] = result
        return result

    candidates = list(ctx.closed(e.sort))
    if size(e) <= ctx.size_bound and e not in candidates:
        candidates.append(e)
        candidates.sort(key=order_key)
    result = None
    for a in candidates:
        if a == e:
            result = a
            break
        verdict = ctx.oracle.decide(mk_eq(sig, a, e))
        if verdict == "undecided":
            raise OracleUndecided(f"oracle undecided on an equality for {key}")
        if verdict == "provable":
            result = a
            break
    if result is None:
        raise NoRepresentativeInBound(
            f"no provably equal expression of size <= {ctx.size_bound} for {key}")
    ctx.norm_cache[key] = result
    return result


# --- term structure ---------------------------------------------------------

@dataclass
class TermModel:
    ctx: TermModelContext
    structure: Structure
    atom_expr: dict[str, dict[str, Expr]]  # sort -> carrier atom -> norm Expr

    def expr_of(self, sort: str, atom: str) -> Expr:
        return self.atom_expr[sort][atom]


def _subst_table(ctx: TermModelContext, tm_carriers, atom_expr, e: Expr,
                 u: tuple[str, ...], dom_sorts) -> FnTable:
    """The substitution map of (u, e): carrier tuple -> norm of e[u <- .]."""
    sig = ctx.signature
    rows = {}
    for cvec in itertools.product(*(tm_carriers[s] for s in dom_sorts)):
        inst = substitute(sig, e, u, [atom_expr[s][c] for s, c in zip(dom_sorts, cvec)])
        rows[cvec] = print_expr(norm(ctx, inst))
    return FnTable.from_map(dom_sorts, e.sort, rows)


def build_term_structure(ctx: TermModelContext) -> TermModel:
    """Materialize the term structure: carriers are norms of closed
    expressions, selected sets are substitution maps, operations act by
    build-then-norm on witness expressions."""
    sig = ctx.signature

    carriers: dict[str, tuple[str, ...]] = {}
    atom_expr: dict[str, dict[str, Expr]] = {}
    for sort in sig.sorts:
        if sort == PROP:
            f, t = bot(sig), top(sig)
            carriers[sort] = (print_expr(f), print_expr(t))
            atom_expr[sort] = {print_expr(f): f, print_expr(t): t}
            continue
        norms: dict[str, Expr] = {}
        for e in ctx.closed(sort):
            n = norm(ctx, e)
            norms.setdefault(print_expr(n), n)
        if not norms:
            raise NoRepresentativeInBound(
                f"no closed expression of sort {sort!r} within the bound")
        ordered = sorted(norms.values(), key=order_key)
        carriers[sort] = tuple(print_expr(n) for n in ordered)
        atom_expr[sort] = {print_expr(n): n for n in ordered}

    # selected sets: substitution maps over canonical perspectives, with every
    # witness expression retained for the functionality audit below
    selected: dict[tuple[str, tuple[str, ...]], frozenset[FnTable]] = {}
    witnesses: dict[tuple[str, tuple[str, ...]], list[tuple[FnTable, Expr]]] = {}
    vsorts = sorted(sig.var_sorts)
    sigmas = [s for n in range(1, max(1, ctx.persp_cap) + 1)
              for s in itertools.product(vsorts, repeat=n)]
    for _, spec in sig.user_ops().items():
        for _, bsorts in spec.args:
            if bsorts and bsorts not in sigmas:
                sigmas.append(bsorts)
    for sigma in sigmas:
        u = fresh_vars(sig, sigma, ())
        for gamma in sig.sorts:
            wits = []
            for e in ctx.scoped(gamma, u):
                tbl = _subst_table(ctx, carriers, atom_expr, e, u, sigma)
                wits.append((tbl, e))
            witnesses[(gamma, sigma)] = wits
            selected[(gamma, sigma)] = frozenset(t for t, _ in wits)

    s = Structure(sig, carriers, {}, full=False, selected=selected)

    # user operations: every combination of witnesses, normed; conflicting
    # values for one argument tuple would refute the oracle's consistency
    for name, spec in sig.user_ops().items():
        if spec.arity == 0:
            s.interp[name] = print_expr(norm(ctx, mk(sig, name)))
            continue
        slot_wits = []
        slot_binders = []
        for arg_sort, bsorts in spec.args:
            if bsorts:
                v = fresh_vars(sig, bsorts, ())
                slot_binders.append(v)
                slot_wits.append([(tbl, e) for tbl, e in witnesses[(arg_sort, bsorts)]])
            else:
                slot_binders.append(())
                slot_wits.append([(c, atom_expr[arg_sort][c])
                                  for c in carriers[arg_sort]])
        table: dict[tuple, str] = {}
        for combo in itertools.product(*slot_wits):
            keys = tuple(k for k, _ in combo)
            expr = mk(sig, name, tuple((slot_binders[i], w)
                                       for i, (_, w) in enumerate(combo)))
            value = print_expr(norm(ctx, expr))
            if keys in table and table[keys] != value:
                raise OracleInconsistent(
                    f"operation {name!r} not functional on norms at {keys}")
            table[keys] = value
        s.interp[name] = table

    _fill_distinguished(s)
    return TermModel(ctx, s, atom_expr)


# --- verdicts ---------------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    ok: bool
    detail: str = ""

    def __bool__(self):
        return self.ok


def check_cm_expr(tm: TermModel, e: Expr, xs) -> Verdict:
    """Evaluation in the term structure agrees with substitute-then-norm."""
    ctx = tm.ctx
    sig = ctx.signature
    xs = tuple(xs)
    val = evaluate(tm.structure, e, xs)
    if not xs:
        want = print_expr(norm(ctx, e))
        got = val if isinstance(val, str) else None
        if got != want:
            return Verdict(False, f"{print_expr(e)}: evaluated {got!r}, norm {want!r}")
        return Verdict(True)
    sorts = tuple(variable_sort(sig, x) for x in xs)
    for cvec in itertools.product(*(tm.structure.carriers[s] for s in sorts)):
        inst = substitute(sig, e, xs,
                          [tm.expr_of(s, c) for s, c in zip(sorts, cvec)])
        want = print_expr(norm(ctx, inst))
        got = val.apply(cvec)
        if got != want:
            return Verdict(False,
                           f"{print_expr(e)} at {cvec}: evaluated {got!r}, norm {want!r}")
    return Verdict(True)


def check_ded_sat(tm: TermModel, phi: Expr) -> Verdict:
    """Provability by the oracle coincides with truth in the term structure."""
    verdict = tm.ctx.oracle.decide(phi)
    if verdict == "undecided":
        raise OracleUndecided(print_expr(phi))
    provable = verdict == "provable"
    sat = satisfies(tm.structure, phi)
    if provable != sat:
        return Verdict(False,
                       f"{print_expr(phi)}: oracle {verdict}, satisfied {sat}")
    return Verdict(True)
