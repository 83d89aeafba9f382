"""Finite normal structures and perspective-based evaluation.

A structure assigns a finite carrier to every sort (the formula sort carries
the two truth values), selected function sets M_gamma^sigma to sort/
binder-sort-sequence pairs, and to each operation either a carrier element or
a functional over argument tuples, where a slot binding variables is fed a
function table rather than an element.  Evaluation interprets an expression
relative to a perspective (a variable sequence covering its free variables)
as a function table over the perspective's carriers; binder slots extend the
perspective and are discharged by partial fixing.

Full structures take every selected set to be the whole function space; the
closure laws (constants, projections, partial fixing, composition) then hold
by construction.  Non-full structures carry explicit selected sets and are
audited by check_closure.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .signature import PROP, Signature, forall_op, exists_op, eq_op, extends, variable_sort
from .syntax import Expr, ForeignSignature, in_class, perspective_sorts, print_expr
from .subst import fv
from .calculus import sorted_vars, Theory


class SemanticsError(Exception):
    pass


class MissingInterpretation(SemanticsError):
    pass


class InterpretationOutOfCarrier(SemanticsError):
    pass


class NotInPerspective(SemanticsError):
    pass


class SelectedSetMiss(SemanticsError):
    pass


class NotAnExtension(SemanticsError):
    pass


class SpaceTooLarge(SemanticsError):
    pass


@dataclass(frozen=True)
class FnTable:
    """A total function from tuples over the domain carriers to the codomain
    carrier, stored extensionally with canonically sorted rows."""
    domain_sorts: tuple[str, ...]
    codomain_sort: str
    rows: tuple[tuple[tuple[str, ...], str], ...]

    def __post_init__(self):
        object.__setattr__(self, "_lookup", dict(self.rows))

    @classmethod
    def from_map(cls, domain_sorts, codomain_sort, mapping) -> "FnTable":
        rows = tuple(sorted((tuple(k), v) for k, v in mapping.items()))
        return cls(tuple(domain_sorts), codomain_sort, rows)

    def apply(self, args) -> str:
        return self._lookup[tuple(args)]

    def fix(self, prefix) -> "FnTable":
        """Partial fixing: freeze the first len(prefix) arguments."""
        k = len(prefix)
        prefix = tuple(prefix)
        rows = {args[k:]: v for args, v in self.rows if args[:k] == prefix}
        return FnTable.from_map(self.domain_sorts[k:], self.codomain_sort, rows)


def constant_table(domain_sorts, carriers, value, codomain_sort) -> FnTable:
    return FnTable.from_map(
        domain_sorts, codomain_sort,
        {args: value for args in itertools.product(*(carriers[s] for s in domain_sorts))})


def projection_table(domain_sorts, carriers, j) -> FnTable:
    return FnTable.from_map(
        domain_sorts, domain_sorts[j],
        {args: args[j] for args in itertools.product(*(carriers[s] for s in domain_sorts))})


@dataclass
class Structure:
    signature: Signature
    carriers: dict[str, tuple[str, ...]]
    interp: dict[str, object]
    full: bool = True
    selected: dict[tuple[str, tuple[str, ...]], frozenset[FnTable]] = field(default_factory=dict)
    _spaces: dict = field(default_factory=dict, repr=False)

    @property
    def false_atom(self) -> str:
        return self.carriers[PROP][0]

    @property
    def true_atom(self) -> str:
        return self.carriers[PROP][1]

    def domain_size(self, domain_sorts) -> int:
        n = 1
        for s in domain_sorts:
            n *= len(self.carriers[s])
        return n

    def space_size(self, gamma, domain_sorts) -> int:
        return len(self.carriers[gamma]) ** self.domain_size(domain_sorts)

    def full_space(self, gamma, domain_sorts) -> tuple[FnTable, ...]:
        key = (gamma, tuple(domain_sorts))
        if key not in self._spaces:
            if self.space_size(gamma, domain_sorts) > 1 << 16:
                raise SpaceTooLarge(f"function space for {key} too large to enumerate")
            dom = list(itertools.product(*(self.carriers[s] for s in domain_sorts)))
            tables = tuple(
                FnTable.from_map(domain_sorts, gamma, dict(zip(dom, values)))
                for values in itertools.product(self.carriers[gamma], repeat=len(dom)))
            self._spaces[key] = tables
        return self._spaces[key]

    def selected_tables(self, gamma, domain_sorts):
        """The selected set for (gamma, domain_sorts), or None meaning the
        whole space (full structures and undeclared pairs)."""
        if self.full:
            return None
        return self.selected.get((gamma, tuple(domain_sorts)))

    def has_table(self, gamma, domain_sorts, tbl: FnTable) -> bool:
        if tbl.codomain_sort != gamma or tbl.domain_sorts != tuple(domain_sorts):
            return False
        declared = self.selected_tables(gamma, domain_sorts)
        if declared is None:
            return (len(tbl.rows) == self.domain_size(domain_sorts)
                    and all(v in self.carriers[gamma] for _, v in tbl.rows))
        return tbl in declared


def _bool_tables(f, t):
    return {
        "top": t,
        "bot": f,
        "not": {(f,): t, (t,): f},
        "imp": {(x, y): f if (x == t and y == f) else t
                for x in (f, t) for y in (f, t)},
        "and": {(x, y): t if (x == t and y == t) else f
                for x in (f, t) for y in (f, t)},
        "or": {(x, y): f if (x == f and y == f) else t
               for x in (f, t) for y in (f, t)},
        "iff": {(x, y): t if x == y else f
                for x in (f, t) for y in (f, t)},
    }


def _fill_distinguished(s: Structure):
    sig = s.signature
    f, t = s.false_atom, s.true_atom
    s.interp.update(_bool_tables(f, t))
    for a in sig.sorts:
        s.interp[eq_op(a)] = {(x, y): t if x == y else f
                              for x in s.carriers[a] for y in s.carriers[a]}
    for a in sig.var_sorts:
        declared = s.selected_tables(PROP, (a,))
        tables = s.full_space(PROP, (a,)) if declared is None else declared
        s.interp[forall_op(a)] = {
            (tbl,): t if all(v == t for _, v in tbl.rows) else f for tbl in tables}
        s.interp[exists_op(a)] = {
            (tbl,): t if any(v == t for _, v in tbl.rows) else f for tbl in tables}


def make_full_structure(sig: Signature, carriers: dict, interp: dict) -> Structure:
    """carriers: per non-formula sort, a nonempty tuple of atom names.
    interp: per user operation, a carrier element (m=0) or a dict/callable
    over argument tuples (function tables for binder slots)."""
    cs = {PROP: ("0", "1")}
    for sort in sig.sorts - {PROP}:
        atoms = tuple(carriers.get(sort, ()))
        if not atoms:
            raise MissingInterpretation(f"no carrier for sort {sort!r}")
        cs[sort] = atoms
    s = Structure(sig, cs, {}, full=True)
    for name, spec in sig.user_ops().items():
        if name not in interp:
            raise MissingInterpretation(f"no interpretation for {name!r}")
        given = interp[name]
        if spec.arity == 0:
            if given not in cs[spec.result]:
                raise InterpretationOutOfCarrier(f"{name!r} -> {given!r}")
            s.interp[name] = given
            continue
        slot_ranges = []
        for arg_sort, bsorts in spec.args:
            if bsorts:
                slot_ranges.append(s.full_space(arg_sort, bsorts))
            else:
                slot_ranges.append(cs[arg_sort])
        table = {}
        for args in itertools.product(*slot_ranges):
            v = given[args] if isinstance(given, dict) else given(*args)
            if v not in cs[spec.result]:
                raise InterpretationOutOfCarrier(f"{name!r}{args} -> {v!r}")
            table[args] = v
        s.interp[name] = table
    _fill_distinguished(s)
    return s


def _apply_op(s: Structure, op: str, args: tuple) -> str:
    interp = s.interp.get(op)
    if interp is None:
        raise MissingInterpretation(f"no interpretation for {op!r}")
    if not args:
        return interp
    try:
        return interp[args]
    except KeyError:
        raise SelectedSetMiss(
            f"argument tuple outside the domain of {op!r} "
            "(a required table is missing from its selected set)") from None


def evaluate(s: Structure, e: Expr, p):
    """Value of e under perspective p: a carrier element for the empty
    perspective, otherwise a function table over the perspective carriers."""
    sig = s.signature
    p = tuple(p)
    if e.head not in sig.ops and variable_sort(sig, e.head) is None:
        raise ForeignSignature(f"symbol {e.head!r} not in the structure's signature")
    if not in_class(sig, e, p):
        raise NotInPerspective(f"{print_expr(e)} not covered by perspective {p}")
    sorts = perspective_sorts(sig, p)

    if not p:
        if not e.args:
            return _apply_op(s, e.head, ())
        vals = []
        for binders, body in e.args:
            vals.append(evaluate(s, body, tuple(binders)))
        return _apply_op(s, e.head, tuple(vals))

    if not e.args:
        if variable_sort(sig, e.head) is not None:
            k = max(j for j, u in enumerate(p) if u == e.head)
            return projection_table(sorts, s.carriers, k)
        return constant_table(sorts, s.carriers, _apply_op(s, e.head, ()), e.sort)

    sub = []
    for binders, body in e.args:
        sub.append((tuple(binders), evaluate(s, body, p + tuple(binders))))
    rows = {}
    for xs in itertools.product(*(s.carriers[srt] for srt in sorts)):
        args_v = []
        for binders, val in sub:
            if binders:
                args_v.append(val.fix(xs))
            else:
                args_v.append(val.apply(xs))
        rows[xs] = _apply_op(s, e.head, tuple(args_v))
    return FnTable.from_map(sorts, e.sort, rows)


def satisfies(s: Structure, phi: Expr) -> bool:
    """Truth under every assignment: evaluate over the canonical covering
    perspective (the sorted free variables) and require constant truth."""
    if phi.sort != PROP:
        raise SemanticsError("satisfaction is defined for formulas only")
    p = sorted_vars(s.signature, fv(phi))
    val = evaluate(s, phi, p)
    if not p:
        return val == s.true_atom
    return all(v == s.true_atom for _, v in val.rows)


def satisfies_theory(s: Structure, t: Theory) -> bool:
    return all(satisfies(s, a) for a in t.axioms)


def restrict_structure(s: Structure, to: Signature) -> Structure:
    if not extends(to, s.signature):
        raise NotAnExtension("target signature is not a reduct of the structure's")
    interp = {name: v for name, v in s.interp.items() if name in to.ops}
    return Structure(to, dict(s.carriers), interp, s.full, dict(s.selected))


# --- closure checking -------------------------------------------------------

@dataclass
class ClosureReport:
    violations: list[str]
    skipped: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def _sigma_sequences(sig: Signature, cap: int, min_len=1):
    vs = sorted(sig.var_sorts)
    for n in range(min_len, cap + 1):
        yield from itertools.product(vs, repeat=n)


def check_closure(s: Structure, cap: int = 2, max_space: int = 512) -> ClosureReport:
    """Audit the selected-set laws up to perspective length ``cap``.  Sets
    whose full spaces exceed ``max_space`` tables are skipped (reported)."""
    sig = s.signature
    report = ClosureReport([], [])

    def tables_of(gamma, dom):
        declared = s.selected_tables(gamma, dom)
        if declared is not None:
            return declared
        if s.space_size(gamma, dom) > max_space:
            return None
        return s.full_space(gamma, dom)

    for sigma in _sigma_sequences(sig, cap):
        # constants
        for gamma in sig.sorts:
            for w in s.carriers[gamma]:
                tbl = constant_table(sigma, s.carriers, w, gamma)
                if not s.has_table(gamma, sigma, tbl):
                    report.violations.append(
                        f"constant: cst_{w} missing from M_{gamma}^{sigma}")
        # projections
        for j, srt in enumerate(sigma):
            tbl = projection_table(sigma, s.carriers, j)
            if not s.has_table(srt, sigma, tbl):
                report.violations.append(
                    f"projection: pj_{j + 1} missing from M_{srt}^{sigma}")
        # partial fixing: split sigma into a fixed prefix and a remainder
        for gamma in sig.sorts:
            pool = tables_of(gamma, sigma)
            if pool is None:
                report.skipped.append(f"fixing over M_{gamma}^{sigma}")
                continue
            for k in range(1, len(sigma)):
                prefix, rest = sigma[:k], sigma[k:]
                for g in pool:
                    for xs in itertools.product(*(s.carriers[t] for t in prefix)):
                        if not s.has_table(gamma, rest, g.fix(xs)):
                            report.violations.append(
                                f"fixing: fixing M_{gamma}^{sigma} at {xs} "
                                f"leaves M_{gamma}^{rest}")
        # composition through every operation
        for op, spec in sig.ops.items():
            if spec.arity == 0:
                continue
            pools = []
            for arg_sort, bsorts in spec.args:
                pool = tables_of(arg_sort, sigma + tuple(bsorts))
                pools.append(pool)
            if any(p is None for p in pools):
                report.skipped.append(f"composition through {op} at {sigma}")
                continue
            total = 1
            for p in pools:
                total *= len(p)
            if total > max_space * 8:
                report.skipped.append(f"composition through {op} at {sigma}")
                continue
            for gs in itertools.product(*pools):
                rows = {}
                try:
                    for ys in itertools.product(*(s.carriers[t] for t in sigma)):
                        args_v = []
                        for g, (arg_sort, bsorts) in zip(gs, spec.args):
                            args_v.append(g.fix(ys) if bsorts else g.apply(ys))
                        rows[ys] = _apply_op(s, op, tuple(args_v))
                except SelectedSetMiss:
                    report.violations.append(
                        f"composition: functional of {op} undefined on a "
                        f"composable tuple at {sigma}")
                    continue
                tbl = FnTable.from_map(sigma, spec.result, rows)
                if not s.has_table(spec.result, sigma, tbl):
                    report.violations.append(
                        f"composition: composite through {op} missing from "
                        f"M_{spec.result}^{sigma}")
    return report


def materialize_selected(s: Structure, cap: int = 2, max_space: int = 512) -> Structure:
    """Rewrite a full structure as an explicit one: enumerate every selected
    set of perspective length <= cap as a concrete table set."""
    selected = {}
    for sigma in _sigma_sequences(s.signature, cap):
        for gamma in s.signature.sorts:
            if s.space_size(gamma, sigma) <= max_space:
                selected[(gamma, sigma)] = frozenset(s.full_space(gamma, sigma))
    return Structure(s.signature, dict(s.carriers), dict(s.interp),
                     full=False, selected=selected)
