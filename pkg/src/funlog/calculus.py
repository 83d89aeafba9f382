"""The Hilbert-style calculus: axiom schemes, proof objects, checker, and
derived-proof generators.

Axiom schemes: propositional tautologies (recognized semantically by truth
table over the maximal non-connective subformulas), the four quantifier
axioms, reflexivity of equality, and the congruence scheme for every
operation, which quantifies the argument-wise equality over fresh variables
substituted into both binder lists.  Rules: detachment and generalization.
Equality at the formula sort is the biconditional throughout.

The generators return ordinary Proof values; nothing they produce is trusted,
everything goes back through check_proof in the tests.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .signature import (
    PROP, CONNECTIVES, Signature, forall_op, exists_op, eq_op, variable_sort,
    fresh_vars,
)
from .syntax import (
    Expr, mk, var, imp, forall, forall_chain, mk_eq, print_expr,
)
from .subst import fv, gv, substitutable, substitute, substitute1


class CalculusError(Exception):
    pass


class TooManyAtoms(CalculusError):
    pass


class SideConditionViolated(CalculusError):
    pass


class PremiseNotClosed(CalculusError):
    pass


class SourceProofInvalid(CalculusError):
    pass


class OracleUndecided(CalculusError):
    pass


@dataclass(frozen=True)
class Theory:
    signature: Signature
    axioms: tuple[Expr, ...] = ()

    def __post_init__(self):
        for a in self.axioms:
            if a.sort != PROP:
                raise CalculusError(f"axiom {print_expr(a)} is not a formula")


# --- justifications ---------------------------------------------------------

@dataclass(frozen=True)
class Taut:
    pass


@dataclass(frozen=True)
class ForallElim:
    x: str
    a: Expr


@dataclass(frozen=True)
class ExistsIntro:
    x: str
    a: Expr


@dataclass(frozen=True)
class ForallImpDist:
    x: str


@dataclass(frozen=True)
class ExistsImpDist:
    x: str


@dataclass(frozen=True)
class EqRefl:
    pass


@dataclass(frozen=True)
class EqCongr:
    """Congruence instance: op's slot ``i`` rewritten from binder list xs/body
    b1 to ys/b2, surrounded by the literal argument contexts before/after; the
    antecedent quantifies over zs substituted into both bodies."""
    op: str
    i: int
    xs: tuple[str, ...]
    ys: tuple[str, ...]
    zs: tuple[str, ...]
    b1: Expr
    b2: Expr
    before: tuple[tuple[tuple[str, ...], Expr], ...]
    after: tuple[tuple[tuple[str, ...], Expr], ...]


@dataclass(frozen=True)
class NonlogicalAxiom:
    index: int


@dataclass(frozen=True)
class Premise:
    index: int


@dataclass(frozen=True)
class MP:
    frm: int
    impl: int


@dataclass(frozen=True)
class Gen:
    frm: int
    x: str


@dataclass(frozen=True)
class ProofLine:
    formula: Expr
    justification: object


@dataclass(frozen=True)
class Proof:
    theory: Theory
    premises: tuple[Expr, ...]
    lines: tuple[ProofLine, ...]

    @property
    def conclusion(self) -> Expr:
        return self.lines[-1].formula


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    line: int | None = None
    reason: str | None = None

    def __bool__(self):
        return self.ok


# --- tautology recognition --------------------------------------------------

def _atoms(phi: Expr, acc: list[Expr]):
    if phi.head in CONNECTIVES:
        for _, body in phi.args:
            _atoms(body, acc)
    elif phi not in acc:
        acc.append(phi)


def is_tautology(phi: Expr, max_atoms: int = 20) -> bool:
    if phi.sort != PROP:
        return False
    atoms: list[Expr] = []
    _atoms(phi, atoms)
    if len(atoms) > max_atoms:
        raise TooManyAtoms(f"{len(atoms)} atoms exceed the {max_atoms}-atom bound")

    def ev(e: Expr, env) -> bool:
        h = e.head
        if h not in CONNECTIVES:
            return env[e]
        bodies = [ev(b, env) for _, b in e.args]
        if h == "top":
            return True
        if h == "bot":
            return False
        if h == "not":
            return not bodies[0]
        if h == "imp":
            return (not bodies[0]) or bodies[1]
        if h == "and":
            return bodies[0] and bodies[1]
        if h == "or":
            return bodies[0] or bodies[1]
        return bodies[0] == bodies[1]  # iff

    for values in itertools.product((False, True), repeat=len(atoms)):
        if not ev(phi, dict(zip(atoms, values))):
            return False
    return True


# --- scheme recognition -----------------------------------------------------

def _split_imp(phi: Expr):
    if phi.head == "imp":
        return phi.args[0][1], phi.args[1][1]
    return None


def _split_quant(sig: Signature, phi: Expr, which: str):
    """For a quantifier node return (bound variable, body), else None."""
    s = None
    for a in sig.var_sorts:
        if phi.head == (forall_op(a) if which == "forall" else exists_op(a)):
            s = a
            break
    if s is None:
        return None
    (binders, body), = phi.args
    return binders[0], body


def _is_equality(sig: Signature, phi: Expr):
    """Return (lhs, rhs) if phi is an equality (including the biconditional as
    formula-sort equality), else None."""
    if phi.head == "iff":
        return phi.args[0][1], phi.args[1][1]
    for a in sig.sorts:
        if phi.head == eq_op(a):
            return phi.args[0][1], phi.args[1][1]
    return None


def check_axiom_instance(sig: Signature, just, phi: Expr) -> bool:
    if phi.sort != PROP:
        return False
    try:
        if isinstance(just, Taut):
            return is_tautology(phi)

        if isinstance(just, ForallElim):
            split = _split_imp(phi)
            if split is None:
                return False
            lhs, rhs = split
            q = _split_quant(sig, lhs, "forall")
            if q is None or q[0] != just.x:
                return False
            body = q[1]
            if variable_sort(sig, just.x) != just.a.sort:
                return False
            return (substitutable(sig, just.a, just.x, body)
                    and rhs == substitute1(sig, body, just.x, just.a))

        if isinstance(just, ExistsIntro):
            split = _split_imp(phi)
            if split is None:
                return False
            lhs, rhs = split
            q = _split_quant(sig, rhs, "exists")
            if q is None or q[0] != just.x:
                return False
            body = q[1]
            if variable_sort(sig, just.x) != just.a.sort:
                return False
            return (substitutable(sig, just.a, just.x, body)
                    and lhs == substitute1(sig, body, just.x, just.a))

        if isinstance(just, ForallImpDist):
            split = _split_imp(phi)
            if split is None:
                return False
            lhs, rhs = split
            q = _split_quant(sig, lhs, "forall")
            if q is None or q[0] != just.x:
                return False
            inner = _split_imp(q[1])
            outer = _split_imp(rhs)
            if inner is None or outer is None:
                return False
            psi, chi = inner
            if just.x in fv(psi):
                return False
            return outer[0] == psi and outer[1] == forall(sig, just.x, chi)

        if isinstance(just, ExistsImpDist):
            split = _split_imp(phi)
            if split is None:
                return False
            lhs, rhs = split
            q = _split_quant(sig, lhs, "forall")
            if q is None or q[0] != just.x:
                return False
            inner = _split_imp(q[1])
            outer = _split_imp(rhs)
            if inner is None or outer is None:
                return False
            body, psi = inner
            if just.x in fv(psi):
                return False
            from .syntax import exists
            return outer[0] == exists(sig, just.x, body) and outer[1] == psi

        if isinstance(just, EqRefl):
            pair = _is_equality(sig, phi)
            return pair is not None and pair[0] == pair[1]

        if isinstance(just, EqCongr):
            spec = sig.opsig(just.op)
            if spec is None or not (0 <= just.i < spec.arity):
                return False
            if len(set(just.zs)) != len(just.zs):
                return False
            if set(just.zs) & (fv(just.b1) | fv(just.b2)):
                return False
            bsorts = spec.args[just.i][1]
            for seq in (just.xs, just.ys, just.zs):
                if tuple(variable_sort(sig, v) for v in seq) != bsorts:
                    return False
            lhs = mk(sig, just.op, just.before + ((just.xs, just.b1),) + just.after)
            rhs = mk(sig, just.op, just.before + ((just.ys, just.b2),) + just.after)
            inner = mk_eq(sig,
                          substitute(sig, just.b1, just.xs, [var(sig, z) for z in just.zs]),
                          substitute(sig, just.b2, just.ys, [var(sig, z) for z in just.zs]))
            want = imp(sig, forall_chain(sig, just.zs, inner), mk_eq(sig, lhs, rhs))
            return phi == want
    except TooManyAtoms:
        raise
    except Exception:
        return False
    return False


def check_proof(p: Proof) -> CheckResult:
    sig = p.theory.signature
    for n, line in enumerate(p.lines):
        phi, just = line.formula, line.justification
        if phi.sort != PROP:
            return CheckResult(False, n, "line formula is not of the formula sort")
        if isinstance(just, NonlogicalAxiom):
            if not (0 <= just.index < len(p.theory.axioms)):
                return CheckResult(False, n, "nonlogical axiom index out of range")
            if p.theory.axioms[just.index] != phi:
                return CheckResult(False, n, "formula differs from the cited axiom")
        elif isinstance(just, Premise):
            if not (0 <= just.index < len(p.premises)):
                return CheckResult(False, n, "premise index out of range")
            if p.premises[just.index] != phi:
                return CheckResult(False, n, "formula differs from the cited premise")
        elif isinstance(just, MP):
            if not (0 <= just.frm < n and 0 <= just.impl < n):
                return CheckResult(False, n, "rule references must be earlier lines")
            want = imp(sig, p.lines[just.frm].formula, phi)
            if p.lines[just.impl].formula != want:
                return CheckResult(False, n, "cited line is not the required implication")
        elif isinstance(just, Gen):
            if not (0 <= just.frm < n):
                return CheckResult(False, n, "rule references must be earlier lines")
            if variable_sort(sig, just.x) is None:
                return CheckResult(False, n, f"{just.x!r} is not a variable")
            if phi != forall(sig, just.x, p.lines[just.frm].formula):
                return CheckResult(False, n, "formula is not the generalization of the cited line")
        else:
            try:
                ok = check_axiom_instance(sig, just, phi)
            except TooManyAtoms as exc:
                return CheckResult(False, n, str(exc))
            if not ok:
                return CheckResult(False, n,
                                   f"not an instance of {type(just).__name__}")
    return CheckResult(True)


def used_axioms(p: Proof) -> tuple[Expr, ...]:
    """The finite set of theory axioms the proof actually cites, in order of
    first use; re-checking against exactly these axioms succeeds."""
    seen = []
    for line in p.lines:
        if isinstance(line.justification, NonlogicalAxiom):
            if line.formula not in seen:
                seen.append(line.formula)
    return tuple(seen)


def reindex_axioms(p: Proof, axioms: tuple[Expr, ...]) -> Proof:
    """The same proof stated over a theory with the given axiom list."""
    new_lines = []
    for line in p.lines:
        j = line.justification
        if isinstance(j, NonlogicalAxiom):
            j = NonlogicalAxiom(axioms.index(line.formula))
        new_lines.append(ProofLine(line.formula, j))
    return Proof(Theory(p.theory.signature, axioms), p.premises, tuple(new_lines))


def is_consistent_up_to(theory: Theory, oracle) -> bool:
    from .syntax import bot
    verdict = oracle.decide(bot(theory.signature))
    if verdict == "undecided":
        raise OracleUndecided("oracle cannot decide the falsum query")
    return verdict != "provable"


# --- proof construction -----------------------------------------------------

class ProofBuilder:
    def __init__(self, theory: Theory, premises=()):
        self.theory = theory
        self.sig = theory.signature
        self.premises = tuple(premises)
        self.lines: list[ProofLine] = []
        self.avoid: set[str] = set()

    def add(self, formula: Expr, just) -> int:
        self.lines.append(ProofLine(formula, just))
        return len(self.lines) - 1

    def formula(self, idx: int) -> Expr:
        return self.lines[idx].formula

    def taut(self, formula: Expr) -> int:
        return self.add(formula, Taut())

    def mp(self, frm: int, impl: int) -> int:
        want = self.formula(impl)
        lhs, rhs = want.args[0][1], want.args[1][1]
        assert lhs == self.formula(frm)
        return self.add(rhs, MP(frm, impl))

    def gen(self, frm: int, x: str) -> int:
        return self.add(forall(self.sig, x, self.formula(frm)), Gen(frm, x))

    def syll(self, h_a: int, a_b: int) -> int:
        """From H->A and A->B conclude H->B (one tautology, two detachments)."""
        sig = self.sig
        fa, fb = self.formula(h_a), self.formula(a_b)
        t = self.taut(imp(sig, fa, imp(sig, fb, imp(sig, fa.args[0][1], fb.args[1][1]))))
        step = self.mp(h_a, t)
        return self.mp(a_b, step)

    def note_vars(self, *exprs):
        for e in exprs:
            self.avoid |= fv(e) | gv(e)

    def fresh(self, sorts) -> tuple[str, ...]:
        out = fresh_vars(self.sig, sorts, self.avoid)
        self.avoid |= set(out)
        return out

    def dist_forall(self, idx: int, x: str) -> int:
        """From H -> chi (with x not free in H) conclude H -> forall x chi."""
        sig = self.sig
        f = self.formula(idx)
        h, chi = f.args[0][1], f.args[1][1]
        assert x not in fv(h)
        g = self.gen(idx, x)
        d = self.add(imp(sig, self.formula(g), imp(sig, h, forall(sig, x, chi))),
                     ForallImpDist(x))
        return self.mp(g, d)

    def proof(self) -> Proof:
        return Proof(self.theory, self.premises, tuple(self.lines))


def _trans_line(b: ProofBuilder, x: Expr, y: Expr, z: Expr) -> int:
    """Line index of x=y -> (y=z -> x=z), via the congruence instance
    x=y -> (x=z <-> y=z) in the first slot of the equality symbol."""
    sig = b.sig
    op = "iff" if x.sort == PROP else eq_op(x.sort)
    ab = mk_eq(sig, x, y)
    ac = mk_eq(sig, x, z)
    bc = mk_eq(sig, y, z)
    congr = b.add(imp(sig, ab, mk_eq(sig, ac, bc)),
                  EqCongr(op, 0, (), (), (), x, y, (), (((), z),)))
    t = b.taut(imp(sig, b.formula(congr), imp(sig, ab, imp(sig, bc, ac))))
    return b.mp(congr, t)


def derive_symmetry(theory: Theory, a: Expr, b_: Expr) -> Proof:
    """Proof of a=b -> b=a."""
    sig = theory.signature
    b = ProofBuilder(theory)
    op = "iff" if a.sort == PROP else eq_op(a.sort)
    ab = mk_eq(sig, a, b_)
    aa = mk_eq(sig, a, a)
    ba = mk_eq(sig, b_, a)
    congr = b.add(imp(sig, ab, mk_eq(sig, aa, ba)),
                  EqCongr(op, 0, (), (), (), a, b_, (), (((), a),)))
    t = b.taut(imp(sig, b.formula(congr), imp(sig, aa, imp(sig, ab, ba))))
    step = b.mp(congr, t)
    refl = b.add(aa, EqRefl())
    b.mp(refl, step)
    return b.proof()


def derive_transitivity(theory: Theory, x: Expr, y: Expr, z: Expr) -> Proof:
    """Proof of x=y -> (y=z -> x=z)."""
    b = ProofBuilder(theory)
    _trans_line(b, x, y, z)
    return b.proof()


def _elim_chain(b: ProofBuilder, start: Expr, xs, instances) -> int:
    """From the universally quantified ``start`` = forall xs ... , produce the
    line start -> result of instantiating the outermost variables with the
    given expressions, one elimination per step."""
    sig = b.sig
    cur = b.taut(imp(sig, start, start))
    psi = start
    for x, a in zip(xs, instances):
        (binders, body), = psi.args
        assert binders == (x,)
        nxt = substitute1(sig, body, x, a)
        ax = b.add(imp(sig, psi, nxt), ForallElim(x, a))
        cur = b.syll(cur, ax)
        psi = nxt
    return cur


def _eq_theorem(b: ProofBuilder, e: Expr, z: str, r: Expr, s: Expr, ys) -> int:
    """Core induction: line index proving forall ys (r=s) -> e[z<-r]=e[z<-s]."""
    sig = b.sig
    ys = tuple(ys)
    rs = mk_eq(sig, r, s)
    h = forall_chain(sig, ys, rs)

    def recurse(e: Expr) -> int:
        er = substitute1(sig, e, z, r)
        es = substitute1(sig, e, z, s)
        if er == es:
            refl = b.add(mk_eq(sig, er, er), EqRefl())
            t = b.taut(imp(sig, b.formula(refl), imp(sig, h, b.formula(refl))))
            return b.mp(refl, t)
        if not e.args:
            # e is the variable z itself: peel the quantifiers off h
            assert e.head == z
            if not ys:
                return b.taut(imp(sig, h, h))
            return _elim_chain(b, h, ys, [var(sig, y) for y in ys])

        # slot-by-slot chain: rewrite the i-th argument from p_i to q_i
        cur = None
        f_start = er
        f_prev = er
        for i, (binders, a_i) in enumerate(e.args):
            p_i = er.args[i][1]
            q_i = es.args[i][1]
            if p_i == q_i:
                continue
            assert z not in binders
            rec = recurse(a_i)  # h -> p_i = q_i
            chi = mk_eq(sig, p_i, q_i)
            assert b.formula(rec) == imp(sig, h, chi)
            a_idx = rec
            for x in reversed(binders):
                a_idx = b.dist_forall(a_idx, x)  # h -> forall binders chi
            phi_i = forall_chain(sig, binders, chi)

            f_new = Expr(e.head, es.args[:i + 1] + er.args[i + 1:], e.sort)
            step_eq = mk_eq(sig, f_prev, f_new)
            if binders:
                zs = b.fresh(tuple(variable_sort(sig, v) for v in binders))
                elim = _elim_chain(b, phi_i, binders, [var(sig, w) for w in zs])
                inner = mk_eq(sig,
                              substitute(sig, p_i, binders, [var(sig, w) for w in zs]),
                              substitute(sig, q_i, binders, [var(sig, w) for w in zs]))
                assert b.formula(elim) == imp(sig, phi_i, inner)
                for w in reversed(zs):
                    elim = b.dist_forall(elim, w)
                ant = forall_chain(sig, zs, inner)
                congr = b.add(imp(sig, ant, step_eq),
                              EqCongr(e.head, i, binders, binders, zs, p_i, q_i,
                                      es.args[:i], er.args[i + 1:]))
                phi_to_step = b.syll(elim, congr)
            else:
                phi_to_step = b.add(imp(sig, chi, step_eq),
                                    EqCongr(e.head, i, (), (), (), p_i, q_i,
                                            es.args[:i], er.args[i + 1:]))
            h_to_step = b.syll(a_idx, phi_to_step)  # h -> f_prev = f_new

            if cur is None:
                cur = h_to_step
            else:
                tr = _trans_line(b, f_start, f_prev, f_new)
                f_cur = b.formula(cur)
                f_stp = b.formula(h_to_step)
                goal = imp(sig, h, mk_eq(sig, f_start, f_new))
                t = b.taut(imp(sig, b.formula(tr),
                               imp(sig, f_cur, imp(sig, f_stp, goal))))
                m1 = b.mp(tr, t)
                m2 = b.mp(cur, m1)
                cur = b.mp(h_to_step, m2)
            f_prev = f_new
        assert f_prev == es
        return cur

    b.note_vars(e, r, s)
    b.avoid |= set(ys) | {z}
    idx = recurse(e)
    assert b.formula(idx) == imp(sig, h,
                                 mk_eq(sig, substitute1(sig, e, z, r),
                                       substitute1(sig, e, z, s)))
    return idx


def derive_equality_theorem(theory: Theory, e: Expr, z: str, r: Expr, s: Expr,
                            ys) -> Proof:
    """Proof of forall ys (r=s) -> e[z<-r] = e[z<-s]; requires every bound
    variable of e that is free in r=s to appear in ys."""
    sig = theory.signature
    ys = tuple(ys)
    if not gv(e) & fv(mk_eq(sig, r, s)) <= set(ys):
        raise SideConditionViolated(
            "bound variables of e free in r=s must be covered by ys")
    b = ProofBuilder(theory)
    _eq_theorem(b, e, z, r, s, ys)
    return b.proof()


def sorted_vars(sig: Signature, names) -> tuple[str, ...]:
    import re
    def key(n):
        m = re.match(r"^v(\d+)\^(\w+)$", n)
        return (m.group(2), int(m.group(1)))
    return tuple(sorted(names, key=key))


def derive_equality_rule(theory: Theory, e: Expr, z: str, r: Expr, s: Expr) -> Proof:
    """Proof with premise r=s of e[z<-r] = e[z<-s]."""
    sig = theory.signature
    rs = mk_eq(sig, r, s)
    ys = sorted_vars(sig, gv(e) & fv(rs))
    b = ProofBuilder(theory, premises=(rs,))
    prem = b.add(rs, Premise(0))
    for y in reversed(ys):
        prem = b.gen(prem, y)
    thm = _eq_theorem(b, e, z, r, s, ys)
    b.mp(prem, thm)
    return b.proof()


def deduction_transform(p: Proof) -> Proof:
    """Shift the last (closed) premise into the conclusion: from a proof of
    psi under premises (..., phi) produce a proof of phi -> psi under the
    remaining premises."""
    if not p.premises:
        raise SourceProofInvalid("no premise to discharge")
    phi = p.premises[-1]
    if fv(phi):
        raise PremiseNotClosed(f"premise {print_expr(phi)} has free variables")
    res = check_proof(p)
    if not res:
        raise SourceProofInvalid(f"line {res.line}: {res.reason}")

    sig = p.theory.signature
    b = ProofBuilder(p.theory, premises=p.premises[:-1])
    last = len(p.premises) - 1
    mapping: dict[int, int] = {}

    for n, line in enumerate(p.lines):
        chi, just = line.formula, line.justification
        if isinstance(just, Premise) and just.index == last:
            mapping[n] = b.taut(imp(sig, phi, phi))
        elif isinstance(just, MP):
            t = b.taut(imp(sig, b.formula(mapping[just.frm]),
                           imp(sig, b.formula(mapping[just.impl]),
                               imp(sig, phi, chi))))
            m1 = b.mp(mapping[just.frm], t)
            mapping[n] = b.mp(mapping[just.impl], m1)
        elif isinstance(just, Gen):
            mapping[n] = b.dist_forall(mapping[just.frm], just.x)
        else:
            base = b.add(chi, just)
            t = b.taut(imp(sig, chi, imp(sig, phi, chi)))
            mapping[n] = b.mp(base, t)
    return b.proof()
