"""Signatures for many-sorted logic with variable-binding operations.

A signature declares a set of sorts (always containing the formula sort
``pi``), a subset of "variable sorts" over which quantification and binding
are allowed, and a family of operations.  Each operation carries a ustype:
its result sort plus, per argument slot, the argument's sort and the sorts of
the variables that slot binds.  The logical symbols (connectives, quantifiers
per variable sort, equality per sort) are generated automatically and are
present in every signature.

Variables are not declared; for every variable sort ``a`` there is the
countable family ``v0^a, v1^a, ...``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field


PROP = "pi"

TOP = "top"
BOT = "bot"
NOT = "not"
IMP = "imp"
AND = "and"
OR = "or"
IFF = "iff"

CONNECTIVES = frozenset({TOP, BOT, NOT, IMP, AND, OR, IFF})


def forall_op(sort: str) -> str:
    return f"forall^{sort}"


def exists_op(sort: str) -> str:
    return f"exists^{sort}"


def eq_op(sort: str) -> str:
    return f"eq_{sort}"


class SignatureError(Exception):
    pass


class UnknownSort(SignatureError):
    pass


class MalformedUstype(SignatureError):
    pass


class BinderSortNotInVSRT(SignatureError):
    pass


@dataclass(frozen=True)
class OpSig:
    """ustype of one operation: result sort and (arg sort, binder sorts) slots."""

    result: str
    args: tuple[tuple[str, tuple[str, ...]], ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)


_NAME_RE = re.compile(r"\w+")


def _tokenize_ustype(text: str) -> list[str]:
    toks = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "(),":
            toks.append(ch)
            i += 1
        else:
            m = _NAME_RE.match(text, i)
            if not m:
                raise MalformedUstype(f"unexpected character {ch!r} in ustype {text!r}")
            toks.append(m.group())
            i = m.end()
    return toks


def parse_ustype(text: str, sorts: frozenset[str], var_sorts: frozenset[str]) -> OpSig:
    """Parse ``gamma`` or ``(theta,...,theta)gamma`` with theta = ``alpha`` or
    ``(beta,...,beta)alpha``."""
    toks = _tokenize_ustype(text)
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else None

    def take(expected=None):
        nonlocal pos
        if pos >= len(toks):
            raise MalformedUstype(f"ustype {text!r} ends unexpectedly")
        tok = toks[pos]
        if expected is not None and tok != expected:
            raise MalformedUstype(f"expected {expected!r}, got {tok!r} in ustype {text!r}")
        pos += 1
        return tok

    def sort_name(binder: bool) -> str:
        tok = take()
        if tok in "(),":
            raise MalformedUstype(f"expected sort name, got {tok!r} in ustype {text!r}")
        if tok not in sorts:
            raise UnknownSort(f"sort {tok!r} not declared")
        if binder and tok not in var_sorts:
            raise BinderSortNotInVSRT(f"binder sort {tok!r} not a variable sort")
        return tok

    def theta() -> tuple[str, tuple[str, ...]]:
        if peek() == "(":
            take("(")
            binders = [sort_name(binder=True)]
            while peek() == ",":
                take(",")
                binders.append(sort_name(binder=True))
            take(")")
            return sort_name(binder=False), tuple(binders)
        return sort_name(binder=False), ()

    if peek() == "(":
        take("(")
        args = [theta()]
        while peek() == ",":
            take(",")
            args.append(theta())
        take(")")
        result = sort_name(binder=False)
    else:
        args = []
        result = sort_name(binder=False)
    if pos != len(toks):
        raise MalformedUstype(f"trailing tokens in ustype {text!r}")
    return OpSig(result, tuple(args))


def print_ustype(op: OpSig) -> str:
    if not op.args:
        return op.result
    parts = []
    for arg_sort, binders in op.args:
        if binders:
            parts.append("(" + ",".join(binders) + ")" + arg_sort)
        else:
            parts.append(arg_sort)
    return "(" + ",".join(parts) + ")" + op.result


def distinguished_ops(sorts: frozenset[str], var_sorts: frozenset[str]) -> dict[str, OpSig]:
    ops = {
        TOP: OpSig(PROP),
        BOT: OpSig(PROP),
        NOT: OpSig(PROP, ((PROP, ()),)),
        IMP: OpSig(PROP, ((PROP, ()), (PROP, ()))),
        AND: OpSig(PROP, ((PROP, ()), (PROP, ()))),
        OR: OpSig(PROP, ((PROP, ()), (PROP, ()))),
        IFF: OpSig(PROP, ((PROP, ()), (PROP, ()))),
    }
    for a in sorted(var_sorts):
        ops[forall_op(a)] = OpSig(PROP, ((PROP, (a,)),))
        ops[exists_op(a)] = OpSig(PROP, ((PROP, (a,)),))
    for a in sorted(sorts):
        ops[eq_op(a)] = OpSig(PROP, ((a, ()), (a, ())))
    return ops


@dataclass(frozen=True)
class Signature:
    sorts: frozenset[str]
    var_sorts: frozenset[str]
    ops: dict[str, OpSig] = field(default_factory=dict)

    def opsig(self, name: str) -> OpSig | None:
        return self.ops.get(name)

    def is_distinguished(self, name: str) -> bool:
        return name in distinguished_ops(self.sorts, self.var_sorts)

    def user_ops(self) -> dict[str, OpSig]:
        dist = distinguished_ops(self.sorts, self.var_sorts)
        return {n: s for n, s in self.ops.items() if n not in dist}


def make_signature(sorts=(), var_sorts=(), ops: dict[str, str | OpSig] | None = None) -> Signature:
    """Build a signature; ``pi`` is added to the sorts and the logical symbols
    to the operations.  User op values may be ustype strings or OpSig values."""
    srt = frozenset(sorts) | {PROP}
    vsrt = frozenset(var_sorts)
    if not vsrt <= srt:
        raise UnknownSort(f"variable sorts {sorted(vsrt - srt)} not declared as sorts")
    all_ops = distinguished_ops(srt, vsrt)
    for name, spec in (ops or {}).items():
        if name in all_ops:
            raise SignatureError(f"operation name {name!r} collides with a logical symbol")
        if isinstance(spec, str):
            spec = parse_ustype(spec, srt, vsrt)
        all_ops[name] = spec
    sig = Signature(srt, vsrt, all_ops)
    bad = validate_signature(sig)
    if bad:
        raise SignatureError("; ".join(bad))
    return sig


_VAR_RE = re.compile(r"^v(\d+)\^(\w+)$")


def variable_name(sort: str, index: int) -> str:
    return f"v{index}^{sort}"


def variable_sort(sig: Signature, name: str) -> str | None:
    """The sort of ``name`` if it is a variable of this signature, else None."""
    m = _VAR_RE.match(name)
    if m and m.group(2) in sig.var_sorts:
        return m.group(2)
    return None


def is_variable(sig: Signature, name: str) -> bool:
    return variable_sort(sig, name) is not None


def variables(sig: Signature, sort: str):
    """The countable variable family of a variable sort, in index order."""
    if sort not in sig.var_sorts:
        raise UnknownSort(f"{sort!r} is not a variable sort")
    i = 0
    while True:
        yield variable_name(sort, i)
        i += 1


def fresh_vars(sig: Signature, sorts, avoid) -> tuple[str, ...]:
    """Pairwise-distinct variables of the given sorts, disjoint from avoid.
    Deterministic: lowest available indices, left to right."""
    taken = set(avoid)
    out = []
    for s in sorts:
        i = 0
        while variable_name(s, i) in taken:
            i += 1
        name = variable_name(s, i)
        taken.add(name)
        out.append(name)
    return tuple(out)


def validate_signature(sig: Signature) -> list[str]:
    """Empty list iff all signature invariants hold."""
    bad = []
    if PROP not in sig.sorts:
        bad.append(f"distinguished sort {PROP!r} missing")
    if not sig.var_sorts <= sig.sorts:
        bad.append("VSRT not a subset of SRT")
    dist = distinguished_ops(sig.sorts, sig.var_sorts)
    for name, spec in dist.items():
        got = sig.ops.get(name)
        if got is None:
            bad.append(f"distinguished symbol {name!r} missing")
        elif got != spec:
            bad.append(f"distinguished ustype mismatch for {name!r}")
    for name, spec in sig.ops.items():
        if variable_sort(sig, name) is not None:
            bad.append(f"VAR and SOP not disjoint: {name!r}")
        if spec.result not in sig.sorts:
            bad.append(f"op {name!r}: unknown result sort {spec.result!r}")
        for arg_sort, binders in spec.args:
            if arg_sort not in sig.sorts:
                bad.append(f"op {name!r}: unknown argument sort {arg_sort!r}")
            for b in binders:
                if b not in sig.var_sorts:
                    bad.append(f"op {name!r}: binder sort {b!r} not a variable sort")
    return bad


def extends(sub: Signature, sup: Signature) -> bool:
    """True iff sup extends sub: same sorts and variable sorts, every operation
    of sub present in sup with the same ustype."""
    if sub.sorts != sup.sorts or sub.var_sorts != sup.var_sorts:
        return False
    return all(sup.ops.get(name) == spec for name, spec in sub.ops.items())
