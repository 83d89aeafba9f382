"""Text formats for signatures, structures (.fls), theories (.flt) and
proofs (.flp).

Structure files list signature declarations, then carriers, interpretations
and optional selected function sets::

    sort a
    varsort a
    op f : (a)a
    carrier a = x,y
    interp f { (x) -> y, (y) -> x }
    selected a^(a) = {(x)->x,(y)->y}, {(x)->y,(y)->x}

Atoms containing punctuation (term-model carriers are printed expressions)
are written in double quotes.  A file with any ``selected`` line describes a
non-full structure; otherwise interpretations are completed over the full
function spaces.  Theory files use the same signature header plus ``axiom``
lines; proof files hold ``premise`` lines and numbered steps of the form
``<n>. <formula> ; <rule> <args>`` with 1-based line references.
"""
from __future__ import annotations

import json
import re

from .signature import (
    PROP, Signature, make_signature, print_ustype,
)
from .syntax import Expr, parse_expr, print_expr
from .calculus import (
    Theory, Proof, ProofLine, Taut, ForallElim, ExistsIntro, ForallImpDist,
    ExistsImpDist, EqRefl, EqCongr, NonlogicalAxiom, Premise, MP, Gen,
)
from .semantics import (
    Structure, FnTable, make_full_structure, _fill_distinguished,
    MissingInterpretation,
)


class FormatError(Exception):
    pass


WORD = re.compile(r"\w+")


def quote_atom(a: str) -> str:
    if WORD.fullmatch(a):
        return a
    return '"' + a.replace("\\", "\\\\").replace('"', '\\"') + '"'


_TOKEN = re.compile(r'"(?:[^"\\]|\\.)*"|->|[{}(),=]|\w+')


def _tokenize_values(text: str) -> list[str]:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormatError(f"bad character {text[pos]!r} in {text!r}")
        toks.append(m.group())
        pos = m.end()
    return toks


def _unquote(tok: str) -> str:
    if tok.startswith('"'):
        return re.sub(r"\\(.)", r"\1", tok[1:-1])
    return tok


class _ValueParser:
    """Raw nested values: atoms and brace-delimited tables.  Sorts are
    attached afterwards from the context of use."""

    def __init__(self, text: str):
        self.toks = _tokenize_values(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, expected=None):
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise FormatError(f"expected {expected!r}, got {tok!r}")
        self.i += 1
        return tok

    def value(self):
        if self.peek() == "{":
            return self.table()
        return _unquote(self.take())

    def table(self):
        self.take("{")
        rows = []
        while True:
            rows.append(self.row())
            if self.peek() == ",":
                self.take(",")
                continue
            self.take("}")
            return ("table", rows)

    def row(self):
        if self.peek() == "(":
            self.take("(")
            args = [self.value()]
            while self.peek() == ",":
                self.take(",")
                args.append(self.value())
            self.take(")")
        else:
            args = [self.value()]
        self.take("->")
        return (tuple(args), self.value())


def _coerce(raw, arg_sort: str, binder_sorts: tuple[str, ...]):
    """Attach sorts: a binder slot expects a table over binder_sorts, a plain
    slot expects an atom."""
    if binder_sorts:
        if not (isinstance(raw, tuple) and raw[0] == "table"):
            raise FormatError(f"expected a function table, got {raw!r}")
        rows = {args: v for args, v in raw[1]}
        for args, v in rows.items():
            if any(isinstance(a, tuple) for a in args) or isinstance(v, tuple):
                raise FormatError("nested tables are not supported")
        return FnTable.from_map(binder_sorts, arg_sort, rows)
    if isinstance(raw, tuple):
        raise FormatError(f"expected an atom of sort {arg_sort!r}, got a table")
    return raw


def _split_decls(text: str):
    """Partition lines into signature declarations and the remainder."""
    sorts, var_sorts, ops, rest = [], [], {}, []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, tail = line.partition(" ")
        tail = tail.strip()
        if head == "sort":
            sorts.extend(x.strip() for x in tail.split(",") if x.strip())
        elif head == "varsort":
            var_sorts.extend(x.strip() for x in tail.split(",") if x.strip())
        elif head == "op":
            name, sep, utype = tail.partition(":")
            if not sep:
                raise FormatError(f"line {lineno}: op needs 'name : ustype'")
            ops[name.strip()] = utype.strip()
        else:
            rest.append((lineno, line))
    return sorts, var_sorts, ops, rest


def parse_signature(text: str) -> Signature:
    sorts, var_sorts, ops, rest = _split_decls(text)
    if rest:
        lineno, line = rest[0]
        raise FormatError(f"line {lineno}: unexpected {line!r}")
    return make_signature(sorts, var_sorts, ops)


def signature_lines(sig: Signature) -> list[str]:
    out = []
    user_sorts = sorted(sig.sorts - {PROP})
    if user_sorts:
        out.append("sort " + ",".join(user_sorts))
    vs = sorted(sig.var_sorts)
    if vs:
        out.append("varsort " + ",".join(vs))
    for name in sorted(sig.user_ops()):
        out.append(f"op {name} : {print_ustype(sig.ops[name])}")
    return out


# --- structures -------------------------------------------------------------

def parse_structure(text: str) -> Structure:
    sorts, var_sorts, ops, rest = _split_decls(text)
    sig = make_signature(sorts, var_sorts, ops)
    carriers = {}
    interp_raw = {}
    selected_raw = []
    for lineno, line in rest:
        head, _, tail = line.partition(" ")
        tail = tail.strip()
        try:
            if head == "carrier":
                sort, sep, vals = tail.partition("=")
                sort = sort.strip()
                if sort not in sig.sorts:
                    raise FormatError(f"unknown sort {sort!r}")
                p = _ValueParser(vals)
                atoms = [p.value()]
                while p.peek() == ",":
                    p.take(",")
                    atoms.append(p.value())
                carriers[sort] = tuple(atoms)
            elif head == "interp":
                name, sep, val = tail.partition("=")
                if not sep:
                    name, val = tail.split(None, 1)
                name = name.strip()
                spec = sig.opsig(name)
                if spec is None:
                    raise FormatError(f"unknown operation {name!r}")
                raw = _ValueParser(val).value()
                if spec.arity == 0:
                    interp_raw[name] = _coerce(raw, spec.result, ())
                else:
                    if not (isinstance(raw, tuple) and raw[0] == "table"):
                        raise FormatError(f"interp for {name!r} must be a table")
                    table = {}
                    for args, v in raw[1]:
                        if len(args) != spec.arity:
                            raise FormatError(f"wrong arity in row for {name!r}")
                        key = tuple(_coerce(a, s, bs)
                                    for a, (s, bs) in zip(args, spec.args))
                        table[key] = _coerce(v, spec.result, ())
                    interp_raw[name] = table
            elif head == "selected":
                decl, sep, val = tail.partition("=")
                m = re.fullmatch(r"(\w+)\^\(([\w,]*)\)", decl.strip())
                if not m:
                    raise FormatError(f"bad selected declaration {decl!r}")
                gamma = m.group(1)
                dom = tuple(x for x in m.group(2).split(",") if x)
                p = _ValueParser(val)
                tables = [_coerce(p.value(), gamma, dom)]
                while p.peek() == ",":
                    p.take(",")
                    tables.append(_coerce(p.value(), gamma, dom))
                selected_raw.append(((gamma, dom), frozenset(tables)))
            else:
                raise FormatError(f"unexpected {head!r}")
        except FormatError as exc:
            raise FormatError(f"line {lineno}: {exc}") from None

    if not selected_raw:
        user_carriers = {s: a for s, a in carriers.items() if s != PROP}
        return make_full_structure(sig, user_carriers, interp_raw)

    carriers.setdefault(PROP, ("0", "1"))
    for sort in sig.sorts:
        if sort not in carriers:
            raise MissingInterpretation(f"no carrier for sort {sort!r}")
    s = Structure(sig, carriers, interp_raw, full=False, selected=dict(selected_raw))
    _fill_distinguished(s)
    return s


def _print_table(t: FnTable) -> str:
    rows = []
    for args, v in t.rows:
        if len(args) == 1:
            lhs = quote_atom(args[0])
        else:
            lhs = "(" + ",".join(quote_atom(a) for a in args) + ")"
        rows.append(f"{lhs}->{quote_atom(v)}")
    return "{" + ",".join(rows) + "}"


def _print_value(v) -> str:
    if isinstance(v, FnTable):
        return _print_table(v)
    return quote_atom(v)


def print_structure(s: Structure) -> str:
    sig = s.signature
    out = signature_lines(sig)
    for sort in sorted(s.carriers):
        if sort == PROP and s.carriers[sort] == ("0", "1"):
            continue
        out.append(f"carrier {sort} = " +
                   ",".join(quote_atom(a) for a in s.carriers[sort]))
    for name in sorted(sig.user_ops()):
        spec = sig.opsig(name)
        v = s.interp[name]
        if spec.arity == 0:
            out.append(f"interp {name} = {quote_atom(v)}")
        else:
            rows = []
            for args, val in sorted(v.items(), key=repr):
                lhs = "(" + ",".join(_print_value(a) for a in args) + ")"
                rows.append(f"{lhs} -> {quote_atom(val)}")
            out.append(f"interp {name} {{ " + ", ".join(rows) + " }")
    if not s.full:
        for (gamma, dom), tables in sorted(s.selected.items()):
            decl = f"{gamma}^(" + ",".join(dom) + ")"
            body = ", ".join(_print_table(t) for t in sorted(tables, key=repr))
            out.append(f"selected {decl} = {body}")
    return "\n".join(out) + "\n"


# --- theories ---------------------------------------------------------------

def parse_theory(text: str) -> Theory:
    sorts, var_sorts, ops, rest = _split_decls(text)
    sig = make_signature(sorts, var_sorts, ops)
    axioms = []
    for lineno, line in rest:
        head, _, tail = line.partition(" ")
        if head != "axiom":
            raise FormatError(f"line {lineno}: unexpected {head!r}")
        try:
            axioms.append(parse_expr(sig, tail.strip()))
        except Exception as exc:
            raise FormatError(f"line {lineno}: {exc}") from None
    return Theory(sig, tuple(axioms))


def print_theory(t: Theory) -> str:
    out = signature_lines(t.signature)
    for a in t.axioms:
        out.append("axiom " + print_expr(a))
    return "\n".join(out) + "\n"


# --- proofs -----------------------------------------------------------------

def _arg_expr(e: Expr) -> str:
    return print_expr(e)


def _args_to_json(sig, just) -> str:
    if isinstance(just, (ForallElim, ExistsIntro)):
        return json.dumps({"x": just.x, "a": print_expr(just.a)})
    if isinstance(just, (ForallImpDist, ExistsImpDist)):
        return json.dumps({"x": just.x})
    if isinstance(just, EqCongr):
        return json.dumps({
            "op": just.op, "i": just.i,
            "xs": list(just.xs), "ys": list(just.ys), "zs": list(just.zs),
            "b1": print_expr(just.b1), "b2": print_expr(just.b2),
            "before": [[list(bs), print_expr(b)] for bs, b in just.before],
            "after": [[list(bs), print_expr(b)] for bs, b in just.after],
        })
    raise FormatError(f"unhandled justification {just!r}")


RULE_NAMES = {
    Taut: "taut", EqRefl: "eqrefl", ForallElim: "forall_elim",
    ExistsIntro: "exists_intro", ForallImpDist: "forall_imp_dist",
    ExistsImpDist: "exists_imp_dist", EqCongr: "eqcongr",
    NonlogicalAxiom: "axiom", Premise: "premise", MP: "mp", Gen: "gen",
}


def just_to_text(sig: Signature, just) -> str:
    if isinstance(just, (Taut, EqRefl)):
        return RULE_NAMES[type(just)]
    if isinstance(just, NonlogicalAxiom):
        return f"axiom {just.index}"
    if isinstance(just, Premise):
        return f"premise {just.index}"
    if isinstance(just, MP):
        return f"mp {just.frm + 1} {just.impl + 1}"
    if isinstance(just, Gen):
        return f"gen {just.frm + 1} {just.x}"
    return f"{RULE_NAMES[type(just)]} {_args_to_json(sig, just)}"


def just_from_text(sig: Signature, text: str):
    keyword, _, tail = text.strip().partition(" ")
    tail = tail.strip()
    if keyword == "taut":
        return Taut()
    if keyword == "eqrefl":
        return EqRefl()
    if keyword == "axiom":
        return NonlogicalAxiom(int(tail))
    if keyword == "premise":
        return Premise(int(tail))
    if keyword == "mp":
        frm, impl = tail.split()
        return MP(int(frm) - 1, int(impl) - 1)
    if keyword == "gen":
        frm, x = tail.split()
        return Gen(int(frm) - 1, x)
    try:
        d = json.loads(tail) if tail else {}
    except json.JSONDecodeError as exc:
        raise FormatError(f"bad justification arguments: {exc}") from None
    if keyword == "forall_elim":
        return ForallElim(d["x"], parse_expr(sig, d["a"]))
    if keyword == "exists_intro":
        return ExistsIntro(d["x"], parse_expr(sig, d["a"]))
    if keyword == "forall_imp_dist":
        return ForallImpDist(d["x"])
    if keyword == "exists_imp_dist":
        return ExistsImpDist(d["x"])
    if keyword == "eqcongr":
        return EqCongr(
            d["op"], d["i"],
            tuple(d["xs"]), tuple(d["ys"]), tuple(d["zs"]),
            parse_expr(sig, d["b1"]), parse_expr(sig, d["b2"]),
            tuple((tuple(bs), parse_expr(sig, b)) for bs, b in d["before"]),
            tuple((tuple(bs), parse_expr(sig, b)) for bs, b in d["after"]))
    raise FormatError(f"unknown rule {keyword!r}")


_STEP = re.compile(r"^(\d+)\.\s+(.*?)\s*;\s*(.*)$")


def parse_proof(text: str, theory: Theory) -> Proof:
    sig = theory.signature
    premises = []
    lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        raw = raw.split("#", 1)[0].strip()
        if not raw:
            continue
        if raw.startswith("premise "):
            if lines:
                raise FormatError(f"line {lineno}: premises must come first")
            premises.append(parse_expr(sig, raw[len("premise "):]))
            continue
        m = _STEP.match(raw)
        if not m:
            raise FormatError(f"line {lineno}: expected '<n>. <formula> ; <rule>'")
        n, formula_text, just_text = m.groups()
        if int(n) != len(lines) + 1:
            raise FormatError(f"line {lineno}: step numbered {n}, "
                              f"expected {len(lines) + 1}")
        try:
            formula = parse_expr(sig, formula_text)
            just = just_from_text(sig, just_text)
        except FormatError:
            raise
        except Exception as exc:
            raise FormatError(f"line {lineno}: {exc}") from None
        lines.append(ProofLine(formula, just))
    return Proof(theory, tuple(premises), tuple(lines))


def print_proof(p: Proof) -> str:
    sig = p.theory.signature
    out = ["premise " + print_expr(e) for e in p.premises]
    for i, line in enumerate(p.lines):
        out.append(f"{i + 1}. {print_expr(line.formula)} ; "
                   f"{just_to_text(sig, line.justification)}")
    return "\n".join(out) + "\n"


def load(path: str, kind: str):
    with open(path) as fh:
        text = fh.read()
    if kind == "structure":
        return parse_structure(text)
    if kind == "theory":
        return parse_theory(text)
    raise ValueError(kind)


def save(path: str, text: str):
    with open(path, "w") as fh:
        fh.write(text)
