"""Reader and writer for the line-oriented TBox document format.

One statement per line; a parenthesised expression may continue onto
following lines until its parentheses balance. `#` starts a comment.
The grammar is documented in docs/tbox-format.md.
"""
from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from typing import Union

from ..errors import DuplicateAxiomError, TBoxSyntaxError, UnknownSymbolError
from .expr import (DATATYPES, And, Atom, ConceptExpr, DataExists, DataForAll, DataRange, ExactCard,
                   Exists, ForAll, MaxCard, MinCard, Nominals, Not, Or, coerce_literal, literal_text,
                   quote)
from .tbox import (FLAVORS, SEVERITIES, Axiom, Default, Disjoint, DistinctIndividuals, Domain, Equiv,
                   InverseRole, NativeCheck, Range, SubConcept, SubRole, TBox)

NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
ID_RE = re.compile(r"[A-Z]+_[0-9]+\Z")
_TOKEN_RE = re.compile(r'\s*(?:(\()|(\))|("(?:[^"\\\n]|\\.)*")|([^\s()"#]+)|(#[^\n]*))')


@dataclass(frozen=True)
class Token:
    kind: str  # "(", ")", "str", "word"
    text: str
    line: int
    col: int

    @property
    def value(self) -> str:
        if self.kind == "str":
            return re.sub(r"\\(.)", r"\1", self.text[1:-1])
        return self.text


def _statements(text: str):
    """Split the document into token lists, one per statement."""
    stmt: list = []
    depth = 0
    for lineno, line in enumerate(text.split("\n"), start=1):
        pos = 0
        while pos < len(line):
            m = _TOKEN_RE.match(line, pos)
            if m is None or m.end() == pos:
                if line[pos:].strip() == "":
                    break
                col = pos + len(line[pos:]) - len(line[pos:].lstrip()) + 1
                raise TBoxSyntaxError("unterminated string" if line[col - 1] == '"' else "unexpected character", lineno, col)
            pos = m.end()
            if m.group(5) is not None:
                break
            col = m.start(m.lastindex) + 1
            if m.group(1):
                stmt.append(Token("(", "(", lineno, col))
                depth += 1
            elif m.group(2):
                if depth == 0:
                    raise TBoxSyntaxError("unbalanced ')'", lineno, col)
                stmt.append(Token(")", ")", lineno, col))
                depth -= 1
            elif m.group(3):
                stmt.append(Token("str", m.group(3), lineno, col))
            else:
                stmt.append(Token("word", m.group(4), lineno, col))
        if depth == 0 and stmt:
            yield stmt
            stmt = []
    if stmt:
        t = stmt[0]
        raise TBoxSyntaxError("unbalanced '(' at end of document", t.line, t.col)


class _Cursor:
    def __init__(self, tokens, end_line):
        self.t = tokens
        self.i = 0
        self.end_line = end_line

    def peek(self):
        return self.t[self.i] if self.i < len(self.t) else None

    def next(self, what="token"):
        tok = self.peek()
        if tok is None:
            last = self.t[-1]
            raise TBoxSyntaxError(f"expected {what}, got end of statement", last.line, last.col + len(last.text))
        self.i += 1
        return tok

    def word(self, what="name"):
        tok = self.next(what)
        if tok.kind != "word":
            raise TBoxSyntaxError(f"expected {what}, got {tok.text!r}", tok.line, tok.col)
        return tok

    def name(self, what="name"):
        tok = self.word(what)
        if not NAME_RE.match(tok.text):
            raise TBoxSyntaxError(f"invalid {what} {tok.text!r}", tok.line, tok.col)
        return tok

    def expect(self, kind):
        tok = self.next(repr(kind))
        if tok.kind != kind:
            raise TBoxSyntaxError(f"expected {kind!r}, got {tok.text!r}", tok.line, tok.col)
        return tok

    def done(self):
        return self.i >= len(self.t)


@dataclass(frozen=True)
class _Override:
    token: Token
    severity: str


class _Parser:
    def __init__(self):
        self.concepts: dict = {}
        self.roles: dict = {}
        self.dataroles: dict = {}
        self.individuals: dict = {}

    # declarations -----------------------------------------------------
    def declare(self, stmt):
        c = _Cursor(stmt, stmt[-1].line)
        head = c.word("statement keyword")
        if head.text == "concept":
            self._add(self.concepts, c.name("concept name"), None)
        elif head.text == "role":
            self._add(self.roles, c.name("role name"), None)
        elif head.text == "datarole":
            name = c.name("data role name")
            dt = c.word("datatype")
            if dt.text not in DATATYPES:
                raise TBoxSyntaxError(f"unknown datatype {dt.text!r}", dt.line, dt.col)
            self._add(self.dataroles, name, dt.text)
        elif head.text == "individual":
            name = c.name("individual name")
            kw = c.word("'in'")
            if kw.text != "in":
                raise TBoxSyntaxError(f"expected 'in', got {kw.text!r}", kw.line, kw.col)
            enum = c.name("enumeration concept")
            self._add(self.individuals, name, enum.text)
        else:
            return False
        self._end(c)
        return True

    @staticmethod
    def _add(table, tok, value):
        if tok.text in table:
            raise TBoxSyntaxError(f"{tok.text!r} declared twice", tok.line, tok.col)
        table[tok.text] = value

    @staticmethod
    def _end(c):
        if not c.done():
            tok = c.peek()
            raise TBoxSyntaxError(f"unexpected {tok.text!r}", tok.line, tok.col)

    # symbol resolution ------------------------------------------------
    def concept(self, tok):
        if tok.text not in self.concepts:
            raise UnknownSymbolError(tok.text, "concept", tok.line)
        return tok.text

    def role(self, tok):
        if tok.text not in self.roles:
            raise UnknownSymbolError(tok.text, "object role", tok.line)
        return tok.text

    def datarole(self, tok):
        if tok.text not in self.dataroles:
            raise UnknownSymbolError(tok.text, "data role", tok.line)
        return tok.text

    def any_role(self, tok):
        if tok.text not in self.roles and tok.text not in self.dataroles:
            raise UnknownSymbolError(tok.text, "role", tok.line)
        return tok.text

    def individual(self, tok):
        if tok.text not in self.individuals:
            raise UnknownSymbolError(tok.text, "individual", tok.line)
        return tok.text

    # expressions ------------------------------------------------------
    def expr(self, c) -> ConceptExpr:
        tok = c.next("expression")
        if tok.kind == "word":
            if not NAME_RE.match(tok.text):
                raise TBoxSyntaxError(f"invalid concept name {tok.text!r}", tok.line, tok.col)
            return Atom(self.concept(tok))
        if tok.kind != "(":
            raise TBoxSyntaxError(f"expected expression, got {tok.text!r}", tok.line, tok.col)
        op = c.word("operator")
        t = op.text
        if t in ("and", "or"):
            items = []
            while c.peek() is not None and c.peek().kind != ")":
                items.append(self.expr(c))
            if len(items) < 2:
                raise TBoxSyntaxError(f"'{t}' needs at least two operands", op.line, op.col)
            out = And(tuple(items)) if t == "and" else Or(tuple(items))
        elif t == "not":
            out = Not(self.expr(c))
        elif t in ("some", "all"):
            r = self.role(c.name("role name"))
            f = self.expr(c)
            out = Exists(r, f) if t == "some" else ForAll(r, f)
        elif t in ("min", "max", "exact"):
            n_tok = c.word("count")
            if not n_tok.text.isdigit():
                raise TBoxSyntaxError(f"expected count, got {n_tok.text!r}", n_tok.line, n_tok.col)
            r = self.any_role(c.name("role name"))
            out = {"min": MinCard, "max": MaxCard, "exact": ExactCard}[t](int(n_tok.text), r)
        elif t == "one-of":
            names = []
            while c.peek() is not None and c.peek().kind != ")":
                names.append(self.individual(c.name("individual name")))
            if not names:
                raise TBoxSyntaxError("'one-of' needs at least one individual", op.line, op.col)
            out = Nominals(tuple(names))
        elif t in ("data-some", "data-all"):
            r = self.datarole(c.name("data role name"))
            rng = self.data_range(c, self.dataroles[r])
            out = DataExists(r, rng) if t == "data-some" else DataForAll(r, rng)
        else:
            raise TBoxSyntaxError(f"unknown operator {t!r}", op.line, op.col)
        c.expect(")")
        return out

    def data_range(self, c, datatype) -> DataRange:
        open_ = c.expect("(")
        op = c.word("'values' or 'datatype'")
        if op.text == "datatype":
            dt = c.word("datatype")
            if dt.text not in DATATYPES:
                raise TBoxSyntaxError(f"unknown datatype {dt.text!r}", dt.line, dt.col)
            c.expect(")")
            return DataRange(dt.text)
        if op.text != "values":
            raise TBoxSyntaxError(f"expected 'values' or 'datatype', got {op.text!r}", op.line, op.col)
        lits = []
        while c.peek() is not None and c.peek().kind == "str":
            tok = c.next()
            try:
                lits.append(coerce_literal(tok.value, datatype))
            except ValueError as e:
                raise TBoxSyntaxError(str(e), tok.line, tok.col) from None
        c.expect(")")
        try:
            return DataRange(datatype, tuple(lits))
        except ValueError as e:
            raise TBoxSyntaxError(str(e), open_.line, open_.col) from None

    def is_range_start(self, c):
        tok = c.peek()
        nxt = c.t[c.i + 1] if c.i + 1 < len(c.t) else None
        return tok is not None and tok.kind == "(" and nxt is not None and nxt.text in ("values", "datatype")

    # statements -------------------------------------------------------
    def statement(self, stmt):
        c = _Cursor(stmt, stmt[-1].line)
        head = c.word("statement keyword")
        if head.text == "axiom":
            return self.axiom(c)
        if head.text == "default":
            concept = self.concept(c.name("concept name"))
            rtok = c.name("role name")
            vtok = c.next("default value")
            if rtok.text in self.dataroles:
                if vtok.kind != "str":
                    raise TBoxSyntaxError("data role default must be a quoted literal", vtok.line, vtok.col)
                try:
                    value = coerce_literal(vtok.value, self.dataroles[rtok.text])
                except ValueError as e:
                    raise TBoxSyntaxError(str(e), vtok.line, vtok.col) from None
                out = Default(concept, rtok.text, value, True)
            else:
                self.role(rtok)
                if vtok.kind != "word":
                    raise TBoxSyntaxError("object role default must name an individual", vtok.line, vtok.col)
                out = Default(concept, rtok.text, self.individual(vtok), False)
            self._end(c)
            return out
        if head.text == "native":
            id_tok = c.word("check id")
            if not ID_RE.match(id_tok.text):
                raise TBoxSyntaxError(f"invalid id {id_tok.text!r}", id_tok.line, id_tok.col)
            severity = self.severity(c)
            check = c.name("check name").text
            trace = self.trace(c)
            return NativeCheck(id_tok.text, check, severity, trace)
        if head.text == "severity":
            id_tok = c.word("axiom id")
            level = c.word("severity")
            if level.text not in SEVERITIES:
                raise TBoxSyntaxError(f"unknown severity {level.text!r}", level.line, level.col)
            self._end(c)
            return _Override(id_tok, level.text)
        raise TBoxSyntaxError(f"unknown statement {head.text!r}", head.line, head.col)

    def severity(self, c):
        tok = c.peek()
        if tok is not None and tok.kind == "word" and tok.text in SEVERITIES:
            c.next()
            return tok.text
        return "error"

    def trace(self, c):
        if c.done():
            return ""
        kw = c.word("'trace'")
        if kw.text != "trace":
            raise TBoxSyntaxError(f"unexpected {kw.text!r}", kw.line, kw.col)
        tok = c.next("trace text")
        if tok.kind != "str":
            raise TBoxSyntaxError("trace must be a quoted string", tok.line, tok.col)
        self._end(c)
        return tok.value

    def axiom(self, c):
        id_tok = c.word("axiom id")
        if not ID_RE.match(id_tok.text):
            raise TBoxSyntaxError(f"invalid axiom id {id_tok.text!r}", id_tok.line, id_tok.col)
        severity = self.severity(c)
        kind = c.word("axiom kind")
        k = kind.text
        if k == "sub":
            body = SubConcept(self.concept(c.name("concept name")), self.expr(c))
        elif k == "equiv":
            fl = c.word("equivalence flavor")
            if fl.text not in FLAVORS:
                raise TBoxSyntaxError(f"unknown equivalence flavor {fl.text!r}", fl.line, fl.col)
            body = Equiv(self.concept(c.name("concept name")), self.expr(c), fl.text)
        elif k == "disjoint":
            body = Disjoint(self.concept(c.name("concept name")), self.concept(c.name("concept name")))
        elif k == "domain":
            body = Domain(self.any_role(c.name("role name")), self.concept(c.name("concept name")))
        elif k == "range":
            rtok = c.name("role name")
            if rtok.text in self.dataroles and self.is_range_start(c):
                body = Range(rtok.text, self.data_range(c, self.dataroles[rtok.text]))
            else:
                body = Range(self.role(rtok), self.expr(c))
        elif k == "subrole":
            body = SubRole(self.role(c.name("role name")), self.role(c.name("role name")))
        elif k == "inverse":
            body = InverseRole(self.role(c.name("role name")), self.role(c.name("role name")))
        elif k == "distinct":
            body = DistinctIndividuals(self.individual(c.name("individual name")),
                                       self.individual(c.name("individual name")))
        else:
            raise TBoxSyntaxError(f"unknown axiom kind {k!r}", kind.line, kind.col)
        return Axiom(id_tok.text, body, severity, self.trace(c)), id_tok


def parse_tbox(document: Union[str, bytes]) -> TBox:
    """Parse a TBox document. Axioms keep document order and verbatim ids."""
    raw = document.encode("utf-8") if isinstance(document, str) else document
    text = raw.decode("utf-8")
    stmts = list(_statements(text))
    p = _Parser()
    rest = [s for s in stmts if not p.declare(s)]
    axioms, defaults, natives, overrides = [], [], [], []
    seen: dict = {}
    for stmt in rest:
        out = p.statement(stmt)
        if isinstance(out, _Override):
            overrides.append(out)
        elif isinstance(out, tuple):
            ax, tok = out
            if ax.id in seen:
                raise DuplicateAxiomError(ax.id, tok.line)
            seen[ax.id] = ax
            axioms.append(ax)
        elif isinstance(out, Default):
            defaults.append(out)
        else:
            if out.id in seen:
                raise DuplicateAxiomError(out.id, stmt[0].line)
            seen[out.id] = out
            natives.append(out)
    relabel: dict = {}
    for o in overrides:
        if o.token.text not in seen:
            raise UnknownSymbolError(o.token.text, "axiom", o.token.line)
        relabel[o.token.text] = o.severity
    for enum in set(p.individuals.values()):
        if enum not in p.concepts:
            raise UnknownSymbolError(enum, "concept")
    return TBox(
        concepts=tuple(p.concepts),
        roles=tuple(p.roles),
        dataroles=dict(p.dataroles),
        individuals=dict(p.individuals),
        axioms=tuple(axioms),
        defaults=tuple(defaults),
        natives=tuple(natives),
        severity_overrides=relabel,
        fingerprint=hashlib.sha256(raw).hexdigest(),
    )


def _axiom_line(a: Axiom) -> str:
    b = a.body
    sev = " warning" if a.severity == "warning" else ""
    if isinstance(b, SubConcept):
        body = f"sub {b.lhs} {b.rhs.sexpr()}"
    elif isinstance(b, Equiv):
        body = f"equiv {b.flavor} {b.lhs} {b.rhs.sexpr()}"
    elif isinstance(b, Disjoint):
        body = f"disjoint {b.a} {b.b}"
    elif isinstance(b, Domain):
        body = f"domain {b.role} {b.concept}"
    elif isinstance(b, Range):
        body = f"range {b.role} {b.target.sexpr()}"
    elif isinstance(b, SubRole):
        body = f"subrole {b.sub} {b.sup}"
    elif isinstance(b, InverseRole):
        body = f"inverse {b.a} {b.b}"
    else:
        body = f"distinct {b.a} {b.b}"
    trace = f" trace {quote(a.trace)}" if a.trace else ""
    return f"axiom {a.id}{sev} {body}{trace}"


def dump_tbox(tbox: TBox) -> str:
    """Serialize a TBox; parse_tbox(dump_tbox(t)) reproduces t's axioms."""
    out = [f"concept {c}" for c in tbox.concepts]
    out += [f"role {r}" for r in tbox.roles]
    out += [f"datarole {r} {dt}" for r, dt in tbox.dataroles.items()]
    out += [f"individual {i} in {e}" for i, e in tbox.individuals.items()]
    for d in tbox.defaults:
        v = quote(literal_text(d.value)) if d.is_data else d.value
        out.append(f"default {d.concept} {d.role} {v}")
    out += [_axiom_line(a) for a in tbox.axioms]
    for n in tbox.natives:
        sev = " warning" if n.severity == "warning" else ""
        trace = f" trace {quote(n.trace)}" if n.trace else ""
        out.append(f"native {n.id}{sev} {n.check}{trace}")
    out += [f"severity {i} {s}" for i, s in tbox.severity_overrides.items()]
    return "\n".join(out) + "\n"
