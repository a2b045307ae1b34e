"""Concept expressions, data ranges and typed literals."""
from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from typing import Iterator, Union

DATATYPES = ("string", "boolean", "integer", "positive_integer", "date")

Literal = Union[str, bool, int, dt.date]


def coerce_literal(value, datatype: str) -> Literal:
    """Convert a JSON scalar or document token to the python value for `datatype`.

    Raises ValueError when the value cannot denote a member of the datatype's
    lexical space. Value-space limits (positive_integer >= 1) are left to range
    checks so that they surface as violations rather than load errors.
    """
    if datatype == "string":
        if isinstance(value, str):
            return value
    elif datatype == "boolean":
        if isinstance(value, bool):
            return value
        if value in ("true", "false"):
            return value == "true"
    elif datatype in ("integer", "positive_integer"):
        if isinstance(value, int) and not isinstance(value, bool):
            return value
        if isinstance(value, str):
            try:
                return int(value.strip())
            except ValueError:
                pass
    elif datatype == "date":
        if isinstance(value, dt.date):
            return value
        if isinstance(value, str):
            try:
                return dt.date.fromisoformat(value)
            except ValueError:
                pass
    else:
        raise ValueError(f"unknown datatype {datatype!r}")
    raise ValueError(f"{value!r} is not a valid {datatype} literal")


def conforms(lit: Literal, datatype: str) -> bool:
    if datatype == "string":
        return isinstance(lit, str)
    if datatype == "boolean":
        return isinstance(lit, bool)
    if datatype == "integer":
        return type(lit) is int
    if datatype == "positive_integer":
        return type(lit) is int and lit >= 1
    if datatype == "date":
        return isinstance(lit, dt.date)
    return False


def literal_text(lit: Literal) -> str:
    """Canonical lexical form: booleans true/false, dates ISO-8601."""
    if isinstance(lit, bool):
        return "true" if lit else "false"
    if isinstance(lit, dt.date):
        return lit.isoformat()
    return str(lit)


def _same_literal(a: Literal, b: Literal) -> bool:
    # bool is a subclass of int; compare types first so True != 1
    return type(a) is type(b) and a == b


def quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


@dataclass(frozen=True)
class DataRange:
    datatype: str
    values: tuple = ()

    def __post_init__(self):
        if self.datatype not in DATATYPES:
            raise ValueError(f"unknown datatype {self.datatype!r}")
        seen = []
        for v in self.values:
            if not conforms(v, self.datatype):
                raise ValueError(f"literal {v!r} does not belong to {self.datatype}")
            if any(_same_literal(v, s) for s in seen):
                raise ValueError(f"duplicate literal {literal_text(v)!r} in value set")
            seen.append(v)

    @property
    def is_value_set(self) -> bool:
        return bool(self.values)

    def contains(self, lit: Literal) -> bool:
        if self.values:
            return any(_same_literal(lit, v) for v in self.values)
        return conforms(lit, self.datatype)

    def render(self) -> str:
        if self.values:
            return "{" + ", ".join(quote(literal_text(v)) for v in self.values) + "}"
        return self.datatype

    def sexpr(self) -> str:
        if self.values:
            return "(values " + " ".join(quote(literal_text(v)) for v in self.values) + ")"
        return f"(datatype {self.datatype})"


class ConceptExpr:
    """Base class of the expression AST; subclasses are frozen dataclasses."""

    __slots__ = ()

    def render(self) -> str:
        raise NotImplementedError

    def sexpr(self) -> str:
        raise NotImplementedError

    def __str__(self):
        return self.render()


def _wrap(e: ConceptExpr) -> str:
    return f"({e.render()})" if isinstance(e, (And, Or)) else e.render()


@dataclass(frozen=True, slots=True)
class Atom(ConceptExpr):
    name: str

    def render(self):
        return self.name

    def sexpr(self):
        return self.name


@dataclass(frozen=True, slots=True)
class Nominals(ConceptExpr):
    individuals: tuple

    def __post_init__(self):
        if not self.individuals:
            raise ValueError("one-of needs at least one individual")

    def render(self):
        return "{" + ", ".join(self.individuals) + "}"

    def sexpr(self):
        return "(one-of " + " ".join(self.individuals) + ")"


@dataclass(frozen=True, slots=True)
class Not(ConceptExpr):
    operand: ConceptExpr

    def render(self):
        return "¬" + _wrap(self.operand)

    def sexpr(self):
        return f"(not {self.operand.sexpr()})"


@dataclass(frozen=True, slots=True)
class And(ConceptExpr):
    operands: tuple

    def __post_init__(self):
        if len(self.operands) < 2:
            raise ValueError("and needs at least two operands")

    def render(self):
        return " ⊓ ".join(_wrap(o) for o in self.operands)

    def sexpr(self):
        return "(and " + " ".join(o.sexpr() for o in self.operands) + ")"


@dataclass(frozen=True, slots=True)
class Or(ConceptExpr):
    operands: tuple

    def __post_init__(self):
        if len(self.operands) < 2:
            raise ValueError("or needs at least two operands")

    def render(self):
        return " ⊔ ".join(_wrap(o) for o in self.operands)

    def sexpr(self):
        return "(or " + " ".join(o.sexpr() for o in self.operands) + ")"


@dataclass(frozen=True, slots=True)
class Exists(ConceptExpr):
    role: str
    filler: ConceptExpr

    def render(self):
        return f"∃{self.role}.{_wrap(self.filler)}"

    def sexpr(self):
        return f"(some {self.role} {self.filler.sexpr()})"


@dataclass(frozen=True, slots=True)
class ForAll(ConceptExpr):
    role: str
    filler: ConceptExpr

    def render(self):
        return f"∀{self.role}.{_wrap(self.filler)}"

    def sexpr(self):
        return f"(all {self.role} {self.filler.sexpr()})"


@dataclass(frozen=True, slots=True)
class MinCard(ConceptExpr):
    n: int
    role: str

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("cardinality must be >= 0")

    def render(self):
        return f"(≥{self.n}) {self.role}"

    def sexpr(self):
        return f"(min {self.n} {self.role})"


@dataclass(frozen=True, slots=True)
class MaxCard(ConceptExpr):
    n: int
    role: str

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("cardinality must be >= 0")

    def render(self):
        return f"(≤{self.n}) {self.role}"

    def sexpr(self):
        return f"(max {self.n} {self.role})"


@dataclass(frozen=True, slots=True)
class ExactCard(ConceptExpr):
    n: int
    role: str

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("cardinality must be >= 0")

    def render(self):
        return f"(={self.n}) {self.role}"

    def sexpr(self):
        return f"(exact {self.n} {self.role})"


@dataclass(frozen=True, slots=True)
class DataExists(ConceptExpr):
    role: str
    range: DataRange

    def render(self):
        return f"∃{self.role}.{self.range.render()}"

    def sexpr(self):
        return f"(data-some {self.role} {self.range.sexpr()})"


@dataclass(frozen=True, slots=True)
class DataForAll(ConceptExpr):
    role: str
    range: DataRange

    def render(self):
        return f"∀{self.role}.{self.range.render()}"

    def sexpr(self):
        return f"(data-all {self.role} {self.range.sexpr()})"


CARDINALITIES = (MinCard, MaxCard, ExactCard)


def subexpressions(e: ConceptExpr) -> Iterator[ConceptExpr]:
    yield e
    if isinstance(e, Not):
        yield from subexpressions(e.operand)
    elif isinstance(e, (And, Or)):
        for o in e.operands:
            yield from subexpressions(o)
    elif isinstance(e, (Exists, ForAll)):
        yield from subexpressions(e.filler)


def atom_polarities(e: ConceptExpr, positive: bool = True) -> Iterator[tuple[str, bool]]:
    """Yield (concept, positive) for every atom occurrence.

    Only negation flips polarity: universal fillers and cardinalities are
    monotone (cardinalities are unqualified and mention no concept).
    """
    if isinstance(e, Atom):
        yield e.name, positive
    elif isinstance(e, Not):
        yield from atom_polarities(e.operand, not positive)
    elif isinstance(e, (And, Or)):
        for o in e.operands:
            yield from atom_polarities(o, positive)
    elif isinstance(e, (Exists, ForAll)):
        yield from atom_polarities(e.filler, positive)


def referenced_names(e: ConceptExpr) -> Iterator[tuple[str, str]]:
    """Yield (table, name) pairs: table is concept, role, datarole, individual or anyrole."""
    for s in subexpressions(e):
        if isinstance(s, Atom):
            yield "concept", s.name
        elif isinstance(s, Nominals):
            for i in s.individuals:
                yield "individual", i
        elif isinstance(s, (Exists, ForAll)):
            yield "role", s.role
        elif isinstance(s, CARDINALITIES):
            yield "anyrole", s.role
        elif isinstance(s, (DataExists, DataForAll)):
            yield "datarole", s.role
