"""Axioms and the TBox container."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Optional, Union

from .expr import ConceptExpr, DataRange, Literal

SEVERITIES = ("warning", "error")
FLAVORS = ("definition", "coverage", "enumeration")
NATIVE_CHECKS = ("unique_object_id", "inclusive_gateway_same_condition")


@dataclass(frozen=True)
class SubConcept:
    lhs: str
    rhs: ConceptExpr
    kind = "sub"


@dataclass(frozen=True)
class Equiv:
    lhs: str
    rhs: ConceptExpr
    flavor: str
    kind = "equiv"

    def __post_init__(self):
        if self.flavor not in FLAVORS:
            raise ValueError(f"unknown equivalence flavor {self.flavor!r}")


@dataclass(frozen=True)
class Disjoint:
    a: str
    b: str
    kind = "disjoint"

    @property
    def pair(self) -> frozenset:
        return frozenset((self.a, self.b))


@dataclass(frozen=True)
class Domain:
    role: str
    concept: str
    kind = "domain"


@dataclass(frozen=True)
class Range:
    role: str
    target: Union[ConceptExpr, DataRange]
    kind = "range"


@dataclass(frozen=True)
class SubRole:
    sub: str
    sup: str
    kind = "subrole"


@dataclass(frozen=True)
class InverseRole:
    a: str
    b: str
    kind = "inverse"


@dataclass(frozen=True)
class DistinctIndividuals:
    a: str
    b: str
    kind = "distinct"


AxiomBody = Union[SubConcept, Equiv, Disjoint, Domain, Range, SubRole, InverseRole, DistinctIndividuals]


@dataclass(frozen=True)
class Axiom:
    id: str
    body: AxiomBody
    severity: str = "error"
    trace: str = ""

    def __post_init__(self):
        if self.severity not in SEVERITIES:
            raise ValueError(f"unknown severity {self.severity!r}")

    @property
    def kind(self) -> str:
        return self.body.kind

    def render(self) -> str:
        b = self.body
        if isinstance(b, SubConcept):
            return f"{b.lhs} ⊑ {b.rhs.render()}"
        if isinstance(b, Equiv):
            return f"{b.lhs} ≡ {b.rhs.render()}"
        if isinstance(b, Disjoint):
            return f"{b.a} ⊑ ¬{b.b}"
        if isinstance(b, Domain):
            return f"{b.role} has domain {b.concept}"
        if isinstance(b, Range):
            return f"{b.role} has range {b.target.render()}"
        if isinstance(b, SubRole):
            return f"{b.sub} ⊑ {b.sup}"
        if isinstance(b, InverseRole):
            return f"{b.a} = {b.b}⁻"
        return f"{b.a} ≠ {b.b}"


@dataclass(frozen=True)
class Default:
    """Value given to an attribute when a member of `concept` does not supply one."""
    concept: str
    role: str
    value: Union[str, Literal]
    is_data: bool


@dataclass(frozen=True)
class NativeCheck:
    """A property outside the description logic, implemented in code."""
    id: str
    check: str
    severity: str = "error"
    trace: str = ""


@dataclass(frozen=True, eq=False, repr=False)
class TBox:
    concepts: tuple = ()
    roles: tuple = ()
    dataroles: Mapping[str, str] = field(default_factory=dict)
    individuals: Mapping[str, str] = field(default_factory=dict)
    axioms: tuple = ()
    defaults: tuple = ()
    natives: tuple = ()
    severity_overrides: Mapping[str, str] = field(default_factory=dict)
    fingerprint: str = ""

    def __repr__(self):
        return (f"TBox({len(self.concepts)} concepts, {len(self.roles)} roles, {len(self.axioms)} axioms, "
                f"fingerprint={self.fingerprint[:12]!r})")

    @cached_property
    def concept_set(self) -> frozenset:
        return frozenset(self.concepts)

    @cached_property
    def role_set(self) -> frozenset:
        return frozenset(self.roles)

    @cached_property
    def axiom_index(self) -> dict:
        return {a.id: a for a in self.axioms}

    def axiom(self, axiom_id: str) -> Optional[Axiom]:
        return self.axiom_index.get(axiom_id)

    def of_kind(self, cls) -> list:
        return [a for a in self.axioms if isinstance(a.body, cls)]

    @cached_property
    def definitions(self) -> dict:
        """Defined concept -> list of definition-flavored Equiv axioms."""
        out: dict = {}
        for a in self.axioms:
            if isinstance(a.body, Equiv) and a.body.flavor == "definition":
                out.setdefault(a.body.lhs, []).append(a)
        return out

    @cached_property
    def coverages(self) -> dict:
        out: dict = {}
        for a in self.axioms:
            if isinstance(a.body, Equiv) and a.body.flavor == "coverage":
                out.setdefault(a.body.lhs, []).append(a)
        return out

    @cached_property
    def enumerations(self) -> dict:
        """Enumeration concept -> listed individuals, in document order."""
        out: dict = {}
        for a in self.axioms:
            if isinstance(a.body, Equiv) and a.body.flavor == "enumeration":
                out.setdefault(a.body.lhs, [])
                for i in getattr(a.body.rhs, "individuals", ()):
                    if i not in out[a.body.lhs]:
                        out[a.body.lhs].append(i)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def disjoint_pairs(self) -> frozenset:
        return frozenset(a.body.pair for a in self.axioms if isinstance(a.body, Disjoint))

    def is_disjoint(self, a: str, b: str) -> bool:
        return frozenset((a, b)) in self.disjoint_pairs

    def datatype_of(self, role: str) -> Optional[str]:
        return self.dataroles.get(role)

    def is_datarole(self, name: str) -> bool:
        return name in self.dataroles

    def tables_of(self, name: str) -> list:
        out = []
        if name in self.concept_set:
            out.append("concept")
        if name in self.role_set:
            out.append("role")
        if name in self.dataroles:
            out.append("datarole")
        if name in self.individuals:
            out.append("individual")
        return out

    def severity_of(self, axiom_id: str, default: str = "error") -> str:
        if axiom_id in self.severity_overrides:
            return self.severity_overrides[axiom_id]
        a = self.axiom_index.get(axiom_id)
        if a is not None:
            return a.severity
        for n in self.natives:
            if n.id == axiom_id:
                return n.severity
        return default
