"""Structural checks on a TBox and the role hierarchy closure."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Mapping, Optional

from ..errors import RoleHierarchyError, StratificationError
from .expr import And, Atom, DataExists, DataForAll, DataRange, Nominals, Or, referenced_names, subexpressions
from .parser import ID_RE, NAME_RE
from .tbox import (NATIVE_CHECKS, Disjoint, DistinctIndividuals, Domain, Equiv, InverseRole, Range, SubConcept, SubRole,
                   TBox)


@dataclass(frozen=True, order=True)
class SchemaFinding:
    code: str
    names: tuple
    message: str = field(compare=False)

    def __str__(self):
        return f"{self.code}: {self.message}"


@dataclass(frozen=True)
class RoleTable:
    supers: Mapping[str, frozenset]
    inverse: Mapping[str, str]

    def supers_of(self, role: str) -> frozenset:
        return self.supers.get(role, frozenset())

    def inverse_of(self, role: str) -> Optional[str]:
        return self.inverse.get(role)


def role_closure(tbox: TBox) -> RoleTable:
    """Transitive super-roles and inverse partners for every object role."""
    direct: dict = {r: set() for r in tbox.roles}
    inverse: dict = {}
    for a in tbox.axioms:
        b = a.body
        if isinstance(b, SubRole):
            direct.setdefault(b.sub, set()).add(b.sup)
            direct.setdefault(b.sup, set())
        elif isinstance(b, InverseRole):
            for x, y in ((b.a, b.b), (b.b, b.a)):
                if inverse.get(x, y) != y:
                    raise RoleHierarchyError(
                        f"role {x} declared with two inverses: {inverse[x]} and {y}", sorted({x, y, inverse[x]}))
                inverse[x] = y
    supers: dict = {}
    for r in sorted(direct):
        seen: set = set()
        stack = sorted(direct[r])
        while stack:
            s = stack.pop()
            if s == r:
                cycle = sorted({r} | {x for x in seen if r in _reach(direct, x)})
                raise RoleHierarchyError("role hierarchy cycle: " + ", ".join(cycle), cycle)
            if s not in seen:
                seen.add(s)
                stack.extend(sorted(direct.get(s, ())))
        supers[r] = frozenset(seen)
    return RoleTable(supers, inverse)


def _reach(direct, start):
    seen, stack = set(), [start]
    while stack:
        x = stack.pop()
        for y in direct.get(x, ()):
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return seen


def _finding(out, code, names, message):
    out.append(SchemaFinding(code, tuple(names), message))


def well_formed(tbox: TBox) -> list:
    """Return every structural defect found in `tbox`, sorted by code then names."""
    from ..classifier import stratify

    out: list = []
    tables = {
        "concept": set(tbox.concepts),
        "role": set(tbox.roles),
        "datarole": set(tbox.dataroles),
        "individual": set(tbox.individuals),
    }
    for name in sorted(set().union(*tables.values())):
        where = [t for t, names in tables.items() if name in names]
        if len(where) > 1:
            _finding(out, "name-clash", [name], f"{name} is declared as {' and '.join(where)}")
        if not NAME_RE.match(name):
            _finding(out, "invalid-name", [name], f"{name!r} is not a valid identifier")

    def need(table, name, axiom_id):
        ok = name in tables["role"] | tables["datarole"] if table == "anyrole" else name in tables[table]
        if not ok:
            _finding(out, "dangling-name", [axiom_id, name], f"{axiom_id} references undeclared {table} {name}")

    seen_ids: set = set()
    pairs: dict = {}
    for a in tbox.axioms:
        if a.id in seen_ids:
            _finding(out, "duplicate-id", [a.id], f"axiom id {a.id} used twice")
        seen_ids.add(a.id)
        if not ID_RE.match(a.id):
            _finding(out, "invalid-name", [a.id], f"{a.id!r} is not a valid axiom id")
        b = a.body
        exprs = []
        if isinstance(b, (SubConcept, Equiv)):
            need("concept", b.lhs, a.id)
            exprs.append(b.rhs)
        if isinstance(b, Equiv):
            _check_equiv_shape(out, a)
        elif isinstance(b, Disjoint):
            need("concept", b.a, a.id)
            need("concept", b.b, a.id)
            if b.a == b.b:
                _finding(out, "self-disjoint", [a.id, b.a], f"{a.id} declares {b.a} disjoint with itself")
            elif b.pair in pairs:
                _finding(out, "duplicate-disjoint", [a.id, pairs[b.pair]],
                         f"{a.id} repeats the disjointness of {pairs[b.pair]}")
            else:
                pairs[b.pair] = a.id
        elif isinstance(b, Domain):
            need("anyrole", b.role, a.id)
            need("concept", b.concept, a.id)
        elif isinstance(b, Range):
            if isinstance(b.target, DataRange):
                need("datarole", b.role, a.id)
                _check_datatype(out, tbox, a.id, b.role, b.target)
            else:
                need("role", b.role, a.id)
                exprs.append(b.target)
        elif isinstance(b, (SubRole, InverseRole)):
            for r in (b.sub, b.sup) if isinstance(b, SubRole) else (b.a, b.b):
                need("role", r, a.id)
        elif isinstance(b, DistinctIndividuals):
            need("individual", b.a, a.id)
            need("individual", b.b, a.id)
        for e in exprs:
            for table, name in referenced_names(e):
                need(table, name, a.id)
            for s in subexpressions(e):
                if isinstance(s, (DataExists, DataForAll)):
                    _check_datatype(out, tbox, a.id, s.role, s.range)

    for n in tbox.natives:
        if n.check not in NATIVE_CHECKS:
            _finding(out, "unknown-native", [n.id, n.check], f"{n.id}: no native check named {n.check}")
        if n.id in seen_ids:
            _finding(out, "duplicate-id", [n.id], f"axiom id {n.id} used twice")
        seen_ids.add(n.id)

    _check_enumerations(out, tbox, tables)

    try:
        stratify(tbox)
    except StratificationError as e:
        _finding(out, "negation-cycle", e.cycle, str(e))
    try:
        role_closure(tbox)
    except RoleHierarchyError as e:
        _finding(out, "role-hierarchy", e.roles, str(e))
    return sorted(out)


def _check_equiv_shape(out, a):
    b = a.body
    if b.flavor == "definition":
        if not (isinstance(b.rhs, And) and isinstance(b.rhs.operands[0], Atom)):
            _finding(out, "definition-without-base", [a.id, b.lhs],
                     f"{a.id}: definition of {b.lhs} does not start with a base concept")
    elif b.flavor == "coverage":
        if not (isinstance(b.rhs, Or) and all(isinstance(o, Atom) for o in b.rhs.operands)):
            _finding(out, "coverage-shape", [a.id, b.lhs], f"{a.id}: coverage of {b.lhs} is not a union of concepts")
    elif not isinstance(b.rhs, Nominals):
        _finding(out, "enumeration-shape", [a.id, b.lhs], f"{a.id}: enumeration of {b.lhs} is not a one-of")


def _check_datatype(out, tbox, axiom_id, role, rng):
    declared = tbox.datatype_of(role)
    if declared is not None and rng.datatype != declared:
        _finding(out, "range-datatype", [axiom_id, role],
                 f"{axiom_id}: {role} is declared {declared} but used with {rng.datatype}")


def _check_enumerations(out, tbox, tables):
    enums = tbox.enumerations
    listed: dict = {}
    for enum, members in sorted(enums.items()):
        for m in members:
            if m in listed:
                _finding(out, "enumeration-mismatch", [m], f"{m} is listed by both {listed[m]} and {enum}")
            listed[m] = enum
    for ind, enum in sorted(tbox.individuals.items()):
        if listed.get(ind) != enum:
            _finding(out, "enumeration-mismatch", [ind],
                     f"{ind} is declared in {enum} but listed by {listed.get(ind, 'no enumeration')}")
    distinct = {frozenset((a.body.a, a.body.b)) for a in tbox.axioms
                if isinstance(a.body, DistinctIndividuals)}
    for enum, members in sorted(enums.items()):
        for x, y in itertools.combinations(members, 2):
            if frozenset((x, y)) not in distinct:
                _finding(out, "missing-distinctness", [enum, x, y],
                         f"{enum}: no distinctness axiom for {x} and {y}")
