"""Diagram documents as instance graphs: loading, defaults and role materialization."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Union

from .errors import (DanglingReferenceError, DatatypeMismatchError, DiagramError, DiagramSyntaxError,
                     DuplicateElementError, UnknownKindError)
from .ontology.expr import Exists, Nominals, coerce_literal
from .ontology.schema import RoleTable
from .ontology.tbox import TBox

ELEMENT_KEYS = frozenset({"id", "kind", "atoms", "data", "refs"})


@dataclass
class Individual:
    id: str
    asserted: set = field(default_factory=set)
    data: dict = field(default_factory=dict)
    out_edges: dict = field(default_factory=dict)

    def __post_init__(self):
        self._edge_set = {(r, b) for r, bs in self.out_edges.items() for b in bs}

    def add_edge(self, role: str, target: str) -> bool:
        if (role, target) in self._edge_set:
            return False
        self._edge_set.add((role, target))
        self.out_edges.setdefault(role, []).append(target)
        return True

    def add_literal(self, role: str, value) -> bool:
        vals = self.data.setdefault(role, [])
        if any(type(v) is type(value) and v == value for v in vals):
            return False
        vals.append(value)
        return True


class InstanceGraph:
    """Individuals keyed and iterated by id."""

    def __init__(self, individuals: Iterable[Individual] = (), fingerprint: str = "",
                 nominals: Iterable[str] = ()):
        self._inds = {}
        for ind in sorted(individuals, key=lambda i: i.id):
            if ind.id in self._inds:
                raise DuplicateElementError(ind.id)
            self._inds[ind.id] = ind
        self.fingerprint = fingerprint
        self.nominals = frozenset(nominals)
        self.materialized = False
        self._sources = None

    def __contains__(self, ind_id) -> bool:
        return ind_id in self._inds

    def __iter__(self) -> Iterator[Individual]:
        return iter(self._inds.values())

    def __len__(self) -> int:
        return len(self._inds)

    def __getitem__(self, ind_id) -> Individual:
        return self._inds[ind_id]

    def ids(self) -> list:
        return list(self._inds)

    def elements(self) -> list:
        """Individuals that came from the diagram, excluding pre-seeded nominals."""
        return [i for i in self._inds.values() if i.id not in self.nominals]

    def edges(self, ind_id: str, role: str):
        return self._inds[ind_id].out_edges.get(role, ())

    def literals(self, ind_id: str, role: str):
        return self._inds[ind_id].data.get(role, ())

    def count(self, ind_id: str, role: str) -> int:
        ind = self._inds[ind_id]
        return len(ind.out_edges.get(role, ())) + len(ind.data.get(role, ()))

    def add_edge(self, a: str, role: str, b: str) -> bool:
        added = self._inds[a].add_edge(role, b)
        if added:
            self._sources = None
        return added

    def sources(self, role: str) -> list:
        """Ids of individuals with at least one edge or literal on `role`."""
        if self._sources is None:
            idx: dict = {}
            for ind in self:
                for r, vs in ind.out_edges.items():
                    if vs:
                        idx.setdefault(r, []).append(ind.id)
                for r, vs in ind.data.items():
                    if vs:
                        idx.setdefault(r, []).append(ind.id)
            self._sources = idx
        return self._sources.get(role, [])

    def all_edges(self) -> list:
        return [(i.id, r, b) for i in self for r in sorted(i.out_edges) for b in i.out_edges[r]]

    def edge_count(self) -> int:
        return sum(len(bs) for i in self for bs in i.out_edges.values())

    def snapshot(self) -> tuple:
        """Hashable, order-stable view used to compare graphs."""
        return tuple(
            (i.id, tuple(sorted(i.asserted)),
             tuple((r, tuple(sorted(map(repr, vs)))) for r, vs in sorted(i.data.items())),
             tuple((r, tuple(sorted(bs))) for r, bs in sorted(i.out_edges.items())))
            for i in self)


@dataclass(frozen=True)
class KindSpec:
    atoms: tuple
    edges: tuple  # (role, individual)


def _sugar(rhs) -> Optional[tuple]:
    """(base, edges) when every restriction of a definition is a single-nominal ∃."""
    edges = []
    for o in rhs.operands[1:]:
        if isinstance(o, Exists) and isinstance(o.filler, Nominals) and len(o.filler.individuals) == 1:
            edges.append((o.role, o.filler.individuals[0]))
        else:
            return None
    return rhs.operands[0].name, tuple(edges)


class KindTable:
    """Leaf kind token -> concepts to assert and type edges to add."""

    def __init__(self, kinds: dict, hints: Optional[dict] = None):
        self.kinds = dict(sorted(kinds.items()))
        self.hints = hints or {}

    @classmethod
    def from_tbox(cls, tbox: TBox) -> "KindTable":
        kinds: dict = {}
        hints: dict = {}

        def build(c, depth=0):
            if c in kinds or c in hints:
                return kinds.get(c)
            if depth > len(tbox.concepts):
                return None
            if c in tbox.enumerations:
                hints[c] = "enumeration concept; its members are predeclared individuals"
                return None
            if c in tbox.definitions:
                for a in tbox.definitions[c]:
                    s = _sugar(a.body.rhs)
                    if s is None:
                        continue
                    base = build(s[0], depth + 1)
                    if base is None:
                        continue
                    kinds[c] = KindSpec(base.atoms, base.edges + s[1])
                    return kinds[c]
                base = tbox.definitions[c][0].body.rhs.operands[0].name
                hints[c] = f"derived from its relations; use the kind of {base} and add them"
                return None
            kinds[c] = KindSpec((c,), ())
            return kinds[c]

        for c in tbox.concepts:
            build(c)
        return cls(kinds, hints)

    def __contains__(self, kind) -> bool:
        return kind in self.kinds

    def expand(self, kind: str, element_id: str = "?") -> KindSpec:
        spec = self.kinds.get(kind)
        if spec is None:
            raise UnknownKindError(kind, element_id, self.hints.get(kind, ""))
        return spec


_kind_tables: dict = {}


def kinds_for(tbox: TBox) -> KindTable:
    kt = _kind_tables.get(id(tbox))
    if kt is None or kt[0] is not tbox:
        kt = _kind_tables[id(tbox)] = (tbox, KindTable.from_tbox(tbox))
    return kt[1]


_guard_cache: dict = {}


def _guard_rules(tbox: TBox) -> tuple:
    hit = _guard_cache.get(id(tbox))
    if hit is not None and hit[0] is tbox:
        return hit[1]
    sugared = []
    for lhs, axioms in sorted(tbox.definitions.items()):
        for a in axioms:
            s = _sugar(a.body.rhs)
            if s:
                sugared.append((lhs, s[0], s[1]))
    covers = [(lhs, frozenset(o.name for a in axioms for o in a.body.rhs.operands))
              for lhs, axioms in sorted(tbox.coverages.items())]
    rules = (tuple(sugared), tuple(covers))
    _guard_cache[id(tbox)] = (tbox, rules)
    return rules


def _guard_closure(atoms: set, edges: set, tbox: TBox) -> set:
    """Concepts an element record belongs to before loading, for default guards."""
    sugared, covers = _guard_rules(tbox)
    out = set(atoms)
    changed = True
    while changed:
        changed = False
        for lhs, base, needs in sugared:
            if lhs not in out and base in out and all(e in edges for e in needs):
                out.add(lhs)
                changed = True
        for lhs, parts in covers:
            if lhs not in out and not parts.isdisjoint(out):
                out.add(lhs)
                changed = True
    return out


def apply_defaults(element: dict, tbox: TBox, kinds: Optional[KindTable] = None) -> dict:
    """Return a copy of `element` with documented defaults filled in.

    A default applies when the record belongs to its guard concept and
    supplies no value for the attribute; supplied values are kept as is.
    """
    kinds = kinds or kinds_for(tbox)
    spec = kinds.expand(element["kind"], element.get("id", "?")) if element.get("kind") else KindSpec((), ())
    atoms = set(spec.atoms) | set(element.get("atoms", ()))
    data = {r: list(v) for r, v in sorted(element.get("data", {}).items())}
    refs = {r: list(v) for r, v in sorted(element.get("refs", {}).items())}
    edges = set(spec.edges) | {(r, b) for r, bs in refs.items() for b in bs}
    kind_roles = {r for r, _ in spec.edges}
    changed = True
    while changed:
        changed = False
        closure = _guard_closure(atoms, edges, tbox)
        for d in tbox.defaults:
            if d.concept not in closure:
                continue
            if d.is_data:
                if not data.get(d.role):
                    data[d.role] = [d.value]
                    changed = True
            elif not refs.get(d.role) and d.role not in kind_roles:
                refs[d.role] = [d.value]
                edges.add((d.role, d.value))
                changed = True
    out = {k: v for k, v in element.items() if k not in ("data", "refs")}
    if data:
        out["data"] = dict(sorted(data.items()))
    if refs:
        out["refs"] = dict(sorted(refs.items()))
    return out


def _check_element(el, index):
    if not isinstance(el, dict):
        raise DiagramSyntaxError(f"element #{index} is not an object")
    extra = sorted(set(el) - ELEMENT_KEYS)
    if extra:
        raise DiagramSyntaxError(f"element #{index}: unknown key(s) {', '.join(extra)}")
    eid = el.get("id")
    if not isinstance(eid, str) or not eid or any(ch.isspace() for ch in eid):
        raise DiagramSyntaxError(f"element #{index}: 'id' must be a non-empty string without spaces")
    if "kind" in el and not isinstance(el["kind"], str):
        raise DiagramSyntaxError(f"element {eid!r}: 'kind' must be a string")
    if not isinstance(el.get("atoms", []), list) or not all(isinstance(a, str) for a in el.get("atoms", [])):
        raise DiagramSyntaxError(f"element {eid!r}: 'atoms' must be a list of strings")
    for key in ("data", "refs"):
        table = el.get(key, {})
        if not isinstance(table, dict):
            raise DiagramSyntaxError(f"element {eid!r}: {key!r} must be an object")
        for role, vals in table.items():
            if not isinstance(vals, list):
                raise DiagramSyntaxError(f"element {eid!r}: {key}.{role} must be a list")
            if key == "refs" and not all(isinstance(v, str) for v in vals):
                raise DiagramSyntaxError(f"element {eid!r}: refs.{role} must list element ids")
    return eid


def load_diagram(document: Union[str, bytes], tbox: TBox, kinds: Optional[KindTable] = None) -> InstanceGraph:
    """Build the instance graph for a diagram document (see docs/diagram-format.md)."""
    raw = document.encode("utf-8") if isinstance(document, str) else document
    kinds = kinds or kinds_for(tbox)
    text = raw.decode("utf-8-sig")
    if text.strip():
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as e:
            raise DiagramSyntaxError(f"line {e.lineno}, column {e.colno}: {e.msg}") from None
    else:
        doc = {}
    if not isinstance(doc, dict):
        raise DiagramSyntaxError("top level must be an object with an 'elements' list")
    extra = sorted(set(doc) - {"elements"})
    if extra:
        raise DiagramSyntaxError(f"unknown top-level key(s) {', '.join(extra)}")
    elements = doc.get("elements", [])
    if not isinstance(elements, list):
        raise DiagramSyntaxError("'elements' must be a list")

    inds: dict = {}
    for name, enum in tbox.individuals.items():
        inds[name] = Individual(name, {enum})
    order = []
    for n, el in enumerate(elements):
        eid = _check_element(el, n)
        if eid in inds:
            raise DuplicateElementError(eid)
        for a in el.get("atoms", ()):
            if a not in tbox.concept_set:
                raise DiagramError(f"element {eid!r}: unknown concept {a!r}")
        for role in el.get("data", {}):
            if role not in tbox.dataroles:
                what = "an object role; use refs" if role in tbox.role_set else "not a data role"
                raise DiagramError(f"element {eid!r}: {role!r} is {what}")
        for role in el.get("refs", {}):
            if role not in tbox.role_set:
                what = "a data role; use data" if role in tbox.dataroles else "not an object role"
                raise DiagramError(f"element {eid!r}: {role!r} is {what}")
        rec = apply_defaults(el, tbox, kinds)
        spec = kinds.expand(rec["kind"], eid) if rec.get("kind") else KindSpec((), ())
        ind = Individual(eid, set(spec.atoms) | set(rec.get("atoms", ())))
        for role, target in spec.edges:
            ind.add_edge(role, target)
        for role, targets in rec.get("refs", {}).items():
            for t in targets:
                ind.add_edge(role, t)
        for role, vals in rec.get("data", {}).items():
            dt = tbox.dataroles[role]
            for v in vals:
                try:
                    ind.add_literal(role, coerce_literal(v, dt))
                except ValueError:
                    raise DatatypeMismatchError(
                        f"element {eid!r}: {role} expects {dt}, got {json.dumps(v)}") from None
        inds[eid] = ind
        order.append(ind)
    for ind in order:
        for role in sorted(ind.out_edges):
            for t in ind.out_edges[role]:
                if t not in inds:
                    raise DanglingReferenceError(t, ind.id, role)
    return InstanceGraph(inds.values(), hashlib.sha256(raw).hexdigest(), nominals=tbox.individuals)


def materialize_roles(graph: InstanceGraph, roles: RoleTable) -> InstanceGraph:
    """Add inverse and super-role edges until closed. Safe to call repeatedly."""
    work = graph.all_edges()
    while work:
        nxt = []
        for a, r, b in work:
            for s in sorted(roles.supers_of(r)):
                if graph.add_edge(a, s, b):
                    nxt.append((a, s, b))
            inv = roles.inverse_of(r)
            if inv is not None and graph.add_edge(b, inv, a):
                nxt.append((b, inv, a))
        work = nxt
    graph.materialized = True
    return graph
