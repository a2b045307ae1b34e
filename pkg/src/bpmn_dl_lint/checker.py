"""Axiom checking, native extended checks and the validation report."""
from __future__ import annotations

import json
import re
import weakref
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

from .classifier import Membership, _eval, classify
from .errors import StaleViolationError
from .graph import InstanceGraph, materialize_roles
from .ontology.expr import (And, Atom, DataExists, DataForAll, DataRange, ExactCard, Exists, ForAll, MaxCard,
                            MinCard, Nominals, Not, Or, literal_text)
from .ontology.schema import RoleTable, role_closure
from .ontology.tbox import (Axiom, Disjoint, DistinctIndividuals, Domain, Equiv, NativeCheck, Range,
                            SubConcept, TBox)

_ID_RE = re.compile(r"([A-Za-z]+)_(\d+)\Z")


def axiom_sort_key(axiom_id: str) -> tuple:
    """AX_2 sorts before AX_10; prefixes sort alphabetically."""
    m = _ID_RE.match(axiom_id)
    return (m.group(1), int(m.group(2)), "") if m else (axiom_id, 0, axiom_id)


@dataclass(frozen=True)
class Violation:
    axiom_id: str
    subject: str
    severity: str
    message: str
    witness: dict = field(default_factory=dict, hash=False)
    trace: str = field(default="", compare=False)
    axiom_text: str = field(default="", compare=False)
    graph_fingerprint: str = field(default="", compare=False)

    @property
    def key(self) -> tuple:
        return (self.axiom_id, self.subject)

    def sort_key(self) -> tuple:
        return (axiom_sort_key(self.axiom_id), self.subject,
                json.dumps(self.witness, sort_keys=True, ensure_ascii=False))

    def to_json(self) -> dict:
        return {"axiom": self.axiom_id, "subject": self.subject, "severity": self.severity,
                "message": self.message, "witness": self.witness}


@dataclass
class ValidationReport:
    violations: list
    tbox_fingerprint: str = ""
    diagram_fingerprint: str = ""

    @property
    def counts(self) -> dict:
        out = {"error": 0, "warning": 0}
        for v in self.violations:
            out[v.severity] += 1
        return out

    def at_or_above(self, floor: str) -> list:
        if floor == "warning":
            return list(self.violations)
        return [v for v in self.violations if v.severity == "error"]

    def to_dict(self) -> dict:
        return {"tbox": self.tbox_fingerprint, "diagram": self.diagram_fingerprint,
                "violations": [v.to_json() for v in self.violations], "counts": self.counts}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------- witnesses

def _path(path):
    return [list(step) for step in path]


def _refute(e, x, path, g, m) -> dict:
    """Explain why `e` is false at `x`, following one failing branch."""
    w = {"expr": e.render(), "at": x, "path": _path(path)}
    t = type(e)
    if t is Atom:
        w["missing"] = e.name
    elif t is Nominals:
        w["expected_one_of"] = list(e.individuals)
    elif t is Not:
        inner = _confirm(e.operand, x, path, g, m)
        inner["expr"] = e.render()
        return inner
    elif t is And:
        for o in e.operands:
            if not _eval(o, x, g, m):
                return _refute(o, x, path, g, m)
    elif t is Or:
        w["alternatives"] = [_refute(o, x, path, g, m) for o in e.operands]
    elif t is Exists:
        fillers = sorted(g.edges(x, e.role))
        w.update(role=e.role, count=len(fillers), fillers=fillers)
    elif t is ForAll:
        for y in sorted(g.edges(x, e.role)):
            if not _eval(e.filler, y, g, m):
                return _refute(e.filler, y, path + [(x, e.role, y)], g, m)
    elif t in (MinCard, MaxCard, ExactCard):
        w.update(role=e.role, count=g.count(x, e.role),
                 fillers=sorted(g.edges(x, e.role)) or sorted(literal_text(v) for v in g.literals(x, e.role)))
    elif t in (DataExists, DataForAll):
        lits = [literal_text(v) for v in g.literals(x, e.role)]
        w.update(role=e.role, count=len(lits), literals=sorted(lits))
        if t is DataForAll:
            w["offending"] = sorted(literal_text(v) for v in g.literals(x, e.role) if not e.range.contains(v))
    return w


def _confirm(e, x, path, g, m) -> dict:
    """Explain why `e` is true at `x` (used under negation)."""
    w = {"expr": e.render(), "at": x, "path": _path(path)}
    t = type(e)
    if t is Atom:
        w["present"] = e.name
    elif t is Nominals:
        w["is"] = x
    elif t is Not:
        return _refute(e.operand, x, path, g, m)
    elif t is Or:
        for o in e.operands:
            if _eval(o, x, g, m):
                return _confirm(o, x, path, g, m)
    elif t is Exists:
        for y in sorted(g.edges(x, e.role)):
            if _eval(e.filler, y, g, m):
                w.update(role=e.role, path=_path(path + [(x, e.role, y)]))
                break
    elif t in (MinCard, MaxCard, ExactCard):
        w.update(role=e.role, count=g.count(x, e.role))
    elif t in (DataExists, DataForAll):
        lits = [literal_text(v) for v in g.literals(x, e.role)]
        w.update(role=e.role, count=len(lits), literals=sorted(lits))
    return w


# ---------------------------------------------------------------- checking

def _violation(axiom, subject, message, witness, graph):
    return Violation(axiom.id, subject, axiom.severity, message, witness,
                     axiom.trace, axiom.render(), graph.fingerprint)


def check_axiom(axiom: Axiom, graph: InstanceGraph, membership: Membership) -> list:
    """Violations of one axiom on a classified graph, sorted."""
    b = axiom.body
    g, m = graph, membership
    out = []
    if isinstance(b, (SubConcept, Equiv)):
        for x in m.members(b.lhs):
            if x in g and not _eval(b.rhs, x, g, m):
                out.append(_violation(axiom, x, f"{x} belongs to {b.lhs} but does not satisfy {b.rhs.render()}",
                                      _refute(b.rhs, x, [], g, m), g))
    elif isinstance(b, Disjoint):
        both = set(m.members(b.a)) & set(m.members(b.b))
        for x in sorted(both):
            out.append(_violation(axiom, x, f"{x} is both {b.a} and {b.b}, which are disjoint",
                                  {"at": x, "concepts": [b.a, b.b]}, g))
    elif isinstance(b, Domain):
        for x in g.sources(b.role):
            if not m.has(x, b.concept):
                fillers = sorted(g.edges(x, b.role)) or sorted(literal_text(v) for v in g.literals(x, b.role))
                out.append(_violation(axiom, x, f"{x} has {b.role} but is not a {b.concept}",
                                      {"at": x, "role": b.role, "expected": b.concept, "fillers": fillers}, g))
    elif isinstance(b, Range):
        for x in g.sources(b.role):
            if isinstance(b.target, DataRange):
                bad = sorted(literal_text(v) for v in g.literals(x, b.role) if not b.target.contains(v))
                for lit in bad:
                    out.append(_violation(
                        axiom, x, f"{x} has {b.role} = {json.dumps(lit, ensure_ascii=False)}, outside {b.target.render()}",
                        {"at": x, "role": b.role, "literal": lit, "allowed": b.target.render()}, g))
            else:
                for y in sorted(g.edges(x, b.role)):
                    if not _eval(b.target, y, g, m):
                        out.append(_violation(
                            axiom, x, f"{x} has {b.role} to {y}, which is not {b.target.render()}",
                            _refute(b.target, y, [(x, b.role, y)], g, m), g))
    elif isinstance(b, DistinctIndividuals):
        if b.a == b.b:
            out.append(_violation(axiom, b.a, f"{b.a} is declared distinct from itself",
                                  {"at": b.a, "individuals": [b.a, b.b]}, g))
    return sorted(out, key=Violation.sort_key)


def _native(check: NativeCheck, subject, message, witness, graph):
    return Violation(check.id, subject, check.severity, message, witness, check.trace,
                     check.check, graph.fingerprint)


def _unique_object_id(check, g, m):
    owners: dict = {}
    for x in m.members("object"):
        if x not in g:
            continue
        for v in g.literals(x, "has_object_id"):
            owners.setdefault(literal_text(v), []).append(x)
    out = []
    for oid, xs in sorted(owners.items()):
        if len(xs) > 1:
            xs = sorted(xs)
            out.append(_native(check, xs[0], f"objects {', '.join(xs)} share the object id {json.dumps(oid)}",
                               {"at": xs[0], "object_id": oid, "objects": xs}, g))
    return out


def _condition_pairs(g, flow):
    pairs = []
    for e in sorted(g.edges(flow, "has_sequence_flow_condition_expression")):
        body = [literal_text(v).strip() for v in g.literals(e, "has_expression_expression_body")]
        lang = [literal_text(v).strip() for v in g.literals(e, "has_expression_expression_language")]
        pairs.append((e, sorted(body)[0] if body else "", sorted(lang)[0] if lang else ""))
    return pairs


def _inclusive_same_condition(check, g, m):
    out = []
    for gw in m.members("inclusive_gateway"):
        if gw not in g:
            continue
        seen = []
        for f in sorted(g.edges(gw, "has_sequence_flow_source_ref_inv")):
            for e, body, lang in _condition_pairs(g, f):
                seen.append({"flow": f, "expression": e, "body": body, "language": lang})
        distinct = sorted({(s["body"], s["language"]) for s in seen})
        if len(distinct) > 1:
            a = next(s for s in seen if (s["body"], s["language"]) == distinct[0])
            b = next(s for s in seen if (s["body"], s["language"]) == distinct[1])
            out.append(_native(
                check, gw,
                f"outgoing sequence flows of inclusive gateway {gw} carry different condition expressions "
                f"({json.dumps(a['body'])} vs {json.dumps(b['body'])})",
                {"at": gw, "differing": [a, b], "conditions": seen}, g))
    return out


_NATIVE_IMPL = {
    "unique_object_id": _unique_object_id,
    "inclusive_gateway_same_condition": _inclusive_same_condition,
}
_DEFAULT_NATIVES = (NativeCheck("EXT_1", "unique_object_id"), NativeCheck("EXT_2", "inclusive_gateway_same_condition"))


def extended_checks(graph: InstanceGraph, membership: Membership, tbox: Optional[TBox] = None) -> list:
    """Properties the description logic cannot state, run as graph queries."""
    natives = tbox.natives if tbox is not None else _DEFAULT_NATIVES
    out = []
    for n in natives:
        out.extend(_NATIVE_IMPL[n.check](n, graph, membership))
    return sorted(out, key=Violation.sort_key)


_closures: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()


def roles_for(tbox: TBox) -> RoleTable:
    rt = _closures.get(tbox)
    if rt is None:
        rt = _closures[tbox] = role_closure(tbox)
    return rt


def prepare(tbox: TBox, graph: InstanceGraph, workers: int = 1) -> Membership:
    """Materialize roles if needed and classify."""
    if not graph.materialized:
        materialize_roles(graph, roles_for(tbox))
    return classify(graph, tbox, workers=workers)


def check_all(tbox: TBox, graph: InstanceGraph, overrides: Optional[dict] = None, workers: int = 1,
              membership: Optional[Membership] = None) -> ValidationReport:
    """Check every axiom and native check; overrides relabel severities after detection."""
    m = membership if membership is not None else prepare(tbox, graph, workers)
    axioms = list(tbox.axioms)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda a: check_axiom(a, graph, m), axioms))
    else:
        chunks = [check_axiom(a, graph, m) for a in axioms]
    found = [v for chunk in chunks for v in chunk]
    found.extend(extended_checks(graph, m, tbox))
    relabel = {**dict(tbox.severity_overrides), **(overrides or {})}
    if relabel:
        found = [replace(v, severity=relabel[v.axiom_id]) if v.axiom_id in relabel else v for v in found]
    found.sort(key=Violation.sort_key)
    return ValidationReport(found, tbox.fingerprint, graph.fingerprint)


# ---------------------------------------------------------------- explanation

def _fmt_path(path) -> str:
    if not path:
        return ""
    parts = [path[0][0]]
    for _, role, dst in path:
        parts.append(f"-[{role}]-> {dst}")
    return " ".join(parts)


def _explain_witness(w: dict, indent: str, lines: list):
    if "expr" in w:
        lines.append(f"{indent}failing: {w['expr']} at {w['at']}")
    if w.get("path"):
        lines.append(f"{indent}path: {_fmt_path(w['path'])}")
    if "missing" in w:
        lines.append(f"{indent}{w['at']} is not a {w['missing']}")
    if "present" in w:
        lines.append(f"{indent}{w['at']} is a {w['present']}")
    if "concepts" in w:
        lines.append(f"{indent}{w['at']} is both {w['concepts'][0]} and {w['concepts'][1]}")
    if "expected" in w:
        lines.append(f"{indent}expected {w['at']} to be a {w['expected']}")
    if "role" in w and "literal" in w:
        lines.append(f"{indent}found {w['role']} = {json.dumps(w['literal'], ensure_ascii=False)} (allowed {w['allowed']})")
    elif "role" in w and "literals" in w:
        if w["literals"]:
            shown = ", ".join(json.dumps(x, ensure_ascii=False) for x in w["literals"])
            lines.append(f"{indent}found {w['role']} = {shown}")
        else:
            lines.append(f"{indent}no fillers found for {w['role']}")
    elif "role" in w and "count" in w:
        if w["count"] == 0:
            lines.append(f"{indent}no fillers found for {w['role']}")
        else:
            lines.append(f"{indent}found {w['count']} filler(s) for {w['role']}: {', '.join(map(str, w['fillers']))}")
    if "objects" in w:
        lines.append(f"{indent}object id {json.dumps(w['object_id'])} held by {', '.join(w['objects'])}")
    if "differing" in w:
        for d in w["differing"]:
            lines.append(f"{indent}{d['flow']} -> {d['expression']}: body {json.dumps(d['body'])}, "
                         f"language {json.dumps(d['language'])}")
    for alt in w.get("alternatives", ()):
        lines.append(f"{indent}alternative:")
        _explain_witness(alt, indent + "  ", lines)


def explain(violation: Violation, graph: Optional[InstanceGraph] = None) -> str:
    """Readable account of a violation: axiom, citation, failing part and path."""
    if graph is not None and graph.fingerprint != violation.graph_fingerprint:
        raise StaleViolationError(
            f"violation of {violation.axiom_id} at {violation.subject} was produced for a different diagram")
    lines = [f"{violation.axiom_id} [{violation.severity}] at {violation.subject}"]
    if violation.axiom_text:
        lines.append(f"  axiom: {violation.axiom_text}")
    if violation.trace:
        lines.append(f"  trace: \"{violation.trace}\"")
    lines.append(f"  {violation.message}")
    _explain_witness(violation.witness, "  ", lines)
    return "\n".join(lines)
