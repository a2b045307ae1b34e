"""Closed-world evaluation of concept expressions and stratified classification."""
from __future__ import annotations

import weakref
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import StratificationError
from .ontology.expr import (And, Atom, ConceptExpr, DataExists, DataForAll, ExactCard, Exists, ForAll,
                            MaxCard, MinCard, Nominals, Not, Or, atom_polarities)
from .ontology.tbox import TBox


class Membership:
    """Individual -> full atom set (asserted plus derived), with a reverse index."""

    def __init__(self, atoms: Optional[dict] = None):
        self._atoms: dict = {}
        self._members: dict = {}
        for ind, names in (atoms or {}).items():
            self._atoms.setdefault(ind, set())
            for n in names:
                self.add(ind, n)

    def add(self, ind: str, concept: str) -> bool:
        s = self._atoms.setdefault(ind, set())
        if concept in s:
            return False
        s.add(concept)
        self._members.setdefault(concept, set()).add(ind)
        return True

    def has(self, ind: str, concept: str) -> bool:
        s = self._atoms.get(ind)
        return s is not None and concept in s

    def atoms(self, ind: str) -> frozenset:
        return frozenset(self._atoms.get(ind, ()))

    def members(self, concept: str) -> list:
        return sorted(self._members.get(concept, ()))

    def individuals(self) -> list:
        return sorted(self._atoms)

    def as_dict(self) -> dict:
        return {i: frozenset(self._atoms[i]) for i in sorted(self._atoms)}

    def copy(self) -> "Membership":
        return Membership({i: set(s) for i, s in self._atoms.items()})

    def __eq__(self, other):
        return isinstance(other, Membership) and self.as_dict() == other.as_dict()

    def __len__(self):
        return len(self._atoms)


def eval_expr(expr: ConceptExpr, subject: str, graph, membership: Membership) -> bool:
    """Truth of `expr` at `subject` under the closed-world, unique-name reading."""
    if subject not in graph:
        raise KeyError(f"unknown individual {subject!r}")
    return _eval(expr, subject, graph, membership)


def _eval(e, x, g, m) -> bool:
    t = type(e)
    if t is Atom:
        return m.has(x, e.name)
    if t is And:
        for o in e.operands:
            if not _eval(o, x, g, m):
                return False
        return True
    if t is Or:
        for o in e.operands:
            if _eval(o, x, g, m):
                return True
        return False
    if t is Not:
        return not _eval(e.operand, x, g, m)
    if t is Exists:
        for y in g.edges(x, e.role):
            if _eval(e.filler, y, g, m):
                return True
        return False
    if t is ForAll:
        for y in g.edges(x, e.role):
            if not _eval(e.filler, y, g, m):
                return False
        return True
    if t is ExactCard:
        return g.count(x, e.role) == e.n
    if t is MinCard:
        return g.count(x, e.role) >= e.n
    if t is MaxCard:
        return g.count(x, e.role) <= e.n
    if t is Nominals:
        return x in e.individuals
    if t is DataExists:
        return any(e.range.contains(v) for v in g.literals(x, e.role))
    if t is DataForAll:
        return all(e.range.contains(v) for v in g.literals(x, e.role))
    raise TypeError(f"not a concept expression: {e!r}")


@dataclass(frozen=True)
class StratumPlan:
    layers: tuple
    edges: tuple  # (concept, depends_on, positive)

    def layer_of(self, concept: str) -> Optional[int]:
        for i, layer in enumerate(self.layers):
            if concept in layer:
                return i
        return None


def _dependencies(tbox: TBox) -> dict:
    deps: dict = {}
    for lhs, axioms in tbox.definitions.items():
        for a in axioms:
            for name, pos in atom_polarities(a.body.rhs):
                deps.setdefault(lhs, set()).add((name, pos))
    for lhs, axioms in tbox.coverages.items():
        for a in axioms:
            for name, pos in atom_polarities(a.body.rhs):
                deps.setdefault(lhs, set()).add((name, pos))
    return deps


def _sccs(nodes, succ) -> list:
    """Tarjan's algorithm, iterative; emits components dependencies-first."""
    index, low, on_stack, stack, out = {}, {}, set(), [], []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succ[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ[w])))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                low[work[-1][0]] = min(low[work[-1][0]], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                out.append(sorted(comp))
    return out


def stratify(tbox: TBox) -> StratumPlan:
    """Layer the defined concepts so every negated dependency sits strictly lower."""
    deps = _dependencies(tbox)
    defined = sorted(deps)
    edges = sorted((c, d, pos) for c in defined for d, pos in deps[c] if d in deps)
    succ = {c: sorted({d for d, _ in deps[c] if d in deps}) for c in defined}
    comps = _sccs(defined, succ)
    comp_of = {c: i for i, comp in enumerate(comps) for c in comp}
    for c, d, pos in edges:
        if not pos and comp_of[c] == comp_of[d]:
            raise StratificationError(comps[comp_of[c]])
    level: dict = {}
    for i, comp in enumerate(comps):
        lv = 0
        for c, d, pos in edges:
            if comp_of[c] == i and comp_of[d] != i:
                lv = max(lv, level[comp_of[d]] + (0 if pos else 1))
        level[i] = lv
    if not comps:
        return StratumPlan((), ())
    layers = [[] for _ in range(max(level.values()) + 1)]
    for i, comp in enumerate(comps):
        layers[level[i]].extend(comp)
    return StratumPlan(tuple(tuple(sorted(layer)) for layer in layers), tuple(edges))


_plans: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()


def plan_for(tbox: TBox) -> StratumPlan:
    plan = _plans.get(tbox)
    if plan is None:
        plan = _plans[tbox] = stratify(tbox)
    return plan


def _rules(tbox: TBox, concept: str) -> list:
    rules = []
    for a in tbox.definitions.get(concept, ()):
        rules.append(("def", a.body.rhs.operands[0].name, a.body.rhs))
    for a in tbox.coverages.get(concept, ()):
        for o in a.body.rhs.operands:
            rules.append(("cov", o.name, None))
    return rules


def _derive(concept, rules, graph, m) -> list:
    out = []
    for kind, base, rhs in rules:
        for x in m.members(base):
            if m.has(x, concept):
                continue
            if kind == "cov" or _eval(rhs, x, graph, m):
                out.append(x)
    return out


def initial_membership(graph, tbox: TBox) -> Membership:
    m = Membership({ind.id: ind.asserted for ind in graph})
    for enum, members in tbox.enumerations.items():
        for i in members:
            if i in graph:
                m.add(i, enum)
    return m


def classify(graph, tbox: TBox, plan: Optional[StratumPlan] = None, workers: int = 1,
             membership: Optional[Membership] = None) -> Membership:
    """Derive every defined concept, layer by layer, to a fixpoint.

    Each round evaluates all rules of the layer against a snapshot and then
    applies the additions, so the result does not depend on `workers`.
    """
    plan = plan if plan is not None else plan_for(tbox)
    m = membership.copy() if membership is not None else initial_membership(graph, tbox)
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for layer in plan.layers:
            jobs = [(c, _rules(tbox, c)) for c in layer]
            while True:
                if pool is None:
                    found = [_derive(c, r, graph, m) for c, r in jobs]
                else:
                    found = list(pool.map(lambda job: _derive(job[0], job[1], graph, m), jobs))
                changed = False
                for (c, _), xs in zip(jobs, found):
                    for x in xs:
                        changed |= m.add(x, c)
                if not changed:
                    break
    finally:
        if pool is not None:
            pool.shutdown()
    return m


def defined_concepts(tbox: TBox) -> Iterable[str]:
    return sorted(set(tbox.definitions) | set(tbox.coverages))
