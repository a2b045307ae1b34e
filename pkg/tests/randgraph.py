"""Seeded random instance graphs and concept expressions over the bundled vocabulary."""
import random

from hypothesis import strategies as st

from bpmn_dl_lint.graph import Individual, InstanceGraph
from bpmn_dl_lint.ontology.expr import (And, Atom, DataExists, DataForAll, DataRange, ExactCard, Exists, ForAll,
                                        MaxCard, MinCard, Nominals, Not, Or, conforms, subexpressions)
from bpmn_dl_lint.ontology.tbox import Equiv

MAX_INDIVIDUALS = 12


def _data_ranges(body):
    target = getattr(body, "target", None)
    if isinstance(target, DataRange):
        yield body.role, target
    for side in ("lhs", "rhs"):
        e = getattr(body, side, None)
        if e is None or isinstance(e, str):
            continue
        for sub in subexpressions(e):
            if isinstance(sub, (DataExists, DataForAll)):
                yield sub.role, sub.range


class Vocabulary:
    """What the generator draws from: every name in the TBox, weighted toward
    the atoms, edges and literals that definitions actually test."""

    def __init__(self, tbox):
        self.tbox = tbox
        self.concepts = sorted(tbox.concepts)
        self.roles = sorted(tbox.roles)
        self.dataroles = sorted(tbox.dataroles)
        self.individuals = sorted(tbox.individuals)
        bases, typed, literals = set(), set(), set()
        for a in tbox.axioms:
            if isinstance(a.body, Equiv) and a.body.flavor != "enumeration":
                for e in subexpressions(a.body.rhs):
                    if isinstance(e, Atom):
                        bases.add(e.name)
                    elif isinstance(e, Exists) and isinstance(e.filler, Nominals):
                        for i in e.filler.individuals:
                            typed.add((e.role, i))
                    elif isinstance(e, (MinCard, MaxCard, ExactCard, Exists, ForAll)):
                        if e.role in tbox.role_set:
                            typed.add((e.role, None))
            for e in _data_ranges(a.body):
                for v in e[1].values:
                    literals.add((e[0], v))
        self.definitions = []
        for lhs, axioms in sorted(tbox.definitions.items()):
            for ax in axioms:
                ops = ax.body.rhs.operands
                edges = tuple((e.role, i) for e in ops if isinstance(e, Exists) and isinstance(e.filler, Nominals)
                              for i in e.filler.individuals[:1])
                self.definitions.append((ops[0].name, edges))
        self.bases = sorted(bases)
        self.typed = sorted(typed, key=lambda t: (t[0], t[1] or ""))
        self.literals = sorted(literals, key=lambda t: (t[0], repr(t[1])))

    def literal_for(self, rng, role):
        dt = self.tbox.dataroles[role]
        if dt == "boolean":
            return rng.random() < 0.5
        if dt in ("integer", "positive_integer"):
            return rng.randint(0, 3)
        if dt == "date":
            import datetime
            return datetime.date(2008, 1, rng.randint(1, 28))
        return rng.choice(["a", "b", "None", "Expression", "Default"])


def random_graph(vocab, rng, n=None):
    """A graph of at most MAX_INDIVIDUALS individuals, some of them nominals.

    About half the plain individuals aim at a random definition: they get its
    base atom and, with some probability each, the edges it asks for. That is
    what makes derived (and nearly derived) concepts common.
    """
    n = n if n is not None else rng.randint(1, MAX_INDIVIDUALS)
    n_plain = rng.randint(max(1, n // 2), n)
    plain = [f"x{i}" for i in range(n_plain)]
    plans = {}
    for i in plain:
        if vocab.definitions and rng.random() < 0.5:
            plans[i] = rng.choice(vocab.definitions)
    wanted = sorted({t for d in plans.values() for _, t in d[1]})
    rng.shuffle(wanted)
    nominals = wanted[:n - n_plain]
    spare = [x for x in vocab.individuals if x not in nominals]
    nominals += rng.sample(spare, min(len(spare), rng.randint(0, n - n_plain - len(nominals))))
    ids = plain + sorted(nominals)
    inds = {i: Individual(i, set()) for i in ids}
    for i in nominals:
        inds[i].asserted.add(vocab.tbox.individuals[i])
    for i in plain:
        ind = inds[i]
        if i in plans:
            base, edges = plans[i]
            ind.asserted.add(base)
            for role, target in edges:
                if target in inds and rng.random() < 0.85:
                    ind.add_edge(role, target)
        for _ in range(rng.randint(0, 3)):
            ind.asserted.add(rng.choice(vocab.bases if rng.random() < 0.8 else vocab.concepts))
        for _ in range(rng.randint(0, 5)):
            roll = rng.random()
            if roll < 0.4 and vocab.typed:
                role, target = rng.choice(vocab.typed)
                if target is None or target not in inds:
                    target = rng.choice(ids)
                ind.add_edge(role, target)
            elif roll < 0.6:
                ind.add_edge(rng.choice(vocab.roles), rng.choice(ids))
            elif roll < 0.8 and vocab.literals:
                role, value = rng.choice(vocab.literals)
                ind.add_literal(role, value)
            else:
                role = rng.choice(vocab.dataroles)
                ind.add_literal(role, vocab.literal_for(rng, role))
    return InstanceGraph(inds.values(), fingerprint=f"random-{rng.random():.12f}")


def random_expr(vocab, rng, graph, depth=3):
    """A concept expression using names present in the graph where possible."""
    present = sorted({a for ind in graph for a in ind.asserted}) or vocab.bases
    used_roles = sorted({r for ind in graph for r in ind.out_edges}) or vocab.roles
    used_data = sorted({r for ind in graph for r in ind.data}) or vocab.dataroles
    ids = graph.ids()

    def go(d):
        leaf = d <= 0 or rng.random() < 0.3
        if leaf:
            pick = rng.randrange(4)
            if pick == 0:
                return Atom(rng.choice(present))
            if pick == 1:
                return Nominals(tuple(sorted(set(rng.sample(ids, rng.randint(1, min(3, len(ids))))))))
            cls = rng.choice([MinCard, MaxCard, ExactCard])
            return cls(rng.randint(0, 3), rng.choice(used_roles + used_data))
        pick = rng.randrange(6)
        if pick == 0:
            return Not(go(d - 1))
        if pick == 1:
            return And(tuple(go(d - 1) for _ in range(rng.randint(2, 3))))
        if pick == 2:
            return Or(tuple(go(d - 1) for _ in range(rng.randint(2, 3))))
        if pick == 3:
            return Exists(rng.choice(used_roles), go(d - 1))
        if pick == 4:
            return ForAll(rng.choice(used_roles), go(d - 1))
        role = rng.choice(used_data)
        dt = vocab.tbox.dataroles[role]
        lits = sorted({v for ind in graph for v in ind.data.get(role, ()) if conforms(v, dt)}, key=repr)
        rng_ = DataRange(dt, tuple(lits[:2])) if lits and rng.random() < 0.7 else DataRange(dt)
        return (DataExists if rng.random() < 0.5 else DataForAll)(role, rng_)

    return go(depth)


def graphs(vocab):
    """Hypothesis strategy: random graphs derived from a drawn seed."""
    return st.integers(min_value=0, max_value=2**32 - 1).map(lambda s: random_graph(vocab, random.Random(s)))


def triples(vocab):
    """Hypothesis strategy: (expression, graph, subject)."""
    def build(seed):
        rng = random.Random(seed)
        g = random_graph(vocab, rng)
        return random_expr(vocab, rng, g), g, rng.choice(g.ids())
    return st.integers(min_value=0, max_value=2**32 - 1).map(build)
