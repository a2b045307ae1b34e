import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bpmn_dl_lint import parse_tbox
from bpmn_dl_lint.checker import prepare, roles_for
from bpmn_dl_lint.classifier import Membership, classify, eval_expr, initial_membership, stratify
from bpmn_dl_lint.errors import StratificationError
from bpmn_dl_lint.graph import Individual, InstanceGraph, materialize_roles
from bpmn_dl_lint.ontology.expr import And, Atom, ExactCard, Exists, ForAll, MaxCard, MinCard, Nominals, Not, Or
from oracles import naive_classify
from randgraph import random_expr, random_graph
from test_schema import MUTUAL


def _graph(*inds):
    return InstanceGraph(inds)


def test_exists_with_nominal_filler():
    g = _graph(Individual("e1", {"event"}, out_edges={"has_event_type": ["start"]}), Individual("start"))
    m = Membership({"e1": {"event"}, "start": set()})
    assert eval_expr(Exists("has_event_type", Nominals(("start",))), "e1", g, m)
    assert not eval_expr(Exists("has_event_type", Nominals(("end",))), "e1", g, m)


def test_forall_is_vacuous_without_fillers():
    g = _graph(Individual("g1", {"gateway"}))
    assert eval_expr(ForAll("has_gateway_gate", Atom("gate")), "g1", g, Membership({"g1": {"gateway"}}))


def test_exact_card_counts_literals():
    g = _graph(Individual("d1", {"business_process_diagram"},
                          data={"has_business_process_diagram_name": ["A", "B"]}))
    m = Membership({"d1": {"business_process_diagram"}})
    assert not eval_expr(ExactCard(1, "has_business_process_diagram_name"), "d1", g, m)
    assert eval_expr(ExactCard(2, "has_business_process_diagram_name"), "d1", g, m)


def test_unknown_subject():
    with pytest.raises(KeyError):
        eval_expr(Atom("a"), "nobody", _graph(), Membership())


# ---- stratification

def test_boundary_layers_in_bundled(tbox):
    plan = stratify(tbox)
    pos = plan.layer_of("activity_boundary_intermediate_event")
    neg = plan.layer_of("not_activity_boundary_intermediate_event")
    assert pos is not None and neg is not None and pos < neg


def test_every_defined_concept_in_one_layer(tbox):
    plan = stratify(tbox)
    flat = [c for layer in plan.layers for c in layer]
    assert len(flat) == len(set(flat))
    assert set(flat) == set(tbox.definitions) | set(tbox.coverages)
    for c, d, positive in plan.edges:
        if not positive:
            assert plan.layer_of(d) < plan.layer_of(c)
        else:
            assert plan.layer_of(d) <= plan.layer_of(c)


def test_stratify_is_deterministic(tbox):
    assert stratify(tbox) == stratify(tbox)
    for layer in stratify(tbox).layers:
        assert list(layer) == sorted(layer)


def test_no_definitions_gives_empty_plan():
    plan = stratify(parse_tbox("concept a"))
    assert plan.layers == ()


def test_mutual_negation_is_unstratifiable():
    with pytest.raises(StratificationError) as err:
        stratify(parse_tbox(MUTUAL))
    assert set(err.value.cycle) == {"a", "a2"}


# ---- classification

def test_exclusive_gateway_chain(tbox, load):
    g = load([{"id": "g1", "atoms": ["gateway"],
               "refs": {"has_gateway_gateway_type": ["exclusive"],
                        "has_exclusive_gateway_exclusive_type": ["data_exclusive_type"]}}])
    m = prepare(tbox, g)
    assert m.has("g1", "exclusive_gateway")
    assert m.has("g1", "data_based_exclusive_gateway")
    assert not m.has("g1", "event_based_exclusive_gateway")


def test_end_event_is_never_start(tbox, load):
    g = load([{"id": "x", "atoms": ["event"], "refs": {"has_event_type": ["end"]}}])
    m = prepare(tbox, g)
    assert m.has("x", "end_event") and not m.has("x", "start_event")
    assert {"flow_object", "graphical_element", "BPMN_element"} <= m.atoms("x")


def test_empty_graph_gives_empty_membership(tbox):
    m = classify(InstanceGraph(), tbox)
    assert len(m) == 0


def test_asserted_is_kept(tbox, load):
    g = load([{"id": "t1", "kind": "task"}])
    m = prepare(tbox, g)
    assert g["t1"].asserted <= m.atoms("t1")


def test_negated_definition_uses_lower_layer(tbox, load):
    els = [{"id": "t1", "kind": "task"},
           {"id": "i1", "kind": "intermediate_event", "refs": {"has_intermediate_event_target": ["t1"]}},
           {"id": "i2", "kind": "intermediate_event"}]
    m = prepare(tbox, load(els))
    assert m.has("i1", "activity_boundary_intermediate_event")
    assert not m.has("i1", "not_activity_boundary_intermediate_event")
    assert m.has("i2", "not_activity_boundary_intermediate_event")


def test_workers_do_not_change_result(tbox, vocab):
    for seed in range(20):
        g = random_graph(vocab, random.Random(seed))
        materialize_roles(g, roles_for(tbox))
        assert classify(g, tbox, workers=1) == classify(g, tbox, workers=4)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_idempotent(tbox, vocab, seed):
    g = random_graph(vocab, random.Random(seed))
    materialize_roles(g, roles_for(tbox))
    m = classify(g, tbox)
    assert classify(g, tbox, membership=m) == m


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_matches_oracle(tbox, vocab, seed):
    g = random_graph(vocab, random.Random(seed))
    materialize_roles(g, roles_for(tbox))
    assert classify(g, tbox).as_dict() == naive_classify(g, tbox)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_layers_only_grow(tbox, vocab, seed):
    g = random_graph(vocab, random.Random(seed))
    materialize_roles(g, roles_for(tbox))
    start = initial_membership(g, tbox)
    done = classify(g, tbox, membership=start)
    for i in g.ids():
        assert start.atoms(i) <= done.atoms(i)


# ---- algebra on random triples

def _triple(vocab, seed):
    rng = random.Random(seed)
    g = random_graph(vocab, rng)
    a, b = random_expr(vocab, rng, g, 2), random_expr(vocab, rng, g, 2)
    m = Membership({i.id: i.asserted for i in g})
    return g, m, a, b, rng.choice(g.ids()), rng


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_double_negation(vocab, seed):
    g, m, a, _, x, _ = _triple(vocab, seed)
    assert eval_expr(Not(Not(a)), x, g, m) == eval_expr(a, x, g, m)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_de_morgan(vocab, seed):
    g, m, a, b, x, _ = _triple(vocab, seed)
    assert eval_expr(Not(And((a, b))), x, g, m) == eval_expr(Or((Not(a), Not(b))), x, g, m)
    assert eval_expr(Not(Or((a, b))), x, g, m) == eval_expr(And((Not(a), Not(b))), x, g, m)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 3))
def test_exact_is_min_and_max(vocab, seed, n):
    g, m, _, _, x, rng = _triple(vocab, seed)
    role = rng.choice(sorted(set(g[x].out_edges) | set(g[x].data)) or vocab.roles)
    assert eval_expr(ExactCard(n, role), x, g, m) == eval_expr(And((MinCard(n, role), MaxCard(n, role))), x, g, m)
