import random
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rdfgql import Engine
from rdfgql.compare import GraphGenerator, QueryGenerator, default_schema_text
from rdfgql.operands import (
    ARGUMENT,
    FRAGMENT,
    INNER,
    LEAF,
    ROOT,
    TYPE_FILTER,
    DependencyGraph,
    InvariantViolation,
    build_dependency_graph,
    generate_operands,
    independent_strong_component,
    prune,
    remove_label,
)
from rdfgql.query import Field, InlineFragment
from rdfgql.schema import DIRECT, JOIN, SCALARS, TypeRef, load_schema
from rdfgql.store import load_graph
from graphs import label_id, patterns

DOE_PEOPLE = [("?x", "rdf:type", "Person"), ("?x", "lname", '"Doe"'), ("?x", "fname", "?y"), ("?x", "email", "?z")]


def plan(engine, text):
    return engine.plan(engine.prepare(text))


def test_doe_people_operands(people_engine, doe_people):
    operands, _ = plan(people_engine, doe_people)
    assert patterns(operands, people_engine.index) == DOE_PEOPLE
    assert [op.kind for op in operands] == [ROOT, ARGUMENT, LEAF, LEAF]


def test_company_staff_operands_share_variables(people_engine, company_staff):
    operands, _ = plan(people_engine, company_staff)
    got = patterns(operands, people_engine.index)
    assert got[:4] == [("?x", "rdf:type", "Company"), ("?x", "name", "?y"), ("?x", "employees", "?z"),
                       ("?z", "rdf:type", "Person")]
    # leaves follow the query's own order: id before lname
    assert got[4:] == [("?z", "id", "?w"), ("?z", "lname", "?v")]
    assert [op.kind for op in operands] == [ROOT, LEAF, INNER, TYPE_FILTER, LEAF, LEAF]


def test_single_root_field_is_one_operand(people_engine):
    operands, graph = plan(people_engine, "{ companies { employees { fname } } }")
    assert patterns(operands, people_engine.index)[0] == ("?x", "rdf:type", "Company")
    operands, graph = people_engine.plan(people_engine.prepare("{ people { age } }"))
    assert len(operands) == 2


def test_absent_literal_gets_overlay_id(people_engine):
    operands, _ = plan(people_engine, '{ people(lname: "Nobody") { fname } }')
    const = operands[1].pattern[2]
    assert const >= len(people_engine.index.dictionary)
    assert people_engine.index.lookup(operands.extra_terms[const]) is None
    assert people_engine.index.slice(operands[1].pattern).is_empty()


def test_inverse_swaps_subject_and_object():
    engine = Engine.from_text(default_schema_text(), "")
    operands, _ = plan(engine, "{ customers { orders { label } } }")
    assert patterns(operands, engine.index)[1] == ("?y", "placedBy", "?x")


def test_direct_id_leaf_has_no_operand():
    direct = Engine.from_text(default_schema_text(), "")
    join = Engine.from_text(default_schema_text(), "", id_mode=JOIN)
    text = "{ customers { id label } }"
    assert len(plan(direct, text)[0]) == 2
    ops = plan(join, text)[0]
    assert len(ops) == 3 and ops[1].id_leaf


def test_direct_id_argument_is_identity_operand():
    engine = Engine.from_text(default_schema_text(), "")
    operands, _ = plan(engine, '{ customers(id: "http://data.example/customer0") { label } }')
    assert operands[1].identity and operands[1].pattern[1] is None


# dependency graph of the worked examples


def test_doe_people_graph(people_engine, doe_people):
    _, graph = plan(people_engine, doe_people)
    assert set(graph.strong_components) == {frozenset({1, 2}), frozenset({3}), frozenset({4})}
    comp, labels = independent_strong_component(graph)
    assert comp == {1, 2} and labels == {0}
    assert not any({u, v} == {3, 4} for u, _, v in graph.edges)
    assert {(u, v) for u, _, v in graph.edges} == {(1, 2), (2, 1), (1, 3), (1, 4), (2, 3), (2, 4)}


def test_company_staff_graph(people_engine, company_staff):
    operands, graph = plan(people_engine, company_staff)
    comp, labels = independent_strong_component(graph)
    assert comp == {1} and labels == {label_id(operands, "x")}
    z = label_id(operands, "z")
    assert (3, z, 4) in graph.edges and (4, z, 3) in graph.edges


def test_single_vertex_graph():
    graph = DependencyGraph.from_edges({1: {0}}, [])
    assert graph.edges == frozenset()
    assert independent_strong_component(graph) == ({1}, {0})


def test_prune_examples(people_engine, doe_people):
    _, graph = plan(people_engine, doe_people)
    assert prune(graph, {4}).vertices == {1, 2, 3}
    assert not prune(graph, {1})
    assert prune(graph, ()) is graph


def test_remove_label_examples(people_engine, doe_people, company_staff):
    _, graph = plan(people_engine, doe_people)
    after = remove_label(graph, 0)
    assert after.vertices == {3, 4}
    assert not after.is_connected

    operands, graph = plan(people_engine, company_staff)
    after = remove_label(graph, label_id(operands, "x"))
    # name ?y stays as its own component; the employees subtree is the other
    assert [c.vertices for c in after.components] == [{2}, {3, 4, 5, 6}]
    employees = after.components[1]
    assert independent_strong_component(employees)[0] == {3, 4}

    only = DependencyGraph.from_edges({1: {0}, 2: {0}}, [(1, 0, 2), (2, 0, 1)])
    assert not remove_label(only, 0)


def test_multiple_sources_on_connected_graph_is_an_invariant_violation():
    graph = DependencyGraph.from_edges({1: {0}, 2: {1}, 3: {0, 1}}, [(1, 0, 3), (2, 1, 3)])
    with pytest.raises(InvariantViolation):
        independent_strong_component(graph)


def test_views_are_interned(people_engine, doe_people):
    _, graph = plan(people_engine, doe_people)
    assert graph.prune({4}) is graph.prune({4})
    assert graph.remove_label(0).remove_label(1) is graph.remove_label(0).remove_label(1)


# properties over random schema-conforming queries

SCHEMA, BINDING = load_schema(default_schema_text())


def expected_count(nq, id_mode) -> int:
    """Operand count by the documented formula, walking the normalized query."""

    def walk(sels, scope, root):
        n = 0
        for sel in sels:
            if isinstance(sel, InlineFragment):
                n += 1 + walk(sel.selections, sel.type_name, False)
                continue
            ftype = SCHEMA.field(scope, sel.name).type
            n += len(sel.args)
            if root:
                n += 1
            elif ftype.name in SCALARS:
                n += 0 if (id_mode == DIRECT and ftype == TypeRef("ID")) else 1
            else:
                n += 1 + (1 if BINDING.field(scope, sel.name).filter else 0)
            if sel.selections:
                n += walk(sel.selections, ftype.name, False)
        return n

    return walk(nq.selections, SCHEMA.query_root, True)


def random_plan(seed, id_mode):
    rng = random.Random(seed)
    triples = GraphGenerator(SCHEMA, BINDING, rng).generate()
    engine = Engine(SCHEMA, BINDING, load_graph(triples), id_mode=id_mode)
    nq = engine.prepare(QueryGenerator(SCHEMA, rng, id_mode).query())
    operands = generate_operands(SCHEMA, BINDING, nq, engine.index, id_mode)
    return nq, operands, build_dependency_graph(operands, nq)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([DIRECT, JOIN]))
def test_operand_count_formula(seed, id_mode):
    nq, operands, _ = random_plan(seed, id_mode)
    assert len(operands) == expected_count(nq, id_mode)
    assert [op.index for op in operands] == list(range(1, len(operands) + 1))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([DIRECT, JOIN]))
def test_graph_invariants(seed, id_mode):
    _, operands, graph = random_plan(seed, id_mode)
    labels = {op.index: {lab.id for lab in op.labels} for op in operands}
    assert graph.vertices == set(labels)
    for v in graph.vertices:
        assert graph.labels_of(v) == labels[v]
    for u, lab, v in graph.edges:
        assert lab in labels[u] & labels[v]
    # the operands of one field expression are mutually reachable
    groups = {}
    for op in operands:
        groups.setdefault(op.path, []).append(op.index)
    for group in groups.values():
        for u, v in combinations(group, 2):
            assert v in graph.reachable([u]) and u in graph.reachable([v])
    # no edges between sibling subtrees
    for u, _, v in graph.edges:
        pu, pv = operands.op(u).path, operands.op(v).path
        assert pv[: len(pu)] == pu


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.data())
def test_prune_is_monotone(seed, data):
    _, operands, graph = random_plan(seed, DIRECT)
    vertices = sorted(graph.vertices)
    small = set(data.draw(st.lists(st.sampled_from(vertices), max_size=3)))
    extra = set(data.draw(st.lists(st.sampled_from(vertices), max_size=3)))
    a, b = graph.prune(small), graph.prune(small | extra)
    assert b.vertices <= a.vertices <= graph.vertices
    assert not (a.vertices & graph.reachable(small))
    assert graph.prune(set()) is graph
