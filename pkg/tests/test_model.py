import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_instance, random_matching, random_splits
from netbargain import (
    ParseError,
    ValidationError,
    allocation_of,
    dump_instance,
    dump_solution,
    gap_balanced_solution,
    gap_even_split_solution,
    gap_instance,
    gap_outer_cycle,
    is_c_matching,
    load_instance,
    load_solution,
    make_instance,
    make_matching,
    make_solution,
)

GAP_DOCUMENT = """
{ "vertices": [ {"id": "A", "capacity": 2}, {"id": "B", "capacity": 2},
                {"id": "C", "capacity": 2}, {"id": "D", "capacity": 2},
                {"id": "E", "capacity": 2}, {"id": "F", "capacity": 2} ],
  "edges": [ {"u": "A", "v": "B", "weight": "10"}, {"u": "B", "v": "C", "weight": 20},
             {"u": "C", "v": "D", "weight": 30}, {"u": "D", "v": "E", "weight": 10},
             {"u": "E", "v": "F", "weight": 20}, {"u": "F", "v": "A", "weight": 30},
             {"u": "B", "v": "E", "weight": 10} ] }
"""


def test_load_gap_document():
    instance = load_instance(GAP_DOCUMENT)
    assert len(instance.vertex_ids) == 6
    assert len(instance.edges) == 7
    assert instance == gap_instance()


def test_empty_instance_is_valid():
    instance = load_instance('{"vertices": [], "edges": []}')
    assert instance.vertex_ids == ()
    assert instance.edges == ()


def test_unknown_endpoint_names_the_vertex():
    doc = '{"vertices": [{"id": "A", "capacity": 1}], "edges": [{"u": "A", "v": "Q", "weight": 1}]}'
    with pytest.raises(ValidationError, match="Q"):
        load_instance(doc)


@pytest.mark.parametrize(
    "vertices,edges,fragment",
    [
        ([("A", 1), ("A", 2)], [], "duplicate"),
        ([("A", 0)], [], "capacity"),
        ([("A", True)], [], "integer"),
        ([("A", 1)], [("A", "A", 1)], "self-loop"),
        ([("A", 1), ("B", 1)], [("A", "B", 1), ("B", "A", 2)], "parallel"),
        ([("A", 1), ("B", 1)], [("A", "B", -1)], "negative"),
    ],
)
def test_instance_validation_errors(vertices, edges, fragment):
    with pytest.raises(ValidationError, match=fragment):
        make_instance(vertices, edges)


def test_fraction_weights_parse_and_round_trip():
    doc = '{"vertices": [{"id": "a", "capacity": 1}, {"id": "b", "capacity": 1}], "edges": [{"u": "a", "v": "b", "weight": "35/3"}]}'
    instance = load_instance(doc)
    assert instance.weight("a", "b") == Fraction(35, 3)
    assert load_instance(dump_instance(instance)) == instance


def test_malformed_document_is_a_parse_error():
    with pytest.raises(ParseError):
        load_instance("{not json")
    with pytest.raises(ParseError):
        load_instance('{"vertices": []}')
    with pytest.raises(ParseError):
        load_instance('{"vertices": {}, "edges": []}')


def test_float_weights_rejected():
    with pytest.raises(ValidationError):
        make_instance([("a", 1), ("b", 1)], [("a", "b", 0.5)])


def test_is_c_matching_gap_cycle():
    instance = gap_instance()
    check = is_c_matching(instance, gap_outer_cycle().edges)
    assert check.ok and check.violations == ()


def test_is_c_matching_star_overload():
    instance = make_instance(
        [("hub", 2), ("a", 1), ("b", 1), ("c", 1)],
        [("hub", "a", 1), ("hub", "b", 1), ("hub", "c", 1)],
    )
    check = is_c_matching(instance, [("hub", "a"), ("hub", "b"), ("hub", "c")])
    assert not check.ok
    assert any("hub" in v for v in check.violations)


def test_is_c_matching_empty_and_unknown_edge():
    instance = gap_instance()
    assert is_c_matching(instance, []).ok
    with pytest.raises(ValidationError, match="A-C"):
        is_c_matching(instance, [("A", "C")])


def test_allocation_of_even_split_is_uniform_twenty():
    allocation = allocation_of(gap_even_split_solution())
    assert all(allocation[u] == 20 for u in "ABCDEF")


def test_allocation_of_balanced_solution():
    allocation = allocation_of(gap_balanced_solution())
    assert allocation["A"] == Fraction(55, 3)
    assert allocation["C"] == Fraction(70, 3)


def test_allocation_of_empty_matching_is_zero():
    instance = gap_instance()
    solution = make_solution(instance, [], {})
    allocation = allocation_of(solution)
    assert all(allocation[u] == 0 for u in "ABCDEF")


def test_solution_validation_errors():
    instance = make_instance([("a", 1), ("b", 1)], [("a", "b", 10)])
    with pytest.raises(ValidationError, match="sum"):
        make_solution(instance, [("a", "b")], {("a", "b"): 4, ("b", "a"): 4})
    with pytest.raises(ValidationError, match="negative"):
        make_solution(instance, [("a", "b")], {("a", "b"): 12, ("b", "a"): -2})
    with pytest.raises(ValidationError, match="missing"):
        make_solution(instance, [("a", "b")], {("a", "b"): 10})


def test_nonzero_split_on_unmatched_edge_rejected():
    instance = make_instance(
        [("a", 1), ("b", 1), ("c", 1)], [("a", "b", 10), ("b", "c", 4)]
    )
    with pytest.raises(ValidationError, match="non-matching"):
        make_solution(
            instance,
            [("a", "b")],
            {("a", "b"): 5, ("b", "a"): 5, ("b", "c"): 1, ("c", "b"): 3},
        )


def test_solution_document_round_trip():
    instance = gap_instance()
    solution = gap_balanced_solution()
    text = dump_solution(solution)
    assert load_solution(text, instance) == solution


def test_matching_requires_known_edges():
    with pytest.raises(ValidationError):
        make_matching(gap_instance(), [("A", "D")])


def _instances() -> st.SearchStrategy:
    return st.integers(min_value=0, max_value=10_000).map(
        lambda seed: random_instance(random.Random(seed), max_vertices=6)
    )


@settings(max_examples=60, deadline=None)
@given(_instances())
def test_document_round_trip(instance):
    assert load_instance(dump_instance(instance)) == instance


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=0, max_value=6))
def test_allocation_linear_in_splits_and_totals_matching_weight(seed, numerator):
    rng = random.Random(seed)
    instance = random_instance(rng, max_vertices=6)
    matching = random_matching(rng, instance)
    solution = random_splits(rng, instance, matching)
    allocation = allocation_of(solution)

    # total payoff equals the matching weight
    assert allocation.total() == matching.weight(instance)

    # scaling all splits of a fixed matching scales every payoff
    t = Fraction(numerator, 3)
    scaled_weights = [(u, v, w * t) for u, v, w in instance.edges]
    scaled_instance = make_instance(instance.vertices, scaled_weights)
    scaled = make_solution(
        scaled_instance,
        matching.sorted_edges,
        {
            (a, b): solution.z(a, b) * t
            for a, b in [
                pair
                for u, v in matching.sorted_edges
                for pair in ((u, v), (v, u))
            ]
        },
    )
    scaled_allocation = allocation_of(scaled)
    for u in instance.vertex_ids:
        assert scaled_allocation[u] == allocation[u] * t
