import random
from fractions import Fraction

import pytest

from helpers import lp_relaxation_oracle, random_instance
from netbargain import (
    CMatching,
    SizeGuardError,
    gap_instance,
    gap_outer_cycle,
    is_acyclic,
    is_c_matching,
    is_unique_optimum,
    lp_integrality_check,
    make_instance,
    max_weight_c_matching,
)


def triangle(w=1):
    return make_instance(
        [("a", 1), ("b", 1), ("c", 1)],
        [("a", "b", w), ("a", "c", w), ("b", "c", w)],
    )


def test_gap_instance_optimum_is_outer_cycle():
    matching, weight = max_weight_c_matching(gap_instance())
    assert weight == 120
    assert matching == gap_outer_cycle()
    assert is_unique_optimum(gap_instance())


def test_single_edge():
    instance = make_instance([("a", 1), ("b", 1)], [("a", "b", 7)])
    matching, weight = max_weight_c_matching(instance)
    assert weight == 7
    assert matching.sorted_edges == (("a", "b"),)


def test_triangle_lexicographic_tie_break():
    matching, weight = max_weight_c_matching(triangle())
    assert weight == 1
    assert matching.sorted_edges == (("a", "b"),)
    assert not is_unique_optimum(triangle())


def test_two_disjoint_equal_edges_unique():
    instance = make_instance(
        [("a", 1), ("b", 1), ("c", 1), ("d", 1)],
        [("a", "b", 5), ("c", "d", 5)],
    )
    matching, weight = max_weight_c_matching(instance)
    assert weight == 10 and len(matching.edges) == 2
    assert is_unique_optimum(instance)


def test_zero_weight_ties_prefer_smaller_edge_set():
    instance = make_instance([("a", 1), ("b", 1)], [("a", "b", 0)])
    matching, weight = max_weight_c_matching(instance)
    assert weight == 0
    assert matching.sorted_edges == ()


def test_is_acyclic():
    assert not is_acyclic(gap_outer_cycle())
    assert is_acyclic(CMatching(edges=frozenset({("a", "b"), ("b", "c")})))
    assert is_acyclic(CMatching(edges=frozenset()))


def test_size_guards():
    ids = [f"n{i}" for i in range(30)]
    edges = [(ids[i], ids[i + 1], 1) for i in range(26)]
    big = make_instance([(v, 2) for v in ids], edges)
    with pytest.raises(SizeGuardError, match="matching"):
        max_weight_c_matching(big)
    ids = [f"n{i}" for i in range(18)]
    edges = [(ids[i], ids[i + 1], 1) for i in range(17)]
    medium = make_instance([(v, 2) for v in ids], edges)
    with pytest.raises(SizeGuardError, match="relaxation"):
        lp_integrality_check(medium)


def test_lp_triangle_has_half_integral_gap():
    result = lp_integrality_check(triangle())
    assert result.fractional_value == Fraction(3, 2)
    assert result.integral_value == 1
    assert not result.has_integral_optimal
    assert dict(result.fractional_assignment) == {
        ("a", "b"): Fraction(1, 2),
        ("a", "c"): Fraction(1, 2),
        ("b", "c"): Fraction(1, 2),
    }


def test_lp_gap_instance_is_integral():
    result = lp_integrality_check(gap_instance())
    assert result.fractional_value == 120
    assert result.integral_value == 120
    assert result.has_integral_optimal


def test_lp_single_edge():
    instance = make_instance([("a", 1), ("b", 1)], [("a", "b", 9)])
    result = lp_integrality_check(instance)
    assert result.fractional_value == result.integral_value == 9
    assert result.has_integral_optimal


def test_optimum_invariant_under_relabeling():
    rng = random.Random(4242)
    for _ in range(40):
        instance = random_instance(rng, max_vertices=7)
        _, weight = max_weight_c_matching(instance)
        names = list(instance.vertex_ids)
        renames = dict(zip(names, rng.sample(names, len(names))))
        relabeled = make_instance(
            [(renames[v], c) for v, c in instance.vertices],
            [(renames[u], renames[v], w) for u, v, w in instance.edges],
        )
        _, weight2 = max_weight_c_matching(relabeled)
        assert weight == weight2


def test_returned_matching_is_always_valid():
    rng = random.Random(7001)
    for _ in range(60):
        instance = random_instance(rng, max_vertices=7)
        matching, weight = max_weight_c_matching(instance)
        assert is_c_matching(instance, matching.edges).ok
        assert matching.weight(instance) == weight


def test_half_integral_search_agrees_with_exact_lp():
    # the {0, 1/2, 1} search relies on half-integral extreme points; cross-check
    # the optimum against an independent exact rational LP solver
    rng = random.Random(90210)
    checked = 0
    while checked < 60:
        instance = random_instance(rng, max_vertices=6, edge_prob=0.5)
        if len(instance.edges) > 12:
            continue
        result = lp_integrality_check(instance)
        assert result.fractional_value == lp_relaxation_oracle(instance)
        checked += 1


def test_fractional_assignment_is_feasible_and_optimal_valued():
    rng = random.Random(5150)
    for _ in range(40):
        instance = random_instance(rng, max_vertices=6, edge_prob=0.5)
        if len(instance.edges) > 12:
            continue
        result = lp_integrality_check(instance)
        degrees: dict[str, Fraction] = {u: Fraction(0) for u in instance.vertex_ids}
        total = Fraction(0)
        for (u, v), value in result.fractional_assignment:
            assert value in (0, Fraction(1, 2), 1)
            degrees[u] += value
            degrees[v] += value
            total += value * instance.weight(u, v)
        assert total == result.fractional_value
        for u, d in degrees.items():
            assert d <= instance.capacity[u]
