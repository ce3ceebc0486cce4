import random
from fractions import Fraction

import pytest

from helpers import random_matching, random_splits, random_unit_instance
from netbargain import (
    ValidationError,
    allocation_of,
    alpha,
    gap_balanced_solution,
    gap_even_split_solution,
    gap_instance,
    is_balanced,
    is_stable,
    make_allocation,
    make_instance,
    make_matching,
    make_solution,
    outside_option,
    unit_outside_option,
    unit_solution,
)


def test_outside_option_balanced_solution_chord_vertices():
    instance = gap_instance()
    solution = gap_balanced_solution()
    report = outside_option(instance, solution, "B")
    assert report.value == Fraction(10, 3)
    assert report.witness == ("E", "D")  # E's weakest contract is with D (20/3)
    assert alpha(instance, solution, "E") == Fraction(10, 3)


def test_outside_option_even_split_solution():
    instance = gap_instance()
    solution = gap_even_split_solution()
    assert alpha(instance, solution, "B") == 5
    assert alpha(instance, solution, "E") == 5


def test_outside_option_cycle_vertex_without_chord():
    instance = gap_instance()
    for solution in (gap_even_split_solution(), gap_balanced_solution()):
        report = outside_option(instance, solution, "C")
        assert report.value == 0
        assert report.witness is None


def test_outside_option_unknown_vertex():
    with pytest.raises(ValidationError):
        outside_option(gap_instance(), gap_balanced_solution(), "Z")


def test_gap_solutions_are_stable():
    instance = gap_instance()
    assert is_stable(instance, gap_balanced_solution()).stable
    assert is_stable(instance, gap_even_split_solution()).stable


def test_unsaturated_vertex_with_positive_outside_option_is_unstable():
    # u-v matched with w=10 split (10, 0); t-v non-matching with weight 5;
    # t is unsaturated and could lure v away from its zero-profit contract.
    instance = make_instance(
        [("u", 1), ("v", 1), ("t", 1)], [("u", "v", 10), ("t", "v", 5)]
    )
    solution = make_solution(instance, [("u", "v")], {("u", "v"): 10, ("v", "u"): 0})
    assert alpha(instance, solution, "t") == 5
    report = is_stable(instance, solution)
    assert not report.stable
    assert any("t" in v and "unsaturated" in v for v in report.violations)


def test_invalid_split_rejected_upstream():
    instance = make_instance([("u", 1), ("v", 1)], [("u", "v", 10)])
    with pytest.raises(ValidationError):
        make_solution(instance, [("u", "v")], {("u", "v"): 12, ("v", "u"): -2})


def test_even_split_balance_violation_at_bc():
    instance = gap_instance()
    report = is_balanced(instance, gap_even_split_solution())
    assert report.stable and not report.balanced
    row = next(r for r in report.edges if (r.u, r.v) == ("B", "C"))
    assert row.z_uv - row.alpha_u == 10
    assert row.z_vu - row.alpha_v == 5
    assert row.surplus_asymmetry == 5
    assert any("B-C" in v for v in report.balance_violations)


def test_balanced_solution_report_is_clean():
    report = is_balanced(gap_instance(), gap_balanced_solution())
    assert report.balanced
    assert report.stability_violations == ()
    assert report.balance_violations == ()
    assert all(row.surplus_asymmetry == 0 for row in report.edges)


def test_isolated_edge_nash_split_is_balanced():
    instance = make_instance([("u", 1), ("v", 1)], [("u", "v", 7)])
    solution = make_solution(
        instance, [("u", "v")], {("u", "v"): Fraction(7, 2), ("v", "u"): Fraction(7, 2)}
    )
    assert is_balanced(instance, solution).balanced


def test_unit_outside_option_path_example():
    instance = make_instance(
        [("a", 1), ("b", 1), ("c", 1)], [("a", "b", 10), ("b", "c", 8)]
    )
    matching = make_matching(instance, [("a", "b")])
    x = make_allocation({"a": 5, "b": 5, "c": 0})
    assert unit_outside_option(instance, matching, x, "b") == 8
    assert unit_outside_option(instance, matching, x, "a") == 0  # no outside edge


def test_unit_outside_option_isolated_matched_edge():
    instance = make_instance([("a", 1), ("b", 1)], [("a", "b", 6)])
    matching = make_matching(instance, [("a", "b")])
    x = make_allocation({"a": 3, "b": 3})
    assert unit_outside_option(instance, matching, x, "a") == 0


def test_unit_outside_option_rejects_general_capacities():
    instance = make_instance([("a", 2), ("b", 1)], [("a", "b", 1)])
    matching = make_matching(instance, [("a", "b")])
    x = make_allocation({"a": 1, "b": 0})
    with pytest.raises(ValidationError, match="capacity"):
        unit_outside_option(instance, matching, x, "a")


def test_unit_outside_option_matches_general_semantics():
    rng = random.Random(20240917)
    checked = 0
    for _ in range(150):
        instance = random_unit_instance(rng)
        matching = random_matching(rng, instance)
        solution = random_splits(rng, instance, matching)
        x = allocation_of(solution)
        for u in instance.vertex_ids:
            assert unit_outside_option(instance, matching, x, u) == alpha(
                instance, solution, u
            )
            checked += 1
    assert checked > 300


def test_unit_solution_round_trip_through_general_semantics():
    instance = make_instance(
        [("a", 1), ("b", 1), ("c", 1)], [("a", "b", 10), ("b", "c", 8)]
    )
    matching = make_matching(instance, [("a", "b")])
    x = make_allocation({"a": 5, "b": 5, "c": 0})
    solution = unit_solution(instance, matching, x)
    assert solution.z("a", "b") == 5
    assert allocation_of(solution) == x
    with pytest.raises(ValidationError):
        unit_solution(instance, matching, make_allocation({"a": 5, "b": 4, "c": 0}))


def test_alpha_ignores_own_matched_splits():
    # B's outside option reads only E's contracts, not B's own splits.
    instance = gap_instance()
    matching = gap_even_split_solution().matching
    base = gap_even_split_solution()
    shifted = make_solution(
        instance,
        matching,
        {
            ("A", "B"): 2, ("B", "A"): 8,
            ("B", "C"): 20, ("C", "B"): 0,
            ("C", "D"): 15, ("D", "C"): 15,
            ("D", "E"): 5, ("E", "D"): 5,
            ("E", "F"): 15, ("F", "E"): 5,
            ("F", "A"): 15, ("A", "F"): 15,
        },
    )
    assert alpha(instance, base, "B") == alpha(instance, shifted, "B") == 5


def test_alpha_monotone_in_witness_weakest_share():
    # u's witness v is saturated; raising v's weakest share lowers alpha_u.
    def build(weak: int):
        instance = make_instance(
            [("u", 1), ("v", 1), ("w", 1)], [("u", "v", 10), ("v", "w", 6)]
        )
        solution = make_solution(
            instance, [("v", "w")], {("v", "w"): weak, ("w", "v"): 6 - weak}
        )
        return alpha(instance, solution, "u")

    values = [build(weak) for weak in range(0, 7)]
    assert values == sorted(values, reverse=True)
    assert values[0] == 10 and values[-1] == 4


def test_balance_report_balanced_implies_stable():
    rng = random.Random(99)
    for _ in range(80):
        instance = random_unit_instance(rng, max_vertices=6)
        matching = random_matching(rng, instance)
        report = is_balanced(instance, random_splits(rng, instance, matching))
        if report.balanced:
            assert report.stable


def test_zero_weight_contract_is_admitted():
    instance = make_instance([("a", 1), ("b", 1)], [("a", "b", 0)])
    solution = make_solution(instance, [("a", "b")], {("a", "b"): 0, ("b", "a"): 0})
    assert is_balanced(instance, solution).balanced
