"""Shared generators and oracles for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction

from exactlp import solve_lp
from netbargain import (
    Allocation,
    AuxiliaryBundle,
    CMatching,
    Instance,
    Solution,
    is_stable,
    make_allocation,
    make_instance,
    make_matching,
    make_solution,
    unit_solution,
)

VERTEX_POOL = [f"v{i:02d}" for i in range(26)]


def random_instance(
    rng: random.Random,
    max_vertices: int = 8,
    max_capacity: int = 3,
    max_weight: int = 10,
    edge_prob: float = 0.45,
    min_vertices: int = 2,
) -> Instance:
    n = rng.randint(min_vertices, max_vertices)
    ids = VERTEX_POOL[:n]
    vertices = [(v, rng.randint(1, max_capacity)) for v in ids]
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < edge_prob:
                edges.append((ids[i], ids[j], rng.randint(0, max_weight)))
    return make_instance(vertices, edges)


def random_tree_instance(
    rng: random.Random,
    max_vertices: int = 8,
    max_capacity: int = 3,
    max_weight: int = 10,
    min_vertices: int = 2,
) -> Instance:
    n = rng.randint(min_vertices, max_vertices)
    ids = VERTEX_POOL[:n]
    vertices = [(v, rng.randint(1, max_capacity)) for v in ids]
    edges = []
    for i in range(1, n):
        parent = rng.randrange(i)
        edges.append((ids[parent], ids[i], rng.randint(0, max_weight)))
    return make_instance(vertices, edges)


def random_unit_instance(
    rng: random.Random,
    max_vertices: int = 8,
    max_edges: int = 10,
    max_weight: int = 10,
    min_vertices: int = 2,
) -> Instance:
    n = rng.randint(min_vertices, max_vertices)
    ids = VERTEX_POOL[:n]
    pairs = [(ids[i], ids[j]) for i in range(n) for j in range(i + 1, n)]
    rng.shuffle(pairs)
    chosen = pairs[: rng.randint(0, min(max_edges, len(pairs)))]
    edges = [(u, v, rng.randint(0, max_weight)) for u, v in chosen]
    return make_instance([(v, 1) for v in ids], edges)


def random_matching(rng: random.Random, instance: Instance) -> CMatching:
    """A random valid c-matching: shuffled greedy with random skips."""
    edges = list(instance.edges)
    rng.shuffle(edges)
    deg: dict[str, int] = {}
    chosen = []
    for u, v, _ in edges:
        if rng.random() < 0.35:
            continue
        if (
            deg.get(u, 0) < instance.capacity[u]
            and deg.get(v, 0) < instance.capacity[v]
        ):
            chosen.append((u, v))
            deg[u] = deg.get(u, 0) + 1
            deg[v] = deg.get(v, 0) + 1
    return make_matching(instance, chosen)


def random_splits(
    rng: random.Random, instance: Instance, matching: CMatching
) -> Solution:
    """Random exact-rational splits of each matched edge."""
    splits: dict[tuple[str, str], Fraction] = {}
    for u, v in matching.sorted_edges:
        w = instance.weight(u, v)
        den = rng.randint(1, 4)
        num = rng.randint(0, den)
        share = w * Fraction(num, den)
        splits[(u, v)] = share
        splits[(v, u)] = w - share
    return make_solution(instance, matching, splits)


def expansion_edge_count(instance: Instance, matching: CMatching) -> int:
    total = len(matching.edges)
    for u, v, _ in instance.edges:
        if not matching.contains(u, v):
            total += instance.capacity[u] * instance.capacity[v]
    return total


def stable_polytope_lp(
    instance: Instance, matching: CMatching
) -> tuple[list[str], list[list[Fraction]], list[Fraction], list[list[Fraction]], list[Fraction]] | None:
    """LP data (variables, a_ub, b_ub, a_eq, b_eq) whose feasible points are
    exactly the stable allocations on ``matching`` in a unit-capacity game.

    Returns None when a constant constraint is already violated (two adjacent
    uncovered vertices with positive weight).
    """
    covered = sorted(u for u in instance.vertex_ids if matching.covers(u))
    index = {u: i for i, u in enumerate(covered)}
    n = len(covered)
    a_eq: list[list[Fraction]] = []
    b_eq: list[Fraction] = []
    for u, v in matching.sorted_edges:
        row = [Fraction(0)] * n
        row[index[u]] = Fraction(1)
        row[index[v]] = Fraction(1)
        a_eq.append(row)
        b_eq.append(instance.weight(u, v))
    a_ub: list[list[Fraction]] = []
    b_ub: list[Fraction] = []
    for u, v, w in instance.edges:
        if matching.contains(u, v):
            continue
        if u not in index and v not in index:
            if w > 0:
                return None  # stability of two adjacent uncovered vertices
            continue
        # x_u + x_v >= w with uncovered endpoints contributing zero
        row = [Fraction(0)] * n
        for t in (u, v):
            if t in index:
                row[index[t]] = Fraction(-1)
        a_ub.append(row)
        b_ub.append(-w)
    return covered, a_ub, b_ub, a_eq, b_eq


def find_stable_allocation(
    instance: Instance,
    matching: CMatching,
    rng: random.Random | None = None,
) -> Allocation | None:
    """A stable allocation on ``matching`` via exact LP feasibility, or None.

    With ``rng``, a random linear objective is maximized so repeated calls
    sample different vertices of the stable polytope.  Any returned allocation
    is re-verified through the stability semantics.
    """
    data = stable_polytope_lp(instance, matching)
    if data is None:
        return None
    covered, a_ub, b_ub, a_eq, b_eq = data
    if rng is None:
        objective = [Fraction(0)] * len(covered)
    else:
        objective = [Fraction(rng.randint(-5, 5)) for _ in covered]
    result = solve_lp(objective, a_ub, b_ub, a_eq, b_eq)
    if result.status == "infeasible":
        return None
    assert result.status == "optimal", result.status  # the polytope is bounded
    payoffs = {u: Fraction(0) for u in instance.vertex_ids}
    for u, value in zip(covered, result.point):
        payoffs[u] = value
    allocation = make_allocation(payoffs)
    solution = unit_solution(instance, matching, allocation)
    assert is_stable(instance, solution).stable
    return allocation


def lp_relaxation_oracle(instance: Instance) -> Fraction:
    """Fractional optimum of the degree-constrained relaxation by exact LP,
    independent of the package's half-integral enumeration."""
    edges = instance.edges
    n = len(edges)
    c = [w for _, _, w in edges]
    a_ub: list[list[Fraction]] = []
    b_ub: list[Fraction] = []
    for i in range(n):
        row = [Fraction(0)] * n
        row[i] = Fraction(1)
        a_ub.append(row)
        b_ub.append(Fraction(1))
    for u in instance.vertex_ids:
        row = [Fraction(0)] * n
        for i, (a, b, _) in enumerate(edges):
            if u in (a, b):
                row[i] = Fraction(1)
        a_ub.append(row)
        b_ub.append(Fraction(instance.capacity[u]))
    result = solve_lp(c, a_ub, b_ub)
    assert result.status == "optimal"
    return result.value


def lift_unit_allocation(
    bundle: AuxiliaryBundle, payoffs: dict[str, Fraction]
) -> Allocation:
    full = {aux_id: Fraction(0) for aux_id in bundle.aux_instance.vertex_ids}
    full.update(payoffs)
    return make_allocation(full)
