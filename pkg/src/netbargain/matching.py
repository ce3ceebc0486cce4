"""Exact maximum-weight c-matching, uniqueness, acyclicity, and the
half-integral relaxation check.

Everything here is exhaustive search with pruning: correctness at desk scale
is the point, not asymptotics.  Size guards make the limits explicit so a
polynomial solver could be dropped in behind the same API later.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .model import CMatching, Instance, SizeGuardError

MAX_EDGES_EXACT = 25
MAX_EDGES_LP = 16


def _guard(instance: Instance, limit: int, mode: str) -> None:
    if len(instance.edges) > limit:
        raise SizeGuardError(
            f"instance too large for exact {mode} mode:"
            f" {len(instance.edges)} edges > limit {limit}"
        )


def max_weight_c_matching(instance: Instance) -> tuple[CMatching, Fraction]:
    """Maximum-weight c-matching; among optima, the lexicographically least
    edge set under the canonical edge order."""
    _guard(instance, MAX_EDGES_EXACT, "matching")
    best_weight, best_set, _ = _search_optima(instance)
    return CMatching(edges=frozenset(best_set)), best_weight


def is_unique_optimum(instance: Instance) -> bool:
    """True iff exactly one edge subset attains the optimum weight."""
    _guard(instance, MAX_EDGES_EXACT, "matching")
    _, _, count = _search_optima(instance)
    return count == 1


def _search_optima(
    instance: Instance,
) -> tuple[Fraction, tuple[tuple[str, str], ...], int]:
    """DFS over edge subsets with capacity and weight-bound pruning.

    Pruning is strict (only subtrees that cannot reach the incumbent weight
    are cut), so every optimum survives for tie counting and tie-breaking.
    """
    edges = instance.edges
    n = len(edges)
    caps = dict(instance.capacity)

    suffix = [Fraction(0)] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + edges[i][2]

    best_weight = Fraction(-1)
    best_set: tuple[tuple[str, str], ...] = ()
    count = 0
    deg: dict[str, int] = {}
    chosen: list[tuple[str, str]] = []

    def dfs(i: int, weight: Fraction) -> None:
        nonlocal best_weight, best_set, count
        if weight + suffix[i] < best_weight:
            return
        if i == n:
            key = tuple(chosen)
            if weight > best_weight:
                best_weight, best_set, count = weight, key, 1
            elif weight == best_weight:
                count += 1
                if key < best_set:
                    best_set = key
            return
        u, v, w = edges[i]
        if deg.get(u, 0) < caps[u] and deg.get(v, 0) < caps[v]:
            deg[u] = deg.get(u, 0) + 1
            deg[v] = deg.get(v, 0) + 1
            chosen.append((u, v))
            dfs(i + 1, weight + w)
            chosen.pop()
            deg[u] -= 1
            deg[v] -= 1
        dfs(i + 1, weight)

    dfs(0, Fraction(0))
    return best_weight, best_set, count


def is_acyclic(matching: CMatching) -> bool:
    """True iff the edge set contains no cycle (union-find)."""
    parent: dict[str, str] = {}

    def find(a: str) -> str:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v in matching.sorted_edges:
        parent.setdefault(u, u)
        parent.setdefault(v, v)
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return True


@dataclass(frozen=True)
class LPRelaxationResult:
    """Outcome of comparing the half-integral relaxation with the integral
    optimum of the degree-constrained subgraph problem."""

    fractional_value: Fraction
    integral_value: Fraction
    has_integral_optimal: bool
    fractional_assignment: tuple[tuple[tuple[str, str], Fraction], ...]

    def to_document(self) -> dict:
        return {
            "fractional_value": str(self.fractional_value),
            "integral_value": str(self.integral_value),
            "has_integral_optimal": self.has_integral_optimal,
            "fractional_assignment": [
                {"u": u, "v": v, "value": str(val)}
                for (u, v), val in self.fractional_assignment
            ],
        }


def lp_integrality_check(instance: Instance) -> LPRelaxationResult:
    """Compare the relaxation optimum (edge values in {0, 1/2, 1}, degree sums
    within capacity) against the integral optimum.

    Extreme points of the relaxation are half-integral, so searching the
    doubled integer problem is exact; tests cross-check this against an
    independent rational LP solver.
    """
    _guard(instance, MAX_EDGES_LP, "relaxation")
    edges = instance.edges
    n = len(edges)
    # Work on doubled values y_e in {0,1,2} with capacities 2*c_u.
    caps = {u: 2 * c for u, c in instance.capacity.items()}

    suffix = [Fraction(0)] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + edges[i][2]

    best_weight = Fraction(-1)
    best_key: tuple[int, ...] = ()
    deg: dict[str, int] = {}
    values: list[int] = [0] * n

    def dfs(i: int, weight: Fraction) -> None:
        nonlocal best_weight, best_key
        if weight + suffix[i] < best_weight:
            return
        if i == n:
            key = tuple(values)
            if weight > best_weight or (weight == best_weight and key < best_key):
                best_weight, best_key = weight, key
            return
        u, v, w = edges[i]
        room = min(caps[u] - deg.get(u, 0), caps[v] - deg.get(v, 0))
        for y in (0, 1, 2):
            if y > room:
                break
            values[i] = y
            if y:
                deg[u] = deg.get(u, 0) + y
                deg[v] = deg.get(v, 0) + y
            dfs(i + 1, weight + w * y / 2)
            if y:
                deg[u] -= y
                deg[v] -= y
            values[i] = 0

    dfs(0, Fraction(0))
    fractional = best_weight
    _, integral = max_weight_c_matching(instance)
    assignment = tuple(
        ((u, v), Fraction(y, 2)) for (u, v, _), y in zip(edges, best_key)
    )
    return LPRelaxationResult(
        fractional_value=fractional,
        integral_value=integral,
        has_integral_optimal=fractional == integral,
        fractional_assignment=assignment,
    )
