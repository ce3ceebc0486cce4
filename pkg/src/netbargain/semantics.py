"""Outside options, stability, and balance for capacitated solutions.

The outside option of a vertex u is the best profit it could extract by
forming a new contract with a non-matching neighbor v: the full edge weight if
v still has spare capacity, otherwise the weight minus v's weakest current
share (v would have to drop that contract).  The value is clamped at zero; the
unit-capacity variant uses the same convention so that it agrees exactly with
the general one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .model import (
    Allocation,
    CMatching,
    Instance,
    Solution,
    ValidationError,
    is_saturated,
    make_solution,
)


@dataclass(frozen=True)
class OutsideOptionReport:
    """Value and witness of a vertex's outside option.

    ``witness`` is (best outside neighbor v', weakest-contract partner of v'
    or None if v' is unsaturated); it is None when no candidate is
    nonnegative.  Ties break lexicographically on the neighbor id, then on the
    weakest-partner id.
    """

    vertex: str
    value: Fraction
    witness: tuple[str, str | None] | None


def weakest_contract(solution: Solution, v: str) -> tuple[str, Fraction]:
    """The matched partner of ``v`` with minimal share z_v*, ties lexicographic."""
    partners = solution.matching.matched_neighbors(v)
    if not partners:
        raise ValidationError(f"vertex {v} has no matched edges")
    best = min(partners, key=lambda w: (solution.z(v, w), w))
    return best, solution.z(v, best)


def outside_option(instance: Instance, solution: Solution, u: str) -> OutsideOptionReport:
    """Outside option of ``u`` in ``solution``, with witness."""
    if not instance.has_vertex(u):
        raise ValidationError(f"unknown vertex {u!r}")
    best_value: Fraction | None = None
    best_witness: tuple[str, str | None] | None = None
    for v in instance.neighbors(u):
        if solution.matching.contains(u, v):
            continue
        if is_saturated(instance, solution.matching, v):
            partner, share = weakest_contract(solution, v)
            value = instance.weight(u, v) - share
            witness: tuple[str, str | None] = (v, partner)
        else:
            value = instance.weight(u, v)
            witness = (v, None)
        if best_value is None or value > best_value:
            best_value, best_witness = value, witness
    if best_value is None or best_value < 0:
        return OutsideOptionReport(vertex=u, value=Fraction(0), witness=None)
    return OutsideOptionReport(vertex=u, value=best_value, witness=best_witness)


def alpha(instance: Instance, solution: Solution, u: str) -> Fraction:
    return outside_option(instance, solution, u).value


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    violations: tuple[str, ...]


def is_stable(instance: Instance, solution: Solution) -> StabilityReport:
    """Every matched share must cover its earner's outside option, and every
    unsaturated vertex must have outside option zero."""
    violations: list[str] = []
    alphas = {u: alpha(instance, solution, u) for u in instance.vertex_ids}
    for u, v in solution.matching.sorted_edges:
        for a, b in ((u, v), (v, u)):
            if solution.z(a, b) < alphas[a]:
                violations.append(
                    f"matched share z[{a},{b}] = {solution.z(a, b)}"
                    f" is below outside option {alphas[a]}"
                )
    for u in instance.vertex_ids:
        if not is_saturated(instance, solution.matching, u) and alphas[u] != 0:
            violations.append(
                f"unsaturated vertex {u} has positive outside option {alphas[u]}"
            )
    return StabilityReport(stable=not violations, violations=tuple(violations))


@dataclass(frozen=True)
class EdgeBalance:
    """Balance data for one matched edge uv."""

    u: str
    v: str
    z_uv: Fraction
    alpha_u: Fraction
    z_vu: Fraction
    alpha_v: Fraction

    @property
    def surplus_asymmetry(self) -> Fraction:
        return (self.z_uv - self.alpha_u) - (self.z_vu - self.alpha_v)


@dataclass(frozen=True)
class BalanceReport:
    edges: tuple[EdgeBalance, ...]
    stability_violations: tuple[str, ...]
    balance_violations: tuple[str, ...]

    @property
    def stable(self) -> bool:
        return not self.stability_violations

    @property
    def balanced(self) -> bool:
        return self.stable and not self.balance_violations

    def to_document(self) -> dict:
        return {
            "stable": self.stable,
            "balanced": self.balanced,
            "edges": [
                {
                    "u": e.u,
                    "v": e.v,
                    "z_uv": str(e.z_uv),
                    "alpha_u": str(e.alpha_u),
                    "z_vu": str(e.z_vu),
                    "alpha_v": str(e.alpha_v),
                    "surplus_asymmetry": str(e.surplus_asymmetry),
                }
                for e in self.edges
            ],
            "stability_violations": list(self.stability_violations),
            "balance_violations": list(self.balance_violations),
        }


def is_balanced(instance: Instance, solution: Solution) -> BalanceReport:
    """Balanced = stable and each matched edge splits its surplus equally."""
    stability = is_stable(instance, solution)
    rows: list[EdgeBalance] = []
    balance_violations: list[str] = []
    for u, v in solution.matching.sorted_edges:
        row = EdgeBalance(
            u=u,
            v=v,
            z_uv=solution.z(u, v),
            alpha_u=alpha(instance, solution, u),
            z_vu=solution.z(v, u),
            alpha_v=alpha(instance, solution, v),
        )
        rows.append(row)
        if row.surplus_asymmetry != 0:
            balance_violations.append(
                f"edge {u}-{v}: (z[{u},{v}] - alpha_{u}) - (z[{v},{u}] - alpha_{v})"
                f" = {row.surplus_asymmetry} != 0"
            )
    return BalanceReport(
        edges=tuple(rows),
        stability_violations=stability.violations,
        balance_violations=tuple(balance_violations),
    )


def validate_unit_solution(instance: Instance, matching: CMatching, x: Allocation) -> None:
    """Check that (matching, x) is a valid unit-capacity solution."""
    if not instance.is_unit_capacity():
        offending = [v for v, c in instance.vertices if c > 1]
        raise ValidationError(f"instance is not unit-capacity (e.g. {offending[0]})")
    for u in instance.vertex_ids:
        if x[u] < 0:
            raise ValidationError(f"payoff x[{u}] = {x[u]} is negative")
        if not matching.covers(u) and x[u] != 0:
            raise ValidationError(f"uncovered vertex {u} has nonzero payoff {x[u]}")
    for u, v in matching.sorted_edges:
        total = x[u] + x[v]
        w = instance.weight(u, v)
        if total != w:
            raise ValidationError(
                f"payoffs of matched edge {u}-{v} sum to {total}, expected weight {w}"
            )


def unit_solution(instance: Instance, matching: CMatching, x: Allocation) -> Solution:
    """Lift a unit-capacity allocation to a general Solution (z_uv = x_u on M)."""
    validate_unit_solution(instance, matching, x)
    splits = {}
    for u, v in matching.sorted_edges:
        splits[(u, v)] = x[u]
        splits[(v, u)] = x[v]
    return make_solution(instance, matching, splits)


def unit_outside_option(
    instance: Instance, matching: CMatching, x: Allocation, u: str
) -> Fraction:
    """Outside option in a unit-capacity game: best of w_uv - x_v over
    non-matching neighbors v, clamped at zero.

    Coincides exactly with :func:`outside_option` on the lifted solution.
    """
    if not instance.is_unit_capacity():
        offending = [v for v, c in instance.vertices if c > 1]
        raise ValidationError(f"capacity > 1 present (e.g. {offending[0]})")
    if not instance.has_vertex(u):
        raise ValidationError(f"unknown vertex {u!r}")
    best = Fraction(0)
    for v in instance.neighbors(u):
        if matching.contains(u, v):
            continue
        candidate = instance.weight(u, v) - x[v]
        if candidate > best:
            best = candidate
    return best
