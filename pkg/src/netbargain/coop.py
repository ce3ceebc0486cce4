"""The cooperative matching game: coalition values, powers, core, prekernel,
gadget detection, and the balanced/core-prekernel correspondence harness.

A coalition's value is the maximum-weight c-matching of its induced subgraph.
All set enumeration is exact and capped at 16 players.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable

from .matching import is_acyclic, max_weight_c_matching
from .model import (
    Allocation,
    CMatching,
    Instance,
    SizeGuardError,
    Solution,
    ValidationError,
    allocation_of,
    is_saturated,
)
from .semantics import is_balanced, is_stable, outside_option

MAX_PLAYERS = 16


def _guard_players(instance: Instance) -> None:
    n = len(instance.vertex_ids)
    if n > MAX_PLAYERS:
        raise SizeGuardError(
            f"coalition enumeration limited to {MAX_PLAYERS} players, got {n}"
        )


def coalition_value(instance: Instance, subset: Iterable[str]) -> Fraction:
    """nu(S): weight of a maximum-weight c-matching of the induced subgraph."""
    _, weight = max_weight_c_matching(instance.induced(subset))
    return weight


@dataclass(frozen=True)
class CoalitionValueTable:
    """nu(S) for every coalition, indexed by bitmask over the sorted ids."""

    players: tuple[str, ...]
    values: tuple[Fraction, ...]

    def mask_of(self, subset: Iterable[str]) -> int:
        mask = 0
        for u in subset:
            mask |= 1 << self.players.index(u)
        return mask

    def members(self, mask: int) -> tuple[str, ...]:
        return tuple(p for i, p in enumerate(self.players) if mask >> i & 1)

    def of(self, subset: Iterable[str]) -> Fraction:
        return self.values[self.mask_of(subset)]


def coalition_table(instance: Instance) -> CoalitionValueTable:
    """Exhaustive coalition-value table (2^n exact solver runs)."""
    _guard_players(instance)
    players = instance.vertex_ids
    values = [Fraction(0)] * (1 << len(players))
    for mask in range(1 << len(players)):
        subset = [p for i, p in enumerate(players) if mask >> i & 1]
        values[mask] = coalition_value(instance, subset)
    return CoalitionValueTable(players=players, values=tuple(values))


def _payoff_sums(table: CoalitionValueTable, x: Allocation) -> list[Fraction]:
    sums = [Fraction(0)] * len(table.values)
    for mask in range(1, len(sums)):
        low = mask & -mask
        sums[mask] = sums[mask ^ low] + x[table.players[low.bit_length() - 1]]
    return sums


def _check_allocation_domain(instance: Instance, x: Allocation) -> None:
    domain = tuple(u for u, _ in x.payoffs)
    if domain != instance.vertex_ids:
        raise ValidationError(
            "allocation domain does not match the instance vertex set"
        )


@dataclass(frozen=True)
class PowerEntry:
    """Maximum excess nu(T) - x(T) over coalitions with u in T, v not in T."""

    u: str
    v: str
    value: Fraction
    witness: tuple[str, ...]


def power(
    instance: Instance,
    x: Allocation,
    u: str,
    v: str,
    table: CoalitionValueTable | None = None,
) -> PowerEntry:
    """s_uv(x) with its lexicographically least maximizing coalition."""
    if u == v:
        raise ValidationError("power is defined for distinct vertices only")
    for w in (u, v):
        if not instance.has_vertex(w):
            raise ValidationError(f"unknown vertex {w!r}")
    _check_allocation_domain(instance, x)
    if table is None:
        table = coalition_table(instance)
    sums = _payoff_sums(table, x)
    bit_u = 1 << table.players.index(u)
    bit_v = 1 << table.players.index(v)
    best: Fraction | None = None
    argmax: list[int] = []
    for mask in range(len(table.values)):
        if not mask & bit_u or mask & bit_v:
            continue
        excess = table.values[mask] - sums[mask]
        if best is None or excess > best:
            best, argmax = excess, [mask]
        elif excess == best:
            argmax.append(mask)
    assert best is not None
    witness = min(table.members(m) for m in argmax)
    return PowerEntry(u=u, v=v, value=best, witness=witness)


@dataclass(frozen=True)
class PowerMatrix:
    entries: tuple[PowerEntry, ...]

    def of(self, u: str, v: str) -> PowerEntry:
        for entry in self.entries:
            if entry.u == u and entry.v == v:
                return entry
        raise ValidationError(f"no power entry for ({u}, {v})")


def power_matrix(
    instance: Instance, x: Allocation, table: CoalitionValueTable | None = None
) -> PowerMatrix:
    if table is None:
        table = coalition_table(instance)
    entries = [
        power(instance, x, u, v, table)
        for u in instance.vertex_ids
        for v in instance.vertex_ids
        if u != v
    ]
    return PowerMatrix(entries=tuple(entries))


@dataclass(frozen=True)
class CoreReport:
    in_core: bool
    violation: str | None
    violating_coalition: tuple[str, ...] | None


def in_core(
    instance: Instance, x: Allocation, table: CoalitionValueTable | None = None
) -> CoreReport:
    """x(S) >= nu(S) for every proper subset, with x(N) = nu(N) exactly."""
    _check_allocation_domain(instance, x)
    if table is None:
        table = coalition_table(instance)
    sums = _payoff_sums(table, x)
    full = len(table.values) - 1
    if sums[full] != table.values[full]:
        return CoreReport(
            in_core=False,
            violation=(
                f"grand coalition: x(N) = {sums[full]} differs from nu(N) ="
                f" {table.values[full]}"
            ),
            violating_coalition=table.players,
        )
    worst: tuple[tuple[str, ...], Fraction] | None = None
    for mask in range(1, full):
        deficit = table.values[mask] - sums[mask]
        if deficit > 0:
            members = table.members(mask)
            if worst is None or members < worst[0]:
                worst = (members, deficit)
    if worst is not None:
        members, deficit = worst
        return CoreReport(
            in_core=False,
            violation=f"coalition {members} has positive excess {deficit}",
            violating_coalition=members,
        )
    return CoreReport(in_core=True, violation=None, violating_coalition=None)


@dataclass(frozen=True)
class PrekernelReport:
    in_prekernel: bool
    violating_pair: tuple[str, str] | None
    details: str | None


def in_prekernel(
    instance: Instance, x: Allocation, table: CoalitionValueTable | None = None
) -> PrekernelReport:
    """Powers are symmetric: s_uv(x) = s_vu(x) for every pair, exactly."""
    _check_allocation_domain(instance, x)
    if table is None:
        table = coalition_table(instance)
    ids = instance.vertex_ids
    for i, u in enumerate(ids):
        for v in ids[i + 1 :]:
            s_uv = power(instance, x, u, v, table).value
            s_vu = power(instance, x, v, u, table).value
            if s_uv != s_vu:
                return PrekernelReport(
                    in_prekernel=False,
                    violating_pair=(u, v),
                    details=f"s[{u},{v}] = {s_uv} but s[{v},{u}] = {s_vu}",
                )
    return PrekernelReport(in_prekernel=True, violating_pair=None, details=None)


@dataclass(frozen=True)
class GadgetFinding:
    """Gadget evidence around one vertex u with positive outside option and
    one of its matched neighbors v."""

    vertex: str
    matched_neighbor: str
    best_outside: str
    weakest_partner: str | None
    type1: bool
    type1_path: tuple[str, ...] | None
    type2: bool
    type2_path: tuple[str, ...] | None

    @property
    def bad(self) -> bool:
        return self.type1 or self.type2


@dataclass(frozen=True)
class GadgetReport:
    findings: tuple[GadgetFinding, ...]
    bad_vertices: tuple[str, ...]
    tie_warnings: tuple[str, ...]

    @property
    def has_bad_vertex(self) -> bool:
        return bool(self.bad_vertices)


def _matching_adjacency(matching: CMatching) -> dict[str, list[str]]:
    adj: dict[str, list[str]] = {}
    for a, b in matching.sorted_edges:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    return adj


def _m_path(
    adj: dict[str, list[str]], start: str, goal: str, banned: str | None = None
) -> tuple[str, ...] | None:
    """Shortest path from start to goal inside the matching, avoiding
    ``banned``; None when disconnected."""
    if start == banned or goal == banned:
        return None
    if start == goal:
        return (start,)
    frontier = [start]
    parents: dict[str, str] = {start: start}
    while frontier:
        nxt: list[str] = []
        for a in frontier:
            for b in sorted(adj.get(a, ())):
                if b == banned or b in parents:
                    continue
                parents[b] = a
                if b == goal:
                    path = [b]
                    while path[-1] != start:
                        path.append(parents[path[-1]])
                    return tuple(reversed(path))
                nxt.append(b)
        frontier = nxt
    return None


def _alpha_witness_choices(
    instance: Instance, solution: Solution, u: str
) -> list[tuple[str, str | None]]:
    """All (best outside neighbor, weakest partner) pairs that realize
    alpha_u, for tie-invariance analysis."""
    report = outside_option(instance, solution, u)
    if report.value <= 0 or report.witness is None:
        return []
    choices: list[tuple[str, str | None]] = []
    for v in instance.neighbors(u):
        if solution.matching.contains(u, v):
            continue
        if is_saturated(instance, solution.matching, v):
            partners = solution.matching.matched_neighbors(v)
            weakest = min(solution.z(v, w) for w in partners)
            if instance.weight(u, v) - weakest == report.value:
                choices.extend(
                    (v, w) for w in partners if solution.z(v, w) == weakest
                )
        elif instance.weight(u, v) == report.value:
            choices.append((v, None))
    return choices


def detect_bad_vertices(instance: Instance, solution: Solution) -> GadgetReport:
    """Find gadgets: around each vertex u with alpha_u > 0, a path inside the
    matching from a matched neighbor of u to u's best outside option v'
    (type 1), or from u to v''s weakest partner u' avoiding v' (type 2).

    Witness ties resolve lexicographically; if any alternative tie resolution
    flips a vertex's verdict, a warning is recorded rather than hidden.
    """
    adj = _matching_adjacency(solution.matching)
    findings: list[GadgetFinding] = []
    bad: list[str] = []
    warnings: list[str] = []

    def flags_for(
        u: str, v: str, v_best: str, u_weak: str | None
    ) -> tuple[bool, tuple[str, ...] | None, bool, tuple[str, ...] | None]:
        path1 = _m_path(adj, v, v_best)
        path2 = (
            _m_path(adj, u, u_weak, banned=v_best) if u_weak is not None else None
        )
        return path1 is not None, path1, path2 is not None, path2

    for u in instance.vertex_ids:
        report = outside_option(instance, solution, u)
        if report.value <= 0 or report.witness is None:
            continue
        v_best, u_weak = report.witness
        u_is_bad = False
        for v in solution.matching.matched_neighbors(u):
            type1, path1, type2, path2 = flags_for(u, v, v_best, u_weak)
            findings.append(
                GadgetFinding(
                    vertex=u,
                    matched_neighbor=v,
                    best_outside=v_best,
                    weakest_partner=u_weak,
                    type1=type1,
                    type1_path=path1,
                    type2=type2,
                    type2_path=path2,
                )
            )
            u_is_bad = u_is_bad or type1 or type2
        if u_is_bad:
            bad.append(u)

        verdicts = set()
        for alt_best, alt_weak in _alpha_witness_choices(instance, solution, u):
            alt_bad = False
            for v in solution.matching.matched_neighbors(u):
                t1, _, t2, _ = flags_for(u, v, alt_best, alt_weak)
                alt_bad = alt_bad or t1 or t2
            verdicts.add(alt_bad)
        if len(verdicts) > 1:
            warnings.append(
                f"vertex {u}: gadget verdict depends on the tie resolution of"
                " its outside-option witness"
            )

    return GadgetReport(
        findings=tuple(findings),
        bad_vertices=tuple(bad),
        tie_warnings=tuple(warnings),
    )


@dataclass(frozen=True)
class PowerBoundRow:
    """The stability-derived bound s_uv <= alpha_u - z_uv for a matched pair."""

    u: str
    v: str
    power_value: Fraction
    bound: Fraction

    @property
    def ok(self) -> bool:
        return self.power_value <= self.bound


@dataclass(frozen=True)
class CorrespondenceReport:
    """Both sides of the balanced vs core-and-prekernel correspondence, with
    the hypotheses under which the equivalence is asserted."""

    acyclic: bool
    bad_vertices: tuple[str, ...]
    tie_warnings: tuple[str, ...]
    balanced: bool
    in_prekernel: bool
    power_bound_rows: tuple[PowerBoundRow, ...]

    @property
    def conditions_met(self) -> bool:
        return self.acyclic and not self.bad_vertices

    @property
    def equivalence_holds(self) -> bool:
        return self.balanced == self.in_prekernel

    @property
    def power_bound_ok(self) -> bool:
        return all(r.ok for r in self.power_bound_rows)

    @property
    def verdict(self) -> str:
        if self.conditions_met:
            status = "verified" if self.equivalence_holds else "VIOLATED"
            return f"conditions met; equivalence {status}"
        return (
            "conditions not met"
            f" (acyclic={self.acyclic}, bad={list(self.bad_vertices)});"
            " both sides recorded without asserting equivalence"
        )


def check_correspondence(
    instance: Instance,
    x: Allocation,
    solution: Solution,
    table: CoalitionValueTable | None = None,
) -> CorrespondenceReport:
    """Evaluate whether 'balanced' coincides with 'core and prekernel' for a
    stable solution and its (core) allocation.

    Preconditions (each raises :class:`ValidationError`): the allocation must
    equal the solution's payoffs, lie in the core, and the solution must be
    stable.  The equivalence is only asserted when the matching is acyclic and
    no vertex is bad; otherwise both sides are recorded.
    """
    if allocation_of(solution) != x:
        raise ValidationError("allocation does not match the solution's payoffs")
    stability = is_stable(instance, solution)
    if not stability.stable:
        raise ValidationError(
            "solution is not stable: " + "; ".join(stability.violations)
        )
    if table is None:
        table = coalition_table(instance)
    core = in_core(instance, x, table)
    if not core.in_core:
        raise ValidationError(f"allocation is not in the core: {core.violation}")

    gadgets = detect_bad_vertices(instance, solution)
    rows: list[PowerBoundRow] = []
    for u, v in solution.matching.sorted_edges:
        for a, b in ((u, v), (v, u)):
            rows.append(
                PowerBoundRow(
                    u=a,
                    v=b,
                    power_value=power(instance, x, a, b, table).value,
                    bound=outside_option(instance, solution, a).value - solution.z(a, b),
                )
            )

    return CorrespondenceReport(
        acyclic=is_acyclic(solution.matching),
        bad_vertices=gadgets.bad_vertices,
        tie_warnings=gadgets.tie_warnings,
        balanced=is_balanced(instance, solution).balanced,
        in_prekernel=in_prekernel(instance, x, table).in_prekernel,
        power_bound_rows=tuple(rows),
    )


def all_tie_resolutions_bad(
    instance: Instance, solution: Solution, u: str
) -> set[bool]:
    """Badness verdicts of ``u`` across every witness tie resolution."""
    choices = _alpha_witness_choices(instance, solution, u)
    if not choices:
        return set()
    adj = _matching_adjacency(solution.matching)
    verdicts: set[bool] = set()
    for v_best, u_weak in choices:
        bad = False
        for v in solution.matching.matched_neighbors(u):
            if _m_path(adj, v, v_best) is not None:
                bad = True
            if u_weak is not None and _m_path(adj, u, u_weak, banned=v_best) is not None:
                bad = True
        verdicts.add(bad)
    return verdicts
