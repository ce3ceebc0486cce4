"""Curated reference cases, re-certified from first principles on every run.

The six-vertex "gap" case exhibits an allocation in the intersection of the
core and prekernel of the matching game that corresponds to no balanced
solution, while the instance itself does admit a balanced solution.  Every
quantity quoted below (the unique optimum, the powers, the forced splits, the
thirds in the balanced splits) is re-derived by exhaustive search rather than
trusted; the certification aborts on the first mismatch.

The "expansion" case pins a small capacitated instance whose unit-capacity
expansion exercises every rule of the copy construction: per-edge matched
copies, complete bipartite bundles for non-matching edges, and unmatched
spare copies.

Reconstruction notes: the gap instance is a 6-cycle A-B-C-D-E-F (capacities
all 2) with one chord B-E; weights are pinned to the unique values satisfying
the certified quantities below (outer cycle weight 120, nu({A,F}) = nu({C,D})
= 30, nu over each 4-cycle = 70, uniform payoff 20 with even splits forced on
C-D and F-A).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ._linalg import solve_linear
from .coop import coalition_table, in_core, in_prekernel, power
from .matching import is_unique_optimum, max_weight_c_matching
from .model import (
    Allocation,
    CMatching,
    Instance,
    SizeGuardError,
    Solution,
    ValidationError,
    allocation_of,
    make_allocation,
    make_instance,
    make_matching,
    make_solution,
)
from .reduction import build_auxiliary
from .semantics import alpha, is_balanced

GAP_CAPACITY = 2
GAP_WEIGHTS = {
    ("A", "B"): 10,
    ("B", "C"): 20,
    ("C", "D"): 30,
    ("D", "E"): 10,
    ("E", "F"): 20,
    ("A", "F"): 30,
    ("B", "E"): 10,
}
GAP_CYCLE = (("A", "B"), ("B", "C"), ("C", "D"), ("D", "E"), ("E", "F"), ("A", "F"))
GAP_UNIFORM_PAYOFF = Fraction(20)
GAP_OPTIMUM = Fraction(120)

_THIRD = Fraction(1, 3)
GAP_BALANCED_SPLITS = {
    ("A", "B"): 10 * _THIRD,
    ("B", "A"): 20 * _THIRD,
    ("B", "C"): 35 * _THIRD,
    ("C", "B"): 25 * _THIRD,
    ("C", "D"): Fraction(15),
    ("D", "C"): Fraction(15),
    ("D", "E"): 10 * _THIRD,
    ("E", "D"): 20 * _THIRD,
    ("E", "F"): 35 * _THIRD,
    ("F", "E"): 25 * _THIRD,
    ("F", "A"): Fraction(15),
    ("A", "F"): Fraction(15),
}


def gap_instance() -> Instance:
    """Six vertices of capacity 2: a weighted 6-cycle with the B-E chord."""
    vertices = [(v, GAP_CAPACITY) for v in "ABCDEF"]
    edges = [(u, v, w) for (u, v), w in GAP_WEIGHTS.items()]
    return make_instance(vertices, edges)


def gap_outer_cycle(instance: Instance | None = None) -> CMatching:
    return make_matching(instance or gap_instance(), GAP_CYCLE)


def gap_uniform_allocation() -> Allocation:
    return make_allocation({v: GAP_UNIFORM_PAYOFF for v in "ABCDEF"})


def gap_even_split_solution(instance: Instance | None = None) -> Solution:
    """The unique splits on the outer cycle with uniform payoff 20 and even
    splits on the two chordless edges C-D and F-A."""
    instance = instance or gap_instance()
    splits = {
        ("A", "B"): 5, ("B", "A"): 5,
        ("B", "C"): 15, ("C", "B"): 5,
        ("C", "D"): 15, ("D", "C"): 15,
        ("D", "E"): 5, ("E", "D"): 5,
        ("E", "F"): 15, ("F", "E"): 5,
        ("F", "A"): 15, ("A", "F"): 15,
    }
    return make_solution(instance, gap_outer_cycle(instance), splits)


def gap_balanced_solution(instance: Instance | None = None) -> Solution:
    """The balanced splits on the outer cycle (thirds at the chord vertices)."""
    instance = instance or gap_instance()
    return make_solution(instance, gap_outer_cycle(instance), GAP_BALANCED_SPLITS)


@dataclass(frozen=True)
class TranscriptItem:
    name: str
    ok: bool
    detail: str


@dataclass(frozen=True)
class Transcript:
    title: str
    items: tuple[TranscriptItem, ...]

    @property
    def ok(self) -> bool:
        return all(item.ok for item in self.items)

    def render(self) -> str:
        lines = [self.title]
        for item in self.items:
            lines.append(f"  [{'PASS' if item.ok else 'FAIL'}] {item.name}: {item.detail}")
        lines.append(f"result: {'all certifications green' if self.ok else 'FAILED'}")
        return "\n".join(lines)


class _Recorder:
    def __init__(self, title: str) -> None:
        self.title = title
        self.items: list[TranscriptItem] = []

    def check(self, name: str, ok: bool, detail: str) -> None:
        self.items.append(TranscriptItem(name=name, ok=bool(ok), detail=detail))

    def run(self, name: str, fn) -> None:
        try:
            ok, detail = fn()
        except (ValidationError, SizeGuardError) as exc:
            ok, detail = False, f"aborted: {exc}"
        self.check(name, ok, detail)

    def transcript(self) -> Transcript:
        return Transcript(title=self.title, items=tuple(self.items))


def _forced_uniform_splits(
    instance: Instance, matching: CMatching, payoff: Fraction
) -> Solution | None:
    """The unique splits on ``matching`` with every payoff equal to ``payoff``
    and even splits on edges whose endpoints both lack outside edges; None if
    the constraints do not pin the splits uniquely.

    Any balanced solution with this allocation must satisfy these equations:
    vertices without non-matching incident edges have outside option zero in
    every solution, so balance forces their edges to split evenly.
    """
    edges = matching.sorted_edges
    var_index = {}
    for u, v in edges:
        var_index[(u, v)] = len(var_index)
        var_index[(v, u)] = len(var_index)
    n = len(var_index)

    def no_outside(u: str) -> bool:
        return all(matching.contains(u, t) for t in instance.neighbors(u))

    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for u, v in edges:
        row = [Fraction(0)] * n
        row[var_index[(u, v)]] = Fraction(1)
        row[var_index[(v, u)]] = Fraction(1)
        rows.append(row)
        rhs.append(instance.weight(u, v))
        if no_outside(u) and no_outside(v):
            row = [Fraction(0)] * n
            row[var_index[(u, v)]] = Fraction(1)
            row[var_index[(v, u)]] = Fraction(-1)
            rows.append(row)
            rhs.append(Fraction(0))
    for w in instance.vertex_ids:
        partners = matching.matched_neighbors(w)
        if not partners:
            continue
        row = [Fraction(0)] * n
        for t in partners:
            row[var_index[(w, t)]] = Fraction(1)
        rows.append(row)
        rhs.append(payoff)

    solved = solve_linear(rows, rhs)
    if solved is None or not solved.unique:
        return None
    splits = {pair: solved.particular[i] for pair, i in var_index.items()}
    return make_solution(instance, matching, splits)


def certify_gap_case(instance: Instance | None = None) -> Transcript:
    """Re-derive and certify every pinned quantity of the gap case."""
    instance = instance or gap_instance()
    rec = _Recorder("gap case: core-and-prekernel allocation with no balanced splits")

    def cert_unique_optimum():
        matching, weight = max_weight_c_matching(instance)
        unique = is_unique_optimum(instance)
        expected = frozenset(tuple(sorted(e)) for e in GAP_CYCLE)
        ok = matching.edges == expected and weight == GAP_OPTIMUM and unique
        return ok, (
            f"optimum weight {weight} on {sorted(matching.edges)},"
            f" unique={unique} (expected outer cycle, weight {GAP_OPTIMUM})"
        )

    def cert_uniform_in_core_prekernel():
        x = gap_uniform_allocation()
        table = coalition_table(instance)
        core = in_core(instance, x, table)
        prekernel = in_prekernel(instance, x, table)
        s_ab = power(instance, x, "A", "B", table).value
        s_ba = power(instance, x, "B", "A", table).value
        s_cd = power(instance, x, "C", "D", table).value
        s_dc = power(instance, x, "D", "C", table).value
        ok = (
            core.in_core
            and prekernel.in_prekernel
            and s_ab == s_ba == Fraction(-10)
            and s_cd == s_dc == Fraction(-20)
        )
        return ok, (
            f"core={core.in_core}, prekernel={prekernel.in_prekernel},"
            f" s[A,B]={s_ab}, s[B,A]={s_ba}, s[C,D]={s_cd}, s[D,C]={s_dc}"
        )

    def cert_forced_splits_break_balance():
        matching = gap_outer_cycle(instance)
        forced = _forced_uniform_splits(instance, matching, GAP_UNIFORM_PAYOFF)
        if forced is None:
            return False, "the uniform-payoff split system is not uniquely solvable"
        if forced != gap_even_split_solution(instance):
            return False, "forced splits differ from the pinned even-split fixture"
        report = is_balanced(instance, forced)
        row = next(r for r in report.edges if (r.u, r.v) == ("B", "C"))
        surplus_b = row.z_uv - row.alpha_u
        surplus_c = row.z_vu - row.alpha_v
        ok = (
            not report.balanced
            and report.stable
            and surplus_b == Fraction(10)
            and surplus_c == Fraction(5)
        )
        return ok, (
            f"stable={report.stable}, balanced={report.balanced}; edge B-C surpluses:"
            f" z[B,C]-alpha[B] = {surplus_b}, z[C,B]-alpha[C] = {surplus_c}"
            " (expected 10 vs 5)"
        )

    def cert_no_balanced_with_uniform_payoff():
        matching, weight = max_weight_c_matching(instance)
        unique = is_unique_optimum(instance)
        if not unique:
            return False, "maximum c-matching is not unique; exhaustion over it is void"
        forced = _forced_uniform_splits(instance, matching, GAP_UNIFORM_PAYOFF)
        if forced is None:
            return False, "uniform-payoff splits on the optimum are not unique"
        balanced = is_balanced(instance, forced).balanced
        return not balanced, (
            "stable solutions live on maximum-weight c-matchings; the optimum is"
            f" unique (weight {weight}), its uniform-payoff splits are forced, and"
            f" they are {'balanced (unexpected)' if balanced else 'not balanced'}"
        )

    def cert_balanced_fixture():
        solution = gap_balanced_solution(instance)
        report = is_balanced(instance, solution)
        a_b = alpha(instance, solution, "B")
        a_e = alpha(instance, solution, "E")
        ok = report.balanced and a_b == Fraction(10, 3) and a_e == Fraction(10, 3)
        return ok, (
            f"balanced={report.balanced}, alpha[B]={a_b}, alpha[E]={a_e}"
            " (expected 10/3 on both)"
        )

    def cert_balanced_allocation_in_core_prekernel():
        solution = gap_balanced_solution(instance)
        x = allocation_of(solution)
        table = coalition_table(instance)
        core = in_core(instance, x, table)
        prekernel = in_prekernel(instance, x, table)
        ok = core.in_core and prekernel.in_prekernel
        return ok, f"core={core.in_core}, prekernel={prekernel.in_prekernel}"

    rec.run("unique-maximum-c-matching", cert_unique_optimum)
    rec.run("uniform-allocation-in-core-and-prekernel", cert_uniform_in_core_prekernel)
    rec.run("forced-splits-break-balance-at-B-C", cert_forced_splits_break_balance)
    rec.run("no-balanced-solution-with-uniform-payoff", cert_no_balanced_with_uniform_payoff)
    rec.run("balanced-fixture-verified-exactly", cert_balanced_fixture)
    rec.run(
        "balanced-allocation-in-core-and-prekernel",
        cert_balanced_allocation_in_core_prekernel,
    )
    return rec.transcript()


EXPANSION_U_CAPACITY = 4
EXPANSION_CAPACITIES = {"u": EXPANSION_U_CAPACITY, "x": 2, "y": 2, "v": 1, "w": 1, "p": 1, "q": 1}
EXPANSION_MATCHED = (("u", "x"), ("u", "y"), ("p", "x"), ("q", "y"))
EXPANSION_UNMATCHED = (("u", "v"), ("u", "w"))


def expansion_instance(u_capacity: int = EXPANSION_U_CAPACITY) -> tuple[Instance, CMatching]:
    """A hub of capacity four with two matched degree-two partners, their
    pendant partners, and two unmatched unit neighbors; all weights one."""
    capacities = dict(EXPANSION_CAPACITIES, u=u_capacity)
    edges = [(a, b, 1) for a, b in EXPANSION_MATCHED + EXPANSION_UNMATCHED]
    instance = make_instance(capacities, edges)
    return instance, make_matching(instance, EXPANSION_MATCHED)


def certify_expansion_case(u_capacity: int = EXPANSION_U_CAPACITY) -> Transcript:
    """Certify the copy counts and edge mapping of the expansion case."""
    rec = _Recorder("expansion case: unit-capacity copy construction")
    try:
        instance, matching = expansion_instance(u_capacity)
        bundle = build_auxiliary(instance, matching)
    except ValidationError as exc:
        rec.check("construct-expansion", False, f"aborted: {exc}")
        return rec.transcript()

    def cert_copy_counts():
        counts: dict[str, int] = {}
        for aux_id in bundle.aux_instance.vertex_ids:
            orig, _ = bundle.aux_to_copy[aux_id]
            counts[orig] = counts.get(orig, 0) + 1
        expected = dict(EXPANSION_CAPACITIES)
        ok = counts == expected
        return ok, f"copies per vertex {counts} (expected {expected})"

    def cert_matched_edge_mapping():
        if len(bundle.aux_matching.edges) != len(matching.edges):
            return False, (
                f"matched edge counts differ: {len(bundle.aux_matching.edges)}"
                f" vs {len(matching.edges)}"
            )
        mapped = set()
        for a, b in matching.sorted_edges:
            aux_edge = tuple(
                sorted(
                    (
                        bundle.copy_id(a, bundle.position(a, b)),
                        bundle.copy_id(b, bundle.position(b, a)),
                    )
                )
            )
            if aux_edge not in bundle.aux_matching.edges:
                return False, f"matched edge {a}-{b} has no counterpart {aux_edge}"
            mapped.add(aux_edge)
        ok = mapped == set(bundle.aux_matching.edges)
        return ok, f"each of the {len(mapped)} matched edges maps to a unique counterpart"

    def cert_complete_bundles():
        missing = []
        for hub, other in EXPANSION_UNMATCHED:
            for i in range(1, instance.capacity[hub] + 1):
                for j in range(1, instance.capacity[other] + 1):
                    a = bundle.copy_id(hub, i)
                    b = bundle.copy_id(other, j)
                    if not bundle.aux_instance.has_edge(a, b):
                        missing.append(f"{a}-{b}")
        ok = not missing
        return ok, (
            "every copy of u is joined to every copy of v and of w"
            if ok
            else f"missing bundle edges: {missing}"
        )

    def cert_edge_count():
        expected = len(matching.edges) + sum(
            instance.capacity[a] * instance.capacity[b] for a, b in EXPANSION_UNMATCHED
        )
        actual = len(bundle.aux_instance.edges)
        return actual == expected, f"{actual} expansion edges (expected {expected})"

    rec.run("copy-counts", cert_copy_counts)
    rec.run("matched-edge-mapping", cert_matched_edge_mapping)
    rec.run("complete-bipartite-bundles", cert_complete_bundles)
    rec.run("expansion-edge-count", cert_edge_count)
    return rec.transcript()
