"""Reduction of a capacitated game to a unit-capacity game on copies.

Each vertex u becomes c_u unit-capacity copies ``u#1 .. u#c_u``.  Every
matched edge uv maps to the single aux edge joining u's copy at position
sigma_u(v) with v's copy at position sigma_v(u), where sigma_u enumerates u's
matched neighbors; every non-matching edge uv expands into the full bipartite
bundle between all copies of u and all copies of v, at the original weight.

The split mappings transcribe shares between the two worlds:

* to_splits (copies -> splits): z_uv = x[u#sigma_u(v)] for matched uv;
* to_copy_payoffs (splits -> copies): x[u#i] = z_uv when i = sigma_u(v), and 0
  for copies beyond u's matched degree.

Outside options, stability, and balance are preserved exactly under this
correspondence; ``verify_preservation`` certifies that on concrete pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .model import (
    Allocation,
    CMatching,
    Instance,
    Solution,
    ValidationError,
    is_c_matching,
    make_allocation,
    make_instance,
    make_solution,
)
from .semantics import alpha, is_balanced, is_stable, unit_solution, validate_unit_solution


@dataclass(frozen=True)
class AuxiliaryBundle:
    """A unit-capacity instance plus the labeling needed to map solutions
    both ways."""

    original: Instance
    matching: CMatching
    aux_instance: Instance
    aux_matching: CMatching
    sigma: dict[str, tuple[str, ...]]
    copy_to_aux: dict[tuple[str, int], str]
    aux_to_copy: dict[str, tuple[str, int]]

    def position(self, u: str, v: str) -> int:
        """sigma_u(v): the 1-based position of matched neighbor v at u."""
        try:
            return self.sigma[u].index(v) + 1
        except (KeyError, ValueError):
            raise ValidationError(f"{v} is not a matched neighbor of {u}") from None

    def copy_id(self, u: str, i: int) -> str:
        try:
            return self.copy_to_aux[(u, i)]
        except KeyError:
            raise ValidationError(f"no copy {i} of vertex {u}") from None


def build_auxiliary(
    instance: Instance,
    matching: CMatching,
    sigma: Mapping[str, Sequence[str]] | None = None,
) -> AuxiliaryBundle:
    """Construct the unit-capacity auxiliary instance for (instance, matching).

    ``sigma`` optionally overrides the per-vertex ordering of matched
    neighbors (default: lexicographic); each override must be a permutation of
    the vertex's matched neighbors.
    """
    check = is_c_matching(instance, matching.edges)
    if not check.ok:
        raise ValidationError("invalid matching: " + "; ".join(check.violations))

    labels: dict[str, tuple[str, ...]] = {}
    for u in instance.vertex_ids:
        default = matching.matched_neighbors(u)
        if sigma is not None and u in sigma:
            override = tuple(sigma[u])
            if sorted(override) != sorted(default):
                raise ValidationError(
                    f"sigma[{u}] = {override} is not a permutation of"
                    f" matched neighbors {default}"
                )
            labels[u] = override
        else:
            labels[u] = default

    copy_to_aux: dict[tuple[str, int], str] = {}
    aux_to_copy: dict[str, tuple[str, int]] = {}
    aux_vertices: list[tuple[str, int]] = []
    for u in instance.vertex_ids:
        for i in range(1, instance.capacity[u] + 1):
            aux_id = f"{u}#{i}"
            copy_to_aux[(u, i)] = aux_id
            aux_to_copy[aux_id] = (u, i)
            aux_vertices.append((aux_id, 1))

    def matched_copy(u: str, v: str) -> str:
        return copy_to_aux[(u, labels[u].index(v) + 1)]

    aux_edges: list[tuple[str, str, Fraction]] = []
    aux_matched: list[tuple[str, str]] = []
    for u, v, w in instance.edges:
        if matching.contains(u, v):
            a, b = matched_copy(u, v), matched_copy(v, u)
            aux_edges.append((a, b, w))
            aux_matched.append((a, b))
        else:
            for i in range(1, instance.capacity[u] + 1):
                for j in range(1, instance.capacity[v] + 1):
                    aux_edges.append((copy_to_aux[(u, i)], copy_to_aux[(v, j)], w))

    aux_instance = make_instance(aux_vertices, aux_edges)
    aux_matching = CMatching(
        edges=frozenset(tuple(sorted(e)) for e in aux_matched)
    )
    return AuxiliaryBundle(
        original=instance,
        matching=matching,
        aux_instance=aux_instance,
        aux_matching=aux_matching,
        sigma=labels,
        copy_to_aux=copy_to_aux,
        aux_to_copy=aux_to_copy,
    )


def to_splits(bundle: AuxiliaryBundle, x: Allocation) -> Solution:
    """Map a unit-capacity allocation on the aux matching to a solution of the
    original instance (z_uv = payoff of u's copy for v)."""
    validate_unit_solution(bundle.aux_instance, bundle.aux_matching, x)
    splits: dict[tuple[str, str], Fraction] = {}
    for u, v in bundle.matching.sorted_edges:
        splits[(u, v)] = x[bundle.copy_id(u, bundle.position(u, v))]
        splits[(v, u)] = x[bundle.copy_id(v, bundle.position(v, u))]
    return make_solution(bundle.original, bundle.matching, splits)


def to_copy_payoffs(bundle: AuxiliaryBundle, solution: Solution) -> Allocation:
    """Map a solution of the original instance to the unit-capacity allocation
    on the aux matching (copies beyond the matched degree earn zero)."""
    if solution.matching != bundle.matching:
        raise ValidationError("solution is not on the bundle's matching")
    payoffs: dict[str, Fraction] = {aux_id: Fraction(0) for aux_id in bundle.aux_to_copy}
    for u in bundle.original.vertex_ids:
        for pos, v in enumerate(bundle.sigma[u], start=1):
            payoffs[bundle.copy_id(u, pos)] = solution.z(u, v)
    allocation = make_allocation(payoffs)
    validate_unit_solution(bundle.aux_instance, bundle.aux_matching, allocation)
    return allocation


# Spelled-out aliases for the bijection between the two solution sets.
phi = to_splits
phi_inverse = to_copy_payoffs


@dataclass(frozen=True)
class AlphaRow:
    vertex: str
    copy_index: int
    covered: bool
    alpha_original: Fraction
    alpha_aux: Fraction

    @property
    def equal(self) -> bool:
        return self.alpha_original == self.alpha_aux


@dataclass(frozen=True)
class PreservationReport:
    """Exact comparison of outside options, stability, and balance across the
    reduction, for a related pair (solution, aux allocation)."""

    alpha_rows: tuple[AlphaRow, ...]
    original_stable: bool
    aux_stable: bool
    original_balanced: bool
    aux_balanced: bool

    @property
    def alpha_equal_matched(self) -> bool:
        return all(r.equal for r in self.alpha_rows if r.covered)

    @property
    def alpha_equal_uncovered(self) -> bool:
        return all(r.equal for r in self.alpha_rows if not r.covered)

    @property
    def stability_equivalent(self) -> bool:
        return self.original_stable == self.aux_stable

    @property
    def balance_equivalent(self) -> bool:
        return self.original_balanced == self.aux_balanced

    @property
    def ok(self) -> bool:
        return self.alpha_equal_matched and self.stability_equivalent and self.balance_equivalent


def verify_preservation(
    bundle: AuxiliaryBundle, solution: Solution, x: Allocation
) -> PreservationReport:
    """Certify preservation for a pair related by the split mapping.

    Raises :class:`ValidationError` when ``solution`` and ``x`` do not
    correspond to each other.
    """
    if to_splits(bundle, x) != solution:
        raise ValidationError("solution and aux allocation are not related by the mapping")
    aux_solution = unit_solution(bundle.aux_instance, bundle.aux_matching, x)

    rows: list[AlphaRow] = []
    for u in bundle.original.vertex_ids:
        alpha_orig = alpha(bundle.original, solution, u)
        d_u = bundle.matching.degree_of(u)
        for i in range(1, bundle.original.capacity[u] + 1):
            rows.append(
                AlphaRow(
                    vertex=u,
                    copy_index=i,
                    covered=i <= d_u,
                    alpha_original=alpha_orig,
                    alpha_aux=alpha(bundle.aux_instance, aux_solution, bundle.copy_id(u, i)),
                )
            )

    return PreservationReport(
        alpha_rows=tuple(rows),
        original_stable=is_stable(bundle.original, solution).stable,
        aux_stable=is_stable(bundle.aux_instance, aux_solution).stable,
        original_balanced=is_balanced(bundle.original, solution).balanced,
        aux_balanced=is_balanced(bundle.aux_instance, aux_solution).balanced,
    )
