"""Core data model: capacitated instances, c-matchings, solutions, allocations.

All numeric quantities (edge weights, contract splits, payoffs) are exact
rationals (`fractions.Fraction`).  Floats are rejected at the boundary so that
stability and balance can be decided by exact equality tests.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping


class ParseError(ValueError):
    """A document is not well-formed."""


class ValidationError(ValueError):
    """A well-formed object violates a model invariant."""


class SizeGuardError(RuntimeError):
    """An instance exceeds the size limits of an exhaustive operation."""


RationalLike = int | str | Fraction


def as_fraction(value: RationalLike, what: str = "value") -> Fraction:
    """Convert an int, Fraction, or exact fraction string ("35/3") to Fraction.

    Floats are rejected: they would silently break exact equality tests.
    """
    if isinstance(value, bool):
        raise ValidationError(f"{what}: expected a rational, got a bool")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"{what}: cannot parse {value!r} as a rational") from exc
    raise ValidationError(f"{what}: expected int, str, or Fraction, got {type(value).__name__}")


def format_fraction(value: Fraction) -> str:
    return str(value)


def edge_key(u: str, v: str) -> tuple[str, str]:
    """Canonical unordered representation of an edge."""
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True)
class Instance:
    """A capacitated, edge-weighted, undirected graph.

    ``vertices`` is sorted by id, ``edges`` is sorted with each endpoint pair
    in canonical order.  Instances are immutable; build them with
    :func:`make_instance` or :func:`load_instance`, which validate.
    """

    vertices: tuple[tuple[str, int], ...]
    edges: tuple[tuple[str, str, Fraction], ...]

    @cached_property
    def capacity(self) -> dict[str, int]:
        return dict(self.vertices)

    @cached_property
    def vertex_ids(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.vertices)

    @cached_property
    def weights(self) -> dict[tuple[str, str], Fraction]:
        return {(u, v): w for u, v, w in self.edges}

    @cached_property
    def adjacency(self) -> dict[str, tuple[str, ...]]:
        adj: dict[str, list[str]] = {v: [] for v in self.vertex_ids}
        for u, v, _ in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return {v: tuple(sorted(ns)) for v, ns in adj.items()}

    def has_vertex(self, u: str) -> bool:
        return u in self.capacity

    def has_edge(self, u: str, v: str) -> bool:
        return edge_key(u, v) in self.weights

    def weight(self, u: str, v: str) -> Fraction:
        try:
            return self.weights[edge_key(u, v)]
        except KeyError:
            raise ValidationError(f"edge {u}-{v} is not in the instance") from None

    def neighbors(self, u: str) -> tuple[str, ...]:
        return self.adjacency[u]

    def induced(self, subset: Iterable[str]) -> Instance:
        """The subgraph induced by ``subset`` (capacities preserved)."""
        keep = set(subset)
        unknown = keep - set(self.vertex_ids)
        if unknown:
            raise ValidationError(f"unknown vertices in subset: {sorted(unknown)}")
        return Instance(
            vertices=tuple((v, c) for v, c in self.vertices if v in keep),
            edges=tuple((u, v, w) for u, v, w in self.edges if u in keep and v in keep),
        )

    def is_unit_capacity(self) -> bool:
        return all(c == 1 for _, c in self.vertices)


def make_instance(
    vertices: Iterable[tuple[str, int]] | Mapping[str, int],
    edges: Iterable[tuple[str, str, RationalLike]] = (),
) -> Instance:
    """Build a validated :class:`Instance`.

    Raises :class:`ValidationError` naming the offending element on duplicate
    ids, dangling endpoints, self-loops, parallel edges, negative weights, or
    capacities below one.
    """
    if isinstance(vertices, Mapping):
        vertex_items = list(vertices.items())
    else:
        vertex_items = list(vertices)

    seen: dict[str, int] = {}
    for vid, cap in vertex_items:
        if not isinstance(vid, str) or not vid:
            raise ValidationError(f"vertex id {vid!r} must be a non-empty string")
        if vid in seen:
            raise ValidationError(f"duplicate vertex id {vid!r}")
        if isinstance(cap, bool) or not isinstance(cap, int):
            raise ValidationError(f"vertex {vid!r}: capacity must be an integer, got {cap!r}")
        if cap < 1:
            raise ValidationError(f"vertex {vid!r}: capacity must be at least 1, got {cap}")
        seen[vid] = cap

    edge_list: list[tuple[str, str, Fraction]] = []
    used: set[tuple[str, str]] = set()
    for u, v, w in edges:
        for endpoint in (u, v):
            if endpoint not in seen:
                raise ValidationError(f"edge {u}-{v}: unknown vertex {endpoint!r}")
        if u == v:
            raise ValidationError(f"self-loop at vertex {u!r} is not allowed")
        key = edge_key(u, v)
        if key in used:
            raise ValidationError(f"parallel edge {key[0]}-{key[1]}")
        used.add(key)
        weight = as_fraction(w, what=f"edge {u}-{v} weight")
        if weight < 0:
            raise ValidationError(f"edge {u}-{v}: negative weight {weight}")
        edge_list.append((key[0], key[1], weight))

    return Instance(
        vertices=tuple(sorted(seen.items())),
        edges=tuple(sorted(edge_list)),
    )


def load_instance(text: str) -> Instance:
    """Parse an instance document.

    Format::

        { "vertices": [ {"id": "A", "capacity": 2}, ... ],
          "edges":    [ {"u": "A", "v": "B", "weight": "10"}, ... ] }

    Weights may be integers or exact fraction strings such as "35/3".
    """
    doc = _load_json(text)
    if not isinstance(doc, dict):
        raise ParseError("instance document must be a JSON object")
    try:
        raw_vertices = doc["vertices"]
        raw_edges = doc["edges"]
    except KeyError as exc:
        raise ParseError(f"instance document is missing key {exc.args[0]!r}") from None
    if not isinstance(raw_vertices, list) or not isinstance(raw_edges, list):
        raise ParseError("'vertices' and 'edges' must be lists")

    vertices = []
    for entry in raw_vertices:
        if not isinstance(entry, dict) or "id" not in entry or "capacity" not in entry:
            raise ParseError(f"malformed vertex entry {entry!r}")
        vertices.append((entry["id"], entry["capacity"]))
    edges = []
    for entry in raw_edges:
        if not isinstance(entry, dict) or not {"u", "v", "weight"} <= set(entry):
            raise ParseError(f"malformed edge entry {entry!r}")
        edges.append((entry["u"], entry["v"], entry["weight"]))
    return make_instance(vertices, edges)


def dump_instance(instance: Instance) -> str:
    """Serialize an instance to its document form (round-trip exact)."""
    doc = {
        "vertices": [{"id": v, "capacity": c} for v, c in instance.vertices],
        "edges": [
            {"u": u, "v": v, "weight": format_fraction(w)} for u, v, w in instance.edges
        ],
    }
    return json.dumps(doc, indent=2)


@dataclass(frozen=True)
class CMatching:
    """An edge subset; with respect to an instance, degrees stay within capacity."""

    edges: frozenset[tuple[str, str]]

    @cached_property
    def sorted_edges(self) -> tuple[tuple[str, str], ...]:
        return tuple(sorted(self.edges))

    @cached_property
    def degree(self) -> dict[str, int]:
        deg: dict[str, int] = {}
        for u, v in self.edges:
            deg[u] = deg.get(u, 0) + 1
            deg[v] = deg.get(v, 0) + 1
        return deg

    def degree_of(self, u: str) -> int:
        return self.degree.get(u, 0)

    def covers(self, u: str) -> bool:
        return self.degree_of(u) > 0

    def matched_neighbors(self, u: str) -> tuple[str, ...]:
        return tuple(sorted(b if a == u else a for a, b in self.edges if u in (a, b)))

    def contains(self, u: str, v: str) -> bool:
        return edge_key(u, v) in self.edges

    def weight(self, instance: Instance) -> Fraction:
        return sum((instance.weight(u, v) for u, v in self.edges), Fraction(0))


def is_saturated(instance: Instance, matching: CMatching, u: str) -> bool:
    return matching.degree_of(u) == instance.capacity[u]


@dataclass(frozen=True)
class CMatchingCheck:
    ok: bool
    violations: tuple[str, ...]


def is_c_matching(instance: Instance, edges: Iterable[tuple[str, str]]) -> CMatchingCheck:
    """Check the degree-capacity condition for an edge set.

    Every edge must exist in the instance (error otherwise); the report lists
    each vertex whose degree in the set exceeds its capacity.
    """
    canonical = set()
    for u, v in edges:
        if not instance.has_edge(u, v):
            raise ValidationError(f"edge {u}-{v} is not in the instance")
        canonical.add(edge_key(u, v))
    deg: dict[str, int] = {}
    for u, v in canonical:
        deg[u] = deg.get(u, 0) + 1
        deg[v] = deg.get(v, 0) + 1
    violations = tuple(
        f"vertex {u}: degree {d} exceeds capacity {instance.capacity[u]}"
        for u, d in sorted(deg.items())
        if d > instance.capacity[u]
    )
    return CMatchingCheck(ok=not violations, violations=violations)


def make_matching(instance: Instance, edges: Iterable[tuple[str, str]]) -> CMatching:
    """Build a validated :class:`CMatching` for ``instance``."""
    check = is_c_matching(instance, edges)
    if not check.ok:
        raise ValidationError("not a c-matching: " + "; ".join(check.violations))
    return CMatching(edges=frozenset(edge_key(u, v) for u, v in edges))


@dataclass(frozen=True)
class Solution:
    """A c-matching together with a nonnegative split of each matched edge.

    ``splits`` stores both orientations of every matched edge; non-matching
    edges implicitly split as (0, 0).  ``vertices`` records the instance's
    vertex set so allocations can include zero-payoff vertices.
    """

    matching: CMatching
    splits: tuple[tuple[tuple[str, str], Fraction], ...]
    vertices: tuple[str, ...]

    @cached_property
    def _split_map(self) -> dict[tuple[str, str], Fraction]:
        return dict(self.splits)

    def z(self, u: str, v: str) -> Fraction:
        """The share vertex ``u`` earns from edge uv (0 if uv is unmatched)."""
        return self._split_map.get((u, v), Fraction(0))


def make_solution(
    instance: Instance,
    matching: CMatching | Iterable[tuple[str, str]],
    splits: Mapping[tuple[str, str], RationalLike],
) -> Solution:
    """Build a validated :class:`Solution`.

    ``splits`` maps ordered pairs (u, v) to z_uv.  Both orientations of every
    matched edge must be present and sum to the edge weight; entries for
    non-matching edges are allowed only when zero.
    """
    if not isinstance(matching, CMatching):
        matching = make_matching(instance, matching)
    else:
        check = is_c_matching(instance, matching.edges)
        if not check.ok:
            raise ValidationError("not a c-matching: " + "; ".join(check.violations))

    values: dict[tuple[str, str], Fraction] = {}
    for (u, v), raw in splits.items():
        if not instance.has_edge(u, v):
            raise ValidationError(f"split given for non-edge {u}-{v}")
        values[(u, v)] = as_fraction(raw, what=f"split z[{u},{v}]")

    stored: list[tuple[tuple[str, str], Fraction]] = []
    for u, v in sorted(matching.edges):
        for a, b in ((u, v), (v, u)):
            if (a, b) not in values:
                raise ValidationError(f"missing split z[{a},{b}] for matched edge {u}-{v}")
            if values[(a, b)] < 0:
                raise ValidationError(f"split z[{a},{b}] = {values[(a, b)]} is negative")
        total = values[(u, v)] + values[(v, u)]
        w = instance.weight(u, v)
        if total != w:
            raise ValidationError(
                f"splits of matched edge {u}-{v} sum to {total}, expected weight {w}"
            )
        stored.append(((u, v), values[(u, v)]))
        stored.append(((v, u), values[(v, u)]))

    for (u, v), val in values.items():
        if not matching.contains(u, v) and val != 0:
            raise ValidationError(f"non-matching edge {u}-{v} has nonzero split {val}")

    return Solution(
        matching=matching,
        splits=tuple(sorted(stored)),
        vertices=instance.vertex_ids,
    )


@dataclass(frozen=True)
class Allocation:
    """Per-vertex payoff vector."""

    payoffs: tuple[tuple[str, Fraction], ...]

    @cached_property
    def _map(self) -> dict[str, Fraction]:
        return dict(self.payoffs)

    def __getitem__(self, u: str) -> Fraction:
        try:
            return self._map[u]
        except KeyError:
            raise ValidationError(f"allocation has no vertex {u!r}") from None

    def get(self, u: str, default: Fraction = Fraction(0)) -> Fraction:
        return self._map.get(u, default)

    def total(self) -> Fraction:
        return sum((x for _, x in self.payoffs), Fraction(0))

    def restricted_sum(self, subset: Iterable[str]) -> Fraction:
        return sum((self._map[u] for u in subset), Fraction(0))


def make_allocation(payoffs: Mapping[str, RationalLike]) -> Allocation:
    values = []
    for u, raw in payoffs.items():
        x = as_fraction(raw, what=f"payoff x[{u}]")
        if x < 0:
            raise ValidationError(f"payoff x[{u}] = {x} is negative")
        values.append((u, x))
    return Allocation(payoffs=tuple(sorted(values)))


def allocation_of(solution: Solution) -> Allocation:
    """Total payoff per vertex: the exact sum of its matched splits."""
    totals: dict[str, Fraction] = {u: Fraction(0) for u in solution.vertices}
    for (u, _v), value in solution.splits:
        totals[u] += value
    return Allocation(payoffs=tuple(sorted(totals.items())))


def load_solution(text: str, instance: Instance) -> Solution:
    """Parse a solution document against its instance.

    Format::

        { "matching": [["A","B"], ...],
          "splits": [{"u":"A","v":"B","z_uv":"10/3","z_vu":"20/3"}, ...] }
    """
    doc = _load_json(text)
    if not isinstance(doc, dict):
        raise ParseError("solution document must be a JSON object")
    try:
        raw_matching = doc["matching"]
        raw_splits = doc["splits"]
    except KeyError as exc:
        raise ParseError(f"solution document is missing key {exc.args[0]!r}") from None
    if not isinstance(raw_matching, list) or not isinstance(raw_splits, list):
        raise ParseError("'matching' and 'splits' must be lists")

    pairs = []
    for entry in raw_matching:
        if not isinstance(entry, list) or len(entry) != 2:
            raise ParseError(f"malformed matching entry {entry!r}")
        pairs.append((entry[0], entry[1]))

    splits: dict[tuple[str, str], RationalLike] = {}
    for entry in raw_splits:
        if not isinstance(entry, dict) or not {"u", "v", "z_uv", "z_vu"} <= set(entry):
            raise ParseError(f"malformed split entry {entry!r}")
        u, v = entry["u"], entry["v"]
        if (u, v) in splits or (v, u) in splits:
            raise ParseError(f"duplicate split entry for edge {u}-{v}")
        splits[(u, v)] = entry["z_uv"]
        splits[(v, u)] = entry["z_vu"]
    return make_solution(instance, pairs, splits)


def dump_solution(solution: Solution) -> str:
    doc = {
        "matching": [[u, v] for u, v in solution.matching.sorted_edges],
        "splits": [
            {
                "u": u,
                "v": v,
                "z_uv": format_fraction(solution.z(u, v)),
                "z_vu": format_fraction(solution.z(v, u)),
            }
            for u, v in solution.matching.sorted_edges
        ],
    }
    return json.dumps(doc, indent=2)


def load_allocation(text: str) -> Allocation:
    """Parse an allocation document: {"payoffs": {"A": "20", ...}}."""
    doc = _load_json(text)
    if not isinstance(doc, dict) or "payoffs" not in doc:
        raise ParseError("allocation document must be an object with a 'payoffs' key")
    payoffs = doc["payoffs"]
    if not isinstance(payoffs, dict):
        raise ParseError("'payoffs' must be an object mapping vertex ids to rationals")
    return make_allocation(payoffs)


def dump_allocation(allocation: Allocation) -> str:
    return json.dumps(
        {"payoffs": {u: format_fraction(x) for u, x in allocation.payoffs}}, indent=2
    )


def _load_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
