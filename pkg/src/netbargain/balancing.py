"""Balanced solutions for unit-capacity games on a given maximum matching.

Two routes are provided:

* numeric-then-exact: damped synchronous rebalancing of every matched edge,
  followed by bounded-denominator rational reconstruction and exact
  verification.  A wrong snap is caught by the verifier, never emitted.
* exact-enumeration: enumerate, per covered vertex, which non-matching
  neighbor (or none) attains its outside option; each full pattern induces a
  linear system that is solved exactly.  Degenerate (underdetermined) systems
  fall back to exact Fourier-Motzkin feasibility over the free parameters, so
  the enumeration is complete at desk scale.

Nonexistence is certified up front through the half-integral relaxation: a
stable (hence balanced) solution exists if and only if the relaxation has an
integral optimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from ._linalg import feasible_point, solve_linear
from .matching import LPRelaxationResult, lp_integrality_check, max_weight_c_matching
from .model import (
    Allocation,
    CMatching,
    Instance,
    SizeGuardError,
    ValidationError,
    make_allocation,
)
from .semantics import unit_outside_option, validate_unit_solution

MAX_MATCHED_ENUM = 12
PATTERN_BUDGET = 200_000
SNAP_LADDER = 20

STATUS_FOUND = "balanced-found"
STATUS_NONE = "none-exists"
STATUS_INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class SolverConfig:
    mode: str = "numeric-then-exact"
    tolerance: float = 1e-9
    max_iterations: int = 100_000
    damping: float = 0.5

    def __post_init__(self) -> None:
        if self.mode not in ("numeric-then-exact", "exact-enumeration"):
            raise ValidationError(f"unknown solver mode {self.mode!r}")
        if not self.tolerance > 0:
            raise ValidationError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValidationError("max-iterations must be at least 1")
        if not 0 < self.damping <= 1:
            raise ValidationError("damping must lie in (0, 1]")


@dataclass(frozen=True)
class VerifyLine:
    condition: str
    residual: Fraction

    @property
    def ok(self) -> bool:
        return self.residual == 0


@dataclass(frozen=True)
class VerifyTranscript:
    lines: tuple[VerifyLine, ...]

    @property
    def ok(self) -> bool:
        return all(line.ok for line in self.lines)

    def render(self) -> str:
        return "\n".join(
            f"[{'ok' if line.ok else 'FAIL'}] {line.condition}: residual {line.residual}"
            for line in self.lines
        )


@dataclass(frozen=True)
class BalancedOutcome:
    status: str
    allocation: Allocation | None
    certificate: VerifyTranscript | LPRelaxationResult | None
    detail: str = ""


def stable_exists_unit(instance: Instance) -> tuple[bool, LPRelaxationResult]:
    """Whether a stable (equivalently balanced) solution exists, with the
    relaxation comparison as witness."""
    if not instance.is_unit_capacity():
        raise ValidationError("stable_exists_unit requires a unit-capacity instance")
    result = lp_integrality_check(instance)
    return result.has_integral_optimal, result


def exact_verify(instance: Instance, matching: CMatching, x: Allocation) -> VerifyTranscript:
    """Exact transcript of every stability and balance condition for (M, x)."""
    if not instance.is_unit_capacity():
        raise ValidationError("exact_verify requires a unit-capacity instance")
    lines: list[VerifyLine] = []
    for u, v in matching.sorted_edges:
        total = x[u] + x[v]
        w = instance.weight(u, v)
        lines.append(VerifyLine(f"split sum x[{u}]+x[{v}] = w[{u},{v}]", total - w))
    for u in instance.vertex_ids:
        if not matching.covers(u):
            lines.append(VerifyLine(f"uncovered vertex {u} earns zero", x[u]))
    alphas = {u: unit_outside_option(instance, matching, x, u) for u in instance.vertex_ids}
    for u in instance.vertex_ids:
        shortfall = alphas[u] - x[u]
        lines.append(
            VerifyLine(
                f"stability x[{u}] >= alpha[{u}]",
                shortfall if shortfall > 0 else Fraction(0),
            )
        )
    for u, v in matching.sorted_edges:
        gap = (x[u] - alphas[u]) - (x[v] - alphas[v])
        lines.append(VerifyLine(f"balance on edge {u}-{v}", gap))
    return VerifyTranscript(lines=tuple(lines))


def rebalance_targets(
    instance: Instance, matching: CMatching, x: Allocation, clip: bool = True
) -> dict[str, Fraction]:
    """Exact synchronous rebalancing target for every covered vertex.

    Each matched edge moves to (alpha_u + surplus/2, alpha_v + surplus/2);
    with ``clip`` the pair is clamped into [0, w] while keeping its sum.
    Fixed points of the unclipped map are exactly the allocations satisfying
    every per-edge balance equality.
    """
    alphas = {u: unit_outside_option(instance, matching, x, u) for u in instance.vertex_ids}
    targets: dict[str, Fraction] = {}
    for u, v in matching.sorted_edges:
        w = instance.weight(u, v)
        surplus = w - alphas[u] - alphas[v]
        tu = alphas[u] + surplus / 2
        tv = alphas[v] + surplus / 2
        if clip:
            tu = min(max(tu, Fraction(0)), w)
            tv = min(max(tv, Fraction(0)), w)
        targets[u] = tu
        targets[v] = tv
    return targets


def solve_balanced_unit(
    instance: Instance, matching: CMatching, config: SolverConfig = SolverConfig()
) -> BalancedOutcome:
    """Balanced allocation on ``matching``, or a certificate that none exists.

    ``matching`` must be maximum-weight (checked); a balanced-found outcome is
    always re-verified exactly before being returned.
    """
    if not instance.is_unit_capacity():
        raise ValidationError("solve_balanced_unit requires a unit-capacity instance")
    _, optimum = max_weight_c_matching(instance)
    own_weight = matching.weight(instance)
    if own_weight != optimum:
        raise ValidationError(
            f"matching weight {own_weight} is not maximum (optimum {optimum});"
            " stable and balanced solutions occur only on maximum-weight matchings"
        )

    exists, lp_result = stable_exists_unit(instance)
    if not exists:
        return BalancedOutcome(
            status=STATUS_NONE,
            allocation=None,
            certificate=lp_result,
            detail=(
                f"relaxation optimum {lp_result.fractional_value} exceeds"
                f" integral optimum {lp_result.integral_value}"
            ),
        )

    if config.mode == "exact-enumeration":
        return _finish(instance, matching, _enumerate_balanced(instance, matching))

    allocation = _numeric_solve(instance, matching, config)
    if allocation is not None:
        return _finish(instance, matching, (allocation, ""))
    try:
        return _finish(instance, matching, _enumerate_balanced(instance, matching))
    except SizeGuardError as exc:
        return BalancedOutcome(
            status=STATUS_INCONCLUSIVE,
            allocation=None,
            certificate=None,
            detail=f"numeric iteration did not certify and exact fallback is out of range: {exc}",
        )


def _finish(
    instance: Instance,
    matching: CMatching,
    result: tuple[Allocation, str] | None,
) -> BalancedOutcome:
    if result is None:
        return BalancedOutcome(
            status=STATUS_INCONCLUSIVE,
            allocation=None,
            certificate=None,
            detail="exact enumeration exhausted every witness pattern without a certificate",
        )
    allocation, detail = result
    transcript = exact_verify(instance, matching, allocation)
    if not transcript.ok:
        raise AssertionError(
            "internal error: candidate allocation failed exact verification\n"
            + transcript.render()
        )
    return BalancedOutcome(
        status=STATUS_FOUND,
        allocation=allocation,
        certificate=transcript,
        detail=detail,
    )


def _numeric_solve(
    instance: Instance, matching: CMatching, config: SolverConfig
) -> Allocation | None:
    """Damped float iteration; on convergence, snap to exact rationals."""
    medges = [(u, v, float(instance.weight(u, v))) for u, v in matching.sorted_edges]
    outside: dict[str, list[tuple[str, float]]] = {u: [] for u in instance.vertex_ids}
    for u, v, w in instance.edges:
        if not matching.contains(u, v):
            outside[u].append((v, float(w)))
            outside[v].append((u, float(w)))

    x = {u: 0.0 for u in instance.vertex_ids}
    for u, v, w in medges:
        x[u] = w / 2
        x[v] = w / 2

    def alphas_now() -> dict[str, float]:
        return {
            u: max(0.0, max((w - x[v] for v, w in outside[u]), default=0.0))
            for u in instance.vertex_ids
        }

    converged = False
    for _ in range(config.max_iterations):
        al = alphas_now()
        residual = 0.0
        for u, v, w in medges:
            residual = max(residual, abs((x[u] - al[u]) - (x[v] - al[v])))
        for u in instance.vertex_ids:
            residual = max(residual, al[u] - x[u])
        if residual < config.tolerance:
            converged = True
            break
        for u, v, w in medges:
            surplus = w - al[u] - al[v]
            tu = min(max(al[u] + surplus / 2, 0.0), w)
            tv = w - tu
            x[u] += config.damping * (tu - x[u])
            x[v] += config.damping * (tv - x[v])
    if not converged:
        return None
    return _snap(instance, matching, x)


def _snap(
    instance: Instance, matching: CMatching, x: dict[str, float]
) -> Allocation | None:
    """Bounded-denominator rational reconstruction, verified exactly."""
    weight_lcm = 1
    for _, _, w in instance.edges:
        weight_lcm = math.lcm(weight_lcm, w.denominator)
    for k in range(SNAP_LADDER + 1):
        bound = 3 * (1 << k) * weight_lcm
        payoffs = {u: Fraction(0) for u in instance.vertex_ids}
        for u, v in matching.sorted_edges:
            w = instance.weight(u, v)
            snapped = Fraction(x[u]).limit_denominator(bound)
            snapped = min(max(snapped, Fraction(0)), w)
            payoffs[u] = snapped
            payoffs[v] = w - snapped
        candidate = make_allocation(payoffs)
        if exact_verify(instance, matching, candidate).ok:
            return candidate
    return None


@dataclass(frozen=True)
class _Candidate:
    """One possible witness of a vertex's outside option: value w - x[var]
    (var None means the constant w, from an uncovered neighbor).

    ``neighbor`` is the lexicographically least neighbor realizing the form
    (several uncovered neighbors with equal weight collapse into one form);
    ``lb``/``ub`` bound the value given 0 <= x[var] <= matched edge weight.
    """

    w: Fraction
    var: str | None
    neighbor: str
    lb: Fraction
    ub: Fraction


def _witness_options(
    instance: Instance, matching: CMatching, u: str, partner_weight: dict[str, Fraction]
) -> list[_Candidate | None]:
    """Witness choices for alpha_u: None (alpha = 0) plus candidate forms.

    Candidates that can never be nonnegative or never attain the maximum are
    dropped; None is dropped when some candidate is always positive.  Both
    prunings preserve every witness pattern a balanced allocation can have.
    """
    forms: dict[tuple[Fraction, str | None], _Candidate] = {}
    for v in instance.neighbors(u):
        if matching.contains(u, v):
            continue
        w = instance.weight(u, v)
        if matching.covers(v):
            cand = _Candidate(w=w, var=v, neighbor=v, lb=w - partner_weight[v], ub=w)
        else:
            cand = _Candidate(w=w, var=None, neighbor=v, lb=w, ub=w)
        key = (w, cand.var)
        if key not in forms or v < forms[key].neighbor:
            forms[key] = cand
    candidates = [c for c in forms.values() if c.ub >= 0]
    candidates = [
        c for c in candidates if not any(o is not c and c.ub < o.lb for o in candidates)
    ]
    candidates.sort(key=lambda c: c.neighbor)
    opts: list[_Candidate | None] = []
    if not any(c.lb > 0 for c in candidates):
        opts.append(None)
    opts.extend(candidates)
    return opts


def _enumerate_balanced(
    instance: Instance, matching: CMatching
) -> tuple[Allocation, str] | None:
    """Complete exact search over outside-option witness patterns.

    The balance and stability conditions decompose over the connected
    components of the instance restricted to covered vertices, so patterns are
    enumerated per component and the fragments merged.
    """
    medges = matching.sorted_edges
    if len(medges) > MAX_MATCHED_ENUM:
        raise SizeGuardError(
            f"exact enumeration limited to {MAX_MATCHED_ENUM} matched edges,"
            f" got {len(medges)}"
        )
    covered = sorted(u for u in instance.vertex_ids if matching.covers(u))
    partner_weight: dict[str, Fraction] = {}
    for u, v in medges:
        w = instance.weight(u, v)
        partner_weight[u] = w
        partner_weight[v] = w

    options = {u: _witness_options(instance, matching, u, partner_weight) for u in covered}

    # Quick global infeasibilities: a covered vertex whose outside option
    # always exceeds anything its own contract can pay, or two adjacent
    # uncovered vertices with positive weight, rule out stability outright.
    for u in covered:
        floor = max((c.lb for c in options[u] if c is not None), default=Fraction(0))
        if floor > partner_weight[u]:
            return None
    fixed_leq: dict[str, list[tuple[dict[str, Fraction], Fraction]]] = {}
    for t in instance.vertex_ids:
        if matching.covers(t):
            continue
        for v in instance.neighbors(t):
            if matching.contains(t, v):
                continue
            w = instance.weight(t, v)
            if matching.covers(v):
                # stability of t: w - x_v <= 0, attached to v's component
                fixed_leq.setdefault(v, []).append(({v: Fraction(-1)}, w))
            elif w > 0:
                return None

    components = _covered_components(instance, covered)
    merged: dict[str, Fraction] = {u: Fraction(0) for u in instance.vertex_ids}
    details: list[str] = []
    for comp in components:
        comp_edges = [e for e in medges if e[0] in comp]
        comp_leq = [c for v in comp for c in fixed_leq.get(v, [])]
        fragment = _enumerate_component(
            instance, matching, comp, comp_edges, options, comp_leq
        )
        if fragment is None:
            return None
        values, how = fragment
        merged.update(values)
        details.append(how)
    return make_allocation(merged), "; ".join(sorted(set(details)))


def _covered_components(instance: Instance, covered: list[str]) -> list[list[str]]:
    """Connected components of the instance restricted to covered vertices."""
    covered_set = set(covered)
    parent = {u: u for u in covered}

    def find(a: str) -> str:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for u, v, _ in instance.edges:
        if u in covered_set and v in covered_set:
            parent[find(u)] = find(v)
    groups: dict[str, list[str]] = {}
    for u in covered:
        groups.setdefault(find(u), []).append(u)
    return sorted(groups.values())


def _enumerate_component(
    instance: Instance,
    matching: CMatching,
    comp: list[str],
    comp_edges: list[tuple[str, str]],
    options: dict[str, list[_Candidate | None]],
    comp_leq: list[tuple[dict[str, Fraction], Fraction]],
) -> tuple[dict[str, Fraction], str] | None:
    total = 1
    for u in comp:
        total *= len(options[u])
        if total > PATTERN_BUDGET:
            raise SizeGuardError(
                f"witness pattern space exceeds budget of {PATTERN_BUDGET} patterns"
            )
    n = len(comp)
    pattern: list[_Candidate | None] = [None] * n

    def dfs(i: int) -> tuple[dict[str, Fraction], str] | None:
        if i == n:
            return _solve_pattern(instance, matching, comp, comp_edges, pattern, options, comp_leq)
        for choice in options[comp[i]]:
            pattern[i] = choice
            found = dfs(i + 1)
            if found is not None:
                return found
        return None

    return dfs(0)


def _solve_pattern(
    instance: Instance,
    matching: CMatching,
    comp: list[str],
    comp_edges: list[tuple[str, str]],
    chosen: list[_Candidate | None],
    options: dict[str, list[_Candidate | None]],
    comp_leq: list[tuple[dict[str, Fraction], Fraction]],
) -> tuple[dict[str, Fraction], str] | None:
    n = len(comp)
    index = {u: i for i, u in enumerate(comp)}

    def alpha_form(i: int) -> tuple[dict[str, Fraction], Fraction]:
        """alpha of comp[i] under the pattern, as (coefficients, constant)."""
        cand = chosen[i]
        if cand is None:
            return {}, Fraction(0)
        if cand.var is None:
            return {}, cand.w
        return {cand.var: Fraction(-1)}, cand.w

    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for u, v in comp_edges:
        w = instance.weight(u, v)
        row = [Fraction(0)] * n
        row[index[u]] += 1
        row[index[v]] += 1
        rows.append(row)
        rhs.append(w)

        # x_u - alpha_u = x_v - alpha_v, rewritten as a linear equation
        coeffs = [Fraction(0)] * n
        coeffs[index[u]] += 1
        coeffs[index[v]] -= 1
        au_coeffs, au_const = alpha_form(index[u])
        for var, c in au_coeffs.items():
            coeffs[index[var]] -= c
        av_coeffs, av_const = alpha_form(index[v])
        for var, c in av_coeffs.items():
            coeffs[index[var]] += c
        rows.append(coeffs)
        rhs.append(au_const - av_const)

    solution = solve_linear(rows, rhs)
    if solution is None:
        return None

    def build(values: list[Fraction]) -> dict[str, Fraction] | None:
        if any(val < 0 for val in values):
            return None
        fragment = dict(zip(comp, values))
        if _component_ok(instance, matching, comp, comp_edges, fragment, comp_leq):
            return fragment
        return None

    if solution.unique:
        fragment = build(list(solution.particular))
        if fragment is not None:
            return fragment, "determined pattern"
        return None

    # Underdetermined pattern: search the free parameters exactly.
    dim = len(solution.nullspace)
    if dim > 6:
        raise SizeGuardError(f"degenerate pattern with {dim} free parameters")

    inequalities: list[tuple[list[Fraction], Fraction]] = []

    def add_leq(coeffs: dict[str, Fraction], const: Fraction) -> None:
        """Impose sum coeffs[u] * x_u + const <= 0 on the parameters."""
        acc = [Fraction(0)] * dim
        total = const
        for u, c in coeffs.items():
            i = index[u]
            acc = [ai + c * vec[i] for ai, vec in zip(acc, solution.nullspace)]
            total += c * solution.particular[i]
        inequalities.append((acc, -total))

    for u in comp:
        add_leq({u: Fraction(-1)}, Fraction(0))  # x_u >= 0
    for coeffs, const in comp_leq:
        add_leq(coeffs, const)
    for i, u in enumerate(comp):
        cand = chosen[i]
        others = [o for o in options[u] if o is not None]
        if cand is None:
            for other in others:
                coeffs = {other.var: Fraction(-1)} if other.var else {}
                add_leq(coeffs, other.w)  # candidate value <= 0
        else:
            if cand.var is None:
                add_leq({}, -cand.w)  # chosen constant >= 0
                add_leq({u: Fraction(-1)}, cand.w)  # x_u >= chosen
            else:
                add_leq({cand.var: Fraction(1)}, -cand.w)  # chosen >= 0
                add_leq({cand.var: Fraction(-1), u: Fraction(-1)}, cand.w)
            for other in others:
                if other.var == cand.var and other.w == cand.w:
                    continue
                diff: dict[str, Fraction] = {}
                if other.var is not None:
                    diff[other.var] = diff.get(other.var, Fraction(0)) - 1
                if cand.var is not None:
                    diff[cand.var] = diff.get(cand.var, Fraction(0)) + 1
                add_leq(diff, other.w - cand.w)  # other value <= chosen value

    point = feasible_point(inequalities, dim)
    if point is None:
        return None
    values = [
        solution.particular[i]
        + sum((point[j] * solution.nullspace[j][i] for j in range(dim)), Fraction(0))
        for i in range(n)
    ]
    fragment = build(values)
    if fragment is not None:
        return fragment, "degenerate pattern, feasibility point"
    return None


def _component_ok(
    instance: Instance,
    matching: CMatching,
    comp: list[str],
    comp_edges: list[tuple[str, str]],
    fragment: dict[str, Fraction],
    comp_leq: list[tuple[dict[str, Fraction], Fraction]],
) -> bool:
    """Check every stability and balance condition local to the component."""

    def payoff(v: str) -> Fraction:
        return fragment.get(v, Fraction(0))

    def alpha_of(u: str) -> Fraction:
        best = Fraction(0)
        for v in instance.neighbors(u):
            if matching.contains(u, v):
                continue
            candidate = instance.weight(u, v) - payoff(v)
            if candidate > best:
                best = candidate
        return best

    for u, v in comp_edges:
        if payoff(u) + payoff(v) != instance.weight(u, v):
            return False
    alphas = {u: alpha_of(u) for u in comp}
    for u in comp:
        if payoff(u) < alphas[u]:
            return False
    for u, v in comp_edges:
        if (payoff(u) - alphas[u]) != (payoff(v) - alphas[v]):
            return False
    for coeffs, const in comp_leq:
        total = const
        for u, c in coeffs.items():
            total += c * payoff(u)
        if total > 0:
            return False
    return True
