"""Exact rational linear algebra helpers (internal).

Small dense systems only; all arithmetic is over `fractions.Fraction`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class LinearSolution:
    """Solution set of A t = b as particular point + nullspace basis."""

    particular: tuple[Fraction, ...]
    nullspace: tuple[tuple[Fraction, ...], ...]

    @property
    def unique(self) -> bool:
        return not self.nullspace


def solve_linear(
    rows: list[list[Fraction]], rhs: list[Fraction]
) -> LinearSolution | None:
    """Solve A x = b exactly; None if inconsistent.

    Free variables are set to zero in the particular solution; the nullspace
    basis has one vector per free variable.
    """
    m = len(rows)
    n = len(rows[0]) if rows else 0
    aug = [list(rows[i]) + [rhs[i]] for i in range(m)]

    pivot_cols: list[int] = []
    r = 0
    for c in range(n):
        pivot = next((i for i in range(r, m) if aug[i][c] != 0), None)
        if pivot is None:
            continue
        aug[r], aug[pivot] = aug[pivot], aug[r]
        inv = Fraction(1) / aug[r][c]
        aug[r] = [a * inv for a in aug[r]]
        for i in range(m):
            if i != r and aug[i][c] != 0:
                factor = aug[i][c]
                aug[i] = [a - factor * p for a, p in zip(aug[i], aug[r])]
        pivot_cols.append(c)
        r += 1
        if r == m:
            break

    for i in range(r, m):
        if aug[i][n] != 0:
            return None

    particular = [Fraction(0)] * n
    for row_idx, c in enumerate(pivot_cols):
        particular[c] = aug[row_idx][n]

    free_cols = [c for c in range(n) if c not in pivot_cols]
    basis: list[tuple[Fraction, ...]] = []
    for fc in free_cols:
        vec = [Fraction(0)] * n
        vec[fc] = Fraction(1)
        for row_idx, c in enumerate(pivot_cols):
            vec[c] = -aug[row_idx][fc]
        basis.append(tuple(vec))

    return LinearSolution(particular=tuple(particular), nullspace=tuple(basis))


def feasible_point(
    inequalities: list[tuple[list[Fraction], Fraction]], dim: int
) -> list[Fraction] | None:
    """A point t with a . t <= b for every (a, b), or None if infeasible.

    Fourier-Motzkin elimination; intended for very small ``dim``.
    """
    if dim == 0:
        return [] if all(b >= 0 for a, b in inequalities) else None

    k = dim - 1
    pos: list[tuple[list[Fraction], Fraction]] = []
    neg: list[tuple[list[Fraction], Fraction]] = []
    rest: list[tuple[list[Fraction], Fraction]] = []
    for a, b in inequalities:
        coeff = a[k]
        if coeff > 0:
            pos.append(([ai / coeff for ai in a[:k]], b / coeff))  # t_k <= b' - a'.t
        elif coeff < 0:
            neg.append(([ai / -coeff for ai in a[:k]], b / -coeff))  # t_k >= a'.t - b'
        else:
            rest.append((a[:k], b))

    projected = list(rest)
    for a_lo, b_lo in neg:
        for a_hi, b_hi in pos:
            # (a_lo . t - b_lo) <= t_k <= (b_hi - a_hi . t)
            projected.append(([lo + hi for lo, hi in zip(a_lo, a_hi)], b_lo + b_hi))

    base = feasible_point(projected, k)
    if base is None:
        return None

    lower: Fraction | None = None
    upper: Fraction | None = None
    for a, b in neg:
        bound = sum((ai * ti for ai, ti in zip(a, base)), Fraction(0)) - b
        if lower is None or bound > lower:
            lower = bound
    for a, b in pos:
        bound = b - sum((ai * ti for ai, ti in zip(a, base)), Fraction(0))
        if upper is None or bound < upper:
            upper = bound

    if lower is not None and upper is not None:
        value = (lower + upper) / 2
    elif lower is not None:
        value = lower
    elif upper is not None:
        value = upper
    else:
        value = Fraction(0)
    return base + [value]
