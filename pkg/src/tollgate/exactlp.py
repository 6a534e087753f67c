"""Small exact LP solver: two-phase primal simplex over Fractions.

Built for the reference (brute-force) pricing solver, which needs exact
arithmetic and must not share code or failure modes with the numeric MILP
backends.  Scope is deliberately narrow: dense tableau, nonnegative
variables, Bland's rule (so cycling is impossible), no presolve.  Fine for
dozens of rows and columns, not for thousands.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .network import as_fraction

Row = tuple[Sequence[tuple[Union[int, Fraction], str]], str, Union[int, Fraction]]


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    objective: Optional[Fraction]
    solution: dict[str, Fraction]


def _pivot(tableau: list[list[Fraction]], basis: list[int], row: int, col: int) -> None:
    pivot = tableau[row][col]
    if pivot == 0:
        raise ZeroDivisionError("pivot on a zero entry")
    tableau[row] = [v / pivot for v in tableau[row]]
    pivot_row = tableau[row]
    for r in range(len(tableau)):
        if r == row:
            continue
        factor = tableau[r][col]
        if factor != 0:
            tableau[r] = [v - factor * w for v, w in zip(tableau[r], pivot_row)]
    basis[row] = col


def _optimize(
    tableau: list[list[Fraction]],
    basis: list[int],
    costs: list[Fraction],
    allowed: list[bool],
) -> str:
    """Maximize ``costs`` over the current basic feasible solution (Bland)."""
    m = len(tableau)
    ncols = len(costs)
    while True:
        in_basis = set(basis)
        duals = [costs[b] for b in basis]
        entering = -1
        for j in range(ncols):
            if not allowed[j] or j in in_basis:
                continue
            reduced = costs[j]
            for i in range(m):
                coef = tableau[i][j]
                if coef != 0:
                    reduced -= duals[i] * coef
            if reduced > 0:
                entering = j  # smallest improving index: Bland's rule
                break
        if entering < 0:
            return "optimal"
        leaving = -1
        best: Optional[Fraction] = None
        for i in range(m):
            coef = tableau[i][entering]
            if coef > 0:
                ratio = tableau[i][-1] / coef
                if (
                    best is None
                    or ratio < best
                    or (ratio == best and basis[i] < basis[leaving])
                ):
                    best = ratio
                    leaving = i
        if leaving < 0:
            return "unbounded"
        _pivot(tableau, basis, leaving, entering)


def solve_lp(
    objective: Sequence[tuple[Union[int, Fraction], str]],
    rows: Sequence[Row],
    maximize: bool = True,
) -> LPResult:
    """Solve ``max/min objective`` subject to ``rows`` with all variables >= 0.

    Each row is ``(terms, sense, rhs)`` with sense one of ``<=``, ``=``,
    ``>=``.  Variables are identified by name and ordered by first
    appearance, which makes the returned vertex deterministic.
    """
    names: list[str] = []
    index: dict[str, int] = {}

    def col_of(name: str) -> int:
        if name not in index:
            index[name] = len(names)
            names.append(name)
        return index[name]

    obj: dict[int, Fraction] = {}
    for coef, name in objective:
        j = col_of(name)
        obj[j] = obj.get(j, Fraction(0)) + as_fraction(coef)
    parsed: list[tuple[dict[int, Fraction], str, Fraction]] = []
    for terms, sense, rhs in rows:
        if sense not in ("<=", "=", ">="):
            raise ValueError(f"bad row sense {sense!r}")
        acc: dict[int, Fraction] = {}
        for coef, name in terms:
            j = col_of(name)
            acc[j] = acc.get(j, Fraction(0)) + as_fraction(coef)
        parsed.append((acc, sense, as_fraction(rhs)))

    n = len(names)
    sign = 1 if maximize else -1

    # Normalize to nonnegative right-hand sides, then append slack/surplus and
    # artificial columns.  Column layout: structural | slack+surplus | artificial.
    slack_cols = 0
    art_rows: list[int] = []
    normalized: list[tuple[dict[int, Fraction], str, Fraction]] = []
    for acc, sense, rhs in parsed:
        if rhs < 0:
            acc = {j: -c for j, c in acc.items()}
            rhs = -rhs
            sense = {"<=": ">=", ">=": "<=", "=": "="}[sense]
        normalized.append((acc, sense, rhs))
        if sense in ("<=", ">="):
            slack_cols += 1

    total = n + slack_cols + sum(1 for _, s, _ in normalized if s != "<=")
    tableau: list[list[Fraction]] = []
    basis: list[int] = []
    zero = Fraction(0)
    slack_at = n
    art_at = n + slack_cols
    for acc, sense, rhs in normalized:
        line = [zero] * (total + 1)
        for j, c in acc.items():
            line[j] = c
        line[-1] = rhs
        if sense == "<=":
            line[slack_at] = Fraction(1)
            basis.append(slack_at)
            slack_at += 1
        elif sense == ">=":
            line[slack_at] = Fraction(-1)
            slack_at += 1
            line[art_at] = Fraction(1)
            basis.append(art_at)
            art_rows.append(len(tableau))
            art_at += 1
        else:
            line[art_at] = Fraction(1)
            basis.append(art_at)
            art_rows.append(len(tableau))
            art_at += 1
        tableau.append(line)

    first_art = n + slack_cols
    allowed = [True] * total

    if first_art < total:
        phase1 = [zero] * total
        for j in range(first_art, total):
            phase1[j] = Fraction(-1)
        status = _optimize(tableau, basis, phase1, allowed)
        assert status == "optimal"  # bounded below by zero artificials
        infeasibility = -sum(
            tableau[i][-1] for i in range(len(tableau)) if basis[i] >= first_art
        )
        if infeasibility < 0:
            return LPResult("infeasible", None, {})
        # Pivot leftover artificials out; rows that cannot pivot are redundant.
        for i in range(len(tableau) - 1, -1, -1):
            if basis[i] < first_art:
                continue
            pivot_col = next(
                (j for j in range(first_art) if tableau[i][j] != 0), None
            )
            if pivot_col is None:
                del tableau[i]
                del basis[i]
            else:
                _pivot(tableau, basis, i, pivot_col)
        for j in range(first_art, total):
            allowed[j] = False

    costs = [zero] * total
    for j, c in obj.items():
        costs[j] = sign * c
    status = _optimize(tableau, basis, costs, allowed)
    if status == "unbounded":
        return LPResult("unbounded", None, {})

    values: dict[str, Fraction] = {name: Fraction(0) for name in names}
    for i, b in enumerate(basis):
        if b < n:
            values[names[b]] = tableau[i][-1]
    objective_value = sum(
        (c * values[names[j]] for j, c in obj.items()), Fraction(0)
    )
    return LPResult("optimal", objective_value, values)
