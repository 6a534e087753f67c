"""Solver-agnostic MILP representation.

A model is a list of variables (with bounds and an optional binary mark), a
list of tagged linear constraints, and a linear objective that is always
maximized.  Coefficients are exact rationals; conversion to floats happens in
the backends and in the LP writer.  Tags are unique and follow the row-family
naming used by the builders (``pa[k,i]``, ``da1[k,a]``, ``lin-cs-pp[k,p]``,
...), which makes the assembled models auditable constraint by constraint.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

from .network import as_fraction

Term = tuple[Fraction, str]

SENSES = ("<=", "=", ">=")


@dataclass(frozen=True)
class Variable:
    """A decision variable.  ``None`` bounds mean unbounded on that side."""

    name: str
    lower: Optional[Fraction] = Fraction(0)
    upper: Optional[Fraction] = None
    binary: bool = False

    def __post_init__(self) -> None:
        if self.binary and (self.lower != 0 or self.upper != 1):
            raise ValueError(f"binary variable {self.name} must have bounds [0, 1]")
        if self.lower is not None and self.upper is not None and self.lower > self.upper:
            raise ValueError(f"variable {self.name} has crossing bounds")


@dataclass(frozen=True)
class Constraint:
    """One linear row: ``sum(coef * var) sense rhs``."""

    tag: str
    terms: tuple[Term, ...]
    sense: str
    rhs: Fraction

    def __post_init__(self) -> None:
        if self.sense not in SENSES:
            raise ValueError(f"constraint {self.tag}: bad sense {self.sense!r}")
        if not self.terms:
            raise ValueError(f"constraint {self.tag}: no terms")


def _merge_terms(terms: Iterable[tuple[Union[int, Fraction], str]]) -> tuple[Term, ...]:
    """Sum duplicate variables, drop zeros, keep first-appearance order."""
    order: list[str] = []
    acc: dict[str, Fraction] = {}
    for coef, name in terms:
        coef = as_fraction(coef)
        if name not in acc:
            acc[name] = Fraction(0)
            order.append(name)
        acc[name] += coef
    return tuple((acc[name], name) for name in order if acc[name] != 0)


class ModelIR:
    """A mutable MILP under construction.  Objective sense is maximize."""

    def __init__(self, label: str = "model"):
        self.label = label
        self._variables: dict[str, Variable] = {}
        self.constraints: list[Constraint] = []
        self._tags: set[str] = set()
        self._objective: dict[str, Fraction] = {}

    # -- variables ---------------------------------------------------------

    def add_variable(
        self,
        name: str,
        lower: Optional[Union[int, Fraction]] = 0,
        upper: Optional[Union[int, Fraction]] = None,
        binary: bool = False,
    ) -> str:
        """Declare a variable.  Re-declaring with identical shape is a no-op."""
        var = Variable(
            name,
            None if lower is None else as_fraction(lower),
            None if upper is None else as_fraction(upper),
            binary,
        )
        existing = self._variables.get(name)
        if existing is not None:
            if existing != var:
                raise ValueError(f"variable {name} re-declared with a different shape")
            return name
        self._variables[name] = var
        return name

    @property
    def variables(self) -> tuple[Variable, ...]:
        return tuple(self._variables.values())

    def variable(self, name: str) -> Variable:
        return self._variables[name]

    def has_variable(self, name: str) -> bool:
        return name in self._variables

    def binary_names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self._variables.values() if v.binary)

    # -- constraints and objective ------------------------------------------

    def add_constraint(
        self,
        tag: str,
        terms: Iterable[tuple[Union[int, Fraction], str]],
        sense: str,
        rhs: Union[int, Fraction],
    ) -> Constraint:
        if tag in self._tags:
            raise ValueError(f"duplicate constraint tag {tag}")
        merged = _merge_terms(terms)
        for _, name in merged:
            if name not in self._variables:
                raise ValueError(f"constraint {tag} references undeclared variable {name}")
        row = Constraint(tag, merged, sense, as_fraction(rhs))
        self.constraints.append(row)
        self._tags.add(tag)
        return row

    def add_objective_term(self, coef: Union[int, Fraction], name: str) -> None:
        if name not in self._variables:
            raise ValueError(f"objective references undeclared variable {name}")
        self._objective[name] = self._objective.get(name, Fraction(0)) + as_fraction(coef)

    @property
    def objective(self) -> tuple[Term, ...]:
        return tuple((c, n) for n, c in self._objective.items() if c != 0)

    # -- evaluation ----------------------------------------------------------

    def objective_value(self, assignment: Mapping[str, float]) -> float:
        return sum(float(c) * assignment.get(n, 0.0) for c, n in self.objective)

    def violations(
        self, assignment: Mapping[str, float], tolerance: float = 1e-6
    ) -> list[str]:
        """Every bound, integrality, and row violation beyond ``tolerance``."""
        issues: list[str] = []
        for var in self._variables.values():
            value = assignment.get(var.name, 0.0)
            if var.lower is not None and value < float(var.lower) - tolerance:
                issues.append(f"{var.name} = {value} below lower bound {var.lower}")
            if var.upper is not None and value > float(var.upper) + tolerance:
                issues.append(f"{var.name} = {value} above upper bound {var.upper}")
            if var.binary and min(abs(value), abs(value - 1.0)) > tolerance:
                issues.append(f"{var.name} = {value} is not near 0 or 1")
        for row in self.constraints:
            lhs = sum(float(c) * assignment.get(n, 0.0) for c, n in row.terms)
            rhs = float(row.rhs)
            if row.sense == "<=" and lhs > rhs + tolerance:
                issues.append(f"{row.tag}: {lhs} > {rhs}")
            elif row.sense == ">=" and lhs < rhs - tolerance:
                issues.append(f"{row.tag}: {lhs} < {rhs}")
            elif row.sense == "=" and abs(lhs - rhs) > tolerance:
                issues.append(f"{row.tag}: {lhs} != {rhs}")
        return issues

    # -- auditing -------------------------------------------------------------

    def tag_counts(self) -> dict[str, int]:
        """Row counts grouped by the tag family (text before ``[``)."""
        counts: dict[str, int] = {}
        for row in self.constraints:
            family = row.tag.split("[", 1)[0]
            counts[family] = counts.get(family, 0) + 1
        return counts

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return (
            f"ModelIR({self.label!r}: {len(self._variables)} vars, "
            f"{len(self.constraints)} rows, {len(self.binary_names())} binary)"
        )
