"""MILP backends and the trust-but-verify solve entry point.

Two backends ship by default.  ``ScipyBackend`` drives the HiGHS solver
bundled with scipy and needs no external setup.  ``CommandBackend`` shells
out to any solver that can read an LP file and print ``name value`` lines,
configured through a command template.  Every solve is re-checked against
the model's own constraint list before the result is returned, so a backend
that lies about feasibility is caught here rather than in downstream math.
"""

from __future__ import annotations

import os
import shlex
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Optional, Protocol

import numpy as np
from scipy import optimize as _sciopt
from scipy import sparse as _sparse

from .model_ir import ModelIR
from .lp_format import lp_name_map, write_lp

#: Default wall-clock budget per solve, in seconds.
DEFAULT_BUDGET = 300.0

#: Absolute tolerance used when re-checking a claimed solution.
CHECK_TOLERANCE = 1e-6

STATUS_OPTIMAL = "optimal"
STATUS_FEASIBLE = "feasible"
STATUS_BUDGET = "budget-exhausted"
STATUS_INFEASIBLE = "infeasible"
STATUS_UNBOUNDED = "unbounded"
STATUS_ERROR = "error"


class SolverError(RuntimeError):
    pass


@dataclass
class SolveResult:
    status: str
    objective: Optional[float]
    best_bound: Optional[float]
    assignment: dict[str, float] = field(default_factory=dict)
    wall_time: float = 0.0
    backend: str = ""
    cut_rounds: int = 0

    @property
    def gap(self) -> Optional[float]:
        """Relative optimality gap, 0 when proven optimal, None when unknown."""
        if self.status == STATUS_OPTIMAL:
            return 0.0
        if self.objective is None or self.best_bound is None:
            return None
        return (self.best_bound - self.objective) / max(1e-10, abs(self.best_bound))


class Backend(Protocol):
    name: str

    def solve(self, model: ModelIR, budget: float) -> SolveResult: ...


def _model_arrays(model: ModelIR):
    variables = model.variables
    names = [v.name for v in variables]
    col = {name: j for j, name in enumerate(names)}
    n = len(names)
    c = np.zeros(n)
    for coef, name in model.objective:
        c[col[name]] += float(coef)
    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    lo = np.full(len(model.constraints), -np.inf)
    hi = np.full(len(model.constraints), np.inf)
    for i, con in enumerate(model.constraints):
        for coef, name in con.terms:
            rows.append(i)
            cols.append(col[name])
            vals.append(float(coef))
        rhs = float(con.rhs)
        if con.sense in ("<=", "="):
            hi[i] = rhs
        if con.sense in (">=", "="):
            lo[i] = rhs
    matrix = _sparse.csr_matrix(
        (vals, (rows, cols)), shape=(len(model.constraints), n)
    )
    lb = np.array(
        [-np.inf if v.lower is None else float(v.lower) for v in variables]
    )
    ub = np.array(
        [np.inf if v.upper is None else float(v.upper) for v in variables]
    )
    integrality = np.array([1 if v.binary else 0 for v in variables])
    return names, c, matrix, lo, hi, lb, ub, integrality


class ScipyBackend:
    """HiGHS via ``scipy.optimize.milp``."""

    name = "scipy-highs"

    def solve(self, model: ModelIR, budget: float = DEFAULT_BUDGET) -> SolveResult:
        names, c, matrix, lo, hi, lb, ub, integrality = _model_arrays(model)
        start = time.perf_counter()
        res = _sciopt.milp(
            c=-c,  # milp minimizes; the model maximizes
            constraints=_sciopt.LinearConstraint(matrix, lo, hi),
            bounds=_sciopt.Bounds(lb, ub),
            integrality=integrality,
            options={"mip_rel_gap": 0.0, "time_limit": budget, "disp": False},
        )
        elapsed = time.perf_counter() - start
        status = {
            0: STATUS_OPTIMAL,
            1: STATUS_BUDGET,
            2: STATUS_INFEASIBLE,
            3: STATUS_UNBOUNDED,
        }.get(res.status, STATUS_ERROR)
        if status == STATUS_BUDGET and res.x is not None:
            status = STATUS_FEASIBLE  # incumbent in hand, optimality unproven
        assignment: dict[str, float] = {}
        objective = None
        if res.x is not None:
            values = res.x
            assignment = {name: float(values[j]) for j, name in enumerate(names)}
            objective = float(c @ values)
        bound = None
        dual = getattr(res, "mip_dual_bound", None)
        if dual is not None and np.isfinite(dual):
            bound = -float(dual)
        elif status == STATUS_OPTIMAL and objective is not None:
            bound = objective
        return SolveResult(
            status=status,
            objective=objective,
            best_bound=bound,
            assignment=assignment,
            wall_time=elapsed,
            backend=self.name,
        )


class CommandBackend:
    """Run an external solver through a shell command template.

    The template must contain ``{lp}`` and ``{sol}`` placeholders, e.g.::

        highs {lp} --solution_file {sol}
        scip -c "read {lp} optimize write solution {sol} quit"

    The solution file is scanned for ``name value`` pairs, one per line;
    lines that do not parse that way are skipped, which tolerates the
    headers and footers most solvers add.
    """

    name = "command"

    def __init__(self, template: str):
        if "{lp}" not in template or "{sol}" not in template:
            raise SolverError("solver command template needs {lp} and {sol}")
        self.template = template

    def solve(self, model: ModelIR, budget: float = DEFAULT_BUDGET) -> SolveResult:
        with tempfile.TemporaryDirectory(prefix="tollgate-") as tmp:
            lp_path = Path(tmp) / "model.lp"
            sol_path = Path(tmp) / "model.sol"
            lp_path.write_text(write_lp(model))
            decode = lp_name_map(model)
            command = self.template.format(lp=shlex.quote(str(lp_path)), sol=shlex.quote(str(sol_path)))
            start = time.perf_counter()
            try:
                proc = subprocess.run(
                    command,
                    shell=True,
                    capture_output=True,
                    text=True,
                    timeout=budget * 1.5 + 30,
                )
            except subprocess.TimeoutExpired:
                return SolveResult(
                    status=STATUS_BUDGET,
                    objective=None,
                    best_bound=None,
                    wall_time=time.perf_counter() - start,
                    backend=self.name,
                )
            elapsed = time.perf_counter() - start
            if not sol_path.exists():
                raise SolverError(
                    f"solver command produced no solution file (exit {proc.returncode}):\n"
                    f"{proc.stdout[-2000:]}\n{proc.stderr[-2000:]}"
                )
            text = sol_path.read_text()
        lowered = text.lower()
        if "infeasible" in lowered:
            return SolveResult(
                status=STATUS_INFEASIBLE,
                objective=None,
                best_bound=None,
                wall_time=elapsed,
                backend=self.name,
            )
        assignment: dict[str, float] = {}
        for line in text.splitlines():
            parts = line.split()
            if len(parts) != 2:
                continue
            ident, raw = parts
            if ident not in decode:
                continue
            try:
                assignment[decode[ident]] = float(raw)
            except ValueError:
                continue
        if not assignment:
            raise SolverError("no variable values found in solver output")
        for var in model.variables:
            assignment.setdefault(var.name, 0.0)
        objective = model.objective_value(assignment)
        return SolveResult(
            status=STATUS_OPTIMAL,
            objective=objective,
            best_bound=objective,
            assignment=assignment,
            wall_time=elapsed,
            backend=self.name,
        )


def get_backend(config: Optional[Mapping[str, str]] = None) -> Backend:
    """Pick a backend: explicit command template wins, scipy otherwise.

    The template is read from, in order: ``config["solver.cmd"]``, then the
    ``TOLLGATE_SOLVER_CMD`` environment variable.
    """
    template = None
    if config:
        template = config.get("solver.cmd")
    if not template:
        template = os.environ.get("TOLLGATE_SOLVER_CMD")
    if template:
        return CommandBackend(template)
    return ScipyBackend()


def solve(
    model: ModelIR,
    budget: float = DEFAULT_BUDGET,
    backend: Optional[Backend] = None,
    config: Optional[Mapping[str, str]] = None,
) -> SolveResult:
    """Solve ``model`` and re-check any claimed solution against the model.

    A result whose assignment violates a constraint or bound by more than
    ``CHECK_TOLERANCE`` raises :class:`SolverError` instead of being passed
    along.
    """
    if not model.variables:
        return SolveResult(
            status=STATUS_OPTIMAL,
            objective=0.0,
            best_bound=0.0,
            backend="empty",
        )
    chosen = backend if backend is not None else get_backend(config)
    result = chosen.solve(model, budget)
    if result.assignment:
        bad = model.violations(result.assignment, tolerance=CHECK_TOLERANCE)
        if bad:
            preview = "; ".join(bad[:5])
            raise SolverError(
                f"backend {chosen.name} returned an infeasible point: {preview}"
            )
    return result
