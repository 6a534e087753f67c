"""Batch experiment driver: instances x formulation kinds x breakpoints.

Every combination becomes one run: enumerate with a cap tied to the
breakpoint, assemble the hybrid model (the chosen kind where the feasible
set is small enough, an unreduced arc-arc block elsewhere), and solve under
a wall-clock budget.  Failures are recorded as rows, never raised, so a
long sweep always produces its full grid of results.
"""

from __future__ import annotations

import csv
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, TextIO

from .bigm import compute_bigm
from .cuts import solve_with_vfcs_cuts
from .enumeration import enumerate_paths, perturb_costs
from .formulations import KindLike, assemble_hybrid, get_kind
from .network import ProblemInstance
from .solver import DEFAULT_BUDGET, STATUS_OPTIMAL, get_backend

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "instance",
    "kind",
    "N",
    "status",
    "objective",
    "gap_pct",
    "enum_s",
    "solve_s",
    "total_s",
)

FALLBACK_KIND = "STD"


@dataclass(frozen=True)
class RunRecord:
    instance: str
    kind: str
    breakpoint: int
    status: str
    objective: Optional[float]
    gap_pct: Optional[float]
    enum_s: float
    solve_s: float

    @property
    def total_s(self) -> float:
        return self.enum_s + self.solve_s

    def row(self) -> list[str]:
        return [
            self.instance,
            self.kind,
            str(self.breakpoint),
            self.status,
            "" if self.objective is None else f"{self.objective:.6f}",
            "" if self.gap_pct is None else f"{self.gap_pct:.4f}",
            f"{self.enum_s:.4f}",
            f"{self.solve_s:.4f}",
            f"{self.total_s:.4f}",
        ]


def run_one(
    instance: ProblemInstance,
    kind: KindLike,
    breakpoint: int,
    budget: float = DEFAULT_BUDGET,
    perturb: bool = True,
    config: Optional[Mapping[str, str]] = None,
) -> RunRecord:
    """One sweep cell.  Build or solve trouble becomes an ``error`` row."""
    kind = get_kind(kind)
    label = instance.label
    t0 = time.perf_counter()
    try:
        net = perturb_costs(instance.network, seed=0) if perturb else instance.network
        work = ProblemInstance(net, instance.commodities, label)
        enum = [
            enumerate_paths(net, com, cap=breakpoint + 1, commodity_index=k)
            for k, com in enumerate(work.commodities)
        ]
        enum_s = time.perf_counter() - t0
        bfsets = {
            k: r.feasible_set()
            for k, r in enumerate(enum)
            if r.feasible_set().exhaustive
        }
        bigm = compute_bigm(net, work.commodities, bfsets)
        hybrid = assemble_hybrid(
            work,
            breakpoint,
            kind,
            FALLBACK_KIND,
            bigm,
            enum,
            allow_vfcs=True,
        )
        result = solve_with_vfcs_cuts(
            hybrid, budget=budget, backend=get_backend(config), config=config
        )
    except Exception as exc:  # noqa: BLE001 - a sweep must survive bad cells
        log.warning("run %s/%s/N=%s failed: %s", label, kind.label, breakpoint, exc)
        return RunRecord(
            label, kind.label, breakpoint, "error", None, None,
            time.perf_counter() - t0, 0.0,
        )
    gap = result.gap
    return RunRecord(
        label,
        kind.label,
        breakpoint,
        result.status,
        result.objective,
        None if gap is None else 100.0 * gap,
        enum_s,
        result.wall_time,
    )


def run_sweep(
    instances: Sequence[ProblemInstance],
    kinds: Sequence[KindLike],
    breakpoints: Sequence[int],
    budget: float = DEFAULT_BUDGET,
    jobs: int = 1,
    perturb: bool = True,
    config: Optional[Mapping[str, str]] = None,
) -> list[RunRecord]:
    """Run the full grid and return one record per cell, in grid order."""
    cells = [
        (instance, kind, breakpoint)
        for instance in instances
        for kind in kinds
        for breakpoint in breakpoints
    ]
    if jobs <= 1:
        records = [
            run_one(i, k, n, budget=budget, perturb=perturb, config=config)
            for i, k, n in cells
        ]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            records = list(
                pool.map(
                    lambda cell: run_one(
                        cell[0], cell[1], cell[2],
                        budget=budget, perturb=perturb, config=config,
                    ),
                    cells,
                )
            )
    _log_enum_monotonicity(records)
    return records


def _log_enum_monotonicity(records: Sequence[RunRecord]) -> None:
    """Enumeration with a higher cap should not get cheaper; log when it does.

    Wall-clock jitter makes this a diagnostic, not an invariant.
    """
    by_pair: dict[tuple[str, str], list[RunRecord]] = {}
    for rec in records:
        by_pair.setdefault((rec.instance, rec.kind), []).append(rec)
    for (instance, kind), group in by_pair.items():
        group = sorted(group, key=lambda r: r.breakpoint)
        for small, big in zip(group, group[1:]):
            if big.enum_s < small.enum_s * 0.5:
                log.info(
                    "enumeration at N=%d ran faster than at N=%d on %s (%s)",
                    big.breakpoint, small.breakpoint, instance, kind,
                )


def write_csv(records: Sequence[RunRecord], stream: TextIO) -> None:
    writer = csv.writer(stream)
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        writer.writerow(rec.row())


@dataclass(frozen=True)
class SummaryRow:
    kind: str
    breakpoint: int
    solved: int
    runs: int
    easy_mean_s: Optional[float]
    hard_mean_gap_pct: Optional[float]


def summarize(records: Sequence[RunRecord]) -> list[SummaryRow]:
    """Per (kind, N): solve counts, mean time on easy instances, mean gap on hard.

    An instance is easy when at least one run across the whole sweep solved
    it; the rest are hard, judged by the gaps they leave behind.
    """
    easy = {r.instance for r in records if r.status == STATUS_OPTIMAL}
    grid: dict[tuple[str, int], list[RunRecord]] = {}
    for rec in records:
        grid.setdefault((rec.kind, rec.breakpoint), []).append(rec)
    rows = []
    for (kind, breakpoint), group in sorted(grid.items()):
        solved = [r for r in group if r.status == STATUS_OPTIMAL]
        easy_times = [r.total_s for r in group if r.instance in easy]
        hard_gaps = [
            r.gap_pct
            for r in group
            if r.instance not in easy and r.gap_pct is not None
        ]
        rows.append(
            SummaryRow(
                kind,
                breakpoint,
                len(solved),
                len(group),
                sum(easy_times) / len(easy_times) if easy_times else None,
                sum(hard_gaps) / len(hard_gaps) if hard_gaps else None,
            )
        )
    return rows


def write_summary(rows: Sequence[SummaryRow], stream: TextIO) -> None:
    writer = csv.writer(stream)
    writer.writerow(
        ("kind", "N", "solved", "runs", "easy_mean_s", "hard_mean_gap_pct")
    )
    for row in rows:
        writer.writerow(
            [
                row.kind,
                str(row.breakpoint),
                str(row.solved),
                str(row.runs),
                "" if row.easy_mean_s is None else f"{row.easy_mean_s:.4f}",
                "" if row.hard_mean_gap_pct is None else f"{row.hard_mean_gap_pct:.4f}",
            ]
        )
