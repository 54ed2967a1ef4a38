"""End-to-end solve: spectral analysis, existence gate, scan, refine, certify, validate."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cauchy import cauchy_matrix, eta as cauchy_eta
from .critical import existence_gate
from .errors import (
    ConvergenceError,
    DegenerateSolutionError,
    InvalidParameterError,
    NoExistenceError,
)
from .impact import (
    ContourField,
    GridSpec,
    ImpactSolution,
    build_solution,
    refine_root,
    scan_contour,
)
from .model import ModelSpec
from .spectral import SpectralData, analyze
from .trajectory import ValidationReport, ValidatorTolerances, synthesize, validate

__all__ = ["RootRecord", "SolveRun", "solve_model", "pick_records", "RANK_GAP_MAX"]

RANK_GAP_MAX = 1e-6
ROOT_MERGE_ATOL = 1e-6
ROW_CLUSTER_GAP = np.pi / 2


@dataclass(frozen=True, eq=False)
class RootRecord:
    """One certified root with its physical-validation report and grid position."""

    solution: ImpactSolution
    report: ValidationReport
    row: int
    col: int

    @property
    def accepted(self) -> bool:
        return self.report.passed


@dataclass(eq=False)
class SolveRun:
    """Everything produced by one full solve of a model."""

    model: ModelSpec
    spectral: SpectralData
    contour: ContourField
    records: list
    spurious_roots: int = 0
    failed_seeds: int = 0


def _cluster_rows(values, gap):
    """Row index per value: sorted values further apart than ``gap`` start a new row."""
    order = np.argsort(values)
    rows = np.empty(len(values), dtype=int)
    row = 0
    prev = None
    for idx in order:
        if prev is not None and values[idx] - prev > gap:
            row += 1
        rows[idx] = row
        prev = values[idx]
    return rows


def solve_model(model: ModelSpec, grid: GridSpec | None = None, *,
                samples_per_phase: int = 500,
                tolerances: ValidatorTolerances | None = None) -> SolveRun:
    """Run the full procedure on a model and return every certified root.

    Raises NoExistenceError when the largest contact eigenvalue is not
    positive, and ConvergenceError when no seed refines to a certified root.
    Roots whose matching matrix keeps full rank (spurious curve crossings,
    e.g. from kernel zeros) are dropped and counted.
    """
    spectral = analyze(model)
    if not existence_gate(spectral.lam_prime):
        raise NoExistenceError(
            f"largest contact eigenvalue {spectral.lam_prime[-1]:.6g} is not positive"
        )
    spectra = spectral.spectra
    M = cauchy_matrix(spectral.lam, spectral.lam_prime)
    eta_vec = cauchy_eta(spectral.lam, spectral.lam_prime)
    contour = scan_contour(spectra, grid)
    roots = []
    failed = 0
    for seed in contour.seeds:
        try:
            times = refine_root(seed, spectra, M, eta_vec)
        except ConvergenceError:
            failed += 1
            continue
        point = np.array([times.o_n, times.o_prime])
        if any(
            np.abs(point - np.array([r.o_n, r.o_prime])).max() < ROOT_MERGE_ATOL
            for r in roots
        ):
            continue
        roots.append(times)
    spurious = 0
    solutions = []
    for times in roots:
        try:
            solution = build_solution(spectral, times)
        except DegenerateSolutionError:
            spurious += 1
            continue
        if solution.rank_gap >= RANK_GAP_MAX:
            spurious += 1
            continue
        solutions.append(solution)
    if not solutions:
        raise ConvergenceError("no certified impact-time root in the scan window")
    o_primes = [s.times.o_prime for s in solutions]
    rows = _cluster_rows(o_primes, ROW_CLUSTER_GAP)
    records = []
    for row_idx in range(rows.max() + 1):
        members = [s for s, r in zip(solutions, rows) if r == row_idx]
        members.sort(key=lambda s: s.times.o_n)
        for col_idx, solution in enumerate(members):
            traj = synthesize(spectral, solution, samples_per_phase)
            report = validate(traj, model, tolerances)
            records.append(
                RootRecord(solution=solution, report=report, row=row_idx, col=col_idx)
            )
    return SolveRun(
        model=model,
        spectral=spectral,
        contour=contour,
        records=records,
        spurious_roots=spurious,
        failed_seeds=failed,
    )


def pick_records(run: SolveRun, strategy) -> list:
    """Select records: 'lowest-row', 'all', or a ('nearest', (o_n, o_p)) tuple.

    'lowest-row' returns the leftmost validated root of the lowest validated
    row; 'all' returns every validated root; 'nearest' returns the single
    converged root closest to the given phases regardless of validation.
    """
    if isinstance(strategy, tuple) and strategy and strategy[0] == "nearest":
        target = np.asarray(strategy[1], float)
        best = min(
            run.records,
            key=lambda r: np.hypot(
                r.solution.times.o_n - target[0], r.solution.times.o_prime - target[1]
            ),
        )
        return [best]
    if strategy == "all":
        return [r for r in run.records if r.accepted]
    if strategy == "lowest-row":
        accepted = [r for r in run.records if r.accepted]
        if not accepted:
            return []
        lowest = min(r.row for r in accepted)
        in_row = [r for r in accepted if r.row == lowest]
        return [min(in_row, key=lambda r: r.solution.times.o_n)]
    raise InvalidParameterError(f"unknown pick strategy {strategy!r}")
