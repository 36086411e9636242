"""Point evaluation and grid sweeps shared by the optimizer and the command line."""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .entanglement import UnphysicalStateError
from .illumination import DetectionError, InstabilityError, IlluminationReport, ratio_F
from .model import DegenerateInputError, ParameterError, SystemParams
from .presets import Axis

OBSERVABLES = (
    "stable",
    "rwa_valid",
    "F",
    "F_opt",
    "F_max",
    "n_w",
    "n_o",
    "m_re",
    "m_im",
    "abs_m",
    "E_N",
    "E_N_normalized",
    "SNR_QI",
    "SNR_Cl",
    "P_err",
    "min_decay",
    "rwa_margin",
    "receiver_phi_w",
)
"""Fixed observable column order of sweep CSV files."""


@dataclass(frozen=True)
class EvaluationOptions:
    match_phases: bool = True
    cross_terms: bool = True
    rwa_threshold: float = 0.1
    entanglement: bool = True


def evaluate(system: SystemParams, options: EvaluationOptions = EvaluationOptions()) -> IlluminationReport:
    return ratio_F(
        system,
        match_phases=options.match_phases,
        cross_terms=options.cross_terms,
        with_entanglement=options.entanglement,
        rwa_threshold=options.rwa_threshold,
    )


def report_row(report: Optional[IlluminationReport]) -> dict:
    """Observable columns for one point; ``None`` marks an unstable point."""
    if report is None:
        row = {key: None for key in OBSERVABLES}
        row["stable"] = 0
        return row
    data = report.as_dict()
    row = {key: data.get(key) for key in OBSERVABLES}
    row["stable"] = 1
    row["rwa_valid"] = int(report.rwa_valid)
    return row


def evaluate_row(system: SystemParams, options: EvaluationOptions = EvaluationOptions()) -> dict:
    try:
        return report_row(evaluate(system, options))
    except InstabilityError:
        return report_row(None)


def grid_points(base: SystemParams, axes: Sequence[Axis]) -> list[tuple[tuple[float, ...], SystemParams]]:
    """Cartesian grid in row-major order (last axis fastest)."""
    values = [axis.values() for axis in axes]
    points = []
    for combo in itertools.product(*values):
        system = base
        for axis, value in zip(axes, combo):
            system = system.with_param(axis.name, float(value))
        points.append((tuple(float(v) for v in combo), system))
    return points


def _evaluate_many(
    systems: Sequence[SystemParams], options: EvaluationOptions, workers: int, fn=evaluate_row
) -> list:
    if workers <= 1 or len(systems) < 2:
        return [fn(s, options) for s in systems]
    chunk = max(1, len(systems) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map preserves input order, so output is independent of scheduling.
        return list(pool.map(fn, systems, itertools.repeat(options), chunksize=chunk))


def sweep(
    base: SystemParams,
    axes: Sequence[Axis],
    options: EvaluationOptions = EvaluationOptions(),
    workers: int = 1,
) -> list[dict]:
    """Evaluate every grid point; each row holds the axis values then ``OBSERVABLES``."""
    if not axes:
        raise ParameterError("a sweep needs at least one axis")
    names = [axis.name for axis in axes]
    if len(set(names)) != len(names):
        raise ParameterError(f"duplicate sweep axes: {names}")
    points = grid_points(base, axes)
    rows = _evaluate_many([s for _, s in points], options, workers)
    return [{**dict(zip(names, coords)), **row} for (coords, _), row in zip(points, rows)]


def best_omega_row(
    system: SystemParams,
    options: EvaluationOptions = EvaluationOptions(),
    omega_range: tuple[float, float] = (-2.5, 2.5),
    num: int = 51,
) -> dict:
    """Maximize F over the detection frequency (in units of ``kappa_o``) at one parameter point."""
    kappa_o = system.transmitter.kappa_o

    def score(x: float) -> float:
        try:
            return evaluate(system.replace(omega=x * kappa_o), options).F
        except (InstabilityError, DetectionError):
            return -math.inf

    grid = np.linspace(*omega_range, num)
    scores = [score(float(x)) for x in grid]
    k = int(np.argmax(scores))
    if not math.isfinite(scores[k]):
        return {"omega_opt_over_kappa_o": None, **report_row(None)}
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, num - 1)]
    best_x, best_f = float(grid[k]), scores[k]
    if hi > lo:
        res = minimize_scalar(lambda x: -score(x), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-8})
        if -res.fun > best_f:
            best_x = float(res.x)
    row = evaluate_row(system.replace(omega=best_x * kappa_o), options)
    return {"omega_opt_over_kappa_o": best_x, **row}


def sweep_best_omega(
    base: SystemParams,
    axes: Sequence[Axis],
    options: EvaluationOptions = EvaluationOptions(),
    workers: int = 1,
) -> list[dict]:
    points = grid_points(base, axes)
    rows = _evaluate_many([s for _, s in points], options, workers, fn=best_omega_row)
    names = [axis.name for axis in axes]
    return [{**dict(zip(names, coords)), **row} for (coords, _), row in zip(points, rows)]


def objective_value(
    system: SystemParams, objective: str, options: EvaluationOptions = EvaluationOptions()
) -> float:
    """Scalar objective; infeasible points (unstable, RWA-violating, degenerate) score ``-inf``."""
    try:
        report = evaluate(system, options)
    except (InstabilityError, DetectionError, DegenerateInputError, UnphysicalStateError, ZeroDivisionError):
        return -math.inf
    if not report.rwa_valid:
        return -math.inf
    value = getattr(report, objective)
    if value is None or not math.isfinite(value):
        return -math.inf
    return float(value)


def column_matrix(rows: Iterable[dict], axes: Sequence[Axis], key: str) -> np.ndarray:
    """Reshape one observable of a row-major sweep into an array; unstable cells become NaN."""
    shape = tuple(axis.num for axis in axes)
    data = [np.nan if r[key] is None else float(r[key]) for r in rows]
    return np.array(data, dtype=float).reshape(shape)

