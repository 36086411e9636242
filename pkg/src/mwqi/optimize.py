"""Grid-seeded Nelder-Mead maximization of F or the entanglement measures.

The landscapes are smooth inside the stable region but end in instability
cliffs, so a coarse grid (infeasible points scored ``-inf``) picks the starting
points and a bounded simplex search polishes the best few.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Literal, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .model import PARAMETER_NAMES, ParameterError, SystemParams
from .presets import Axis
from .sweeps import EvaluationOptions, _evaluate_many, objective_value

Objective = Literal["F", "F_opt", "E_N", "E_N_normalized"]


class InfeasibleError(RuntimeError):
    """No grid point satisfies the stability and RWA constraints."""


@dataclass(frozen=True)
class Bound:
    name: str
    lower: float
    upper: float

    def __post_init__(self):
        if self.name not in PARAMETER_NAMES:
            raise ParameterError(f"unknown free parameter {self.name!r}")
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)) or self.lower > self.upper:
            raise ParameterError(f"invalid bounds [{self.lower}, {self.upper}] for {self.name!r}")


@dataclass(frozen=True)
class OptimizationSpec:
    objective: Objective
    free: tuple[Bound, ...]
    grid: int = 41
    starts: int = 3
    max_evals: int = 400
    options: EvaluationOptions = field(default_factory=EvaluationOptions)
    seed: int = 0

    def __post_init__(self):
        if not self.free:
            raise ParameterError("at least one free parameter is required")
        if self.objective not in ("F", "F_opt", "E_N", "E_N_normalized"):
            raise ParameterError(f"unknown objective {self.objective!r}")
        names = [b.name for b in self.free]
        if len(set(names)) != len(names):
            raise ParameterError(f"duplicate free parameters {names}")
        if self.grid < 1 or self.starts < 0 or self.max_evals < 1:
            raise ParameterError("grid, starts and max_evals must be positive")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(b.name for b in self.free)

    def axes(self) -> tuple[Axis, ...]:
        return tuple(Axis(b.name, b.lower, b.upper, self.grid) for b in self.free)


@dataclass(frozen=True)
class TraceEntry:
    stage: str  # "grid" or "refine"
    start: int  # refinement start index; -1 for grid points
    params: tuple[float, ...]
    value: float


@dataclass(frozen=True)
class OptimizationResult:
    argmax: dict[str, float]
    value: float
    grid_argmax: dict[str, float]
    grid_value: float
    trace: tuple[TraceEntry, ...]
    names: tuple[str, ...]

    def write_trace(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["stage", "start", *self.names, "value"])
            for entry in self.trace:
                writer.writerow(
                    [entry.stage, entry.start, *(repr(float(p)) for p in entry.params), repr(float(entry.value))]
                )


def _apply(base: SystemParams, names: Sequence[str], params: Sequence[float]) -> SystemParams:
    system = base
    for name, value in zip(names, params):
        system = system.with_param(name, float(value))
    return system


def _grid_score(system: SystemParams, payload) -> float:
    objective, options = payload
    return objective_value(system, objective, options)


def maximize(
    spec: OptimizationSpec,
    base: SystemParams,
    objective_fn: Optional[Callable[[SystemParams], float]] = None,
    workers: int = 1,
) -> OptimizationResult:
    """Maximize ``spec.objective`` over the free parameters, starting from ``base``.

    ``objective_fn`` replaces the physical objective (useful for testing the
    search itself); it must return ``-inf`` for infeasible points.
    """
    names = spec.names
    lower = np.array([b.lower for b in spec.free])
    upper = np.array([b.upper for b in spec.free])
    width = np.where(upper > lower, upper - lower, 1.0)

    def evaluate(params: Sequence[float]) -> float:
        system = _apply(base, names, params)
        if objective_fn is not None:
            value = float(objective_fn(system))
            return value if math.isfinite(value) else -math.inf
        return objective_value(system, spec.objective, spec.options)

    axes = spec.axes()
    coords = list(itertools.product(*(a.values() for a in axes)))
    if objective_fn is None:
        systems = [_apply(base, names, c) for c in coords]
        values = _evaluate_many(systems, (spec.objective, spec.options), workers, fn=_grid_score)
    else:
        values = [evaluate(c) for c in coords]
    trace = [TraceEntry("grid", -1, tuple(float(x) for x in c), float(v)) for c, v in zip(coords, values)]

    feasible = [(v, c) for v, c in zip(values, coords) if math.isfinite(v)]
    if not feasible:
        raise InfeasibleError("no stable, RWA-valid point on the search grid")
    # Highest value first; ties broken by lexicographic parameter order.
    feasible.sort(key=lambda vc: (-vc[0], tuple(vc[1])))
    grid_value, grid_best = feasible[0]
    best_value, best_point = grid_value, np.array(grid_best, dtype=float)

    rng = np.random.default_rng(spec.seed)
    if spec.starts > 0 and np.any(upper > lower):
        step = 1.0 / max(spec.grid - 1, 1)
        for k, (_, start) in enumerate(feasible[: spec.starts]):
            x0 = (np.array(start, dtype=float) - lower) / width

            def negative(z: np.ndarray, k=k) -> float:
                if np.any(z < 0.0) or np.any(z > 1.0):
                    return math.inf
                params = lower + z * width
                value = evaluate(params)
                trace.append(TraceEntry("refine", k, tuple(float(p) for p in params), float(value)))
                return -value if math.isfinite(value) else math.inf

            # Simplex edges of one grid step, oriented by the seeded generator.
            signs = rng.choice([-1.0, 1.0], size=x0.size)
            simplex = [x0]
            for i in range(x0.size):
                vertex = x0.copy()
                vertex[i] = np.clip(vertex[i] + signs[i] * step, 0.0, 1.0)
                if vertex[i] == x0[i]:
                    vertex[i] = np.clip(x0[i] - signs[i] * step, 0.0, 1.0)
                simplex.append(vertex)
            result = minimize(
                negative,
                x0,
                method="Nelder-Mead",
                options={
                    "initial_simplex": np.array(simplex),
                    "maxfev": spec.max_evals,
                    "xatol": 1e-9,
                    "fatol": 1e-12,
                },
            )
            if np.isfinite(result.fun) and -result.fun > best_value:
                best_value = float(-result.fun)
                best_point = lower + np.clip(result.x, 0.0, 1.0) * width

    return OptimizationResult(
        argmax={n: float(v) for n, v in zip(names, best_point)},
        value=float(best_value),
        grid_argmax={n: float(v) for n, v in zip(names, grid_best)},
        grid_value=float(grid_value),
        trace=tuple(trace),
        names=names,
    )
