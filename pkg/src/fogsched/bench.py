"""Experiment harness: seeded runs, parameter sweeps, solver comparison and
scenario diagnostics, all emitting deterministic CSV.

Sweep cells (sweep value x solver x repetition) are independent and may be
computed by a process pool (FOGSCHED_WORKERS, default: available cores); rows
are sorted by (sweep_value, solver, seed) before the single writer emits
them, so parallelism never changes the output.  Sweep CSV stores wall_time as
0.0 to keep files byte-identical across runs; `run` and `compare` report
measured wall time.
"""
from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from . import solvers as _solvers
from .model import (
    BruteForceConfig,
    CycleDetected,
    DanglingEdge,
    GraphError,
    GreedyConfig,
    SAConfig,
    Scenario,
    TaskGraph,
    TaskSpec,
    validate_graph,
)
from .scenario_io import load_scenario, resolve_scenario_path
from .schedule import check_feasibility, evaluate

SWEEP_PARAMETERS = ("data_size", "budget", "fog_price", "task_count")
SOLVER_NAMES = ("greedy", "sa", "brute")

CSV_COLUMNS = (
    "scenario_id",
    "solver",
    "seed",
    "n_tasks",
    "sweep_value",
    "makespan",
    "sum_finish",
    "total_cost",
    "fog_utility",
    "cloud_utility",
    "n_local",
    "n_fog",
    "n_cloud",
    "feasible",
    "iterations",
    "wall_time",
    "error",
)


@dataclass(frozen=True)
class ResultRow:
    """One solve, flattened for the CSV tables."""

    scenario_id: str
    solver: str
    seed: int
    n_tasks: int
    sweep_value: float
    makespan: float
    sum_finish: float
    total_cost: float
    fog_utility: float
    cloud_utility: float
    n_local: int
    n_fog: int
    n_cloud: int
    feasible: bool
    iterations: int
    wall_time: float
    error: str = ""


@dataclass(frozen=True)
class SweepSpec:
    """A one-parameter sweep: `steps` evenly spaced values in [start, stop].

    `data_size` scales every task's workload and data size by the sweep value
    (a multiplicative factor); `budget` and `fog_price` set those parameters
    directly; `task_count` regenerates a chain of round(value) tasks whose
    workload = data_size is drawn i.i.d. uniformly from `task_size_range`.
    """

    parameter: str
    start: float
    stop: float
    steps: int
    reps: int = 1
    solvers: tuple[str, ...] = ("greedy",)
    task_size_range: tuple[float, float] = (100.0, 1000.0)

    def __post_init__(self):
        if self.parameter not in SWEEP_PARAMETERS:
            raise ValueError(f"parameter must be one of {SWEEP_PARAMETERS}")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if self.start > self.stop:
            raise ValueError("start must be <= stop")
        bad = [s for s in self.solvers if s not in SOLVER_NAMES]
        if bad:
            raise ValueError(f"unknown solvers {bad}")

    def values(self) -> list[float]:
        if self.steps == 1:
            return [float(self.start)]
        return [float(v) for v in np.linspace(self.start, self.stop, self.steps)]


@dataclass(frozen=True)
class Diagnostics:
    """Structural report from `validate`."""

    errors: tuple[str, ...]
    warnings: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.errors


def _solver_config(name: str, scenario: Scenario):
    if name == "greedy":
        return GreedyConfig()
    if name == "sa":
        cfg = scenario.solver_config
        return cfg if isinstance(cfg, SAConfig) else SAConfig()
    if name == "brute":
        cfg = scenario.solver_config
        return cfg if isinstance(cfg, BruteForceConfig) else BruteForceConfig()
    raise ValueError(f"unknown solver {name!r}")


def _solver_name(scenario: Scenario) -> str:
    cfg = scenario.solver_config
    if isinstance(cfg, SAConfig):
        return "sa"
    if isinstance(cfg, BruteForceConfig):
        return "brute"
    return "greedy"


def _solve_one(
    scenario: Scenario,
    scenario_id: str,
    solver: str,
    seed: int,
    sweep_value: float,
    verify: bool,
) -> ResultRow:
    scn = replace(
        scenario, seed=seed, solver_config=_solver_config(solver, scenario)
    )
    n = len(scn.graph)
    try:
        outcome = _solvers.solve(scn)
    except (_solvers.SolverError, GraphError) as exc:
        return ResultRow(
            scenario_id=scenario_id,
            solver=solver,
            seed=seed,
            n_tasks=n,
            sweep_value=sweep_value,
            makespan=math.nan,
            sum_finish=math.nan,
            total_cost=math.nan,
            fog_utility=math.nan,
            cloud_utility=math.nan,
            n_local=0,
            n_fog=0,
            n_cloud=0,
            feasible=False,
            iterations=0,
            wall_time=0.0,
            error=f"{type(exc).__name__}: {exc}",
        )
    if verify and outcome.feasible:
        again = evaluate(scn.graph, outcome.placement, scn.platform, scn.objective_mode)
        report = check_feasibility(again, scn)
        if not report.feasible:
            raise AssertionError(
                f"verification failed for {scenario_id}/{solver}/{seed}: "
                f"{report.violations}"
            )
    n_local, n_fog, n_cloud = outcome.placement.counts()
    r = outcome.result
    return ResultRow(
        scenario_id=scenario_id,
        solver=solver,
        seed=seed,
        n_tasks=n,
        sweep_value=sweep_value,
        makespan=r.makespan,
        sum_finish=r.sum_finish,
        total_cost=r.total_cost,
        fog_utility=r.fog_utility,
        cloud_utility=r.cloud_utility,
        n_local=n_local,
        n_fog=n_fog,
        n_cloud=n_cloud,
        feasible=outcome.feasible,
        iterations=outcome.iterations,
        wall_time=outcome.wall_time,
    )


def run(
    scenario_path: Union[str, Path],
    solver: Optional[str] = None,
    seed: Optional[int] = None,
    reps: int = 1,
    verify: bool = False,
) -> list[ResultRow]:
    """Solve one scenario `reps` times with seeds seed, seed+1, ...

    Solver errors are recorded per row (feasible=false, error column) rather
    than aborting the batch.
    """
    path = resolve_scenario_path(scenario_path)
    scenario = load_scenario(path)
    solver_name = solver or _solver_name(scenario)
    base_seed = scenario.seed if seed is None else seed
    scenario_id = path.stem
    return [
        _solve_one(scenario, scenario_id, solver_name, base_seed + r, math.nan, verify)
        for r in range(reps)
    ]


def _chain_graph(sizes: Sequence[float]) -> TaskGraph:
    tasks = [
        TaskSpec(id=i + 1, workload=float(s), data_size=float(s))
        for i, s in enumerate(sizes)
    ]
    edges = [(i, i + 1) for i in range(1, len(tasks))]
    return TaskGraph(tasks, edges)


def _apply_sweep_value(
    base: Scenario, spec: SweepSpec, value: float, value_index: int
) -> Scenario:
    if spec.parameter == "data_size":
        tasks = [
            TaskSpec(id=t.id, workload=t.workload * value, data_size=t.data_size * value)
            for t in base.graph.tasks
        ]
        return replace(base, graph=TaskGraph(tasks, base.graph.edges))
    if spec.parameter == "budget":
        return replace(base, budget=value)
    if spec.parameter == "fog_price":
        fog = replace(base.platform.fog, price=value)
        return replace(base, platform=replace(base.platform, fog=fog))
    # task_count: fresh chain per sweep value, sizes from a dedicated stream
    n = max(1, int(round(value)))
    rng = np.random.default_rng(
        np.random.SeedSequence(entropy=base.seed, spawn_key=(1000, value_index))
    )
    lo, hi = spec.task_size_range
    sizes = rng.uniform(lo, hi, size=n)
    return replace(base, graph=_chain_graph(sizes))


def _sweep_cell(args) -> ResultRow:
    base, spec, value, value_index, solver, rep, verify, scenario_id = args
    scenario = _apply_sweep_value(base, spec, value, value_index)
    return _solve_one(scenario, scenario_id, solver, base.seed + rep, value, verify)


def _worker_count(workers: Optional[int]) -> int:
    if workers is not None:
        return max(1, workers)
    env = os.environ.get("FOGSCHED_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def sweep(
    scenario_path: Union[str, Path],
    spec: SweepSpec,
    out_path: Union[str, Path],
    verify: bool = False,
    workers: Optional[int] = None,
) -> list[ResultRow]:
    """Run a parameter sweep and write one CSV file.

    The source scenario file is never modified; each cell derives a fresh
    scenario from it.  Output rows are sorted by (sweep_value, solver, seed).
    """
    path = resolve_scenario_path(scenario_path)
    base = load_scenario(path)
    scenario_id = path.stem
    cells = [
        (base, spec, value, vi, solver, rep, verify, scenario_id)
        for vi, value in enumerate(spec.values())
        for solver in spec.solvers
        for rep in range(spec.reps)
    ]
    n_workers = _worker_count(workers)
    if n_workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            rows = list(pool.map(_sweep_cell, cells, chunksize=8))
    else:
        rows = [_sweep_cell(c) for c in cells]
    rows.sort(key=lambda r: (r.sweep_value, r.solver, r.seed))
    # the file zeroes the wall-clock column so identical inputs give
    # byte-identical output; callers still get the measured values
    write_csv([replace(r, wall_time=0.0) for r in rows], out_path)
    return rows


def compare(
    scenario_path: Union[str, Path], seed: Optional[int] = None, reps: int = 1
) -> dict:
    """Run greedy, sa and brute on the same scenario and report mean makespan
    per solver and the relative gap (solver - brute) / brute."""
    path = resolve_scenario_path(scenario_path)
    scenario = load_scenario(path)
    base_seed = scenario.seed if seed is None else seed
    scenario_id = path.stem
    summary: dict = {"scenario_id": scenario_id, "seed": base_seed, "reps": reps, "solvers": {}}
    means: dict[str, float] = {}
    for solver in SOLVER_NAMES:
        rows = [
            _solve_one(scenario, scenario_id, solver, base_seed + r, math.nan, False)
            for r in range(reps)
        ]
        errors = sorted({r.error for r in rows if r.error})
        mean_makespan = (
            math.nan if errors else sum(r.makespan for r in rows) / len(rows)
        )
        means[solver] = mean_makespan
        summary["solvers"][solver] = {
            "mean_makespan": mean_makespan,
            "mean_total_cost": (
                math.nan if errors else sum(r.total_cost for r in rows) / len(rows)
            ),
            "feasible_fraction": sum(1 for r in rows if r.feasible) / len(rows),
            "mean_wall_time": sum(r.wall_time for r in rows) / len(rows),
            "errors": errors,
        }
    brute_mean = means["brute"]
    for solver in SOLVER_NAMES:
        gap = math.nan
        if not math.isnan(brute_mean) and brute_mean != 0 and not math.isnan(means[solver]):
            gap = (means[solver] - brute_mean) / brute_mean
        summary["solvers"][solver]["gap_vs_brute"] = gap
    return summary


def validate(scenario_path: Union[str, Path]) -> Diagnostics:
    """Structural diagnostics: graph checks, parameter-range warnings and a
    budget-versus-minimum-cost prescreen.  Parse failures raise ParseError."""
    path = resolve_scenario_path(scenario_path)
    text = path.read_text(encoding="utf-8")
    errors: list[str] = []
    warnings_: list[str] = []

    import warnings as _warnings

    from .scenario_io import parse_scenario

    with _warnings.catch_warnings(record=True) as caught:
        _warnings.simplefilter("always")
        try:
            scenario = parse_scenario(text)
        except (CycleDetected, DanglingEdge) as exc:
            errors.append(f"{type(exc).__name__}: {exc}")
            return Diagnostics(errors=tuple(errors), warnings=tuple(warnings_))
        # ParseError propagates: an unreadable file is not a diagnosable scenario.
    for w in caught:
        warnings_.append(str(w.message))

    for label, eps in (
        ("fog", scenario.platform.fog.epsilon),
        ("cloud", scenario.platform.cloud.epsilon),
    ):
        if not 2.5 <= eps <= 3.0:
            msg = f"{label} power exponent {eps} outside [2.5, 3]"
            if msg not in " ".join(warnings_):
                warnings_.append(msg)

    try:
        validate_graph(scenario.graph)
    except GraphError as exc:  # unreachable after parse, kept for safety
        errors.append(f"{type(exc).__name__}: {exc}")

    if math.isfinite(scenario.budget):
        from .costs import task_costs

        floor = 0.0
        for t in scenario.graph.tasks:
            c = task_costs(t, scenario.platform)
            floor += min(
                c.local_energy,
                scenario.platform.fog.price * t.data_size,
                scenario.platform.cloud.price * t.data_size,
            )
        if floor > scenario.budget:
            warnings_.append(
                f"likely infeasible: cheapest per-task assignment already costs "
                f"{floor!r}, above the budget {scenario.budget!r}"
            )

    return Diagnostics(errors=tuple(errors), warnings=tuple(warnings_))


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_csv(rows: Sequence[ResultRow], path: Union[str, Path]) -> Path:
    """Write rows in the fixed column order; UTF-8, LF endings, header row."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([_format_value(getattr(row, col)) for col in CSV_COLUMNS])
    return path
