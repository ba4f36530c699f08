"""Placement solvers: greedy repair heuristic, simulated annealing, exhaustive
search, plus the closed-form per-task tier rule and transmit-power case rule.

All solvers are deterministic given the scenario seed and may run in parallel
across scenarios (no shared mutable state).
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from enum import Enum
from math import exp, inf

import numpy as np

from .model import (
    BruteForceConfig,
    GraphError,
    ObjectiveMode,
    Placement,
    SAConfig,
    Scenario,
    Tier,
)
from .schedule import (
    TIME_TOL,
    EvalContext,
    ScheduleResult,
    _core_eval,
    _result_from_core,
    _tier_step,
    check_feasibility,
)

_LOCAL = int(Tier.LOCAL)
_FOG = int(Tier.FOG)
_CLOUD = int(Tier.CLOUD)


class SolverError(RuntimeError):
    """A solver could not produce a placement."""


class Infeasible(SolverError):
    """No placement satisfies the constraints (as far as the solver can tell)."""


class RestartsExhausted(SolverError):
    """Annealing found no budget-feasible placement within max_restarts."""


class TooLarge(SolverError):
    """The task count exceeds the exhaustive-search cap."""


@dataclass(frozen=True)
class SolveOutcome:
    """A solver's placement with its full evaluation.

    `feasible` is the verdict of check_feasibility on the returned placement;
    `iterations` counts solver steps (greedy: initial pass plus repair moves,
    annealing: proposals across restarts, exhaustive: evaluated placements).
    """

    placement: Placement
    result: ScheduleResult
    feasible: bool
    iterations: int
    wall_time: float


class PowerRegime(Enum):
    """Which term pins the ready time of an offloaded task."""

    FOG_CASE_I = "fog:upload-bound"
    FOG_CASE_II = "fog:fog-predecessor-bound"
    FOG_CASE_III = "fog:cloud-predecessor-bound"
    CLOUD_CASE_I = "cloud:upload-forward-bound"
    CLOUD_CASE_II = "cloud:cloud-predecessor-bound"
    CLOUD_CASE_III = "cloud:forward-bound"


@dataclass(frozen=True)
class PowerCase:
    """Regime classification plus the delay-optimal transmit power.

    Maximum transmit power minimizes the objective in every regime, so
    `recommended_power` always equals the link's tx_power_max.
    """

    regime: PowerRegime
    recommended_power: float


def decision_rule(tf_local: float, tf_fog: float, tf_cloud: float) -> Tier:
    """Tier with the smallest candidate finish time.

    Ties prefer the cheaper tier: local over fog over cloud.
    """
    if tf_local <= tf_fog and tf_local <= tf_cloud:
        return Tier.LOCAL
    if tf_fog <= tf_cloud:
        return Tier.FOG
    return Tier.CLOUD


def classify_power_case(
    target: Tier,
    *,
    finish_tx: float,
    max_pred_fog: float,
    max_pred_cloud: float,
    forward_time: float = 0.0,
    finish_fwd: float = 0.0,
    tx_power_max: float = 1.0,
) -> PowerCase:
    """Classify which term of the ready-time maximum binds for a task
    offloaded to `target`, and recommend the transmit power.

    Fog target compares (upload completion, latest fog predecessor, latest
    cloud predecessor); cloud target compares (upload + forward, latest cloud
    predecessor, forward completion).  Exact ties resolve to the
    lowest-numbered case.
    """
    target = Tier(target)
    if target is Tier.FOG:
        candidates = (finish_tx, max_pred_fog, max_pred_cloud)
        regimes = (
            PowerRegime.FOG_CASE_I,
            PowerRegime.FOG_CASE_II,
            PowerRegime.FOG_CASE_III,
        )
    elif target is Tier.CLOUD:
        candidates = (finish_tx + forward_time, max_pred_cloud, finish_fwd)
        regimes = (
            PowerRegime.CLOUD_CASE_I,
            PowerRegime.CLOUD_CASE_II,
            PowerRegime.CLOUD_CASE_III,
        )
    else:
        raise ValueError("power cases apply to offloaded tasks only (fog or cloud)")
    best = 0
    for j in (1, 2):
        if candidates[j] > candidates[best]:
            best = j
    return PowerCase(regime=regimes[best], recommended_power=tx_power_max)


def metropolis_accept(delta: float, temperature: float, rng: np.random.Generator) -> bool:
    """Accept a candidate whose objective changed by `delta`.

    Non-worsening moves are always accepted; worsening moves with probability
    exp(-delta / temperature).  Draws from `rng` only for worsening moves.
    """
    if delta <= 0:
        return True
    if temperature <= 0:
        return False
    return rng.random() < exp(-delta / temperature)


def _objective_from_core(core, mode: ObjectiveMode) -> float:
    return core[10] if mode is ObjectiveMode.MAKESPAN else core[11]


def _placement_from_tiers(tiers) -> Placement:
    return Placement({i + 1: Tier(int(t)) for i, t in enumerate(tiers)})


def _outcome(scenario: Scenario, ctx: EvalContext, tiers, iterations, t_start) -> SolveOutcome:
    core = _core_eval(ctx, tiers)
    result = _result_from_core(ctx, tiers, core)
    report = check_feasibility(result, scenario)
    return SolveOutcome(
        placement=_placement_from_tiers(tiers),
        result=result,
        feasible=report.feasible,
        iterations=iterations,
        wall_time=time.perf_counter() - t_start,
    )


def greedy_solve(scenario: Scenario, trace: list | None = None) -> SolveOutcome:
    """Three-phase greedy heuristic.

    Phase 1 walks tasks in id order (ids must already be a topological
    order) and picks, per task: local if the local finish beats both offload
    finishes, otherwise cloud when the cloud price paid for the task covers
    the cloud's execution energy, otherwise fog.

    Phase 2 repairs the budget: while total cost exceeds it, move the cloud
    task with the smallest cloud energy to the fog; once no cloud task is
    left, move the fog task with the smallest fog energy to the device.

    Phase 3 repairs fog utility: while it is negative, pull the cloud task
    with the largest forwarding/execution energy ratio (when that ratio
    exceeds 1) back to the fog; otherwise drop the fog task with the smallest
    revenue/energy ratio to the device.  The full schedule is re-evaluated
    after every move, and each move only ever demotes a task cloud->fog or
    fog->local, so the loop count is bounded by 2N.

    If `trace` is given, (phase, task_id, total_cost) is appended per move.
    Raises Infeasible when all tasks are local and the budget still cannot be
    met.
    """
    t_start = time.perf_counter()
    graph = scenario.graph
    if any(a >= b for a, b in graph.edges):
        raise GraphError(
            "greedy_solve requires task ids to be a topological order "
            "(every edge must go from a lower to a higher id)"
        )
    ctx = EvalContext(graph, scenario.platform)
    n = ctx.n
    budget = scenario.budget

    # Phase 1: initial pass over tasks in order, keeping the convention that
    # only the chosen tier's finish time is non-zero.
    tiers = [0] * n
    tfl = [0.0] * n
    tff = [0.0] * n
    tfc = [0.0] * n
    chosen = [0.0] * n
    iterations = 0
    for i in range(n):
        _, _, _, fin_l = _tier_step(ctx, i, _LOCAL, tfl, tff, tfc, chosen)
        _, _, _, fin_f = _tier_step(ctx, i, _FOG, tfl, tff, tfc, chosen)
        _, _, _, fin_c = _tier_step(ctx, i, _CLOUD, tfl, tff, tfc, chosen)
        if fin_l < fin_f and fin_l < fin_c:
            tiers[i] = _LOCAL
            tfl[i] = fin_l
            chosen[i] = fin_l
        elif ctx.rev_c[i] >= ctx.e_c[i]:
            tiers[i] = _CLOUD
            tfc[i] = fin_c
            chosen[i] = fin_c
        else:
            tiers[i] = _FOG
            tff[i] = fin_f
            chosen[i] = fin_f
        iterations += 1

    core = _core_eval(ctx, tiers)
    total_cost = core[12]

    # Phase 2: budget repair.
    while total_cost > budget + TIME_TOL:
        cloud_idx = [i for i in range(n) if tiers[i] == _CLOUD]
        if cloud_idx:
            y = min(cloud_idx, key=lambda i: ctx.e_c[i])
            tiers[y] = _FOG
            moved = y
        else:
            fog_idx = [i for i in range(n) if tiers[i] == _FOG]
            if not fog_idx:
                raise Infeasible(
                    f"all tasks local, total energy {total_cost} still exceeds "
                    f"budget {budget}"
                )
            z = min(fog_idx, key=lambda i: ctx.e_f[i])
            tiers[z] = _LOCAL
            moved = z
        core = _core_eval(ctx, tiers)
        total_cost = core[12]
        iterations += 1
        if trace is not None:
            trace.append((2, moved + 1, total_cost))

    # Phase 3: fog-utility repair.
    fog_util = core[13]
    while fog_util < -TIME_TOL:
        cloud_idx = [i for i in range(n) if tiers[i] == _CLOUD]
        heavy = [i for i in cloud_idx if ctx.e_s[i] > ctx.e_f[i]]
        if heavy:
            u = max(heavy, key=lambda i: ctx.e_s[i] / ctx.e_f[i] if ctx.e_f[i] > 0 else inf)
            tiers[u] = _FOG
            moved = u
        else:
            fog_idx = [i for i in range(n) if tiers[i] == _FOG]
            if not fog_idx:
                # No move can raise fog utility; return as-is, the
                # feasibility check will flag the utility constraint.
                break
            v = min(
                fog_idx,
                key=lambda i: ctx.rev_f[i] / ctx.e_f[i] if ctx.e_f[i] > 0 else inf,
            )
            tiers[v] = _LOCAL
            moved = v
        core = _core_eval(ctx, tiers)
        fog_util = core[13]
        iterations += 1
        if trace is not None:
            trace.append((3, moved + 1, core[12]))

    return _outcome(scenario, ctx, tiers, iterations, t_start)


def sa_solve(scenario: Scenario) -> SolveOutcome:
    """Simulated annealing over tier codes {1, 2, 3}.

    Starts from a uniformly random placement.  Each iteration perturbs one
    uniformly chosen task by a uniform integer step in
    [-neighbor_range, neighbor_range] clamped to [1, 3], cools the
    temperature, and applies the Metropolis rule to the objective change.
    The annealing loop runs while the temperature exceeds t_stop AND both
    utilities of the current placement are non-negative, so a placement that
    turns a utility negative stops the run early.  If the final placement
    exceeds the budget the whole process restarts from a fresh random
    placement, up to max_restarts times; restart k draws from the dedicated
    RNG stream (seed, k).
    """
    t_start = time.perf_counter()
    cfg = scenario.solver_config
    if not isinstance(cfg, SAConfig):
        raise TypeError("sa_solve needs a Scenario carrying an SAConfig")
    ctx = EvalContext(scenario.graph, scenario.platform)
    n = ctx.n
    mode = scenario.objective_mode
    budget = scenario.budget
    total_iterations = 0

    for restart in range(cfg.max_restarts + 1):
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=scenario.seed, spawn_key=(restart,))
        )
        tiers = [int(v) for v in rng.integers(1, 4, size=n)]
        core = _core_eval(ctx, tiers)
        obj_cur = _objective_from_core(core, mode)
        cost_cur = core[12]
        u_f = 0.0
        u_c = 0.0
        tem = cfg.t0
        while tem > cfg.t_stop and u_f >= 0 and u_c >= 0:
            step = int(rng.integers(-cfg.neighbor_range, cfg.neighbor_range + 1))
            idx = int(rng.integers(0, n))
            cand = list(tiers)
            cand[idx] = min(_CLOUD, max(_LOCAL, cand[idx] + step))
            tem *= cfg.cool
            cand_core = _core_eval(ctx, cand)
            delta = _objective_from_core(cand_core, mode) - obj_cur
            if metropolis_accept(delta, tem, rng):
                tiers = cand
                core = cand_core
                obj_cur = _objective_from_core(core, mode)
                cost_cur = core[12]
                u_f = core[13]
                u_c = core[14]
            total_iterations += 1
        if cost_cur <= budget + TIME_TOL:
            return _outcome(scenario, ctx, tiers, total_iterations, t_start)

    raise RestartsExhausted(
        f"no budget-feasible placement in {cfg.max_restarts + 1} annealing runs"
    )


def brute_force_solve(scenario: Scenario) -> SolveOutcome:
    """Enumerate all 3^N placements and return the feasible optimum.

    A placement is feasible when both utilities are non-negative and total
    cost is within budget (precedence constraints hold by construction of
    the evaluator).  Ties keep the first optimum in lexicographic placement
    order (local < fog < cloud, task order ascending).  Raises TooLarge above
    the configured cap and Infeasible when nothing qualifies.
    """
    t_start = time.perf_counter()
    cfg = scenario.solver_config
    cap = cfg.cap if isinstance(cfg, BruteForceConfig) else BruteForceConfig().cap
    n = len(scenario.graph)
    if n > cap:
        raise TooLarge(f"{n} tasks exceed the exhaustive-search cap of {cap}")
    ctx = EvalContext(scenario.graph, scenario.platform)
    mode = scenario.objective_mode
    budget = scenario.budget

    best_tiers = None
    best_obj = inf
    count = 0
    for tiers in itertools.product((_LOCAL, _FOG, _CLOUD), repeat=n):
        count += 1
        core = _core_eval(ctx, tiers)
        if core[13] < -TIME_TOL or core[14] < -TIME_TOL:
            continue
        if core[12] > budget + TIME_TOL:
            continue
        obj = _objective_from_core(core, mode)
        if obj < best_obj:
            best_obj = obj
            best_tiers = tiers
    if best_tiers is None:
        raise Infeasible("no placement satisfies the utility and budget constraints")
    return _outcome(scenario, ctx, list(best_tiers), count, t_start)


def solve(scenario: Scenario) -> SolveOutcome:
    """Dispatch on the scenario's solver configuration."""
    cfg = scenario.solver_config
    if isinstance(cfg, SAConfig):
        return sa_solve(scenario)
    if isinstance(cfg, BruteForceConfig):
        return brute_force_solve(scenario)
    return greedy_solve(scenario)
