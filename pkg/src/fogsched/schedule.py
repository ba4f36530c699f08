"""Placement evaluation: precedence recursions, delay, device cost, utilities.

Given a placement, the evaluator walks the DAG in topological order and
derives every ready/finish time:

* a local task becomes ready when all predecessors have finished at their
  assigned tiers and finishes after its local execution time;
* a fog task's upload completes at uplink_time + latest locally-placed
  predecessor finish (uploads of consecutive offloaded tasks overlap); it
  becomes ready at max(upload done, latest fog predecessor, latest cloud
  predecessor) and finishes after its fog execution time;
* a cloud task's data is first uploaded to the fog, then forwarded; it
  becomes ready at max(upload done + forward time, latest cloud predecessor,
  forward of latest fog predecessor) and finishes after its cloud execution
  time.

Finish-time fields for tiers a task is not assigned to are stored as 0, so
predecessor maxima can be taken uniformly.  Tasks without predecessors take 0
for every predecessor maximum.  There is no machine contention: any number of
tasks may execute concurrently on one tier, only precedence serializes work.

Everything is pure: identical inputs give bit-identical results.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import costs as _costs
from .model import (
    ObjectiveMode,
    Placement,
    Platform,
    Scenario,
    TaskGraph,
    Tier,
    validate_graph,
    validate_placement,
)

# Absolute tolerance for all feasibility comparisons on times, costs and
# utilities (64-bit floats throughout).
TIME_TOL = 1e-9

_LOCAL = int(Tier.LOCAL)
_FOG = int(Tier.FOG)
_CLOUD = int(Tier.CLOUD)


@dataclass(frozen=True)
class TaskSchedule:
    """Per-task slice of a schedule: ready/finish times and device cost."""

    task_id: int
    tier: Tier
    ready_local: float
    ready_fog: float
    ready_cloud: float
    finish_local: float
    finish_tx: float
    finish_fog: float
    finish_fwd: float
    finish_cloud: float
    chosen_finish: float
    cost: float


@dataclass(frozen=True)
class ScheduleResult:
    """Full evaluation of one placement."""

    tasks: tuple[TaskSchedule, ...]
    makespan: float
    sum_finish: float
    total_cost: float
    fog_utility: float
    cloud_utility: float

    def task(self, task_id: int) -> TaskSchedule:
        return self.tasks[task_id - 1]


@dataclass(frozen=True)
class FeasibilityReport:
    """Outcome of the seven constraint checks."""

    c1_ok: bool
    c2_ok: bool
    c3_ok: bool
    c4_ok: bool
    c5_ok: bool
    c6_ok: bool
    c7_ok: bool
    violations: tuple[tuple[str, int, str], ...] = ()

    @property
    def feasible(self) -> bool:
        return (
            self.c1_ok
            and self.c2_ok
            and self.c3_ok
            and self.c4_ok
            and self.c5_ok
            and self.c6_ok
            and self.c7_ok
        )


class EvalContext:
    """Per-scenario precomputation shared by the evaluator and the solvers.

    Task ids are 1..N, so index i corresponds to task id i+1.
    """

    __slots__ = (
        "n",
        "topo",
        "preds",
        "sinks",
        "data",
        "tau_l",
        "tau_t",
        "tau_f",
        "tau_r",
        "tau_c",
        "e_l",
        "e_f",
        "e_c",
        "e_s",
        "rev_f",
        "rev_c",
        "task_costs",
    )

    def __init__(self, graph: TaskGraph, platform: Platform):
        order = validate_graph(graph)
        n = len(graph)
        self.n = n
        self.topo = tuple(i - 1 for i in order)
        preds: list[list[int]] = [[] for _ in range(n)]
        for a, b in graph.edges:
            preds[b - 1].append(a - 1)
        self.preds = tuple(tuple(sorted(p)) for p in preds)
        self.sinks = tuple(i - 1 for i in graph.sinks())
        per_task = tuple(_costs.task_costs(t, platform) for t in graph.tasks)
        self.task_costs = per_task
        self.data = tuple(t.data_size for t in graph.tasks)
        self.tau_l = tuple(c.local_time for c in per_task)
        self.tau_t = tuple(c.uplink_time for c in per_task)
        self.tau_f = tuple(c.fog_time for c in per_task)
        self.tau_r = tuple(c.fog_cloud_time for c in per_task)
        self.tau_c = tuple(c.cloud_time for c in per_task)
        self.e_l = tuple(c.local_energy for c in per_task)
        self.e_f = tuple(c.fog_energy for c in per_task)
        self.e_c = tuple(c.cloud_energy for c in per_task)
        self.e_s = tuple(c.fog_cloud_energy for c in per_task)
        self.rev_f = tuple(platform.fog.price * d for d in self.data)
        self.rev_c = tuple(platform.cloud.price * d for d in self.data)


def _tier_step(ctx, i, tier, tfl, tff, tfc, chosen):
    """Ready/finish times of task i at `tier`, given predecessor finish arrays.

    Returns (ready, uplink_finish, forward_finish, finish); the two transfer
    finishes are 0 where the tier involves no such transfer.
    """
    ps = ctx.preds[i]
    if tier == _LOCAL:
        ready = 0.0
        for k in ps:
            v = chosen[k]
            if v > ready:
                ready = v
        return ready, 0.0, 0.0, ctx.tau_l[i] + ready
    ml = 0.0
    mf = 0.0
    mc = 0.0
    for k in ps:
        v = tfl[k]
        if v > ml:
            ml = v
        v = tff[k]
        if v > mf:
            mf = v
        v = tfc[k]
        if v > mc:
            mc = v
    up = ctx.tau_t[i] + ml
    if tier == _FOG:
        ready = up
        if mf > ready:
            ready = mf
        if mc > ready:
            ready = mc
        return ready, up, 0.0, ctx.tau_f[i] + ready
    fwd = ctx.tau_r[i] + mf
    ready = up + ctx.tau_r[i]
    if mc > ready:
        ready = mc
    if fwd > ready:
        ready = fwd
    return ready, up, fwd, ctx.tau_c[i] + ready


def _core_eval(ctx: EvalContext, tiers) -> tuple:
    """Evaluate one placement given as a 0-indexed sequence of tier codes.

    Returns (trl, trf, trc, tft, tfr, tfl, tff, tfc, chosen, cost, makespan,
    sum_finish, total_cost, fog_utility, cloud_utility).
    """
    n = ctx.n
    trl = [0.0] * n
    trf = [0.0] * n
    trc = [0.0] * n
    tft = [0.0] * n
    tfr = [0.0] * n
    tfl = [0.0] * n
    tff = [0.0] * n
    tfc = [0.0] * n
    chosen = [0.0] * n
    cost = [0.0] * n
    e_l = ctx.e_l
    rev_f = ctx.rev_f
    rev_c = ctx.rev_c
    for i in ctx.topo:
        t = tiers[i]
        ready, up, fwd, fin = _tier_step(ctx, i, t, tfl, tff, tfc, chosen)
        if t == _LOCAL:
            trl[i] = ready
            tfl[i] = fin
            cost[i] = e_l[i]
        elif t == _FOG:
            trf[i] = ready
            tft[i] = up
            tff[i] = fin
            cost[i] = rev_f[i]
        else:
            trc[i] = ready
            tft[i] = up
            tfr[i] = fwd
            tfc[i] = fin
            cost[i] = rev_c[i]
        chosen[i] = fin
    makespan = 0.0
    for i in ctx.sinks:
        if chosen[i] > makespan:
            makespan = chosen[i]
    u_f = 0.0
    u_c = 0.0
    for i in range(n):
        t = tiers[i]
        if t == _FOG:
            u_f += rev_f[i] - ctx.e_f[i]
        elif t == _CLOUD:
            u_f -= ctx.e_s[i]
            u_c += rev_c[i] - ctx.e_c[i]
    return (
        trl,
        trf,
        trc,
        tft,
        tfr,
        tfl,
        tff,
        tfc,
        chosen,
        cost,
        makespan,
        sum(chosen),
        sum(cost),
        u_f,
        u_c,
    )


def evaluate(
    graph: TaskGraph,
    placement: Placement,
    platform: Platform,
    mode: ObjectiveMode = ObjectiveMode.MAKESPAN,
) -> ScheduleResult:
    """Compute the full schedule of `placement` on `platform`.

    `mode` does not change any computed value (both makespan and the sum of
    finish times are always reported); it is accepted so call sites can carry
    the scenario's objective through uniformly.
    """
    del mode
    validate_placement(placement, graph)
    ctx = EvalContext(graph, platform)
    tiers = [int(placement.assignment[t.id]) for t in graph.tasks]
    return _result_from_core(ctx, tiers, _core_eval(ctx, tiers))


def _result_from_core(ctx: EvalContext, tiers, core) -> ScheduleResult:
    (trl, trf, trc, tft, tfr, tfl, tff, tfc, chosen, cost, mk, sf, tc, uf, uc) = core
    rows = tuple(
        TaskSchedule(
            task_id=i + 1,
            tier=Tier(tiers[i]),
            ready_local=trl[i],
            ready_fog=trf[i],
            ready_cloud=trc[i],
            finish_local=tfl[i],
            finish_tx=tft[i],
            finish_fog=tff[i],
            finish_fwd=tfr[i],
            finish_cloud=tfc[i],
            chosen_finish=chosen[i],
            cost=cost[i],
        )
        for i in range(ctx.n)
    )
    return ScheduleResult(
        tasks=rows,
        makespan=mk,
        sum_finish=sf,
        total_cost=tc,
        fog_utility=uf,
        cloud_utility=uc,
    )


def objective_value(result: ScheduleResult, mode: ObjectiveMode) -> float:
    """The scalar minimized by the solvers under the given objective mode."""
    if ObjectiveMode(mode) is ObjectiveMode.MAKESPAN:
        return result.makespan
    return result.sum_finish


def task_cost(
    task, tier: Tier, costs: _costs.TaskCosts, fog, cloud
) -> float:
    """Device-side cost of one task: its local energy, or the fog/cloud
    per-bit price times its data size."""
    tier = Tier(tier)
    if tier is Tier.LOCAL:
        return costs.local_energy
    if tier is Tier.FOG:
        return fog.price * task.data_size
    return cloud.price * task.data_size


def fog_utility(placement: Placement, graph: TaskGraph, per_task_costs, fog) -> float:
    """Fog revenue minus fog expenses.

    Earns price*data_size for each fog-placed task, pays its execution energy
    there, and pays the forwarding energy of every cloud-placed task.
    `per_task_costs` maps task id -> TaskCosts.
    """
    total = 0.0
    for t in graph.tasks:
        tier = placement.assignment[t.id]
        c = per_task_costs[t.id]
        if tier is Tier.FOG:
            total += fog.price * t.data_size - c.fog_energy
        elif tier is Tier.CLOUD:
            total -= c.fog_cloud_energy
    return total


def cloud_utility(placement: Placement, graph: TaskGraph, per_task_costs, cloud) -> float:
    """Cloud revenue minus cloud execution energy, over cloud-placed tasks."""
    total = 0.0
    for t in graph.tasks:
        if placement.assignment[t.id] is Tier.CLOUD:
            total += cloud.price * t.data_size - per_task_costs[t.id].cloud_energy
    return total


def check_feasibility(result: ScheduleResult, scenario: Scenario) -> FeasibilityReport:
    """Verify the seven constraints on an evaluated schedule.

    C1-C3 re-check each ready time against the precedence terms that define
    it, at the task's assigned tier (fields of unassigned tiers are 0 by
    convention and carry no constraint).  C4 checks both utilities, C5/C6 are
    guaranteed by the Placement type, C7 compares total cost to the budget.
    All comparisons use absolute tolerance TIME_TOL.
    """
    graph = scenario.graph
    ctx = EvalContext(graph, scenario.platform)
    rows = result.tasks
    violations: list[tuple[str, int, str]] = []

    def _chosen(k: int) -> float:
        return rows[k].chosen_finish

    c1 = c2 = c3 = True
    for t in graph.tasks:
        i = t.id - 1
        row = rows[i]
        ps = ctx.preds[i]
        if row.tier is Tier.LOCAL:
            for k in ps:
                if row.ready_local < _chosen(k) - TIME_TOL:
                    c1 = False
                    violations.append(
                        ("C1", t.id, f"ready_local {row.ready_local} < finish of task {k + 1}")
                    )
        elif row.tier is Tier.FOG:
            if row.ready_fog < row.finish_tx - TIME_TOL:
                c2 = False
                violations.append(("C2", t.id, "ready_fog precedes upload completion"))
            for k in ps:
                if row.ready_fog < rows[k].finish_fog - TIME_TOL:
                    c2 = False
                    violations.append(
                        ("C2", t.id, f"ready_fog precedes fog finish of task {k + 1}")
                    )
                if row.ready_fog < rows[k].finish_cloud - TIME_TOL:
                    c2 = False
                    violations.append(
                        ("C2", t.id, f"ready_fog precedes cloud finish of task {k + 1}")
                    )
        else:
            if row.ready_cloud < row.finish_tx + ctx.tau_r[i] - TIME_TOL:
                c3 = False
                violations.append(("C3", t.id, "ready_cloud precedes upload + forward"))
            if row.ready_cloud < row.finish_fwd - TIME_TOL:
                c3 = False
                violations.append(("C3", t.id, "ready_cloud precedes forward completion"))
            for k in ps:
                if row.ready_cloud < rows[k].finish_cloud - TIME_TOL:
                    c3 = False
                    violations.append(
                        ("C3", t.id, f"ready_cloud precedes cloud finish of task {k + 1}")
                    )

    c4 = True
    if result.fog_utility < -TIME_TOL:
        c4 = False
        violations.append(("C4", 0, f"fog utility {result.fog_utility} < 0"))
    if result.cloud_utility < -TIME_TOL:
        c4 = False
        violations.append(("C4", 0, f"cloud utility {result.cloud_utility} < 0"))

    # C5 (one tier per task) and C6 (binary indicators) hold structurally:
    # TaskSchedule stores a single Tier per task.
    c5 = c6 = True

    c7 = True
    if result.total_cost > scenario.budget + TIME_TOL:
        c7 = False
        violations.append(
            ("C7", 0, f"total cost {result.total_cost} exceeds budget {scenario.budget}")
        )

    return FeasibilityReport(
        c1_ok=c1,
        c2_ok=c2,
        c3_ok=c3,
        c4_ok=c4,
        c5_ok=c5,
        c6_ok=c6,
        c7_ok=c7,
        violations=tuple(violations),
    )
