"""Domain types for device/fog/cloud offloading of DAG-structured applications.

Every task of an application carries a workload (CPU cycles) and an input data
size (bits); a placement assigns each task to exactly one execution tier.  All
physical quantities are dimensionless model units, no SI calibration is
implied.  Types are immutable after construction and safe to share across
parallel workers.
"""
from __future__ import annotations

import heapq
import math
import warnings
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Mapping, Optional, Union


class Tier(IntEnum):
    """Execution tier of a task. Codes match the {1,2,3} policy encoding."""

    LOCAL = 1
    FOG = 2
    CLOUD = 3


class ObjectiveMode(str, Enum):
    """Objective minimized by the solvers."""

    MAKESPAN = "makespan"
    SUM_FINISH = "sum_finish"


class GraphError(ValueError):
    """Structural problem in a task graph."""


class CycleDetected(GraphError):
    """The task graph contains a directed cycle."""


class DanglingEdge(GraphError):
    """An edge references a task id that does not exist."""


class PlacementError(ValueError):
    """A placement does not cover the task graph correctly."""


class MissingTask(PlacementError):
    """A task of the graph has no tier assigned."""


class UnknownTask(PlacementError):
    """The placement mentions a task id not present in the graph."""


@dataclass(frozen=True)
class TaskSpec:
    """One sub-task: workload in CPU cycles, input data size in bits."""

    id: int
    workload: float
    data_size: float

    def __post_init__(self):
        if self.workload < 0:
            raise ValueError(f"task {self.id}: workload must be >= 0")
        if self.data_size < 0:
            raise ValueError(f"task {self.id}: data_size must be >= 0")


@dataclass(frozen=True)
class TaskGraph:
    """Application DAG. Task ids are 1..N; edges are (pred_id, succ_id) pairs.

    Construction checks ids only; acyclicity and edge endpoints are verified
    by :func:`validate_graph`, which scenario loading always calls.
    """

    tasks: tuple[TaskSpec, ...]
    edges: tuple[tuple[int, int], ...]

    def __init__(self, tasks, edges=()):
        object.__setattr__(self, "tasks", tuple(tasks))
        object.__setattr__(
            self, "edges", tuple(sorted({(int(a), int(b)) for a, b in edges}))
        )
        ids = [t.id for t in self.tasks]
        n = len(ids)
        if sorted(ids) != list(range(1, n + 1)):
            raise GraphError("task ids must be exactly 1..N and unique")

    def __len__(self) -> int:
        return len(self.tasks)

    def task(self, task_id: int) -> TaskSpec:
        for t in self.tasks:
            if t.id == task_id:
                return t
        raise KeyError(task_id)

    def predecessors(self, task_id: int) -> tuple[int, ...]:
        return tuple(a for a, b in self.edges if b == task_id)

    def successors(self, task_id: int) -> tuple[int, ...]:
        return tuple(b for a, b in self.edges if a == task_id)

    def sinks(self) -> tuple[int, ...]:
        with_succ = {a for a, _ in self.edges}
        return tuple(t.id for t in self.tasks if t.id not in with_succ)


def validate_graph(graph: TaskGraph) -> list[int]:
    """Return a topological order of the task ids.

    The order is deterministic (smallest ready id first).  Raises
    :class:`DanglingEdge` if an edge names an unknown task and
    :class:`CycleDetected` if no topological order exists.
    """
    ids = {t.id for t in graph.tasks}
    indeg = {i: 0 for i in ids}
    succs = {i: [] for i in ids}
    for a, b in graph.edges:
        if a not in ids or b not in ids:
            raise DanglingEdge(f"edge ({a}, {b}) references an unknown task")
        indeg[b] += 1
        succs[a].append(b)
    ready = [i for i in sorted(ids) if indeg[i] == 0]
    heapq.heapify(ready)
    order: list[int] = []
    while ready:
        i = heapq.heappop(ready)
        order.append(i)
        for j in succs[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                heapq.heappush(ready, j)
    if len(order) != len(ids):
        stuck = sorted(i for i in ids if indeg[i] > 0)
        raise CycleDetected(f"graph has a directed cycle through tasks {stuck}")
    return order


@dataclass(frozen=True)
class FogSpec:
    """Fog node: CPU speed, power model (alpha*cpu^epsilon + beta), per-bit price."""

    cpu: float
    alpha: float
    beta: float
    epsilon: float = 3.0
    price: float = 0.0

    def __post_init__(self):
        if self.cpu <= 0:
            raise ValueError("fog cpu must be > 0")
        if self.price < 0:
            raise ValueError("fog price must be >= 0")
        if not 2.5 <= self.epsilon <= 3.0:
            warnings.warn(
                f"fog power exponent {self.epsilon} outside the usual [2.5, 3] range",
                stacklevel=2,
            )


@dataclass(frozen=True)
class CloudSpec:
    """Cloud server: CPU speed, power model (alpha*cpu^epsilon + beta), per-bit price."""

    cpu: float
    alpha: float
    beta: float
    epsilon: float = 3.0
    price: float = 0.0

    def __post_init__(self):
        if self.cpu <= 0:
            raise ValueError("cloud cpu must be > 0")
        if self.price < 0:
            raise ValueError("cloud price must be >= 0")
        if not 2.5 <= self.epsilon <= 3.0:
            warnings.warn(
                f"cloud power exponent {self.epsilon} outside the usual [2.5, 3] range",
                stacklevel=2,
            )


@dataclass(frozen=True)
class RadioLink:
    """Device-to-fog radio uplink.

    `interference` is the received interference power from concurrent
    transmitters, a configured scalar (default 0): the solvers never schedule
    concurrent transmissions, so it is an input rather than a derived value.
    `tx_power` defaults to `tx_power_max`; transmitting at maximum power is
    delay-optimal in every regime (see solvers.classify_power_case).
    """

    bandwidth: float
    tx_power_max: float
    channel_gain: float = 1.0
    noise: float = 1.0
    interference: float = 0.0
    tx_power: Optional[float] = None

    def __post_init__(self):
        if self.tx_power is None:
            object.__setattr__(self, "tx_power", self.tx_power_max)
        if self.bandwidth <= 0:
            raise ValueError("link bandwidth must be > 0")
        if self.noise <= 0:
            raise ValueError("link noise must be > 0")
        if self.interference < 0:
            raise ValueError("link interference must be >= 0")
        if not 0 < self.tx_power <= self.tx_power_max:
            raise ValueError("tx_power must satisfy 0 < tx_power <= tx_power_max")


@dataclass(frozen=True)
class Platform:
    """Device, fog and cloud resources plus the two transport links."""

    device_cpu: float
    kappa: float
    fog: FogSpec
    cloud: CloudSpec
    fog_cloud_bandwidth: float
    fog_forward_power: float
    radio: RadioLink

    def __post_init__(self):
        if self.device_cpu <= 0:
            raise ValueError("device_cpu must be > 0")
        if self.kappa < 0:
            raise ValueError("kappa must be >= 0")
        if self.fog_cloud_bandwidth <= 0:
            raise ValueError("fog_cloud_bandwidth must be > 0")
        if self.fog_forward_power < 0:
            raise ValueError("fog_forward_power must be >= 0")


@dataclass(frozen=True)
class Placement:
    """Per-task assignment to exactly one tier (maps task id -> Tier)."""

    assignment: Mapping[int, Tier]

    def __post_init__(self):
        object.__setattr__(
            self,
            "assignment",
            {int(k): Tier(v) for k, v in dict(self.assignment).items()},
        )

    def tier(self, task_id: int) -> Tier:
        return self.assignment[task_id]

    def counts(self) -> tuple[int, int, int]:
        """(n_local, n_fog, n_cloud)."""
        tiers = list(self.assignment.values())
        return (
            tiers.count(Tier.LOCAL),
            tiers.count(Tier.FOG),
            tiers.count(Tier.CLOUD),
        )


def validate_placement(placement: Placement, graph: TaskGraph) -> None:
    """Check that the placement covers every task of the graph exactly.

    Raises :class:`MissingTask` or :class:`UnknownTask`.
    """
    graph_ids = {t.id for t in graph.tasks}
    placed_ids = set(placement.assignment)
    missing = sorted(graph_ids - placed_ids)
    if missing:
        raise MissingTask(f"no tier assigned for tasks {missing}")
    unknown = sorted(placed_ids - graph_ids)
    if unknown:
        raise UnknownTask(f"placement names unknown tasks {unknown}")


@dataclass(frozen=True)
class GreedyConfig:
    """The greedy solver has no tunables."""


@dataclass(frozen=True)
class SAConfig:
    """Simulated-annealing schedule and restart policy.

    One annealing run cools `t0 -> t_stop` by the multiplicative factor
    `cool`; each move perturbs one task's tier code by a uniform integer in
    [-neighbor_range, neighbor_range] clamped to [1, 3].  Runs whose final
    placement violates the budget restart from a fresh random placement, at
    most `max_restarts` times.
    """

    t0: float = 100.0
    cool: float = 0.98
    t_stop: float = 0.1
    neighbor_range: int = 3
    max_restarts: int = 50

    def __post_init__(self):
        if not 0 < self.cool < 1:
            raise ValueError("cool must be in (0, 1)")
        if self.t_stop <= 0:
            raise ValueError("t_stop must be > 0")
        if self.neighbor_range < 1:
            raise ValueError("neighbor_range must be >= 1")
        if self.max_restarts < 0:
            raise ValueError("max_restarts must be >= 0")
        if self.t0 <= self.t_stop:
            # Degenerate schedule: the annealing loop never runs and the
            # solver returns budget-feasible random placements as-is.
            warnings.warn("t0 <= t_stop: annealing loop is empty", stacklevel=2)


@dataclass(frozen=True)
class BruteForceConfig:
    """Exhaustive enumeration, refused above `cap` tasks (3^N placements)."""

    cap: int = 14

    def __post_init__(self):
        if self.cap < 1:
            raise ValueError("cap must be >= 1")


SolverConfig = Union[GreedyConfig, SAConfig, BruteForceConfig]


@dataclass(frozen=True)
class Scenario:
    """One experiment: graph + platform + budget + objective + seed + solver."""

    graph: TaskGraph
    platform: Platform
    budget: float = math.inf
    objective_mode: ObjectiveMode = ObjectiveMode.MAKESPAN
    seed: int = 0
    solver_config: SolverConfig = field(default_factory=GreedyConfig)

    def __post_init__(self):
        object.__setattr__(self, "objective_mode", ObjectiveMode(self.objective_mode))
        if self.budget < 0:
            raise ValueError("budget must be >= 0")
