"""Closed-form per-task timing and energy quantities.

Pure functions of a task and the platform; nothing here depends on the
placement or on other tasks.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import log2

from .model import CloudSpec, FogSpec, Platform, RadioLink, TaskSpec


@dataclass(frozen=True)
class TaskCosts:
    """All per-task quantities, bundled once per (task, platform) pair."""

    local_time: float
    local_energy: float
    uplink_rate: float
    uplink_time: float
    uplink_energy: float
    fog_time: float
    fog_energy: float
    fog_cloud_time: float
    fog_cloud_energy: float
    cloud_time: float
    cloud_energy: float


def uplink_rate(link: RadioLink) -> float:
    """Achievable uplink rate: bandwidth * log2(1 + SINR)."""
    sinr = link.tx_power * link.channel_gain / (link.noise + link.interference)
    return link.bandwidth * log2(1.0 + sinr)


def local_exec_time(task: TaskSpec, platform: Platform) -> float:
    """workload / device CPU speed."""
    return task.workload / platform.device_cpu


def local_energy(task: TaskSpec, platform: Platform) -> float:
    """kappa * workload * device_cpu^2."""
    return platform.kappa * task.workload * platform.device_cpu**2


def fog_exec_time(task: TaskSpec, fog: FogSpec) -> float:
    """workload / fog CPU speed."""
    return task.workload / fog.cpu


def fog_energy(task: TaskSpec, fog: FogSpec) -> float:
    """(alpha * cpu^epsilon + beta) * execution time on the fog node."""
    return (fog.alpha * fog.cpu**fog.epsilon + fog.beta) * fog_exec_time(task, fog)


def cloud_exec_time(task: TaskSpec, cloud: CloudSpec) -> float:
    """workload / cloud CPU speed."""
    return task.workload / cloud.cpu


def cloud_energy(task: TaskSpec, cloud: CloudSpec) -> float:
    """(alpha * cpu^epsilon + beta) * execution time on the cloud server."""
    return (cloud.alpha * cloud.cpu**cloud.epsilon + cloud.beta) * cloud_exec_time(
        task, cloud
    )


def uplink_time(task: TaskSpec, link: RadioLink) -> float:
    """data_size / uplink rate."""
    return task.data_size / uplink_rate(link)


def uplink_energy(task: TaskSpec, link: RadioLink) -> float:
    """Transmit power * uplink time."""
    return link.tx_power * uplink_time(task, link)


def fog_cloud_time(task: TaskSpec, platform: Platform) -> float:
    """data_size / fog-to-cloud bandwidth."""
    return task.data_size / platform.fog_cloud_bandwidth


def fog_cloud_energy(task: TaskSpec, platform: Platform) -> float:
    """Forwarding power * fog-to-cloud transfer time, paid by the fog node."""
    return platform.fog_forward_power * fog_cloud_time(task, platform)


def task_costs(task: TaskSpec, platform: Platform) -> TaskCosts:
    """Evaluate every single-quantity function for one task."""
    return TaskCosts(
        local_time=local_exec_time(task, platform),
        local_energy=local_energy(task, platform),
        uplink_rate=uplink_rate(platform.radio),
        uplink_time=uplink_time(task, platform.radio),
        uplink_energy=uplink_energy(task, platform.radio),
        fog_time=fog_exec_time(task, platform.fog),
        fog_energy=fog_energy(task, platform.fog),
        fog_cloud_time=fog_cloud_time(task, platform),
        fog_cloud_energy=fog_cloud_energy(task, platform),
        cloud_time=cloud_exec_time(task, platform.cloud),
        cloud_energy=cloud_energy(task, platform.cloud),
    )
