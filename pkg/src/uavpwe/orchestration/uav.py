"""Slot-to-UAV tasking under a per-UAV range budget."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from ..geometry import Point2
from .planner import DeploymentPlan, PlanStatus, UavTask


@dataclass(frozen=True)
class Uav:
    id: str
    base: Point2
    range_budget: float

    def __post_init__(self):
        if not self.range_budget > 0:
            raise ValueError("range budget must be positive")

    def round_trip(self, p: Point2) -> float:
        return 2.0 * self.base.distance(p)


@dataclass
class UavFleet:
    uavs: list[Uav] = field(default_factory=list)


def task_uavs(plan: DeploymentPlan, fleet: UavFleet, strategy: str = "greedy") -> DeploymentPlan:
    """Send one UAV to every assigned slot; returns a new plan.

    ``greedy`` gives each slot, in route order, the nearest free UAV whose
    base->slot->base trip fits its budget (ties by UAV id). ``optimal`` solves
    the assignment problem for minimum total travel instead. A slot no UAV can
    reach makes the plan infeasible for energy reasons.
    """
    if plan.status is not PlanStatus.COMPLETE:
        raise ValueError("only complete plans can be tasked")
    slots = [(a.slot, a.placed.center) for a in plan.assignments]
    if strategy == "greedy":
        tasks = _greedy(slots, fleet)
    elif strategy == "optimal":
        tasks = _optimal(slots, fleet)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    if tasks is None:
        return dataclasses.replace(plan, status=PlanStatus.INFEASIBLE, uav_tasks=[],
                                   reason="energy: a slot is beyond every free UAV's budget")
    return dataclasses.replace(plan, uav_tasks=tasks)


def _greedy(slots, fleet):
    free = sorted(fleet.uavs, key=lambda u: u.id)
    tasks = []
    for slot_id, pos in slots:
        options = [(u.round_trip(pos), u.id, u) for u in free
                   if u.round_trip(pos) <= u.range_budget]
        if not options:
            return None
        trip, _, uav = min(options, key=lambda o: (o[0], o[1]))
        free.remove(uav)
        tasks.append(UavTask(uav.id, slot_id, trip))
    return tasks


def _optimal(slots, fleet):
    if not slots:
        return []
    uavs = sorted(fleet.uavs, key=lambda u: u.id)
    if len(uavs) < len(slots):
        return None
    cost = np.array([[u.round_trip(pos) for u in uavs] for _, pos in slots])
    allowed = np.array([[u.round_trip(pos) <= u.range_budget for u in uavs] for _, pos in slots])
    big = cost[allowed].sum() + 1.0 if allowed.any() else 1.0
    rows, cols = linear_sum_assignment(np.where(allowed, cost, big * 10.0))
    if not all(allowed[r, c] for r, c in zip(rows, cols)):
        return None
    return [UavTask(uavs[c].id, slots[r][0], float(cost[r, c])) for r, c in zip(rows, cols)]


def total_travel(plan: DeploymentPlan) -> float:
    return math.fsum(t.travel_distance for t in plan.uav_tasks)
