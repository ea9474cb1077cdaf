"""Greedy deployment of static units along a Tx->Rx route.

The planner takes the cheapest disjoint route, asks the inventory for a unit at
every interior slot, drops the slots nobody can serve, and reconnects the
resulting gaps with Dijkstra over the free slots. Repairs change the angles at
the anchors next to a gap, so all assignments are re-checked after each repair.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

from ..geometry import Point2, bearing_between
from ..metasurface import (DEFAULT_TOLERANCE, Inventory, InventoryMode, MetasurfaceUnit,
                           PlacedUnit, orient, match_unit, serves)
from .graph import RX, TX, PweGraph
from .paths import dijkstra, vertex_disjoint_paths

DEFAULT_RETRIES = 10


class PlanStatus(enum.Enum):
    COMPLETE = "complete"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class Assignment:
    slot: str
    unit: MetasurfaceUnit
    placed: PlacedUnit
    doa: float
    dod: float


@dataclass(frozen=True)
class UavTask:
    uav_id: str
    slot: str
    travel_distance: float


@dataclass
class DeploymentPlan:
    status: PlanStatus
    paths: list[list[str]] = field(default_factory=list)
    assignments: list[Assignment] = field(default_factory=list)
    uav_tasks: list[UavTask] = field(default_factory=list)
    reason: str = ""
    gaps: list[tuple[str, str]] = field(default_factory=list)
    retries_used: int = 0

    @property
    def path(self) -> list[str]:
        return self.paths[0] if self.paths else []

    @property
    def complete(self) -> bool:
        return self.status is PlanStatus.COMPLETE

    @property
    def deployment(self) -> list[PlacedUnit]:
        return [a.placed for a in self.assignments]


@dataclass(frozen=True)
class PlannerConfig:
    tolerance: float = DEFAULT_TOLERANCE
    retries: int = DEFAULT_RETRIES
    k: int = 1


def required_angles(positions: list[Point2]) -> list[tuple[float, float]]:
    """(arrival, departure) travel bearings at each interior vertex of a route."""
    if len(positions) < 3:
        raise ValueError("a route needs at least one interior vertex")
    return [(bearing_between(a, b), bearing_between(b, c))
            for a, b, c in zip(positions, positions[1:], positions[2:])]


class _Planner:
    def __init__(self, g: PweGraph, inventory: Inventory, config: PlannerConfig):
        self.g = g
        self.inventory = inventory
        self.cfg = config
        self.busy: set[str] = set()
        self.units: dict[str, MetasurfaceUnit] = {}

    def _take(self, slot: str, unit: MetasurfaceUnit) -> None:
        unit.busy = True
        self.busy.add(slot)
        self.units[slot] = unit

    def _release(self, slot: str) -> None:
        unit = self.units.pop(slot, None)
        if unit is not None:
            unit.busy = False
        self.busy.discard(slot)

    def _assign(self, path: list[str]) -> list[str]:
        """Re-check and fill assignments along ``path``; returns unserved slots."""
        angles = required_angles([self.g.position(v) for v in path])
        interior = path[1:-1]
        for v, (doa, dod) in zip(interior, angles):
            unit = self.units.get(v)
            if unit is not None and not serves(unit, doa, dod, self._check_tol()):
                self._release(v)
        unserved = []
        for v, (doa, dod) in zip(interior, angles):
            if v in self.units:
                continue
            unit = match_unit(self.inventory, doa, dod, self.cfg.tolerance)
            if unit is None:
                unserved.append(v)
            else:
                self._take(v, unit)
        return unserved

    def _check_tol(self) -> float:
        # fabricated units must match exactly; stale ones are re-fabricated
        return 0.0 if self.inventory.mode is InventoryMode.IDEAL else self.cfg.tolerance

    def _fill_gaps(self, anchors: list[str], removed: set[str]):
        """Reconnect consecutive anchors that lost their edge.

        An anchor that cannot be reached is released and dropped, widening the
        gap. Returns the repaired path, or None with the gap that stayed open.
        """
        anchors = list(anchors)
        while True:
            repaired = [anchors[0]]
            taken = set(anchors)
            for a, b in zip(anchors, anchors[1:]):
                if self.work.has_edge(a, b) and _hop_ok(self.work, a, b):
                    repaired.append(b)
                    continue
                free = {v for v in self.work.slot_ids()
                        if v not in self.busy and v not in taken}
                sub = dijkstra(self.work, a, b, allowed=free)
                if sub is None:
                    break
                repaired.extend(sub[1:])
                taken.update(sub)
            else:
                return repaired, None
            drop = b if b != RX else (a if a != TX else None)
            if drop is None:
                return None, (a, b)
            self._release(drop)
            removed.add(drop)
            self.work = self.work.without([drop])
            anchors.remove(drop)

    def serve(self, path: list[str], removed: set[str]) -> tuple[Optional[list[str]], list, int]:
        self.work = self.g.without(removed | (self.busy - set(path)))
        attempt = 0
        while True:
            unserved = self._assign(path) if len(path) > 2 else []
            if not unserved:
                return path, [], attempt
            if attempt >= self.cfg.retries:
                return None, _gaps(path, unserved), attempt
            attempt += 1
            removed.update(unserved)
            self.work = self.work.without(unserved)
            anchors = [v for v in path if v not in unserved]
            repaired, gap = self._fill_gaps(anchors, removed)
            if repaired is None:
                return None, [gap], attempt
            path = repaired


def _hop_ok(g: PweGraph, a: str, b: str) -> bool:
    if a == TX and not g.is_user_edge(a, b):
        return False
    if b == RX and not g.is_ap_edge(a, b):
        return False
    return True


def _gaps(path: list[str], unserved: list[str]) -> list[tuple[str, str]]:
    """Anchor pairs around each maximal run of unserved vertices."""
    gaps = []
    last_anchor = path[0]
    in_gap = False
    for v in path[1:]:
        if v in unserved:
            in_gap = True
            continue
        if in_gap:
            gaps.append((last_anchor, v))
            in_gap = False
        last_anchor = v
    return gaps


def greedy_plan(g: PweGraph, inventory: Inventory,
                config: PlannerConfig = PlannerConfig()) -> DeploymentPlan:
    """Route Tx->Rx through slots the inventory can serve.

    Units taken from a finite inventory are marked busy in place. With ``k > 1``
    every disjoint route is attempted in turn; the plan is complete when at
    least one is fully served and lists only the served routes.
    """
    if config.retries < 0:
        raise ValueError("retries must be non-negative")
    routes = vertex_disjoint_paths(g, config.k)
    if not routes:
        return DeploymentPlan(PlanStatus.INFEASIBLE, reason="no route from tx to rx")
    planner = _Planner(g, inventory, config)
    removed: set[str] = set()
    served, gaps, used = [], [], 0
    for route in routes:
        if any(v in planner.busy or v in removed for v in route[1:-1]):
            continue
        before = dict(planner.units)
        path, open_gaps, attempts = planner.serve(route, removed)
        used += attempts
        if path is None:
            for slot in set(planner.units) - set(before):
                planner._release(slot)
            gaps.extend(open_gaps)
        else:
            served.append(path)

    if not served:
        return DeploymentPlan(PlanStatus.INFEASIBLE, reason="unserved gaps", gaps=gaps,
                              retries_used=used)
    assignments = []
    for path in served:
        pos = [g.position(v) for v in path]
        if len(path) < 3:
            continue
        for v, (doa, dod) in zip(path[1:-1], required_angles(pos)):
            unit = planner.units[v]
            placed = orient(unit, g.position(v), allow_passthrough=True)
            assignments.append(Assignment(v, unit, placed, doa, dod))
    return DeploymentPlan(PlanStatus.COMPLETE, served, assignments, retries_used=used)
