from .graph import RX, TX, PweGraph, Vertex, VertexKind, build_graph
from .paths import dijkstra, path_length, usable_hop, vertex_disjoint_paths
from .planner import (Assignment, DeploymentPlan, PlannerConfig, PlanStatus, UavTask,
                      greedy_plan, required_angles)
from .uav import Uav, UavFleet, task_uavs, total_travel
from ..scene import CandidateSlot

__all__ = [
    "RX", "TX", "PweGraph", "Vertex", "VertexKind", "build_graph", "dijkstra",
    "path_length", "usable_hop", "vertex_disjoint_paths", "Assignment", "DeploymentPlan",
    "PlannerConfig", "PlanStatus", "UavTask", "greedy_plan", "required_angles", "Uav",
    "UavFleet", "task_uavs", "total_travel", "CandidateSlot",
]
