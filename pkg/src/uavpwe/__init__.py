"""Planner and 2D ray tracer for UAV-carried static metasurfaces."""

from .geometry import Point2, Wall, line_of_sight, ray_cast, segment_intersection
from .metasurface import (Absorb, Inventory, MetasurfaceUnit, PlacedUnit, Split, Steer,
                          match_unit, orient, place, scatter)
from .orchestration import (DeploymentPlan, PlannerConfig, build_graph, greedy_plan, task_uavs,
                            vertex_disjoint_paths)
from .radio import AntennaPattern, Device, PowerMode, PowerModel, Role, launch_rays
from .raytrace import RxReport, Terminal, propagate, simulate
from .scenario import Scenario, golden_scenario, parse_scenario, render_scenario
from .scene import CandidateSlot, Scene

__version__ = "0.1.0"
