"""Sensitivity of the golden link to imperfect static units.

A finite inventory holds one unit whose steering angles are off by ``err``
degrees from what the route over the wall needs. For each planner tolerance the
script reports whether a plan is found and what the Rx then receives. Units
keep their installed function, so arrivals beyond the scatter tolerance are
absorbed rather than bent.
"""

import argparse

from uavpwe.cli import format_power
from uavpwe.geometry import bearing_between
from uavpwe.metasurface import Inventory, MetasurfaceUnit, Steer
from uavpwe.orchestration import PlannerConfig, build_graph, greedy_plan
from uavpwe.raytrace import simulate
from uavpwe.scenario import golden_scenario


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rays", type=int, default=20_000)
    args = ap.parse_args()

    sc = golden_scenario()
    g = build_graph(sc.scene)
    s2 = g.position("s2")
    doa = bearing_between(sc.scene.tx.position, s2)
    dod = bearing_between(s2, sc.scene.rx.position)
    errors = [0.0, 1.0, 2.5, 5.0, 7.5, 10.0, 15.0]
    tolerances = [2.0, 5.0, 10.0, 20.0]
    print("rows: unit angle error (deg); columns: planner/scatter tolerance (deg)")
    print(f"{'err':>5} " + " ".join(f"{t:>16g}" for t in tolerances))
    for err in errors:
        cells = []
        for tol in tolerances:
            unit = MetasurfaceUnit("u", Steer(doa + err, dod - err))
            plan = greedy_plan(g, Inventory.finite([unit]), PlannerConfig(tolerance=tol))
            if not plan.complete:
                cells.append("infeasible")
                continue
            rx = simulate(sc.scene, plan.deployment, args.rays, tolerance=tol,
                          keep_traces="none")
            cells.append(format_power(rx.received_power))
        print(f"{err:>5g} " + " ".join(f"{c:>16}" for c in cells))


if __name__ == "__main__":
    main()
