"""Write SVG pictures of the golden scenario with and without the deployment."""

import argparse
from pathlib import Path

from uavpwe.metasurface import Inventory
from uavpwe.orchestration import build_graph, greedy_plan
from uavpwe.raytrace import simulate
from uavpwe.scenario import golden_scenario
from uavpwe.svg import export_svg


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("figures"))
    ap.add_argument("--rays", type=int, default=400, help="a sparse fan keeps the picture legible")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    sc = golden_scenario()
    plan = greedy_plan(build_graph(sc.scene), Inventory.ideal())
    for name, dep in (("baseline", []), ("pwe", plan.deployment)):
        rx = simulate(sc.scene, dep, args.rays, keep_traces="all")
        path = args.out / f"golden_{name}.svg"
        export_svg(rx.traces, sc.scene, path, dep, title=f"golden scenario, {name}")
        print(f"wrote {path} ({len(rx.traces)} traces)")


if __name__ == "__main__":
    main()
