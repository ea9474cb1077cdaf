"""How the golden received power settles as the launched fan gets denser."""

import argparse

from uavpwe.metasurface import Inventory
from uavpwe.orchestration import build_graph, greedy_plan
from uavpwe.radio import mw_to_dbm
from uavpwe.raytrace import simulate
from uavpwe.scenario import golden_scenario


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-exp", type=int, default=6, help="largest ray count is 10**max_exp")
    args = ap.parse_args()

    sc = golden_scenario()
    plan = greedy_plan(build_graph(sc.scene), Inventory.ideal())
    ref = None
    print(f"{'rays':>9} {'dBm':>9} {'delta vs densest (dB)':>22}")
    rows = []
    for exp in range(2, args.max_exp + 1):
        rx = simulate(sc.scene, plan.deployment, 10 ** exp, keep_traces="none")
        rows.append((10 ** exp, mw_to_dbm(rx.received_power) if rx.received_power else None))
    ref = rows[-1][1]
    for n, dbm in rows:
        if dbm is None:
            print(f"{n:>9} {'none':>9}")
        else:
            print(f"{n:>9} {dbm:>9.3f} {dbm - ref:>22.4f}")


if __name__ == "__main__":
    main()
