"""Received power at the second user with and without the UAV-carried surface.

Runs the shipped golden scenario twice (bare floorplan, then planned deployment)
under both power models and prints one row per configuration.
"""

import argparse
import time

from uavpwe.cli import RunFlags, format_power, run
from uavpwe.scenario import golden_scenario


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rays", type=int, default=100_000)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    print(f"{'approach':<28} {'model':<12} {'received power':>16} {'rays in':>8} {'time':>7}")
    for mode in ("bounce_only", "friis"):
        for label, no_pwe in (("regular propagation", True), ("UAV-driven surface", False)):
            t0 = time.perf_counter()
            rep = run(golden_scenario(), RunFlags(rays=args.rays, mode=mode, no_pwe=no_pwe,
                                                  workers=args.workers))
            secs = time.perf_counter() - t0
            got = sum(1 for _ in rep.rx.traces)
            print(f"{label:<28} {mode:<12} {format_power(rep.rx.received_power):>16} "
                  f"{got:>8} {secs:>6.2f}s")


if __name__ == "__main__":
    main()
