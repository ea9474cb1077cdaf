"""Command-line driver: plan, deploy, simulate, report.

Exit codes: 0 complete (or baseline) run, 2 infeasible plan, 1 error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .errors import PweError
from .orchestration import (DeploymentPlan, PlannerConfig, build_graph, greedy_plan, task_uavs,
                            total_travel)
from .radio import PowerMode, mw_to_dbm
from .raytrace import RxReport, Terminal, simulate
from .scenario import (Scenario, fresh_inventory, golden_text, load_scenario, parse_scenario,
                       render_scenario)
from .svg import export_svg

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE = 0, 1, 2
NO_SIGNAL = "No signal"


@dataclass
class RunFlags:
    rays: Optional[int] = None
    seed: int = 0
    mode: Optional[str] = None
    max_bounces: Optional[int] = None
    k: Optional[int] = None
    retries: Optional[int] = None
    tolerance: Optional[float] = None
    no_pwe: bool = False
    workers: int = 1
    jitter: float = 0.0
    svg: Optional[str] = None


@dataclass
class RunReport:
    text: str
    exit_code: int
    plan: Optional[DeploymentPlan]
    rx: Optional[RxReport]
    timing: dict[str, float] = field(default_factory=dict)


def _resolve(sc: Scenario, flags: RunFlags) -> Scenario:
    st = sc.settings
    model = st.model
    if flags.mode is not None:
        model = dataclasses.replace(model, mode=PowerMode(flags.mode))
    st = dataclasses.replace(
        st, model=model,
        rays=st.rays if flags.rays is None else flags.rays,
        max_bounces=st.max_bounces if flags.max_bounces is None else flags.max_bounces,
        k=st.k if flags.k is None else flags.k,
        retries=st.retries if flags.retries is None else flags.retries,
        tolerance=st.tolerance if flags.tolerance is None else flags.tolerance)
    return dataclasses.replace(sc, settings=st)


def format_power(mw: float) -> str:
    return NO_SIGNAL if mw == 0.0 else f"{mw_to_dbm(mw):.2f} dBm"


def _format(sc: Scenario, flags: RunFlags, plan: Optional[DeploymentPlan], rx: RxReport) -> str:
    st = sc.settings
    lines = [
        f"scenario: {st.name}",
        f"mode: {st.model.mode.value}  rays: {st.rays}  max_bounces: {st.max_bounces}  "
        f"tolerance: {st.tolerance:g} deg  seed: {flags.seed}",
    ]
    if plan is None:
        lines.append("plan: disabled (no PWE baseline)")
    else:
        lines.append(f"plan: {plan.status.value}" + (f" ({plan.reason})" if plan.reason else ""))
        for p in plan.paths:
            lines.append("path: " + " -> ".join(p))
        if plan.gaps:
            lines.append("unserved gaps: " + ", ".join(f"{a}..{b}" for a, b in plan.gaps))
        if plan.assignments:
            lines.append("assignments:")
            lines.append(f"  {'slot':<6} {'unit':<10} {'x':>6} {'y':>6} {'DoA':>8} {'DoD':>8} "
                         f"{'normal':>8}")
            for a in plan.assignments:
                c = a.placed.center
                lines.append(f"  {a.slot:<6} {a.unit.id:<10} {c.x:>6.2f} {c.y:>6.2f} "
                             f"{a.doa:>8.2f} {a.dod:>8.2f} {a.placed.normal:>8.2f}")
        if plan.uav_tasks:
            lines.append(f"uav tasks: {len(plan.uav_tasks)}  "
                         f"total travel: {total_travel(plan):.2f} m")
            for t in plan.uav_tasks:
                lines.append(f"  {t.uav_id} -> {t.slot}  {t.travel_distance:.2f} m")
    counts = "  ".join(f"{t.value}={rx.ray_counts[t]}" for t in Terminal)
    lines.append(f"rays: launched={rx.launched}  {counts}")
    lg = rx.ledger
    lines.append(f"power ledger (mW): received={lg.received:.6e}  absorbed={lg.absorbed:.6e}  "
                 f"escaped={lg.escaped:.6e}  dissipated={lg.dissipated:.6e}  "
                 f"truncated={lg.truncated:.6e}")
    lines.append(f"received power: {format_power(rx.received_power)}")
    return "\n".join(lines) + "\n"


def run(sc: Scenario, flags: RunFlags = RunFlags()) -> RunReport:
    """Full pipeline: graph -> greedy plan -> UAV tasking -> placement -> tracing."""
    sc = _resolve(sc, flags)
    st = sc.settings
    timing = {}
    t0 = time.perf_counter()
    plan = None
    deployment = []
    if not flags.no_pwe:
        g = build_graph(sc.scene)
        plan = greedy_plan(g, fresh_inventory(sc),
                           PlannerConfig(st.tolerance, st.retries, st.k))
        if plan.complete and sc.fleet.uavs:
            plan = task_uavs(plan, sc.fleet)
        if plan.complete:
            deployment = plan.deployment
    timing["plan"] = time.perf_counter() - t0
    t1 = time.perf_counter()
    rx = simulate(sc.scene, deployment, st.rays, st.model, st.max_bounces, st.max_range,
                  st.tolerance, workers=flags.workers, jitter=flags.jitter, seed=flags.seed)
    timing["simulate"] = time.perf_counter() - t1
    if flags.svg:
        export_svg(rx.traces, sc.scene, flags.svg, deployment, title=st.name)
    code = EXIT_OK if plan is None or plan.complete else EXIT_INFEASIBLE
    return RunReport(_format(sc, flags, plan, rx), code, plan, rx, timing)


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="uavpwe", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="plan a deployment and trace it")
    r.add_argument("scenario", help="scenario file, or 'golden' for the shipped floorplan")
    r.add_argument("--rays", type=int)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--mode", choices=[m.value for m in PowerMode])
    r.add_argument("--max-bounces", type=int)
    r.add_argument("--k", type=int)
    r.add_argument("--retries", type=int)
    r.add_argument("--tolerance", type=float)
    r.add_argument("--no-pwe", action="store_true", help="baseline without any metasurface")
    r.add_argument("--workers", type=int, default=1)
    r.add_argument("--jitter", type=float, default=0.0,
                   help="random shift of launch angles within their cell, in [0, 1)")
    r.add_argument("--svg", metavar="PATH")
    r.add_argument("--timing", action="store_true", help="print stage timings to stderr")

    c = sub.add_parser("check", help="parse a scenario and print its canonical form")
    c.add_argument("scenario")

    sub.add_parser("golden", help="print the shipped golden scenario")
    return p


def _load(name: str) -> Scenario:
    if name == "golden":
        return parse_scenario(golden_text())
    return load_scenario(Path(name))


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "golden":
            sys.stdout.write(golden_text())
            return EXIT_OK
        sc = _load(args.scenario)
        if args.command == "check":
            sys.stdout.write(render_scenario(sc))
            return EXIT_OK
        flags = RunFlags(args.rays, args.seed, args.mode, args.max_bounces, args.k, args.retries,
                         args.tolerance, args.no_pwe, args.workers, args.jitter, args.svg)
        report = run(sc, flags)
    except (PweError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    sys.stdout.write(report.text)
    if args.timing:
        for stage, secs in report.timing.items():
            print(f"timing {stage}: {secs:.3f} s", file=sys.stderr)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
