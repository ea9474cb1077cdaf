"""Ray propagation from the Tx through placed units to the Rx.

Two kernels share one set of rules. :func:`propagate` follows a single ray in
plain Python and is the reference. :func:`simulate` pushes the whole launched fan
through a numpy batch kernel, one bounce generation at a time.

Rules per straight segment of a ray:

* the nearest obstacle (wall or placed unit) farther than EPS ends the segment,
  otherwise the ray escapes at ``max_range``;
* if the segment passes within the capture radius of the Rx before that end and
  the Rx lobe sees the ray's source bearing, the ray is received there;
* walls absorb; units scatter, absorbing off-design and back-face arrivals;
* a ray that has already bounced ``max_bounces`` times is truncated at its next
  unit hit.

Every milliwatt launched ends up in exactly one bucket of :class:`PowerLedger`.
"""

from __future__ import annotations

import enum
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .geometry import EPS, Point2, ray_cast, unit_vector
from .metasurface import DEFAULT_TOLERANCE, Absorb, PlacedUnit, Steer, scatter
from .radio import (PowerMode, PowerModel, Ray, antenna_weight, launch_rays, mw_to_dbm,
                    path_gain)
from .scene import Scene

DEFAULT_MAX_BOUNCES = 8
DEFAULT_MAX_RANGE = 200.0
DEFAULT_RAYS = 100_000


class Terminal(enum.Enum):
    ABSORBED = "absorbed"
    ESCAPED = "escaped"
    RECEIVED = "received"
    MAX_BOUNCES = "max_bounces"


@dataclass
class Trace:
    polyline: list[Point2]
    terminal: Terminal
    powers: list[float]
    delivered: float = 0.0
    bounces: int = 0
    length: float = 0.0


@dataclass
class PowerLedger:
    """Where the launched power went, in mW."""

    received: float = 0.0
    wall_absorbed: float = 0.0
    unit_absorbed: float = 0.0
    # share of a captured ray the Rx lobe rejects
    rx_rejected: float = 0.0
    escaped: float = 0.0
    dissipated: float = 0.0
    truncated: float = 0.0

    @property
    def absorbed(self) -> float:
        return self.wall_absorbed + self.unit_absorbed + self.rx_rejected

    def total(self) -> float:
        return math.fsum([self.received, self.wall_absorbed, self.unit_absorbed,
                          self.rx_rejected, self.escaped, self.dissipated, self.truncated])


@dataclass
class RxReport:
    received_power: float
    received_dbm: Optional[float]
    ray_counts: dict[Terminal, int]
    traces: list[Trace]
    ledger: PowerLedger
    launched: int
    tx_power: float

    @property
    def no_signal(self) -> bool:
        return self.received_power == 0.0


# -- scalar reference kernel ----------------------------------------------

def _obstacles(scene: Scene, deployment: Sequence[PlacedUnit]):
    obs = [(w.a, w.b, ("wall", i)) for i, w in enumerate(scene.walls)]
    obs += [(p.a, p.b, ("unit", j)) for j, p in enumerate(deployment)]
    return obs


def _add(ledger: Optional[PowerLedger], bucket: str, value: float) -> None:
    if ledger is not None:
        setattr(ledger, bucket, getattr(ledger, bucket) + value)


def propagate(ray: Ray, scene: Scene, deployment: Sequence[PlacedUnit],
              max_bounces: int = DEFAULT_MAX_BOUNCES, max_range: float = DEFAULT_MAX_RANGE,
              model: PowerModel = PowerModel(), tolerance: float = DEFAULT_TOLERANCE,
              ledger: Optional[PowerLedger] = None) -> list[Trace]:
    """Follow ``ray`` and every ray it spawns; one Trace per terminated branch."""
    if max_bounces < 0 or not max_range > 0:
        raise ValueError("need max_bounces >= 0 and max_range > 0")
    rx = scene.rx
    r2 = rx.capture_radius ** 2
    obstacles = _obstacles(scene, deployment)
    traces = []
    stack = [(ray, [ray.origin], [])]
    while stack:
        cur, poly, powers = stack.pop()
        o = cur.origin
        dx, dy = unit_vector(cur.direction)
        hit = ray_cast(o, cur.direction, obstacles, max_range)
        t_end = hit.distance if hit else max_range
        tc = min(max((rx.position.x - o.x) * dx + (rx.position.y - o.y) * dy, 0.0), t_end)
        cx, cy = o.x + tc * dx, o.y + tc * dy
        seg_powers = powers + [cur.power]
        if (cx - rx.position.x) ** 2 + (cy - rx.position.y) ** 2 <= r2:
            w = antenna_weight(rx.pattern, cur.direction + 180.0)
            if w > 0.0:
                length = cur.path_length + tc
                # bounce losses were already applied when the ray scattered
                g = path_gain(model, length, 0) if model.mode is PowerMode.FRIIS else 1.0
                delivered = cur.power * w * g
                _add(ledger, "received", delivered)
                _add(ledger, "rx_rejected", cur.power * (1.0 - w))
                _add(ledger, "dissipated", cur.power * w * (1.0 - g))
                traces.append(Trace(poly + [Point2(cx, cy)], Terminal.RECEIVED, seg_powers,
                                    delivered, cur.bounces, length))
                continue
        length = cur.path_length + t_end
        if hit is None:
            _add(ledger, "escaped", cur.power)
            traces.append(Trace(poly + [o.offset(cur.direction, max_range)], Terminal.ESCAPED,
                                seg_powers, 0.0, cur.bounces, length))
            continue
        kind, idx = hit.tag
        end = poly + [hit.point]
        if kind == "wall":
            _add(ledger, "wall_absorbed", cur.power)
            traces.append(Trace(end, Terminal.ABSORBED, seg_powers, 0.0, cur.bounces, length))
            continue
        if cur.bounces >= max_bounces:
            _add(ledger, "truncated", cur.power)
            traces.append(Trace(end, Terminal.MAX_BOUNCES, seg_powers, 0.0, cur.bounces, length))
            continue
        outs = scatter(deployment[idx], cur, tolerance, model.bounce_loss, hit=hit.point)
        if not outs:
            _add(ledger, "unit_absorbed", cur.power)
            traces.append(Trace(end, Terminal.ABSORBED, seg_powers, 0.0, cur.bounces, length))
            continue
        _add(ledger, "dissipated", cur.power * model.bounce_loss)
        for child in reversed(outs):
            stack.append((child, end, seg_powers))
    return traces


def _simulate_python(scene, deployment, rays, model, max_bounces, max_range, tolerance):
    ledger = PowerLedger()
    traces = []
    for ray in rays:
        traces.extend(propagate(ray, scene, deployment, max_bounces, max_range, model,
                                tolerance, ledger))
    return traces, ledger


# -- numpy batch kernel ---------------------------------------------------

_T_CODES = {0: Terminal.ABSORBED, 1: Terminal.ESCAPED, 2: Terminal.RECEIVED,
            3: Terminal.MAX_BOUNCES}


def _wrap(d):
    d = np.mod(d, 360.0)
    return np.where(d > 180.0, d - 360.0, d)


def _lobe_weight(pattern, directions):
    delta = np.abs(_wrap(directions - pattern.boresight))
    w = np.cos(np.pi * delta / pattern.lobe_width)
    return np.where(delta >= pattern.lobe_width / 2.0, 0.0, w)


@dataclass
class _Generation:
    ox: np.ndarray
    oy: np.ndarray
    ex: np.ndarray
    ey: np.ndarray
    power: np.ndarray
    parent: np.ndarray
    terminal: np.ndarray          # -1 while the ray continues
    delivered: np.ndarray
    bounces: np.ndarray
    length: np.ndarray


@dataclass
class _BatchResult:
    buckets: dict[str, list[np.ndarray]] = field(default_factory=dict)
    generations: list[_Generation] = field(default_factory=list)

    def push(self, bucket: str, values: np.ndarray) -> None:
        if values.size:
            self.buckets.setdefault(bucket, []).append(values)


def _trace_batch(scene: Scene, deployment: Sequence[PlacedUnit], directions: np.ndarray,
                 powers: np.ndarray, model: PowerModel, max_bounces: int, max_range: float,
                 tolerance: float) -> _BatchResult:
    res = _BatchResult()
    segs = [(w.a, w.b) for w in scene.walls] + [(p.a, p.b) for p in deployment]
    n_walls = len(scene.walls)
    ax = np.array([s[0].x for s in segs], dtype=float)
    ay = np.array([s[0].y for s in segs], dtype=float)
    sx = np.array([s[1].x for s in segs], dtype=float) - ax
    sy = np.array([s[1].y for s in segs], dtype=float) - ay
    rx = scene.rx
    rxx, rxy, r2 = rx.position.x, rx.position.y, rx.capture_radius ** 2
    loss = model.bounce_loss

    n = directions.size
    ox = np.full(n, scene.tx.position.x)
    oy = np.full(n, scene.tx.position.y)
    deg = directions.astype(float)
    pw = powers.astype(float)
    nb = np.zeros(n, dtype=np.int64)
    ln = np.zeros(n)
    parent = np.full(n, -1, dtype=np.int64)

    while deg.size:
        n = deg.size
        rad = np.radians(deg)
        dx, dy = np.cos(rad), np.sin(rad)
        if segs:
            axo = ax[None, :] - ox[:, None]
            ayo = ay[None, :] - oy[:, None]
            denom = dx[:, None] * sy[None, :] - dy[:, None] * sx[None, :]
            with np.errstate(divide="ignore", invalid="ignore"):
                t = (axo * sy[None, :] - ayo * sx[None, :]) / denom
                u = (axo * dy[:, None] - ayo * dx[:, None]) / denom
            ok = (denom != 0.0) & (u >= 0.0) & (u <= 1.0) & (t > EPS) & (t <= max_range)
            t = np.where(ok, t, np.inf)
            j = np.argmin(t, axis=1)
            th = t[np.arange(n), j]
        else:
            j = np.zeros(n, dtype=np.int64)
            th = np.full(n, np.inf)
        hit = np.isfinite(th)
        t_end = np.where(hit, th, max_range)

        tc = np.clip((rxx - ox) * dx + (rxy - oy) * dy, 0.0, t_end)
        cx, cy = ox + tc * dx, oy + tc * dy
        w_rx = _lobe_weight(rx.pattern, deg + 180.0)
        received = ((cx - rxx) ** 2 + (cy - rxy) ** 2 <= r2) & (w_rx > 0.0)

        ex = np.where(received, cx, ox + t_end * dx)
        ey = np.where(received, cy, oy + t_end * dy)
        seg_len = np.where(received, tc, t_end)
        length = ln + seg_len
        terminal = np.full(n, -1, dtype=np.int64)
        delivered = np.zeros(n)

        if received.any():
            p = pw[received]
            w = w_rx[received]
            if model.mode is PowerMode.FRIIS:
                spread = model.wavelength / (4.0 * np.pi * length[received])
                g = spread * spread
            else:
                g = np.ones_like(p)
            delivered[received] = p * w * g
            res.push("received", p * w * g)
            res.push("rx_rejected", p * (1.0 - w))
            res.push("dissipated", p * w * (1.0 - g))
            terminal[received] = 2

        free = ~received
        escaped = free & ~hit
        res.push("escaped", pw[escaped])
        terminal[escaped] = 1
        wall = free & hit & (j < n_walls)
        res.push("wall_absorbed", pw[wall])
        terminal[wall] = 0
        on_unit = free & hit & (j >= n_walls)
        trunc = on_unit & (nb >= max_bounces)
        res.push("truncated", pw[trunc])
        terminal[trunc] = 3
        on_unit &= ~trunc

        child_parts = []
        for k, placed in enumerate(deployment):
            sel = on_unit & (j == n_walls + k)
            if not sel.any():
                continue
            fn = placed.unit.function
            if isinstance(fn, Absorb):
                res.push("unit_absorbed", pw[sel])
                terminal[sel] = 0
                continue
            nx, ny = unit_vector(placed.normal)
            good = sel & (dx * nx + dy * ny < 0.0) & (np.abs(_wrap(deg - fn.src)) <= tolerance)
            bad = sel & ~good
            res.push("unit_absorbed", pw[bad])
            terminal[bad] = 0
            idx = np.nonzero(good)[0]
            if not idx.size:
                continue
            res.push("dissipated", pw[idx] * loss)
            kept = pw[idx] * (1.0 - loss)
            outs = (fn.dst,) if isinstance(fn, Steer) else fn.outs
            share = kept if isinstance(fn, Steer) else kept / len(outs)
            for out in outs:
                child_parts.append((idx, np.full(idx.size, out), share))

        res.generations.append(_Generation(ox, oy, ex, ey, pw, parent, terminal, delivered,
                                           nb, length))
        if not child_parts:
            break
        # children ordered by parent index, then by output order, like the scalar stack
        idx = np.concatenate([c[0] for c in child_parts])
        order_key = np.concatenate([np.full(c[0].size, m) for m, c in enumerate(child_parts)])
        order = np.lexsort((order_key, idx))
        idx = idx[order]
        deg = np.concatenate([c[1] for c in child_parts])[order]
        pw = np.concatenate([c[2] for c in child_parts])[order]
        ox, oy = ex[idx], ey[idx]
        nb = nb[idx] + 1
        ln = length[idx]
        parent = idx
    return res


def _rebuild_traces(gens: list[_Generation], which: str) -> list[Trace]:
    out = []
    if which == "none":
        return out
    for g, gen in enumerate(gens):
        mask = gen.terminal >= 0
        if which == "received":
            mask = gen.terminal == 2
        for i in np.nonzero(mask)[0]:
            pts = [Point2(float(gen.ex[i]), float(gen.ey[i]))]
            powers = []
            k, level = int(i), g
            while level >= 0:
                cur = gens[level]
                pts.append(Point2(float(cur.ox[k]), float(cur.oy[k])))
                powers.append(float(cur.power[k]))
                k = int(cur.parent[k])
                level -= 1
            pts.reverse()
            powers.reverse()
            out.append(Trace(pts, _T_CODES[int(gen.terminal[i])], powers,
                             float(gen.delivered[i]), int(gen.bounces[i]), float(gen.length[i])))
    return out


def _batch_worker(args):
    scene, deployment, directions, powers, model, max_bounces, max_range, tolerance, keep = args
    res = _trace_batch(scene, deployment, directions, powers, model, max_bounces, max_range,
                       tolerance)
    counts = {t: 0 for t in Terminal}
    for gen in res.generations:
        codes, freq = np.unique(gen.terminal[gen.terminal >= 0], return_counts=True)
        for c, f in zip(codes, freq):
            counts[_T_CODES[int(c)]] += int(f)
    return res.buckets, counts, _rebuild_traces(res.generations, keep)


# -- driver -----------------------------------------------------------------

def simulate(scene: Scene, deployment: Sequence[PlacedUnit], n_rays: int = DEFAULT_RAYS,
             model: PowerModel = PowerModel(), max_bounces: int = DEFAULT_MAX_BOUNCES,
             max_range: float = DEFAULT_MAX_RANGE, tolerance: float = DEFAULT_TOLERANCE,
             engine: str = "numpy", workers: int = 1, keep_traces: str = "received",
             jitter: float = 0.0, seed: int = 0) -> RxReport:
    """Launch ``n_rays`` from the Tx and aggregate what reaches the Rx.

    ``keep_traces`` is one of ``"received"``, ``"all"`` or ``"none"``. Power sums
    use :func:`math.fsum`, so the totals do not depend on how rays were chunked
    across ``workers``.
    """
    scene.validate()
    if keep_traces not in ("received", "all", "none"):
        raise ValueError(f"unknown keep_traces {keep_traces!r}")
    rays = launch_rays(scene.tx, n_rays, jitter, random.Random(seed))

    if engine == "python":
        traces, ledger = _simulate_python(scene, deployment, rays, model, max_bounces,
                                          max_range, tolerance)
        counts = {t: 0 for t in Terminal}
        for tr in traces:
            counts[tr.terminal] += 1
        received = math.fsum(tr.delivered for tr in traces if tr.terminal is Terminal.RECEIVED)
        ledger.received = received
        if keep_traces == "received":
            traces = [tr for tr in traces if tr.terminal is Terminal.RECEIVED]
        elif keep_traces == "none":
            traces = []
    elif engine == "numpy":
        directions = np.array([r.direction for r in rays])
        powers = np.array([r.power for r in rays])
        chunks = max(1, min(workers, n_rays))
        bounds = np.linspace(0, n_rays, chunks + 1).astype(int)
        jobs = [(scene, list(deployment), directions[a:b], powers[a:b], model, max_bounces,
                 max_range, tolerance, keep_traces) for a, b in zip(bounds[:-1], bounds[1:])]
        if chunks == 1:
            results = [_batch_worker(jobs[0])]
        else:
            with ProcessPoolExecutor(max_workers=chunks) as pool:
                results = list(pool.map(_batch_worker, jobs))
        buckets: dict[str, list[np.ndarray]] = {}
        counts = {t: 0 for t in Terminal}
        traces = []
        for b, c, tr in results:
            for name, arrs in b.items():
                buckets.setdefault(name, []).extend(arrs)
            for t, v in c.items():
                counts[t] += v
            traces.extend(tr)
        ledger = PowerLedger(**{name: math.fsum(np.concatenate(arrs).tolist())
                                for name, arrs in buckets.items()})
        received = ledger.received
    else:
        raise ValueError(f"unknown engine {engine!r}")

    dbm = mw_to_dbm(received) if received > 0 else None
    return RxReport(received, dbm, counts, traces, ledger, n_rays, scene.tx.tx_power_mw)
