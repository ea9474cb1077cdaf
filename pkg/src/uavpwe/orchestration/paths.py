"""Routing over the PWE graph: disjoint Tx->Rx paths and constrained Dijkstra.

A usable route leaves the Tx on a user edge, enters the Rx on an access-point
edge and never passes through either device in between.
"""

from __future__ import annotations

import heapq
import math
from typing import Collection, Optional

from .graph import RX, TX, PweGraph

_TIE = 1e-12


def usable_hop(g: PweGraph, u: str, v: str) -> bool:
    """Directed hop u -> v is allowed on a Tx->Rx route."""
    if v == TX or u == RX:
        return False
    if u == TX:
        return g.is_user_edge(u, v) and (v != RX or g.is_ap_edge(u, v))
    if v == RX:
        return g.is_ap_edge(u, v)
    return True


def path_length(g: PweGraph, path: list[str]) -> float:
    return math.fsum(g.length(a, b) for a, b in zip(path, path[1:]))


class _FlowNet:
    """Residual network with unit capacities and Euclidean costs."""

    def __init__(self):
        self.head: list[list[int]] = []
        self.to: list[int] = []
        self.cap: list[int] = []
        self.cost: list[float] = []

    def node(self) -> int:
        self.head.append([])
        return len(self.head) - 1

    def arc(self, a: int, b: int, cost: float) -> None:
        for x, y, c, k in ((a, b, cost, 1), (b, a, -cost, 0)):
            self.head[x].append(len(self.to))
            self.to.append(y)
            self.cap.append(k)
            self.cost.append(c)

    def cheapest(self, s: int, t: int) -> Optional[list[int]]:
        """Bellman-Ford over the residual graph; returns the arc list s -> t."""
        n = len(self.head)
        dist = [math.inf] * n
        via = [-1] * n
        dist[s] = 0.0
        for _ in range(n - 1):
            changed = False
            for x in range(n):
                if dist[x] == math.inf:
                    continue
                for e in self.head[x]:
                    if self.cap[e] <= 0:
                        continue
                    y = self.to[e]
                    nd = dist[x] + self.cost[e]
                    if nd < dist[y] - _TIE:
                        dist[y] = nd
                        via[y] = e
                        changed = True
            if not changed:
                break
        if dist[t] == math.inf:
            return None
        arcs, x = [], t
        while x != s:
            e = via[x]
            arcs.append(e)
            x = self.to[e ^ 1]
        return arcs[::-1]


def vertex_disjoint_paths(g: PweGraph, k: int = 1) -> list[list[str]]:
    """Up to ``k`` Tx->Rx paths sharing no interior vertex.

    Each slot is split into an in/out pair joined by a unit-capacity arc, and
    cheapest augmenting paths are pushed one at a time (successive shortest
    paths). After ``m`` augmentations the flow is the cheapest of value ``m``,
    so the answer has maximum cardinality up to ``k`` and, among those, minimum
    total length. Ties resolve deterministically by vertex id order.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if TX not in g.vertices or RX not in g.vertices:
        return []
    net = _FlowNet()
    slots = g.slot_ids()
    s, t = net.node(), net.node()
    v_in, v_out = {}, {}
    for v in slots:
        v_in[v], v_out[v] = net.node(), net.node()
        net.arc(v_in[v], v_out[v], 0.0)
    tail = {TX: s, **v_out}
    head = {RX: t, **v_in}
    for u in [TX] + slots:
        for v in g.neighbors(u):
            if usable_hop(g, u, v):
                net.arc(tail[u], head[v], g.length(u, v))

    flow = 0
    while flow < k:
        arcs = net.cheapest(s, t)
        if arcs is None:
            break
        for e in arcs:
            net.cap[e] -= 1
            net.cap[e ^ 1] += 1
        flow += 1

    name = {s: TX, t: RX}
    for v in slots:
        name[v_in[v]] = v
        name[v_out[v]] = v
    used = {e for e in range(0, len(net.to), 2) if net.cap[e] == 0}
    paths = []
    for _ in range(flow):
        x, path = s, [TX]
        while x != t:
            e = next(e for e in net.head[x] if e in used and e % 2 == 0)
            used.discard(e)
            x = net.to[e]
            if name[x] != path[-1]:
                path.append(name[x])
        paths.append(path)
    paths.sort(key=lambda p: (path_length(g, p), p))
    return paths


def dijkstra(g: PweGraph, src: str, dst: str,
             allowed: Optional[Collection[str]] = None) -> Optional[list[str]]:
    """Shortest src -> dst route by Euclidean length.

    Interior vertices must be slots and, when ``allowed`` is given, members of
    it. Hops touching the Tx or Rx obey the user / access-point edge rules.
    Ties prefer the lexicographically smaller predecessor.
    """
    if src not in g.vertices or dst not in g.vertices:
        return None
    dist = {src: 0.0}
    prev: dict[str, str] = {}
    heap = [(0.0, src)]
    done = set()
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        if u == dst:
            break
        if u != src and (u in (TX, RX) or (allowed is not None and u not in allowed)):
            continue
        for v in g.neighbors(u):
            if v in done or not usable_hop(g, u, v):
                continue
            if v != dst and (v in (TX, RX) or (allowed is not None and v not in allowed)):
                continue
            nd = d + g.length(u, v)
            if nd < dist.get(v, math.inf) - _TIE:
                dist[v] = nd
                prev[v] = u
                heapq.heappush(heap, (nd, v))
    if dst not in done:
        return None
    path = [dst]
    while path[-1] != src:
        path.append(prev[path[-1]])
    return path[::-1]
