"""The PWE graph: devices and candidate slots joined by line-of-sight edges."""

from __future__ import annotations

import copy
import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from ..geometry import Point2, bearing_between, line_of_sight
from ..radio import antenna_weight
from ..scene import CandidateSlot, Scene

TX, RX = "tx", "rx"


class VertexKind(enum.Enum):
    TX = "tx"
    RX = "rx"
    SLOT = "slot"


@dataclass(frozen=True)
class Vertex:
    id: str
    position: Point2
    kind: VertexKind


def edge_key(u: str, v: str) -> frozenset[str]:
    return frozenset((u, v))


@dataclass
class PweGraph:
    vertices: dict[str, Vertex] = field(default_factory=dict)
    adj: dict[str, dict[str, float]] = field(default_factory=dict)
    user_edges: set[frozenset[str]] = field(default_factory=set)
    ap_edges: set[frozenset[str]] = field(default_factory=set)

    def add_vertex(self, v: Vertex) -> None:
        self.vertices[v.id] = v
        self.adj.setdefault(v.id, {})

    def add_edge(self, u: str, v: str) -> None:
        length = self.vertices[u].position.distance(self.vertices[v].position)
        self.adj[u][v] = length
        self.adj[v][u] = length

    def has_edge(self, u: str, v: str) -> bool:
        return v in self.adj.get(u, ())

    def length(self, u: str, v: str) -> float:
        return self.adj[u][v]

    def neighbors(self, u: str) -> list[str]:
        return sorted(self.adj[u])

    @property
    def edges(self) -> set[frozenset[str]]:
        return {edge_key(u, v) for u in self.adj for v in self.adj[u]}

    def is_user_edge(self, u: str, v: str) -> bool:
        return edge_key(u, v) in self.user_edges

    def is_ap_edge(self, u: str, v: str) -> bool:
        return edge_key(u, v) in self.ap_edges

    def position(self, v: str) -> Point2:
        return self.vertices[v].position

    def slot_ids(self) -> list[str]:
        return sorted(v.id for v in self.vertices.values() if v.kind is VertexKind.SLOT)

    def without(self, removed: Iterable[str]) -> PweGraph:
        removed = set(removed) - {TX, RX}
        g = PweGraph(
            {k: v for k, v in self.vertices.items() if k not in removed},
            {u: {v: w for v, w in nbrs.items() if v not in removed}
             for u, nbrs in self.adj.items() if u not in removed},
            {e for e in self.user_edges if not e & removed},
            {e for e in self.ap_edges if not e & removed},
        )
        return g

    def copy(self) -> PweGraph:
        return copy.deepcopy(self)


def build_graph(scene: Scene, slots: Sequence[CandidateSlot] | None = None) -> PweGraph:
    """Vertices are Tx, Rx and the slots; an edge joins every LOS pair.

    Tx edges whose departure lies inside the Tx lobe form the user subset; Rx
    edges whose source bearing lies inside the Rx lobe form the access-point
    subset.
    """
    scene.validate()
    slots = scene.slots if slots is None else slots
    g = PweGraph()
    g.add_vertex(Vertex(TX, scene.tx.position, VertexKind.TX))
    g.add_vertex(Vertex(RX, scene.rx.position, VertexKind.RX))
    for s in slots:
        if s.id in (TX, RX):
            raise ValueError(f"slot id {s.id!r} is reserved")
        g.add_vertex(Vertex(s.id, s.position, VertexKind.SLOT))
    ids = list(g.vertices)
    for i, u in enumerate(ids):
        for v in ids[i + 1:]:
            pu, pv = g.position(u), g.position(v)
            if pu != pv and line_of_sight(pu, pv, scene.walls):
                g.add_edge(u, v)
    for v in g.adj[TX]:
        if antenna_weight(scene.tx.pattern, bearing_between(scene.tx.position, g.position(v))) > 0:
            g.user_edges.add(edge_key(TX, v))
    for v in g.adj[RX]:
        if antenna_weight(scene.rx.pattern, bearing_between(scene.rx.position, g.position(v))) > 0:
            g.ap_edges.add(edge_key(RX, v))
    return g
