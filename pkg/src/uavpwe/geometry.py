"""Planar geometry: points, bearings, segment intersection, visibility and ray casting.

Bearings are degrees counterclockwise from +x, canonical in [0, 360), and always
describe a direction of travel.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, NamedTuple, Optional, Sequence

from .errors import CollinearOverlap

# Self-intersection guard applied to every cast (and so after every bounce).
EPS = 1e-9


@dataclass(frozen=True)
class Point2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")

    def __iter__(self):
        yield self.x
        yield self.y

    def __sub__(self, other: Point2) -> tuple[float, float]:
        return (self.x - other.x, self.y - other.y)

    def distance(self, other: Point2) -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def offset(self, bearing: float, length: float) -> Point2:
        rad = math.radians(bearing)
        return Point2(self.x + length * math.cos(rad), self.y + length * math.sin(rad))


class Material(enum.Enum):
    ABSORBER = "absorber"


@dataclass(frozen=True)
class Wall:
    a: Point2
    b: Point2
    material: Material = Material.ABSORBER

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError("wall has zero length")


class Segment(NamedTuple):
    a: Point2
    b: Point2


class Hit(NamedTuple):
    point: Point2
    distance: float
    tag: Hashable


# -- bearings ---------------------------------------------------------------

def normalize_bearing(deg: float) -> float:
    """Wrap ``deg`` into [0, 360)."""
    b = math.fmod(deg, 360.0)
    if b < 0.0:
        b += 360.0
    # fmod of a tiny negative number can round up to exactly 360
    return 0.0 if b >= 360.0 else b


def angle_diff(a: float, b: float) -> float:
    """Signed wrapped difference ``a - b`` in (-180, 180]."""
    d = normalize_bearing(a - b)
    return d - 360.0 if d > 180.0 else d


def bearing_between(p: Point2, q: Point2) -> float:
    """Travel bearing from ``p`` towards ``q``."""
    return normalize_bearing(math.degrees(math.atan2(q.y - p.y, q.x - p.x)))


def unit_vector(bearing: float) -> tuple[float, float]:
    rad = math.radians(bearing)
    return math.cos(rad), math.sin(rad)


def bearing_of(vx: float, vy: float) -> float:
    return normalize_bearing(math.degrees(math.atan2(vy, vx)))


# -- intersection ------------------------------------------------------------

# Shewchuk's bound for the float orient2d determinant; below it the sign is exact-checked.
_CCW_BOUND = (3.0 + 16.0 * 2.0 ** -53) * 2.0 ** -53


def orient2d(a: Point2, b: Point2, c: Point2) -> int:
    """Sign of the turn a -> b -> c: +1 left, -1 right, 0 collinear (exact)."""
    left = (b.x - a.x) * (c.y - a.y)
    right = (b.y - a.y) * (c.x - a.x)
    det = left - right
    if abs(det) > _CCW_BOUND * (abs(left) + abs(right)):
        return 1 if det > 0 else -1
    fa = (Fraction(a.x), Fraction(a.y))
    exact = ((Fraction(b.x) - fa[0]) * (Fraction(c.y) - fa[1])
             - (Fraction(b.y) - fa[1]) * (Fraction(c.x) - fa[0]))
    return (exact > 0) - (exact < 0)


def _collinear_contact(p: Point2, p2: Point2, q: Point2, q2: Point2) -> Optional[Point2]:
    # project on the dominant axis; coordinate comparisons are exact
    key = (lambda pt: (pt.x, pt.y)) if abs(p2.x - p.x) >= abs(p2.y - p.y) else \
        (lambda pt: (pt.y, pt.x))
    lo1, hi1 = sorted((p, p2), key=key)
    lo2, hi2 = sorted((q, q2), key=key)
    lo = max(lo1, lo2, key=key)
    hi = min(hi1, hi2, key=key)
    if key(lo) > key(hi):
        return None
    if lo == hi:
        return lo
    raise CollinearOverlap("segments overlap along a shared sub-segment")


def _crossing(p: Point2, p2: Point2, q: Point2, q2: Point2) -> Optional[Point2]:
    """Intersection of closed segments decided with exact orientation signs."""
    o1, o2 = orient2d(p, p2, q), orient2d(p, p2, q2)
    o3, o4 = orient2d(q, q2, p), orient2d(q, q2, p2)
    if o1 == o2 == o3 == o4 == 0:
        return _collinear_contact(p, p2, q, q2)
    if o1 * o2 > 0 or o3 * o4 > 0:
        return None
    if o3 == 0:
        return p
    if o4 == 0:
        return p2
    if o1 == 0:
        return q
    if o2 == 0:
        return q2
    rx, ry = p2.x - p.x, p2.y - p.y
    sx, sy = q2.x - q.x, q2.y - q.y
    t = _cross(q.x - p.x, q.y - p.y, sx, sy) / _cross(rx, ry, sx, sy)
    t = min(max(t, 0.0), 1.0)
    return Point2(p.x + t * rx, p.y + t * ry)


def _cross(ax: float, ay: float, bx: float, by: float) -> float:
    return ax * by - ay * bx


def segment_intersection(s1: Segment | Sequence[Point2],
                         s2: Segment | Sequence[Point2]) -> Optional[Point2]:
    """Unique intersection point of two closed segments, or None if disjoint.

    Raises CollinearOverlap when they share a sub-segment.
    """
    p, p2 = s1
    q, q2 = s2
    if p == p2 or q == q2:
        raise ValueError("segments must have nonzero length")
    return _crossing(p, p2, q, q2)


def line_of_sight(p: Point2, q: Point2, walls: Sequence[Wall]) -> bool:
    """True iff the open segment pq crosses no wall.

    Touching a wall endpoint counts as blocked; so does running along a wall.
    """
    if p == q:
        raise ValueError("line_of_sight needs two distinct points")
    for w in walls:
        try:
            x = _crossing(p, q, w.a, w.b)
        except CollinearOverlap:
            return False
        if x is not None and x != p and x != q:
            return False
    return True


def ray_cast(origin: Point2, direction: float,
             obstacles: Sequence[tuple[Point2, Point2, Hashable]],
             max_range: float) -> Optional[Hit]:
    """Nearest obstacle hit farther than EPS and within ``max_range``.

    ``obstacles`` holds ``(a, b, tag)`` triples. Endpoint grazes count as hits.
    Ties keep the first obstacle in input order.
    """
    if not max_range > 0:
        raise ValueError("max_range must be positive")
    dx, dy = unit_vector(direction)
    best_t = math.inf
    best = None
    for a, b, tag in obstacles:
        sx, sy = b.x - a.x, b.y - a.y
        ax, ay = a.x - origin.x, a.y - origin.y
        denom = _cross(dx, dy, sx, sy)
        if denom == 0.0:
            if _cross(ax, ay, dx, dy) != 0.0:
                continue
            # ray runs along the obstacle: hit the nearest endpoint ahead of us
            ts = [t for t in (ax * dx + ay * dy, (b.x - origin.x) * dx + (b.y - origin.y) * dy)
                  if t > EPS]
            if not ts:
                continue
            t = min(ts)
        else:
            t = _cross(ax, ay, sx, sy) / denom
            u = _cross(ax, ay, dx, dy) / denom
            if not (0.0 <= u <= 1.0):
                continue
        if EPS < t <= max_range and t < best_t:
            best_t = t
            best = tag
    if best is None:
        return None
    return Hit(Point2(origin.x + best_t * dx, origin.y + best_t * dy), best_t, best)
