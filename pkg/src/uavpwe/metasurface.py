"""Fixed-function passive metasurface units.

Every unit performs exactly one wave manipulation: steering one arrival bearing to
one departure bearing, absorbing, or splitting into several departures. All
angles are travel bearings.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from .errors import DegenerateSteer
from .geometry import (Point2, angle_diff, bearing_of, normalize_bearing,
                       ray_cast, unit_vector)
from .radio import Ray

DEFAULT_TOLERANCE = 10.0
DEFAULT_WIDTH = 1.0


@dataclass(frozen=True)
class Steer:
    src: float
    dst: float

    def __post_init__(self):
        object.__setattr__(self, "src", normalize_bearing(self.src))
        object.__setattr__(self, "dst", normalize_bearing(self.dst))


@dataclass(frozen=True)
class Absorb:
    src: float

    def __post_init__(self):
        object.__setattr__(self, "src", normalize_bearing(self.src))


@dataclass(frozen=True)
class Split:
    src: float
    outs: tuple[float, ...]

    def __post_init__(self):
        outs = tuple(normalize_bearing(o) for o in self.outs)
        if len(set(outs)) < 2 or len(set(outs)) != len(outs):
            raise ValueError("split needs at least two distinct output bearings")
        object.__setattr__(self, "src", normalize_bearing(self.src))
        object.__setattr__(self, "outs", outs)


WaveFunction = Union[Steer, Absorb, Split]


@dataclass
class MetasurfaceUnit:
    id: str
    function: WaveFunction
    width: float = DEFAULT_WIDTH
    busy: bool = False

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError("unit width must be positive")


class InventoryMode(enum.Enum):
    FINITE = "finite"
    IDEAL = "ideal"


@dataclass
class Inventory:
    """Units available at the ground station.

    In ideal mode a unit with exactly the requested angles is fabricated on demand.
    """

    mode: InventoryMode = InventoryMode.IDEAL
    units: list[MetasurfaceUnit] = field(default_factory=list)
    width: float = DEFAULT_WIDTH
    _counter: itertools.count = field(default_factory=itertools.count, repr=False,
                                      compare=False)

    def __post_init__(self):
        ids = [u.id for u in self.units]
        if len(ids) != len(set(ids)):
            raise ValueError("inventory unit ids must be unique")

    @classmethod
    def ideal(cls, width: float = DEFAULT_WIDTH) -> Inventory:
        return cls(InventoryMode.IDEAL, width=width)

    @classmethod
    def finite(cls, units: Sequence[MetasurfaceUnit]) -> Inventory:
        return cls(InventoryMode.FINITE, list(units))

    def release_all(self) -> None:
        for u in self.units:
            u.busy = False


@dataclass(frozen=True)
class PlacedUnit:
    unit: MetasurfaceUnit
    center: Point2
    normal: float
    a: Point2
    b: Point2

    @property
    def segment(self) -> tuple[Point2, Point2]:
        return self.a, self.b


def place(unit: MetasurfaceUnit, center: Point2, normal: float) -> PlacedUnit:
    """Lay ``unit`` as a segment through ``center`` perpendicular to ``normal``."""
    normal = normalize_bearing(normal)
    tx, ty = unit_vector(normal + 90.0)
    h = unit.width / 2.0
    a = Point2(center.x - h * tx, center.y - h * ty)
    b = Point2(center.x + h * tx, center.y + h * ty)
    return PlacedUnit(unit, center, normal, a, b)


def orient(unit: MetasurfaceUnit, center: Point2, allow_passthrough: bool = False) -> PlacedUnit:
    """Place a Steer unit so its normal bisects the turn, like a mirror.

    The normal is the direction of ``u(dst) - u(src)`` and therefore faces the
    incoming wave. A pass-through unit (src == dst) raises DegenerateSteer unless
    ``allow_passthrough`` is set, in which case it faces the incoming wave head on.
    """
    fn = unit.function
    if not isinstance(fn, Steer):
        raise TypeError("orient only handles Steer units; use place() for others")
    fx, fy = unit_vector(fn.src)
    tx, ty = unit_vector(fn.dst)
    nx, ny = tx - fx, ty - fy
    if math.hypot(nx, ny) < 1e-12:
        if not allow_passthrough:
            raise DegenerateSteer(f"steer {fn.src} -> {fn.dst} has no mirror normal")
        return place(unit, center, fn.src + 180.0)
    return place(unit, center, bearing_of(nx, ny))


def faces(placed: PlacedUnit, direction: float) -> bool:
    """True if a ray travelling along ``direction`` strikes the active face."""
    nx, ny = unit_vector(placed.normal)
    dx, dy = unit_vector(direction)
    return dx * nx + dy * ny < 0.0


def accepts(fn: WaveFunction, direction: float, tolerance: float) -> bool:
    return abs(angle_diff(direction, fn.src)) <= tolerance


def scatter(placed: PlacedUnit, incident: Ray, tolerance: float = DEFAULT_TOLERANCE,
            bounce_loss: float = 0.01, hit: Optional[Point2] = None) -> list[Ray]:
    """Rays leaving ``placed`` after ``incident`` strikes it.

    Off-design arrivals and hits on the back face are absorbed.
    """
    if hit is None:
        found = ray_cast(incident.origin, incident.direction,
                         [(placed.a, placed.b, 0)], math.inf)
        if found is None:
            raise ValueError("incident ray does not reach the unit")
        hit = found.point
    fn = placed.unit.function
    if isinstance(fn, Absorb):
        return []
    if not faces(placed, incident.direction) or not accepts(fn, incident.direction, tolerance):
        return []
    length = incident.path_length + incident.origin.distance(hit)
    kept = incident.power * (1.0 - bounce_loss)
    if isinstance(fn, Steer):
        return [Ray(hit, fn.dst, kept, incident.bounces + 1, length)]
    share = kept / len(fn.outs)
    return [Ray(hit, out, share, incident.bounces + 1, length) for out in fn.outs]


def _steer_mismatch(unit: MetasurfaceUnit, src: float, dst: float) -> float:
    fn = unit.function
    return max(abs(angle_diff(fn.src, src)), abs(angle_diff(fn.dst, dst)))


def match_unit(inventory: Inventory, required_from: float, required_to: float,
               tolerance: float = DEFAULT_TOLERANCE) -> Optional[MetasurfaceUnit]:
    """Best free Steer unit for the required (arrival, departure) pair.

    Does not mark the unit busy. Ties go to the earliest unit in the inventory.
    """
    if tolerance < 0:
        raise ValueError("tolerance must be non-negative")
    if inventory.mode is InventoryMode.IDEAL:
        return MetasurfaceUnit(f"ideal-{next(inventory._counter)}",
                               Steer(required_from, required_to), inventory.width)
    best, best_score = None, math.inf
    for unit in inventory.units:
        if unit.busy or not isinstance(unit.function, Steer):
            continue
        score = _steer_mismatch(unit, required_from, required_to)
        if score < best_score:
            best, best_score = unit, score
    if best is not None and best_score <= tolerance:
        return best
    return None


def serves(unit: MetasurfaceUnit, required_from: float, required_to: float,
           tolerance: float) -> bool:
    return isinstance(unit.function, Steer) and \
        _steer_mismatch(unit, required_from, required_to) <= tolerance
