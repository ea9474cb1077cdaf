"""Antenna lobes, ray launching and power bookkeeping."""

from __future__ import annotations

import enum
import math
import random
from dataclasses import dataclass
from typing import Optional

from .errors import NonPositivePower, ZeroDistance
from .geometry import Point2, angle_diff, normalize_bearing

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class AntennaPattern:
    """Single raised-cosine lobe. ``lobe_width`` is the full width in degrees."""

    boresight: float
    lobe_width: float

    def __post_init__(self):
        if not 0.0 < self.lobe_width <= 360.0:
            raise ValueError(f"lobe width must lie in (0, 360], got {self.lobe_width}")
        object.__setattr__(self, "boresight", normalize_bearing(self.boresight))


class Role(enum.Enum):
    TX = "tx"
    RX = "rx"


@dataclass(frozen=True)
class Device:
    position: Point2
    pattern: AntennaPattern
    role: Role
    tx_power_dbm: float = 0.0
    capture_radius: float = 0.5
    # height is carried for bookkeeping only; tracing is planar
    z: float = 0.0
    # secondary pointing angle from the floorplan table; stored, unused
    phi: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.tx_power_dbm):
            raise ValueError("tx power must be finite")
        if not self.capture_radius > 0:
            raise ValueError("capture radius must be positive")

    @property
    def tx_power_mw(self) -> float:
        return dbm_to_mw(self.tx_power_dbm)


class PowerMode(enum.Enum):
    BOUNCE_ONLY = "bounce_only"
    FRIIS = "friis"


@dataclass(frozen=True)
class PowerModel:
    mode: PowerMode = PowerMode.BOUNCE_ONLY
    frequency: float = 2.4e9
    bounce_loss: float = 0.01

    def __post_init__(self):
        if not 0.0 <= self.bounce_loss < 1.0:
            raise ValueError("bounce loss must lie in [0, 1)")
        if not self.frequency > 0:
            raise ValueError("frequency must be positive")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.frequency


@dataclass
class Ray:
    origin: Point2
    direction: float
    power: float
    bounces: int = 0
    path_length: float = 0.0


def antenna_weight(pattern: AntennaPattern, direction: float) -> float:
    """Amplitude cos(pi*delta/alpha) inside the lobe, 0 at and beyond its edges."""
    delta = abs(angle_diff(direction, pattern.boresight))
    half = pattern.lobe_width / 2.0
    if delta >= half:
        return 0.0
    return math.cos(math.pi * delta / pattern.lobe_width)


def launch_offsets(n: int, lobe_width: float) -> list[float]:
    """Cell-centred angular offsets of ``n`` rays spread across the full lobe."""
    if n < 1:
        raise ValueError("need at least one ray")
    step = lobe_width / n
    return [-lobe_width / 2.0 + step * (i + 0.5) for i in range(n)]


def launch_rays(tx: Device, n: int, jitter: float = 0.0,
                rng: Optional[random.Random] = None) -> list[Ray]:
    """Fan of ``n`` rays over the Tx lobe, power split in proportion to the lobe weight.

    ``jitter`` in [0, 1) shifts each ray uniformly within its angular cell.
    """
    offsets = launch_offsets(n, tx.pattern.lobe_width)
    if jitter:
        rng = rng or random.Random(0)
        step = tx.pattern.lobe_width / n
        offsets = [o + (rng.random() - 0.5) * jitter * step for o in offsets]
    directions = [normalize_bearing(tx.pattern.boresight + o) for o in offsets]
    weights = [antenna_weight(tx.pattern, d) for d in directions]
    total = math.fsum(weights)
    p_tx = tx.tx_power_mw
    return [Ray(tx.position, d, p_tx * w / total)
            for d, w in zip(directions, weights)]


def path_gain(model: PowerModel, total_path_length: float, bounces: int) -> float:
    if total_path_length < 0:
        raise ValueError("path length must be non-negative")
    bounce = (1.0 - model.bounce_loss) ** bounces
    if model.mode is PowerMode.BOUNCE_ONLY:
        return bounce
    if total_path_length == 0:
        raise ZeroDistance("free-space gain is undefined at zero distance")
    spread = model.wavelength / (4.0 * math.pi * total_path_length)
    return spread * spread * bounce


def dbm_to_mw(p: float) -> float:
    return 10.0 ** (p / 10.0)


def mw_to_dbm(p: float) -> float:
    if not p > 0:
        raise NonPositivePower(f"cannot express {p} mW in dBm")
    return 10.0 * math.log10(p)
