from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import InvalidScene
from .geometry import Point2, Wall
from .radio import Device, Role


@dataclass
class CandidateSlot:
    """A point in the sky where a UAV may hover holding one unit."""

    id: str
    position: Point2
    z: float = 1.0
    busy: bool = False


@dataclass
class Scene:
    walls: list[Wall] = field(default_factory=list)
    tx: Optional[Device] = None
    rx: Optional[Device] = None
    slots: list[CandidateSlot] = field(default_factory=list)

    def validate(self) -> None:
        if self.tx is None or self.tx.role is not Role.TX:
            raise InvalidScene("scene needs exactly one transmitter")
        if self.rx is None or self.rx.role is not Role.RX:
            raise InvalidScene("scene needs exactly one receiver")
        ids = [s.id for s in self.slots]
        if len(ids) != len(set(ids)):
            raise InvalidScene("slot ids must be unique")
