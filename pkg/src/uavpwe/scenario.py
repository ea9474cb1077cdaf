"""Line-oriented scenario files.

Grammar (see ``docs/scenario_format.md`` for the full reference)::

    file    := { line }
    line    := blank | comment | header | pairs | unit
    header  := "[" section "]"
    section := scene | wall | tx | rx | slot | inventory | uav
    pairs   := key "=" value { ws key "=" value }
    unit    := "unit" ws pairs            (inside [inventory] only)
    comment := "#" ...                    (also allowed after content)

Lengths are metres, angles degrees, powers dBm and the frequency Hz.
"""

from __future__ import annotations

import dataclasses
import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Optional, Union

from .errors import ParseError, ValidationError
from .geometry import Material, Point2, Wall
from .metasurface import (DEFAULT_TOLERANCE, DEFAULT_WIDTH, Absorb, Inventory, InventoryMode,
                          MetasurfaceUnit, Split, Steer)
from .orchestration.planner import DEFAULT_RETRIES
from .orchestration.uav import Uav, UavFleet
from .radio import AntennaPattern, Device, PowerMode, PowerModel, Role
from .raytrace import DEFAULT_MAX_BOUNCES, DEFAULT_MAX_RANGE, DEFAULT_RAYS
from .scene import CandidateSlot, Scene

GOLDEN = "paper_tableI.pwe"


@dataclass
class Settings:
    name: str = "scenario"
    model: PowerModel = PowerModel()
    tolerance: float = DEFAULT_TOLERANCE
    max_bounces: int = DEFAULT_MAX_BOUNCES
    max_range: float = DEFAULT_MAX_RANGE
    rays: int = DEFAULT_RAYS
    retries: int = DEFAULT_RETRIES
    k: int = 1


@dataclass
class Scenario:
    settings: Settings = field(default_factory=Settings)
    scene: Scene = field(default_factory=Scene)
    inventory: Inventory = field(default_factory=Inventory.ideal)
    fleet: UavFleet = field(default_factory=UavFleet)


def _int(s: str) -> int:
    return int(s)


def _float(s: str) -> float:
    v = float(s)
    if not math.isfinite(v):
        raise ValueError(f"{s!r} is not finite")
    return v


def _str(s: str) -> str:
    if not s:
        raise ValueError("empty value")
    return s


_NAME = re.compile(r"[A-Za-z0-9_.-]+")


def _name(s: str) -> str:
    if not _NAME.fullmatch(s):
        raise ValueError(f"{s!r} must be letters, digits, '-', '_' or '.'")
    return s


def _angles(s: str) -> tuple[float, ...]:
    return tuple(_float(p) for p in s.split(","))


_KEYS: dict[str, dict[str, Callable[[str], object]]] = {
    "scene": {"name": _name, "model": _str, "frequency": _float, "bounce_loss": _float,
              "tolerance": _float, "max_bounces": _int, "max_range": _float, "rays": _int,
              "retries": _int, "k": _int},
    "wall": {"x1": _float, "y1": _float, "x2": _float, "y2": _float, "material": _str},
    "tx": {"x": _float, "y": _float, "z": _float, "power_dbm": _float, "lobe": _float,
           "az": _float, "phi": _float},
    "rx": {"x": _float, "y": _float, "z": _float, "lobe": _float, "az": _float,
           "phi": _float, "capture": _float},
    "slot": {"id": _name, "x": _float, "y": _float, "z": _float},
    "inventory": {"mode": _str, "width": _float},
    "unit": {"id": _name, "kind": _str, "from": _float, "to": _float, "outs": _angles,
             "width": _float},
    "uav": {"id": _name, "x": _float, "y": _float, "range": _float},
}
_REQUIRED = {
    "wall": ("x1", "y1", "x2", "y2"),
    "tx": ("x", "y", "power_dbm", "lobe", "az"),
    "rx": ("x", "y", "lobe", "az"),
    "slot": ("id", "x", "y"),
    "unit": ("id", "kind"),
    "uav": ("id", "x", "y", "range"),
}
_SINGLE = ("scene", "inventory", "tx", "rx")


@dataclass
class _Block:
    kind: str
    line: int
    values: dict = field(default_factory=dict)
    units: list = field(default_factory=list)


def _parse_pairs(tokens: list[str], kind: str, lineno: int) -> dict:
    keys = _KEYS[kind]
    out = {}
    for tok in tokens:
        key, sep, raw = tok.partition("=")
        if not sep or not key:
            raise ParseError(lineno, f"expected key=value, got {tok!r}")
        if key not in keys:
            raise ParseError(lineno, f"unknown key {key!r} in [{kind}]")
        if key in out:
            raise ParseError(lineno, f"duplicate key {key!r}")
        try:
            out[key] = keys[key](raw)
        except ValueError as exc:
            raise ParseError(lineno, f"bad value for {key!r}: {exc}") from None
    return out


def _tokenize(text: str) -> list[_Block]:
    blocks: list[_Block] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ParseError(lineno, "unterminated section header")
            kind = line[1:-1].strip()
            if kind not in _KEYS or kind == "unit":
                raise ParseError(lineno, f"unknown section [{kind}]")
            blocks.append(_Block(kind, lineno))
            continue
        if not blocks:
            raise ParseError(lineno, "content before the first section header")
        block = blocks[-1]
        tokens = line.split()
        if tokens[0] == "unit":
            if block.kind != "inventory":
                raise ParseError(lineno, "unit lines belong in [inventory]")
            block.units.append((lineno, _parse_pairs(tokens[1:], "unit", lineno)))
            continue
        values = _parse_pairs(tokens, block.kind, lineno)
        clash = set(values) & set(block.values)
        if clash:
            raise ParseError(lineno, f"duplicate key {sorted(clash)[0]!r}")
        block.values.update(values)
    return blocks


def _require(block: _Block, kind: Optional[str] = None, values: Optional[dict] = None) -> None:
    kind = kind or block.kind
    values = block.values if values is None else values
    missing = [k for k in _REQUIRED.get(kind, ()) if k not in values]
    if missing:
        raise ValidationError(f"[{kind}] at line {block.line} is missing {', '.join(missing)}")


def _unit(values: dict, default_width: float) -> MetasurfaceUnit:
    kind = values["kind"]
    width = values.get("width", default_width)
    if kind == "steer":
        fn = Steer(values["from"], values["to"])
    elif kind == "absorb":
        fn = Absorb(values["from"])
    elif kind == "split":
        fn = Split(values["from"], values["outs"])
    else:
        raise ValidationError(f"unknown unit kind {kind!r}")
    return MetasurfaceUnit(values["id"], fn, width)


def parse_scenario(text: str) -> Scenario:
    blocks = _tokenize(text)
    for kind in _SINGLE:
        n = sum(b.kind == kind for b in blocks)
        if n > 1:
            raise ValidationError(f"more than one [{kind}] section")
        if kind in ("tx", "rx") and n == 0:
            raise ValidationError(f"missing [{kind}] section")
    try:
        return _build(blocks)
    except KeyError as exc:
        raise ValidationError(f"missing key {exc.args[0]!r}") from None
    except ValidationError:
        raise
    except ValueError as exc:
        raise ValidationError(str(exc)) from None


def _build(blocks: list[_Block]) -> Scenario:
    sc = Scenario()
    walls, slots, uavs = [], [], []
    for b in blocks:
        _require(b)
        v = b.values
        if b.kind == "scene":
            try:
                mode = PowerMode(v.get("model", PowerMode.BOUNCE_ONLY.value))
            except ValueError:
                raise ValidationError(f"unknown model {v['model']!r}") from None
            model = PowerModel(mode, v.get("frequency", 2.4e9), v.get("bounce_loss", 0.01))
            sc.settings = Settings(
                v.get("name", "scenario"), model, v.get("tolerance", DEFAULT_TOLERANCE),
                v.get("max_bounces", DEFAULT_MAX_BOUNCES), v.get("max_range", DEFAULT_MAX_RANGE),
                v.get("rays", DEFAULT_RAYS), v.get("retries", DEFAULT_RETRIES), v.get("k", 1))
        elif b.kind == "wall":
            material = Material(v.get("material", Material.ABSORBER.value))
            walls.append(Wall(Point2(v["x1"], v["y1"]), Point2(v["x2"], v["y2"]), material))
        elif b.kind == "tx":
            sc.scene.tx = Device(Point2(v["x"], v["y"]), AntennaPattern(v["az"], v["lobe"]),
                                 Role.TX, tx_power_dbm=v["power_dbm"], z=v.get("z", 0.0),
                                 phi=v.get("phi", 0.0))
        elif b.kind == "rx":
            sc.scene.rx = Device(Point2(v["x"], v["y"]), AntennaPattern(v["az"], v["lobe"]),
                                 Role.RX, capture_radius=v.get("capture", 0.5),
                                 z=v.get("z", 0.0), phi=v.get("phi", 0.0))
        elif b.kind == "slot":
            slots.append(CandidateSlot(v["id"], Point2(v["x"], v["y"]), v.get("z", 1.0)))
        elif b.kind == "inventory":
            mode = InventoryMode(v.get("mode", "ideal"))
            width = v.get("width", DEFAULT_WIDTH)
            units = []
            for lineno, uv in b.units:
                missing = [k for k in _REQUIRED["unit"] if k not in uv]
                if missing:
                    raise ValidationError(f"unit at line {lineno} is missing {', '.join(missing)}")
                units.append(_unit(uv, width))
            if mode is InventoryMode.IDEAL and units:
                raise ValidationError("an ideal inventory cannot list units")
            sc.inventory = Inventory(mode, units, width)
        elif b.kind == "uav":
            uavs.append(Uav(v["id"], Point2(v["x"], v["y"]), v["range"]))
    sc.scene.walls = walls
    sc.scene.slots = slots
    sc.fleet = UavFleet(uavs)
    ids = [s.id for s in slots]
    if len(ids) != len(set(ids)):
        raise ValidationError("slot ids must be unique")
    if {"tx", "rx"} & set(ids):
        raise ValidationError("slot ids 'tx' and 'rx' are reserved")
    uav_ids = [u.id for u in uavs]
    if len(uav_ids) != len(set(uav_ids)):
        raise ValidationError("uav ids must be unique")
    return sc


def _fmt(v: float) -> str:
    return repr(float(v))


def render_scenario(sc: Scenario) -> str:
    """Canonical text form; ``parse_scenario(render_scenario(s)) == s``."""
    st = sc.settings
    out = ["[scene]",
           f"name={st.name}",
           f"model={st.model.mode.value} frequency={_fmt(st.model.frequency)} "
           f"bounce_loss={_fmt(st.model.bounce_loss)}",
           f"tolerance={_fmt(st.tolerance)} max_bounces={st.max_bounces} "
           f"max_range={_fmt(st.max_range)} rays={st.rays} retries={st.retries} k={st.k}"]
    for w in sc.scene.walls:
        out += ["", "[wall]", f"x1={_fmt(w.a.x)} y1={_fmt(w.a.y)} x2={_fmt(w.b.x)} "
                f"y2={_fmt(w.b.y)} material={w.material.value}"]
    tx, rx = sc.scene.tx, sc.scene.rx
    if tx is not None:
        out += ["", "[tx]", f"x={_fmt(tx.position.x)} y={_fmt(tx.position.y)} z={_fmt(tx.z)}",
                f"power_dbm={_fmt(tx.tx_power_dbm)} lobe={_fmt(tx.pattern.lobe_width)} "
                f"az={_fmt(tx.pattern.boresight)} phi={_fmt(tx.phi)}"]
    if rx is not None:
        out += ["", "[rx]", f"x={_fmt(rx.position.x)} y={_fmt(rx.position.y)} z={_fmt(rx.z)}",
                f"lobe={_fmt(rx.pattern.lobe_width)} az={_fmt(rx.pattern.boresight)} "
                f"phi={_fmt(rx.phi)} capture={_fmt(rx.capture_radius)}"]
    for s in sc.scene.slots:
        out += ["", "[slot]", f"id={s.id} x={_fmt(s.position.x)} y={_fmt(s.position.y)} "
                f"z={_fmt(s.z)}"]
    inv = sc.inventory
    out += ["", "[inventory]", f"mode={inv.mode.value} width={_fmt(inv.width)}"]
    for u in inv.units:
        fn = u.function
        if isinstance(fn, Steer):
            body = f"kind=steer from={_fmt(fn.src)} to={_fmt(fn.dst)}"
        elif isinstance(fn, Absorb):
            body = f"kind=absorb from={_fmt(fn.src)}"
        else:
            body = f"kind=split from={_fmt(fn.src)} outs={','.join(_fmt(o) for o in fn.outs)}"
        out.append(f"unit id={u.id} {body} width={_fmt(u.width)}")
    for u in sc.fleet.uavs:
        out += ["", "[uav]", f"id={u.id} x={_fmt(u.base.x)} y={_fmt(u.base.y)} "
                f"range={_fmt(u.range_budget)}"]
    return "\n".join(out) + "\n"


def load_scenario(path: Union[str, Path]) -> Scenario:
    return parse_scenario(Path(path).read_text())


def golden_text() -> str:
    return resources.files("uavpwe.data").joinpath(GOLDEN).read_text()


def golden_scenario() -> Scenario:
    return parse_scenario(golden_text())


def fresh_inventory(sc: Scenario) -> Inventory:
    """Copy of the scenario inventory with every unit free again."""
    units = [dataclasses.replace(u, busy=False) for u in sc.inventory.units]
    return Inventory(sc.inventory.mode, units, sc.inventory.width)
