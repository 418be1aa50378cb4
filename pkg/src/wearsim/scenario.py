"""Declarative device/workload model and its validation.

A scenario file is a single JSON document with the top-level keys
``devices[]``, ``rails[]``, ``sensors[]``, ``primitives[]``, ``radio``,
``placement{}``, ``duration_s`` and ``battery{}``.  Units are fixed across
the schema: power in mW, data-movement energy in nJ/byte, sizes in bytes,
rates in Hz (bandwidths in bits/s), time in seconds.

Everything in this module is plain data: loading a scenario validates every
cross-reference and numeric invariant once, and the resulting objects are
immutable and safe to share across concurrent sweep workers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path


class ScenarioError(ValueError):
    """A scenario file failed schema or cross-reference validation."""


class Category(str, Enum):
    """Closed set of architectural resource categories."""

    SENSOR = "sensor"
    COMPUTE = "compute"
    MEMORY = "memory"
    STORAGE = "storage"
    INTERCONNECT = "interconnect"
    RADIO = "radio"
    OUTPUT = "output"
    POWER_DELIVERY = "power_delivery"
    SOC_TOP_LEVEL = "soc_top_level"


#: Categories whose service_rate is bytes/second rather than work-units/second.
BYTE_RATE_CATEGORIES = frozenset(
    {Category.MEMORY, Category.STORAGE, Category.INTERCONNECT, Category.RADIO}
)

POWER_TYPES = ("digital_dynamic", "digital_leakage", "analog", "rf")

#: Reserved id of the implicit rail-tree root.
BATTERY = "battery"

ON_DEVICE = "on_device"
OFFLOAD = "offload"


@dataclass(frozen=True)
class PowerState:
    name: str
    power_mw: float


@dataclass(frozen=True)
class Device:
    """A power-consuming component with state-based and per-byte terms."""

    id: str
    category: Category
    states: tuple[PowerState, ...]
    rail: str
    energy_per_byte_nj: float = 0.0
    service_rate: float = 0.0
    capacity_bytes: float = 0.0
    power_decomposition: dict[str, float] = field(default_factory=dict)

    def state_power(self, name: str) -> float:
        for s in self.states:
            if s.name == name:
                return s.power_mw
        raise KeyError(name)

    @property
    def state_names(self) -> set[str]:
        return {s.name for s in self.states}


@dataclass(frozen=True)
class RailNode:
    """One regulator in the power-delivery tree; parent is another rail or the battery."""

    id: str
    efficiency: float
    parent: str = BATTERY


@dataclass(frozen=True)
class SensorStream:
    """A sensed data stream; scalar sensors use width = height = 1."""

    id: str
    device: str
    width: int
    height: int
    channels: int
    bit_depth: int
    rate_hz: float
    codec: str | None = None
    bus: str | None = None
    uploaded_on_offload: bool = True

    @property
    def raw_bandwidth_bps(self) -> float:
        return self.width * self.height * self.channels * self.bit_depth * self.rate_hz


@dataclass(frozen=True)
class Task:
    """One node of a taskgraph.

    ``work`` is work-units for compute devices and payload bytes for
    byte-rate devices (interconnect/memory/storage); duration on the bound
    device is always work / service_rate.
    """

    id: str
    device: str
    work: float
    deps: tuple[str, ...] = ()
    memory_footprint_bytes: float = 0.0
    output_bytes: float = 0.0
    memory: str | None = None


@dataclass(frozen=True)
class Trigger:
    stream: str
    rate_divisor: float = 1.0


@dataclass(frozen=True)
class TaskGraph:
    id: str
    trigger: Trigger
    tasks: tuple[Task, ...]
    deadline_s: float | None = None

    def task(self, tid: str) -> Task:
        for t in self.tasks:
            if t.id == tid:
                return t
        raise KeyError(tid)


@dataclass(frozen=True)
class SensorDemand:
    """A primitive's claim on one stream, possibly at a reduced rate."""

    stream: str
    rate_divisor: float = 1.0


@dataclass(frozen=True)
class Primitive:
    """One egocentric-primitive implementation and its placement constraints."""

    id: str
    sensors: tuple[SensorDemand, ...]
    signal_rate_bytes_per_s: float
    offload_compression: float = 1.0
    offloadable: bool = True
    forced: str | None = None
    on_device_graph: TaskGraph | None = None


@dataclass(frozen=True)
class RadioProfile:
    """Wireless link operating point (one modulation/coding abstraction)."""

    id: str
    throughput_bps: float
    maintenance_power_mw: float
    tx_energy_per_byte_nj: float
    max_bandwidth_bps: float
    device: str | None = None

    @property
    def device_id(self) -> str:
        return self.device if self.device is not None else self.id


@dataclass(frozen=True)
class Battery:
    capacity_wh: float
    target_hours: float


@dataclass(frozen=True)
class Scenario:
    """Complete, validated simulation input."""

    devices: tuple[Device, ...]
    rails: tuple[RailNode, ...]
    sensors: tuple[SensorStream, ...]
    primitives: tuple[Primitive, ...]
    placement: dict[str, str]
    battery: Battery
    duration_s: float
    radio: RadioProfile | None = None
    fallback_radio: RadioProfile | None = None
    fallback_threshold_bps: float = 1e6
    trigger_mode: str = "queue"
    thermal_limit_mw: float = 2000.0

    def device(self, did: str) -> Device:
        return self._device_map[did]

    def stream(self, sid: str) -> SensorStream:
        return self._stream_map[sid]

    def primitive(self, pid: str) -> Primitive:
        return self._primitive_map[pid]

    def rail(self, rid: str) -> RailNode:
        return self._rail_map[rid]

    @property
    def _device_map(self) -> dict[str, Device]:
        return {d.id: d for d in self.devices}

    @property
    def _stream_map(self) -> dict[str, SensorStream]:
        return {s.id: s for s in self.sensors}

    @property
    def _primitive_map(self) -> dict[str, Primitive]:
        return {p.id: p for p in self.primitives}

    @property
    def _rail_map(self) -> dict[str, RailNode]:
        return {r.id: r for r in self.rails}

    @property
    def default_memory(self) -> str | None:
        """The unique Memory device, if there is exactly one."""
        mems = [d.id for d in self.devices if d.category == Category.MEMORY]
        return mems[0] if len(mems) == 1 else None

    def with_placement(self, placement: dict[str, str]) -> "Scenario":
        """Copy of this scenario with a different (validated) placement."""
        new = replace(self, placement=dict(placement))
        _check_placement(new)
        return new


# ---------------------------------------------------------------------------
# Derived static quantities


def sensor_bandwidth(
    stream: SensorStream, compression: float = 1.0, rate_divisor: float = 1.0
) -> float:
    """Bandwidth of a stream in bits/second after compression and rate division."""
    if compression < 1.0:
        raise ScenarioError(f"compression must be >= 1, got {compression}")
    if rate_divisor < 1.0:
        raise ScenarioError(f"rate_divisor must be >= 1, got {rate_divisor}")
    return (
        stream.width
        * stream.height
        * stream.channels
        * stream.bit_depth
        * (stream.rate_hz / rate_divisor)
        / compression
    )


def power_budget(battery: Battery) -> float:
    """Average power ceiling in mW implied by capacity and target runtime."""
    if battery.capacity_wh <= 0 or battery.target_hours <= 0:
        raise ScenarioError("battery capacity and target hours must be positive")
    return 1000.0 * battery.capacity_wh / battery.target_hours


@dataclass(frozen=True)
class UploadDemand:
    """Resolved off-device data demand for one scenario + placement.

    ``per_primitive`` is each primitive's own demand in bytes/s (signal rate
    when on-device, sum of its compressed streams when offloaded).  The total
    counts each physical stream once, at the maximum rate any offloaded
    primitive demands it, so it can be less than the sum of per-primitive
    values when offloaded primitives share a sensor.
    """

    per_primitive: dict[str, float]
    per_stream: dict[str, float]
    signal_bytes_per_s: float

    @property
    def total_bytes_per_s(self) -> float:
        return sum(self.per_stream.values()) + self.signal_bytes_per_s


def upload_demand(scenario: Scenario, placement: dict[str, str] | None = None) -> UploadDemand:
    """Stream-level union of upload demand plus per-primitive contributions."""
    placement = scenario.placement if placement is None else placement
    _check_placement(scenario, placement)

    per_primitive: dict[str, float] = {}
    per_stream: dict[str, float] = {}
    signal_total = 0.0
    for prim in scenario.primitives:
        if placement[prim.id] == ON_DEVICE:
            per_primitive[prim.id] = prim.signal_rate_bytes_per_s
            signal_total += prim.signal_rate_bytes_per_s
            continue
        own = 0.0
        for dem in prim.sensors:
            stream = scenario.stream(dem.stream)
            if not stream.uploaded_on_offload:
                continue
            rate = sensor_bandwidth(stream, prim.offload_compression, dem.rate_divisor) / 8.0
            own += rate
            per_stream[stream.id] = max(per_stream.get(stream.id, 0.0), rate)
        per_primitive[prim.id] = own
    return UploadDemand(per_primitive, per_stream, signal_total)


def effective_upload_bytes(
    scenario: Scenario, placement: dict[str, str] | None = None
) -> dict[str, float]:
    """Per-primitive upload demand in bytes/second under a placement."""
    return upload_demand(scenario, placement).per_primitive


def placement_full_offload(scenario: Scenario) -> dict[str, str]:
    return {
        p.id: ON_DEVICE if p.forced == ON_DEVICE else OFFLOAD for p in scenario.primitives
    }


def placement_full_on_device(scenario: Scenario) -> dict[str, str]:
    return {
        p.id: OFFLOAD if p.forced == OFFLOAD else ON_DEVICE for p in scenario.primitives
    }


PLACEMENT_PRESETS = {
    "full_offload": placement_full_offload,
    "full_on_device": placement_full_on_device,
}


# ---------------------------------------------------------------------------
# Parsing

_SCENARIO_KEYS = {
    "devices", "rails", "sensors", "primitives", "radio", "placement",
    "duration_s", "battery", "fallback_radio", "fallback_threshold_bps",
    "trigger_mode", "thermal_limit_mw",
}
_DEVICE_KEYS = {
    "id", "category", "states", "rail", "energy_per_byte_nj", "service_rate",
    "capacity_bytes", "power_decomposition",
}
_RAIL_KEYS = {"id", "efficiency", "parent"}
_SENSOR_KEYS = {
    "id", "device", "width", "height", "channels", "bit_depth", "rate_hz",
    "codec", "bus", "uploaded_on_offload",
}
_PRIMITIVE_KEYS = {
    "id", "sensors", "signal_rate_bytes_per_s", "offload_compression",
    "offloadable", "forced", "on_device_graph",
}
_GRAPH_KEYS = {"id", "trigger", "tasks", "deadline_s"}
_TASK_KEYS = {"id", "device", "work", "deps", "memory_footprint_bytes", "output_bytes", "memory"}
_RADIO_KEYS = {
    "id", "throughput_bps", "maintenance_power_mw", "tx_energy_per_byte_nj",
    "max_bandwidth_bps", "device",
}


def _reject_unknown(obj: dict, allowed: set[str], where: str, lenient: bool) -> dict:
    unknown = set(obj) - allowed
    if unknown and not lenient:
        raise ScenarioError(f"unknown key(s) {sorted(unknown)} in {where}")
    return {k: v for k, v in obj.items() if k in allowed}


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise ScenarioError(f"missing required key '{key}' in {where}")
    return obj[key]


def _parse_device(obj: dict, lenient: bool) -> Device:
    did = _require(obj, "id", "device")
    obj = _reject_unknown(obj, _DEVICE_KEYS, f"device '{did}'", lenient)
    cat_raw = _require(obj, "category", f"device '{did}'")
    try:
        category = Category(cat_raw)
    except ValueError:
        raise ScenarioError(f"device '{did}': unknown category '{cat_raw}'") from None
    states = tuple(
        PowerState(str(s["name"]), float(s["power_mw"]))
        for s in _require(obj, "states", f"device '{did}'")
    )
    return Device(
        id=str(did),
        category=category,
        states=states,
        rail=str(_require(obj, "rail", f"device '{did}'")),
        energy_per_byte_nj=float(obj.get("energy_per_byte_nj", 0.0)),
        service_rate=float(obj.get("service_rate", 0.0)),
        capacity_bytes=float(obj.get("capacity_bytes", 0.0)),
        power_decomposition={k: float(v) for k, v in obj.get("power_decomposition", {}).items()},
    )


def _parse_task(obj: dict, lenient: bool) -> Task:
    tid = _require(obj, "id", "task")
    obj = _reject_unknown(obj, _TASK_KEYS, f"task '{tid}'", lenient)
    return Task(
        id=str(tid),
        device=str(_require(obj, "device", f"task '{tid}'")),
        work=float(_require(obj, "work", f"task '{tid}'")),
        deps=tuple(str(d) for d in obj.get("deps", [])),
        memory_footprint_bytes=float(obj.get("memory_footprint_bytes", 0.0)),
        output_bytes=float(obj.get("output_bytes", 0.0)),
        memory=obj.get("memory"),
    )


def _parse_graph(obj: dict, lenient: bool) -> TaskGraph:
    gid = _require(obj, "id", "taskgraph")
    obj = _reject_unknown(obj, _GRAPH_KEYS, f"taskgraph '{gid}'", lenient)
    trig = _require(obj, "trigger", f"taskgraph '{gid}'")
    trigger = Trigger(str(trig["stream"]), float(trig.get("rate_divisor", 1.0)))
    tasks = tuple(_parse_task(t, lenient) for t in _require(obj, "tasks", f"taskgraph '{gid}'"))
    deadline = obj.get("deadline_s")
    return TaskGraph(str(gid), trigger, tasks, None if deadline is None else float(deadline))


def _parse_sensor_demand(entry) -> SensorDemand:
    if isinstance(entry, str):
        return SensorDemand(entry)
    return SensorDemand(str(entry["stream"]), float(entry.get("rate_divisor", 1.0)))


def _parse_primitive(obj: dict, lenient: bool) -> Primitive:
    pid = _require(obj, "id", "primitive")
    obj = _reject_unknown(obj, _PRIMITIVE_KEYS, f"primitive '{pid}'", lenient)
    graph_obj = obj.get("on_device_graph")
    return Primitive(
        id=str(pid),
        sensors=tuple(_parse_sensor_demand(e) for e in _require(obj, "sensors", f"primitive '{pid}'")),
        signal_rate_bytes_per_s=float(_require(obj, "signal_rate_bytes_per_s", f"primitive '{pid}'")),
        offload_compression=float(obj.get("offload_compression", 1.0)),
        offloadable=bool(obj.get("offloadable", True)),
        forced=obj.get("forced"),
        on_device_graph=None if graph_obj is None else _parse_graph(graph_obj, lenient),
    )


def _parse_radio(obj: dict, lenient: bool) -> RadioProfile:
    rid = _require(obj, "id", "radio profile")
    obj = _reject_unknown(obj, _RADIO_KEYS, f"radio profile '{rid}'", lenient)
    return RadioProfile(
        id=str(rid),
        throughput_bps=float(_require(obj, "throughput_bps", f"radio '{rid}'")),
        maintenance_power_mw=float(_require(obj, "maintenance_power_mw", f"radio '{rid}'")),
        tx_energy_per_byte_nj=float(_require(obj, "tx_energy_per_byte_nj", f"radio '{rid}'")),
        max_bandwidth_bps=float(_require(obj, "max_bandwidth_bps", f"radio '{rid}'")),
        device=obj.get("device"),
    )


def scenario_from_dict(doc: dict, lenient: bool = False) -> Scenario:
    """Build and validate a Scenario from a parsed JSON document."""
    if not isinstance(doc, dict):
        raise ScenarioError("scenario document must be a JSON object")
    doc = _reject_unknown(doc, _SCENARIO_KEYS, "scenario", lenient)
    battery_obj = _require(doc, "battery", "scenario")
    battery = Battery(
        float(_require(battery_obj, "capacity_wh", "battery")),
        float(_require(battery_obj, "target_hours", "battery")),
    )
    radio_obj = doc.get("radio")
    fallback_obj = doc.get("fallback_radio")
    scenario = Scenario(
        devices=tuple(_parse_device(d, lenient) for d in doc.get("devices", [])),
        rails=tuple(
            RailNode(
                str(_require(r, "id", "rail")),
                float(_require(_reject_unknown(r, _RAIL_KEYS, f"rail '{r.get('id')}'", lenient),
                               "efficiency", f"rail '{r.get('id')}'")),
                str(r.get("parent", BATTERY)),
            )
            for r in doc.get("rails", [])
        ),
        sensors=tuple(
            SensorStream(
                id=str(_require(s, "id", "sensor")),
                device=str(_require(s, "device", f"sensor '{s.get('id')}'")),
                width=int(_require(s, "width", f"sensor '{s.get('id')}'")),
                height=int(_require(s, "height", f"sensor '{s.get('id')}'")),
                channels=int(_require(s, "channels", f"sensor '{s.get('id')}'")),
                bit_depth=int(_require(s, "bit_depth", f"sensor '{s.get('id')}'")),
                rate_hz=float(_require(s, "rate_hz", f"sensor '{s.get('id')}'")),
                codec=s.get("codec"),
                bus=s.get("bus"),
                uploaded_on_offload=bool(s.get("uploaded_on_offload", True)),
            )
            for s in (
                _reject_unknown(s, _SENSOR_KEYS, f"sensor '{s.get('id')}'", lenient)
                for s in doc.get("sensors", [])
            )
        ),
        primitives=tuple(_parse_primitive(p, lenient) for p in doc.get("primitives", [])),
        placement={str(k): str(v) for k, v in doc.get("placement", {}).items()},
        battery=battery,
        duration_s=float(_require(doc, "duration_s", "scenario")),
        radio=None if radio_obj is None else _parse_radio(radio_obj, lenient),
        fallback_radio=None if fallback_obj is None else _parse_radio(fallback_obj, lenient),
        fallback_threshold_bps=float(doc.get("fallback_threshold_bps", 1e6)),
        trigger_mode=str(doc.get("trigger_mode", "queue")),
        thermal_limit_mw=float(doc.get("thermal_limit_mw", 2000.0)),
    )
    validate(scenario)
    return scenario


def load_scenario(path: str | Path, lenient: bool = False) -> Scenario:
    """Load and fully validate a scenario file."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"parse error in {path}: {exc}") from exc
    return scenario_from_dict(doc, lenient=lenient)


# ---------------------------------------------------------------------------
# Serialization (round-trips through scenario_from_dict)


def scenario_to_dict(s: Scenario) -> dict:
    def radio_dict(r: RadioProfile) -> dict:
        out = {
            "id": r.id,
            "throughput_bps": r.throughput_bps,
            "maintenance_power_mw": r.maintenance_power_mw,
            "tx_energy_per_byte_nj": r.tx_energy_per_byte_nj,
            "max_bandwidth_bps": r.max_bandwidth_bps,
        }
        if r.device is not None:
            out["device"] = r.device
        return out

    def task_dict(t: Task) -> dict:
        out = {"id": t.id, "device": t.device, "work": t.work}
        if t.deps:
            out["deps"] = list(t.deps)
        if t.memory_footprint_bytes:
            out["memory_footprint_bytes"] = t.memory_footprint_bytes
        if t.output_bytes:
            out["output_bytes"] = t.output_bytes
        if t.memory is not None:
            out["memory"] = t.memory
        return out

    def graph_dict(g: TaskGraph) -> dict:
        out = {
            "id": g.id,
            "trigger": {"stream": g.trigger.stream, "rate_divisor": g.trigger.rate_divisor},
            "tasks": [task_dict(t) for t in g.tasks],
        }
        if g.deadline_s is not None:
            out["deadline_s"] = g.deadline_s
        return out

    doc: dict = {
        "devices": [
            {
                "id": d.id,
                "category": d.category.value,
                "states": [{"name": st.name, "power_mw": st.power_mw} for st in d.states],
                "rail": d.rail,
                **({"energy_per_byte_nj": d.energy_per_byte_nj} if d.energy_per_byte_nj else {}),
                **({"service_rate": d.service_rate} if d.service_rate else {}),
                **({"capacity_bytes": d.capacity_bytes} if d.capacity_bytes else {}),
                **(
                    {"power_decomposition": dict(d.power_decomposition)}
                    if d.power_decomposition
                    else {}
                ),
            }
            for d in s.devices
        ],
        "rails": [
            {"id": r.id, "efficiency": r.efficiency, "parent": r.parent} for r in s.rails
        ],
        "sensors": [
            {
                "id": st.id,
                "device": st.device,
                "width": st.width,
                "height": st.height,
                "channels": st.channels,
                "bit_depth": st.bit_depth,
                "rate_hz": st.rate_hz,
                **({"codec": st.codec} if st.codec else {}),
                **({"bus": st.bus} if st.bus else {}),
                **({} if st.uploaded_on_offload else {"uploaded_on_offload": False}),
            }
            for st in s.sensors
        ],
        "primitives": [
            {
                "id": p.id,
                "sensors": [
                    {"stream": d.stream, "rate_divisor": d.rate_divisor} for d in p.sensors
                ],
                "signal_rate_bytes_per_s": p.signal_rate_bytes_per_s,
                "offload_compression": p.offload_compression,
                "offloadable": p.offloadable,
                **({"forced": p.forced} if p.forced else {}),
                **(
                    {"on_device_graph": graph_dict(p.on_device_graph)}
                    if p.on_device_graph is not None
                    else {}
                ),
            }
            for p in s.primitives
        ],
        "placement": dict(s.placement),
        "duration_s": s.duration_s,
        "battery": {"capacity_wh": s.battery.capacity_wh, "target_hours": s.battery.target_hours},
    }
    if s.radio is not None:
        doc["radio"] = radio_dict(s.radio)
    if s.fallback_radio is not None:
        doc["fallback_radio"] = radio_dict(s.fallback_radio)
    if s.fallback_threshold_bps != 1e6:
        doc["fallback_threshold_bps"] = s.fallback_threshold_bps
    if s.trigger_mode != "queue":
        doc["trigger_mode"] = s.trigger_mode
    if s.thermal_limit_mw != 2000.0:
        doc["thermal_limit_mw"] = s.thermal_limit_mw
    return doc


def save_scenario(s: Scenario, path: str | Path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(s), indent=2) + "\n")


# ---------------------------------------------------------------------------
# Validation


def _check_placement(scenario: Scenario, placement: dict[str, str] | None = None) -> None:
    placement = scenario.placement if placement is None else placement
    for prim in scenario.primitives:
        if prim.id not in placement:
            raise ScenarioError(f"placement missing primitive '{prim.id}'")
        value = placement[prim.id]
        if value not in (ON_DEVICE, OFFLOAD):
            raise ScenarioError(
                f"placement for '{prim.id}' must be '{ON_DEVICE}' or '{OFFLOAD}', got '{value}'"
            )
        if prim.forced is not None and value != prim.forced:
            raise ScenarioError(
                f"primitive '{prim.id}' is forced '{prim.forced}' but placed '{value}'"
            )
    for pid in placement:
        if pid not in scenario._primitive_map:
            raise ScenarioError(f"placement references unknown primitive '{pid}'")


def _check_rail_tree(scenario: Scenario) -> None:
    rails = scenario._rail_map
    for rail in scenario.rails:
        if rail.id == BATTERY:
            raise ScenarioError("rail id 'battery' is reserved for the implicit root")
        if not (0.0 < rail.efficiency <= 1.0):
            raise ScenarioError(
                f"rail '{rail.id}': efficiency must be in (0, 1], got {rail.efficiency}"
            )
        if rail.parent != BATTERY and rail.parent not in rails:
            raise ScenarioError(f"rail '{rail.id}': unknown parent '{rail.parent}'")
    # walk to the root from every rail; revisiting a node means a cycle
    for rail in scenario.rails:
        seen = set()
        node = rail
        while node.parent != BATTERY:
            if node.id in seen:
                raise ScenarioError(f"rail cycle involving '{rail.id}'")
            seen.add(node.id)
            node = rails[node.parent]


def _check_graph(graph: TaskGraph, scenario: Scenario, owner: str) -> None:
    ids = [t.id for t in graph.tasks]
    if len(set(ids)) != len(ids):
        raise ScenarioError(f"taskgraph '{graph.id}': duplicate task ids")
    task_map = {t.id: t for t in graph.tasks}
    if graph.trigger.stream not in scenario._stream_map:
        raise ScenarioError(
            f"taskgraph '{graph.id}': trigger references unknown stream '{graph.trigger.stream}'"
        )
    if graph.trigger.rate_divisor < 1.0:
        raise ScenarioError(f"taskgraph '{graph.id}': trigger rate_divisor must be >= 1")
    for t in graph.tasks:
        if t.device not in scenario._device_map:
            raise ScenarioError(f"task '{graph.id}/{t.id}': unknown device '{t.device}'")
        if scenario.device(t.device).service_rate <= 0:
            raise ScenarioError(
                f"task '{graph.id}/{t.id}': device '{t.device}' has no positive service_rate"
            )
        if t.work < 0:
            raise ScenarioError(f"task '{graph.id}/{t.id}': work must be >= 0")
        for dep in t.deps:
            if dep not in task_map:
                raise ScenarioError(f"task '{graph.id}/{t.id}': unknown dep '{dep}'")
        if t.memory is not None:
            if t.memory not in scenario._device_map:
                raise ScenarioError(f"task '{graph.id}/{t.id}': unknown memory '{t.memory}'")
            if scenario.device(t.memory).category not in (Category.MEMORY, Category.STORAGE):
                raise ScenarioError(
                    f"task '{graph.id}/{t.id}': '{t.memory}' is not a memory/storage device"
                )
    # cycle check: iteratively strip tasks whose deps are all stripped
    remaining = dict(task_map)
    while remaining:
        ready = [tid for tid, t in remaining.items() if all(d not in remaining for d in t.deps)]
        if not ready:
            raise ScenarioError(
                f"taskgraph '{graph.id}': dependency cycle among {sorted(remaining)}"
            )
        for tid in ready:
            del remaining[tid]


def _check_radio(profile: RadioProfile, scenario: Scenario) -> None:
    if profile.throughput_bps <= 0:
        raise ScenarioError(f"radio '{profile.id}': throughput must be > 0")
    if profile.maintenance_power_mw < 0:
        raise ScenarioError(f"radio '{profile.id}': maintenance power must be >= 0")
    dev = scenario._device_map.get(profile.device_id)
    if dev is None:
        raise ScenarioError(f"radio '{profile.id}': unknown device '{profile.device_id}'")
    if dev.category != Category.RADIO:
        raise ScenarioError(f"radio '{profile.id}': device '{dev.id}' is not category radio")
    missing = {"maintain", "tx"} - dev.state_names
    if missing:
        raise ScenarioError(
            f"radio device '{dev.id}' is missing required state(s) {sorted(missing)}"
        )


def validate(scenario: Scenario) -> None:
    """Check every invariant; raises ScenarioError naming the offending entity."""
    device_ids = [d.id for d in scenario.devices]
    if len(set(device_ids)) != len(device_ids):
        raise ScenarioError("duplicate device ids")
    rail_ids = [r.id for r in scenario.rails]
    if len(set(rail_ids)) != len(rail_ids):
        raise ScenarioError("duplicate rail ids")
    stream_ids = [s.id for s in scenario.sensors]
    if len(set(stream_ids)) != len(stream_ids):
        raise ScenarioError("duplicate sensor stream ids")
    prim_ids = [p.id for p in scenario.primitives]
    if len(set(prim_ids)) != len(prim_ids):
        raise ScenarioError("duplicate primitive ids")

    _check_rail_tree(scenario)

    for dev in scenario.devices:
        if not dev.states:
            raise ScenarioError(f"device '{dev.id}': needs at least one power state")
        names = [s.name for s in dev.states]
        if len(set(names)) != len(names):
            raise ScenarioError(f"device '{dev.id}': duplicate state names")
        if "idle" not in names:
            raise ScenarioError(f"device '{dev.id}': missing required 'idle' state")
        for st in dev.states:
            if st.power_mw < 0:
                raise ScenarioError(f"device '{dev.id}': state '{st.name}' power must be >= 0")
        if dev.energy_per_byte_nj < 0:
            raise ScenarioError(f"device '{dev.id}': energy_per_byte_nj must be >= 0")
        if dev.rail != BATTERY and dev.rail not in scenario._rail_map:
            raise ScenarioError(f"device '{dev.id}': unknown rail '{dev.rail}'")
        if dev.power_decomposition:
            extra = set(dev.power_decomposition) - set(POWER_TYPES)
            if extra:
                raise ScenarioError(
                    f"device '{dev.id}': unknown power type(s) {sorted(extra)}"
                )
            if any(not (0.0 <= f <= 1.0) for f in dev.power_decomposition.values()):
                raise ScenarioError(f"device '{dev.id}': decomposition fractions not in [0, 1]")
            total = sum(dev.power_decomposition.values())
            if not math.isclose(total, 1.0, abs_tol=1e-9):
                raise ScenarioError(
                    f"device '{dev.id}': power_decomposition sums to {total}, expected 1"
                )

    for stream in scenario.sensors:
        if stream.device not in scenario._device_map:
            raise ScenarioError(f"sensor '{stream.id}': unknown device '{stream.device}'")
        if scenario.device(stream.device).category != Category.SENSOR:
            raise ScenarioError(f"sensor '{stream.id}': device '{stream.device}' is not a sensor")
        if min(stream.width, stream.height, stream.channels, stream.bit_depth) < 1:
            raise ScenarioError(f"sensor '{stream.id}': dimensions must be >= 1")
        if stream.rate_hz <= 0:
            raise ScenarioError(f"sensor '{stream.id}': rate must be > 0")
        for ref, label in ((stream.codec, "codec"), (stream.bus, "bus")):
            if ref is not None and ref not in scenario._device_map:
                raise ScenarioError(f"sensor '{stream.id}': unknown {label} device '{ref}'")

    for prim in scenario.primitives:
        if prim.offload_compression < 1.0:
            raise ScenarioError(f"primitive '{prim.id}': offload_compression must be >= 1")
        if prim.signal_rate_bytes_per_s < 0:
            raise ScenarioError(f"primitive '{prim.id}': signal rate must be >= 0")
        if not prim.sensors:
            raise ScenarioError(f"primitive '{prim.id}': needs at least one sensor stream")
        if not prim.offloadable and prim.forced not in (ON_DEVICE, OFFLOAD):
            raise ScenarioError(
                f"primitive '{prim.id}': non-offloadable primitives must declare 'forced'"
            )
        if prim.forced not in (None, ON_DEVICE, OFFLOAD):
            raise ScenarioError(f"primitive '{prim.id}': invalid forced value '{prim.forced}'")
        compressed = 0.0
        for dem in prim.sensors:
            if dem.stream not in scenario._stream_map:
                raise ScenarioError(f"primitive '{prim.id}': unknown stream '{dem.stream}'")
            if dem.rate_divisor < 1.0:
                raise ScenarioError(f"primitive '{prim.id}': rate_divisor must be >= 1")
            compressed += (
                sensor_bandwidth(
                    scenario.stream(dem.stream), prim.offload_compression, dem.rate_divisor
                )
                / 8.0
            )
        # signals are a compression of the sensor data they are computed from
        if prim.signal_rate_bytes_per_s > compressed * (1 + 1e-12):
            raise ScenarioError(
                f"primitive '{prim.id}': signal rate {prim.signal_rate_bytes_per_s} B/s "
                f"exceeds its compressed sensor bandwidth {compressed} B/s"
            )
        if prim.on_device_graph is not None:
            _check_graph(prim.on_device_graph, scenario, prim.id)
        elif prim.forced != OFFLOAD:
            raise ScenarioError(
                f"primitive '{prim.id}': on_device_graph required unless forced offload"
            )

    graph_ids = [p.on_device_graph.id for p in scenario.primitives if p.on_device_graph]
    if len(set(graph_ids)) != len(graph_ids):
        raise ScenarioError("duplicate taskgraph ids")

    _check_placement(scenario)

    if scenario.duration_s <= 0:
        raise ScenarioError("duration_s must be > 0")
    if scenario.battery.capacity_wh <= 0 or scenario.battery.target_hours <= 0:
        raise ScenarioError("battery capacity_wh and target_hours must be > 0")
    if scenario.trigger_mode not in ("queue", "drop"):
        raise ScenarioError(f"trigger_mode must be 'queue' or 'drop', got '{scenario.trigger_mode}'")

    demand = upload_demand(scenario)
    if demand.total_bytes_per_s > 0:
        if scenario.radio is None:
            raise ScenarioError(
                "scenario has off-device upload demand but no radio profile"
            )
    if scenario.radio is not None:
        _check_radio(scenario.radio, scenario)
        if demand.total_bytes_per_s * 8.0 > scenario.radio.max_bandwidth_bps:
            raise ScenarioError(
                f"upload demand {demand.total_bytes_per_s * 8.0:.0f} b/s exceeds radio "
                f"'{scenario.radio.id}' max_bandwidth {scenario.radio.max_bandwidth_bps:.0f} b/s"
            )
    if scenario.fallback_radio is not None:
        _check_radio(scenario.fallback_radio, scenario)
