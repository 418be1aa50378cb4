"""Deterministic event-driven execution of taskgraphs against device resources.

Devices are single-server FIFO queues.  Every event is ordered by
``(time, seq)`` where ``seq`` is a monotonically increasing integer assigned
at scheduling time, so a given scenario always replays identically, on any
machine, at any parallelism of the surrounding sweep.

Taskgraphs of on-device primitives fire at their trigger's rate.  Data
movement off the device (and through sensor readout, codec and bus paths) is
throughput-based: only duty and byte counts affect power, not burst timing.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from enum import Enum

from .scenario import (
    BYTE_RATE_CATEGORIES,
    ON_DEVICE,
    Category,
    RadioProfile,
    Scenario,
    upload_demand,
)

_EPS = 1e-12


class SimulationError(RuntimeError):
    """The engine hit a condition the scenario declares fatal."""


class EventKind(Enum):
    TRIGGER_FIRE = "trigger_fire"
    TASK_READY = "task_ready"
    TASK_START = "task_start"
    TASK_END = "task_end"
    TRANSFER_END = "transfer_end"


@dataclass
class DeviceTimeline:
    """Per-device telemetry accumulated over one run."""

    state_seconds: dict[str, float] = field(default_factory=dict)
    intervals: list[tuple[str, float, float]] = field(default_factory=list)
    bytes_moved: float = 0.0
    queue_peak: int = 0
    busy_intervals: int = 0


@dataclass
class GraphStats:
    firings: int = 0
    completed: int = 0
    deadline_misses: int = 0
    dropped: int = 0
    latencies: list[float] = field(default_factory=list)

    @property
    def mean_latency_s(self) -> float:
        return sum(self.latencies) / len(self.latencies) if self.latencies else 0.0

    @property
    def max_latency_s(self) -> float:
        return max(self.latencies) if self.latencies else 0.0


@dataclass
class RadioSchedule:
    tx_duty: float
    feasible: bool
    profile: RadioProfile | None = None


@dataclass
class SimTrace:
    """Everything power estimation needs from one simulation run."""

    duration_s: float
    timelines: dict[str, DeviceTimeline]
    graph_stats: dict[str, GraphStats]
    upload_bytes: float = 0.0
    upload_demand_bytes_per_s: float = 0.0
    radio_backlog_bytes: float = 0.0
    radio_device: str | None = None
    selected_radio: str | None = None
    diagnostics: list[str] = field(default_factory=list)


def radio_schedule(demand_bytes_per_s: float, profile: RadioProfile) -> RadioSchedule:
    """Duty split of a link carrying a steady byte demand.

    Transmission occupies 8*demand/throughput of the time; the rest keeps the
    link alive in ``maintain``.  Demand above max bandwidth is infeasible and
    saturates at full duty.
    """
    if demand_bytes_per_s < 0:
        raise ValueError("demand must be >= 0")
    bits = 8.0 * demand_bytes_per_s
    return RadioSchedule(
        tx_duty=min(1.0, bits / profile.throughput_bps),
        feasible=bits <= profile.max_bandwidth_bps,
        profile=profile,
    )


class _Timeline:
    """State occupancy recorder; intervals tile [0, duration] exactly."""

    __slots__ = ("state", "since", "out", "touched")

    def __init__(self) -> None:
        self.state = "idle"
        self.since = 0.0
        self.out = DeviceTimeline()
        self.touched = False

    def transition(self, new_state: str, now: float) -> None:
        if new_state == self.state:
            return
        self._close(now)
        self.state = new_state
        self.since = now
        self.touched = True

    def _close(self, now: float) -> None:
        if now > self.since:
            span = now - self.since
            self.out.state_seconds[self.state] = (
                self.out.state_seconds.get(self.state, 0.0) + span
            )
            self.out.intervals.append((self.state, self.since, now))

    def finish(self, duration: float) -> DeviceTimeline:
        self._close(duration)
        if not self.out.state_seconds:
            self.out.state_seconds[self.state] = duration
            self.out.intervals.append((self.state, 0.0, duration))
        return self.out


@dataclass
class _Firing:
    graph_id: str
    index: int
    trigger_time: float
    deadline: float
    pending_deps: dict[str, int]
    remaining_tasks: int


class _DeviceRuntime:
    __slots__ = ("device", "timeline", "queue", "current", "byte_rate")

    def __init__(self, device) -> None:
        self.device = device
        self.timeline = _Timeline()
        self.queue: list = []
        self.current = None
        self.byte_rate = device.category in BYTE_RATE_CATEGORIES


def run(
    scenario: Scenario,
    placement: dict[str, str] | None = None,
    radio_profile: RadioProfile | None = None,
    radio_demand_scale: float = 1.0,
    strict_memory: bool = False,
) -> SimTrace:
    """Simulate the scenario and return per-device telemetry.

    ``radio_profile`` overrides the scenario's link (used by fallback
    selection); ``radio_demand_scale`` scales only the off-device byte demand
    (used by the compression sweep, which holds compute power fixed).
    """
    placement = scenario.placement if placement is None else placement
    duration = scenario.duration_s
    runtimes = {d.id: _DeviceRuntime(d) for d in scenario.devices}
    diagnostics: list[str] = []

    # --- event-driven portion: on-device taskgraphs -----------------------
    graphs = []
    for prim in scenario.primitives:
        if placement[prim.id] == ON_DEVICE and prim.on_device_graph is not None:
            graphs.append(prim.on_device_graph)

    stats = {g.id: GraphStats() for g in graphs}
    heap: list = []
    seq = itertools.count()

    def push(time: float, kind: EventKind, payload) -> None:
        heapq.heappush(heap, (time, next(seq), kind, payload))

    trigger_events = []
    for g in graphs:
        stream = scenario.stream(g.trigger.stream)
        period = g.trigger.rate_divisor / stream.rate_hz
        deadline = g.deadline_s if g.deadline_s is not None else period
        k = 0
        while (t := k * period) < duration - _EPS:
            trigger_events.append((t, g.id, k, g, deadline))
            k += 1
    trigger_events.sort(key=lambda e: (e[0], e[1], e[2]))
    for t, _, k, g, deadline in trigger_events:
        push(t, EventKind.TRIGGER_FIRE, (g, k, deadline))

    graph_defs = {g.id: g for g in graphs}
    dependents: dict[str, dict[str, list[str]]] = {}
    for g in graphs:
        deps: dict[str, list[str]] = {t.id: [] for t in g.tasks}
        for t in g.tasks:
            for d in t.deps:
                deps[d].append(t.id)
        for lst in deps.values():
            lst.sort()
        dependents[g.id] = deps

    last_firing: dict[str, _Firing] = {}
    all_firings: list[_Firing] = []
    mem_usage: dict[str, float] = {}
    mem_warned: set[str] = set()
    event_tasked: set[str] = set()

    def mem_target(task) -> str | None:
        return task.memory if task.memory is not None else scenario.default_memory

    def start_task(rt: _DeviceRuntime, firing: _Firing, task, now: float) -> None:
        rt.current = (firing, task)
        if rt.timeline.state != "active":
            rt.timeline.out.busy_intervals += 1
        rt.timeline.transition("active", now)
        mem = mem_target(task)
        if mem is not None and task.memory_footprint_bytes > 0:
            mem_usage[mem] = mem_usage.get(mem, 0.0) + task.memory_footprint_bytes
            cap = scenario.device(mem).capacity_bytes
            if cap > 0 and mem_usage[mem] > cap:
                msg = (
                    f"memory '{mem}' over-committed: {mem_usage[mem]:.0f} B live "
                    f"> capacity {cap:.0f} B (task {firing.graph_id}/{task.id})"
                )
                if strict_memory:
                    raise SimulationError(msg)
                if mem not in mem_warned:
                    diagnostics.append(msg)
                    mem_warned.add(mem)
        end = now + task.work / rt.device.service_rate
        kind = EventKind.TRANSFER_END if rt.byte_rate else EventKind.TASK_END
        push(end, kind, (firing, task))

    def task_ready(firing: _Firing, task, now: float) -> None:
        rt = runtimes[task.device]
        event_tasked.add(task.device)
        if rt.current is None:
            start_task(rt, firing, task, now)
        else:
            rt.queue.append((firing, task))
            rt.timeline.out.queue_peak = max(rt.timeline.out.queue_peak, len(rt.queue))

    def finish_task(firing: _Firing, task, now: float) -> None:
        rt = runtimes[task.device]
        if rt.byte_rate:
            rt.timeline.out.bytes_moved += task.work
        rt.timeline.out.bytes_moved += task.output_bytes
        mem = mem_target(task)
        if mem is not None and task.memory_footprint_bytes > 0:
            mem_usage[mem] -= task.memory_footprint_bytes
        rt.current = None
        if rt.queue:
            next_firing, next_task = rt.queue.pop(0)
            start_task(rt, next_firing, next_task, now)
        else:
            rt.timeline.transition("idle", now)

        firing.remaining_tasks -= 1
        g = graph_defs[firing.graph_id]
        if firing.remaining_tasks == 0:
            st = stats[firing.graph_id]
            latency = now - firing.trigger_time
            st.completed += 1
            st.latencies.append(latency)
            if latency > firing.deadline + _EPS:
                st.deadline_misses += 1
        for dep_id in dependents[firing.graph_id][task.id]:
            firing.pending_deps[dep_id] -= 1
            if firing.pending_deps[dep_id] == 0:
                push(now, EventKind.TASK_READY, (firing, g.task(dep_id)))

    while heap:
        time, _, kind, payload = heapq.heappop(heap)
        if time > duration + _EPS:
            break
        if kind == EventKind.TRIGGER_FIRE:
            g, k, deadline = payload
            st = stats[g.id]
            prev = last_firing.get(g.id)
            if scenario.trigger_mode == "drop" and prev is not None and prev.remaining_tasks > 0:
                st.dropped += 1
                continue
            st.firings += 1
            firing = _Firing(
                graph_id=g.id,
                index=k,
                trigger_time=time,
                deadline=deadline,
                pending_deps={t.id: len(t.deps) for t in g.tasks},
                remaining_tasks=len(g.tasks),
            )
            last_firing[g.id] = firing
            all_firings.append(firing)
            for t in sorted(g.tasks, key=lambda t: t.id):
                if not t.deps:
                    push(time, EventKind.TASK_READY, (firing, t))
        elif kind == EventKind.TASK_READY:
            firing, task = payload
            task_ready(firing, task, time)
        else:  # TASK_END / TRANSFER_END
            firing, task = payload
            finish_task(firing, task, time)

    # firings still incomplete at the end missed iff their deadline elapsed
    for firing in all_firings:
        if firing.remaining_tasks > 0 and duration - firing.trigger_time > firing.deadline + _EPS:
            stats[firing.graph_id].deadline_misses += 1

    # --- throughput-based portion: sensors, codecs, buses, radio ----------
    demand = upload_demand(scenario, placement)

    # per-stream readout and raw-upload rates (bytes/s)
    readout_rate: dict[str, float] = {}
    raw_upload_rate: dict[str, float] = {}
    for prim in scenario.primitives:
        offloaded = placement[prim.id] != ON_DEVICE
        for dem in prim.sensors:
            stream = scenario.stream(dem.stream)
            if offloaded and not stream.uploaded_on_offload:
                continue  # nothing consumes the readout
            raw = stream.raw_bandwidth_bps / dem.rate_divisor / 8.0
            readout_rate[stream.id] = max(readout_rate.get(stream.id, 0.0), raw)
            if offloaded:
                raw_upload_rate[stream.id] = max(raw_upload_rate.get(stream.id, 0.0), raw)

    per_device_rate: dict[str, float] = {}
    for stream in scenario.sensors:
        rate = readout_rate.get(stream.id, 0.0)
        if rate <= 0:
            continue
        per_device_rate[stream.device] = per_device_rate.get(stream.device, 0.0) + rate
        if stream.bus is not None:
            per_device_rate[stream.bus] = per_device_rate.get(stream.bus, 0.0) + rate
    for stream in scenario.sensors:
        rate = raw_upload_rate.get(stream.id, 0.0)
        if rate > 0 and stream.codec is not None:
            per_device_rate[stream.codec] = per_device_rate.get(stream.codec, 0.0) + rate

    def overlay_throughput(dev_id: str, byte_rate: float) -> None:
        if dev_id in event_tasked:
            raise SimulationError(
                f"device '{dev_id}' carries both taskgraph work and throughput-modeled "
                "traffic; bind tasks to a separate device"
            )
        rt = runtimes[dev_id]
        dev = rt.device
        duty = 1.0
        if dev.category != Category.SENSOR and dev.service_rate > 0:
            duty = min(1.0, byte_rate / dev.service_rate)
        busy = duty * duration
        if busy > 0:
            rt.timeline.transition("active", 0.0)
            rt.timeline.transition("idle", busy)
            rt.timeline.out.busy_intervals += 1
        rt.timeline.out.bytes_moved += byte_rate * duration

    for dev_id, byte_rate in per_device_rate.items():
        overlay_throughput(dev_id, byte_rate)

    profile = radio_profile if radio_profile is not None else scenario.radio
    upload_bytes = 0.0
    backlog = 0.0
    radio_dev = None
    scaled_demand = demand.total_bytes_per_s * radio_demand_scale
    if profile is not None and scaled_demand > 0:
        radio_dev = profile.device_id
        if radio_dev in event_tasked:
            raise SimulationError(
                f"radio device '{radio_dev}' cannot also serve taskgraph work"
            )
        sched = radio_schedule(scaled_demand, profile)
        if not sched.feasible:
            diagnostics.append(
                f"radio '{profile.id}' saturated: demand {scaled_demand * 8:.0f} b/s "
                f"exceeds max bandwidth {profile.max_bandwidth_bps:.0f} b/s"
            )
        rt = runtimes[radio_dev]
        tx_end = sched.tx_duty * duration
        if tx_end > 0:
            rt.timeline.transition("tx", 0.0)
            rt.timeline.out.busy_intervals += 1
        rt.timeline.transition("maintain", tx_end)
        carried = min(scaled_demand, profile.throughput_bps / 8.0)
        upload_bytes = carried * duration
        backlog = (scaled_demand - carried) * duration
        rt.timeline.out.bytes_moved += upload_bytes

    timelines = {d.id: runtimes[d.id].timeline.finish(duration) for d in scenario.devices}
    return SimTrace(
        duration_s=duration,
        timelines=timelines,
        graph_stats=stats,
        upload_bytes=upload_bytes,
        upload_demand_bytes_per_s=scaled_demand,
        radio_backlog_bytes=backlog,
        radio_device=radio_dev,
        selected_radio=profile.id if (profile is not None and scaled_demand > 0) else None,
        diagnostics=diagnostics,
    )


def duty_cycles(trace: SimTrace) -> dict[str, dict[str, float]]:
    """State occupancy as fractions of the run duration, per device."""
    return {
        dev: {state: secs / trace.duration_s for state, secs in tl.state_seconds.items()}
        for dev, tl in trace.timelines.items()
    }
