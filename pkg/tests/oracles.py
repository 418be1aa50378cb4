"""Independent closed-form checks that never touch the event loop.

These deliberately re-derive quantities from the scenario definition alone
so the simulator has something honest to be compared against.
"""

from __future__ import annotations

from wearsim.scenario import ON_DEVICE, Scenario


def trigger_count(rate_hz: float, divisor: float, duration_s: float) -> int:
    """Number of periodic firings k*divisor/rate in [0, duration)."""
    period = divisor / rate_hz
    n = 0
    while n * period < duration_s - 1e-12:
        n += 1
    return n


def closed_form_active_duty(
    scenario: Scenario, placement: dict[str, str] | None = None
) -> dict[str, float]:
    """Expected active duty per device in a contention-free scenario.

    Every firing executes all of its tasks exactly once, so a device's busy
    time is just (task duration) x (number of firings), independent of event
    ordering.  Only valid when offered load per device is < 1 and firings
    complete within their periods.
    """
    placement = scenario.placement if placement is None else placement
    duty: dict[str, float] = {}
    for prim in scenario.primitives:
        if placement[prim.id] != ON_DEVICE or prim.on_device_graph is None:
            continue
        graph = prim.on_device_graph
        stream = scenario.stream(graph.trigger.stream)
        n = trigger_count(stream.rate_hz, graph.trigger.rate_divisor, scenario.duration_s)
        for task in graph.tasks:
            service = scenario.device(task.device).service_rate
            duty[task.device] = (
                duty.get(task.device, 0.0) + n * (task.work / service) / scenario.duration_s
            )
    return duty


def closed_form_radio_floor_mw(
    maintenance_power_mw: float, rail_path_efficiency: float
) -> float:
    """System-level cost of just keeping a link alive (no payload)."""
    return maintenance_power_mw / rail_path_efficiency


def rail_path_efficiency(scenario: Scenario, device_id: str) -> float:
    """Product of regulator efficiencies from the battery down to a device."""
    eta = 1.0
    rail_id = scenario.device(device_id).rail
    while rail_id != "battery":
        rail = scenario.rail(rail_id)
        eta *= rail.efficiency
        rail_id = rail.parent
    return eta
