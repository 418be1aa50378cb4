"""Bottom-up power estimation from simulation telemetry.

Each device's power is its state-weighted draw plus a throughput term
(energy per byte moved).  Device powers then propagate up the regulator
tree: a rail delivering P at efficiency eta draws P/eta, losing
P*(1/eta - 1).  Losses are reported as their own power-delivery category
rather than smeared into consumers.

All stored values carry full double precision; the two-significant-figure
disclosure rounding is applied only when rendering percentages.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .scenario import BATTERY, Category, Device, Scenario
from .sim import DeviceTimeline, SimTrace


class PowerModelError(ValueError):
    pass


@dataclass
class PowerReport:
    per_component: dict[str, float]
    per_rail_loss: dict[str, float]
    per_category: dict[str, float]
    total_mw: float
    battery_draw_mw: float
    duration_s: float
    rounding: dict = field(default_factory=lambda: {"sig_figs": 2, "applied": False})

    def category_mw(self, category: Category) -> float:
        return self.per_category.get(category.value, 0.0)


def device_power(timeline: DeviceTimeline, device: Device, duration_s: float) -> float:
    """Average power of one device over the run, in mW."""
    total = 0.0
    for state, seconds in timeline.state_seconds.items():
        try:
            p = device.state_power(state)
        except KeyError:
            raise PowerModelError(
                f"device '{device.id}': timeline has unknown state '{state}'"
            ) from None
        total += (seconds / duration_s) * p
    if timeline.bytes_moved and device.energy_per_byte_nj:
        # bytes * nJ/byte over the run -> mW
        total += timeline.bytes_moved * device.energy_per_byte_nj * 1e-6 / duration_s
    return total


def rail_losses(per_component: dict[str, float], scenario: Scenario) -> dict[str, float]:
    """Regulator loss per rail, walking delivered power bottom-up to the battery."""
    children: dict[str, list[str]] = {r.id: [] for r in scenario.rails}
    roots: list[str] = []
    for r in scenario.rails:
        if r.parent == BATTERY:
            roots.append(r.id)
        else:
            children[r.parent].append(r.id)

    direct_load: dict[str, float] = {r.id: 0.0 for r in scenario.rails}
    for dev in scenario.devices:
        if dev.rail != BATTERY:
            direct_load[dev.rail] += per_component.get(dev.id, 0.0)

    losses: dict[str, float] = {}
    input_power: dict[str, float] = {}

    def visit(rail_id: str) -> float:
        delivered = direct_load[rail_id]
        for child in children[rail_id]:
            delivered += visit(child)
        eta = scenario.rail(rail_id).efficiency
        drawn = delivered / eta
        losses[rail_id] = delivered * (1.0 / eta - 1.0)
        input_power[rail_id] = drawn
        return drawn

    for root in roots:
        visit(root)
    # keep declaration order in the output
    return {r.id: losses[r.id] for r in scenario.rails}


def battery_draw(per_component: dict[str, float], scenario: Scenario) -> float:
    """Total power drawn from the battery: leaf loads plus all regulator losses."""
    losses = rail_losses(per_component, scenario)
    return sum(per_component.values()) + sum(losses.values())


def aggregate(trace: SimTrace, scenario: Scenario) -> PowerReport:
    """Full-system power report for one simulation run."""
    per_component: dict[str, float] = {}
    for dev in scenario.devices:
        per_component[dev.id] = device_power(trace.timelines[dev.id], dev, trace.duration_s)

    per_rail_loss = rail_losses(per_component, scenario)
    per_category: dict[str, float] = {}
    for dev in scenario.devices:
        key = dev.category.value
        per_category[key] = per_category.get(key, 0.0) + per_component[dev.id]
    loss_total = sum(per_rail_loss.values())
    if loss_total or scenario.rails:
        per_category[Category.POWER_DELIVERY.value] = (
            per_category.get(Category.POWER_DELIVERY.value, 0.0) + loss_total
        )

    total = sum(per_component.values()) + loss_total
    return PowerReport(
        per_component=per_component,
        per_rail_loss=per_rail_loss,
        per_category=per_category,
        total_mw=total,
        battery_draw_mw=total,
        duration_s=trace.duration_s,
    )


def round_sig_figs(x: float, sig_figs: int = 2) -> float:
    if x == 0:
        return 0.0
    return round(x, -int(math.floor(math.log10(abs(x)))) + (sig_figs - 1))


def disclosure_round(x: float) -> float:
    """Two significant figures, but never coarser than 0.1 mW.

    Sub-milliwatt entries keep two significant figures (0.0179 -> 0.018);
    larger entries keep at least a tenth of a milliwatt (61.6 stays 61.6,
    1.234 -> 1.2).
    """
    if x == 0:
        return 0.0
    ndigits = max(1 - int(math.floor(math.log10(abs(x)))), 1)
    return round(x, ndigits)


def render_percentages(report: PowerReport, decimals: int = 2) -> dict[str, float]:
    """Disclosure-rounded percentage view of a report.

    Every entry (components and rail losses) is rounded in mW first, then
    normalized; the rounding residual lands on the largest entry so the
    output always sums to exactly 100.  The report itself is never mutated.
    """
    if report.total_mw <= 0:
        raise PowerModelError("cannot render percentages for a zero-power report")
    entries = {**report.per_component, **report.per_rail_loss}
    rounded = {k: disclosure_round(v) for k, v in entries.items()}
    denom = sum(rounded.values())
    if denom <= 0:
        raise PowerModelError("all entries round to zero")
    pct = {k: round(100.0 * v / denom, decimals) for k, v in rounded.items()}
    largest = max(rounded, key=lambda k: (rounded[k], k))
    pct[largest] = round(pct[largest] + (100.0 - sum(pct.values())), decimals + 6)
    return pct
