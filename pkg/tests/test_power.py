"""Power aggregation: state/throughput terms, rail losses, rendering."""

import random

import pytest

from conftest import make_scenario, minimal_doc
from oracles import rail_path_efficiency
from wearsim import (
    Category,
    PowerModelError,
    aggregate,
    battery_draw,
    device_power,
    disclosure_round,
    placement_full_offload,
    rail_losses,
    render_percentages,
    run,
)
from wearsim.power import PowerReport
from wearsim.scenario import scenario_from_dict
from wearsim.sim import DeviceTimeline


def timeline(state_seconds: dict, bytes_moved: float = 0.0) -> DeviceTimeline:
    return DeviceTimeline(state_seconds=dict(state_seconds), bytes_moved=bytes_moved)


def plain_device(**kw):
    doc = minimal_doc()
    doc["devices"][0]["states"] = [
        {"name": "idle", "power_mw": kw.get("idle", 1.0)},
        {"name": "active", "power_mw": kw.get("active", 10.0)},
    ]
    doc["devices"][0]["energy_per_byte_nj"] = kw.get("energy_per_byte_nj", 0.0)
    return scenario_from_dict(doc).device("cpu")


# ---------------------------------------------------------------------------
# device_power


def test_state_weighted_power():
    dev = plain_device(idle=1.0, active=10.0)
    assert device_power(timeline({"idle": 0.8, "active": 0.2}), dev, 1.0) == pytest.approx(2.8)


def test_all_idle_zero_power():
    dev = plain_device(idle=0.0)
    assert device_power(timeline({"idle": 1.0}), dev, 1.0) == 0.0


def test_energy_per_byte_term():
    """1 GB in 10 s at 1 nJ/byte is 0.1 W on top of the states."""
    dev = plain_device(idle=0.0, active=0.0, energy_per_byte_nj=1.0)
    got = device_power(timeline({"idle": 10.0}, bytes_moved=1e9), dev, 10.0)
    assert got == pytest.approx(100.0)


def test_unknown_state_rejected():
    dev = plain_device()
    with pytest.raises(PowerModelError, match="boost"):
        device_power(timeline({"boost": 1.0}), dev, 1.0)


# ---------------------------------------------------------------------------
# rail_losses


def rails_doc(rails, device_rail="r0"):
    doc = minimal_doc(primitives=[], placement={}, sensors=[])
    doc["devices"] = [doc["devices"][0]]
    doc["devices"][0]["rail"] = device_rail
    doc["rails"] = rails
    return scenario_from_dict(doc)


def test_single_rail_quarter_loss():
    """eta = 0.75 delivering 75 mW draws 100 mW: 25 mW lost in regulation."""
    s = rails_doc([{"id": "r0", "efficiency": 0.75, "parent": "battery"}])
    losses = rail_losses({"cpu": 75.0}, s)
    assert losses["r0"] == pytest.approx(25.0)
    assert battery_draw({"cpu": 75.0}, s) == pytest.approx(100.0)


def test_lossless_rail():
    s = rails_doc([{"id": "r0", "efficiency": 1.0, "parent": "battery"}])
    assert rail_losses({"cpu": 50.0}, s)["r0"] == 0.0


def test_two_level_tree():
    s = rails_doc(
        [
            {"id": "upper", "efficiency": 0.9, "parent": "battery"},
            {"id": "r0", "efficiency": 0.9, "parent": "upper"},
        ]
    )
    assert battery_draw({"cpu": 81.0}, s) == pytest.approx(100.0)
    losses = rail_losses({"cpu": 81.0}, s)
    assert losses["r0"] == pytest.approx(9.0)
    assert losses["upper"] == pytest.approx(10.0)


def test_conservation_on_random_trees():
    """Battery draw equals the sum of loads divided along root-to-leaf paths."""
    rng = random.Random(11)
    for _ in range(30):
        depth_ids = ["battery"]
        rails = []
        for i in range(rng.randint(1, 12)):
            parent = rng.choice(depth_ids)
            rid = f"rail{i}"
            rails.append({"id": rid, "efficiency": rng.uniform(0.6, 1.0), "parent": parent})
            depth_ids.append(rid)
        doc = minimal_doc(primitives=[], placement={}, sensors=[], rails=rails)
        devices = []
        loads = {}
        for j in range(rng.randint(1, 6)):
            rid = rng.choice([r["id"] for r in rails])
            p = rng.uniform(0.0, 50.0)
            devices.append(
                {
                    "id": f"dev{j}",
                    "category": "compute",
                    "rail": rid,
                    "states": [{"name": "idle", "power_mw": p}],
                }
            )
            loads[f"dev{j}"] = p
        doc["devices"] = devices
        s = scenario_from_dict(doc)
        expected = sum(p / rail_path_efficiency(s, d) for d, p in loads.items())
        assert battery_draw(loads, s) == pytest.approx(expected, rel=1e-12)


# ---------------------------------------------------------------------------
# aggregate


def test_empty_workload_zero_total():
    doc = minimal_doc(primitives=[], placement={}, sensors=[])
    for dev in doc["devices"]:
        for st in dev["states"]:
            st["power_mw"] = 0.0
    s = scenario_from_dict(doc)
    report = aggregate(run(s), s)
    assert report.total_mw == 0.0


def test_heavytail_idle_pass_through(heavytail):
    """All-idle duty reproduces the declared per-component powers exactly."""
    report = aggregate(run(heavytail), heavytail)
    for dev in heavytail.devices:
        assert report.per_component[dev.id] == dev.state_power("idle")
    assert sum(report.per_rail_loss.values()) == 0.0


def test_reference_power_delivery_share(aria2):
    report = aggregate(run(aria2, placement=placement_full_offload(aria2)), aria2)
    share = report.per_category[Category.POWER_DELIVERY.value] / report.total_mw
    assert share == pytest.approx(0.20, abs=0.01)


def test_total_equals_components_plus_losses(aria2):
    report = aggregate(run(aria2), aria2)
    assert report.total_mw == pytest.approx(
        sum(report.per_component.values()) + sum(report.per_rail_loss.values()), abs=1e-9
    )
    assert report.battery_draw_mw == report.total_mw


def test_additivity_of_disjoint_unions():
    """Two device sets on disjoint rails aggregate to the sum of the parts."""
    def one(did, rid, p):
        return (
            {"id": did, "category": "compute", "rail": rid,
             "states": [{"name": "idle", "power_mw": p}]},
            {"id": rid, "efficiency": 0.8, "parent": "battery"},
        )

    d1, r1 = one("a", "ra", 10.0)
    d2, r2 = one("b", "rb", 30.0)
    base = dict(minimal_doc(primitives=[], placement={}, sensors=[]))
    sa = scenario_from_dict({**base, "devices": [d1], "rails": [r1]})
    sb = scenario_from_dict({**base, "devices": [d2], "rails": [r2]})
    sab = scenario_from_dict({**base, "devices": [d1, d2], "rails": [r1, r2]})
    ta = aggregate(run(sa), sa).total_mw
    tb = aggregate(run(sb), sb).total_mw
    tab = aggregate(run(sab), sab).total_mw
    assert tab == pytest.approx(ta + tb, rel=1e-12)


def test_duty_monotonicity():
    """More time in an above-idle state never lowers device power."""
    dev = plain_device(idle=1.0, active=10.0)
    powers = [
        device_power(timeline({"idle": 1.0 - f, "active": f}), dev, 1.0)
        for f in (0.0, 0.1, 0.3, 0.7, 1.0)
    ]
    assert powers == sorted(powers)


# ---------------------------------------------------------------------------
# render_percentages


def fake_report(components: dict) -> PowerReport:
    return PowerReport(
        per_component=dict(components),
        per_rail_loss={},
        per_category={},
        total_mw=sum(components.values()),
        battery_draw_mw=sum(components.values()),
        duration_s=1.0,
    )


def test_render_identity_when_already_rounded():
    pct = render_percentages(fake_report({"rest": 61.6, "top2": 38.4}))
    assert pct == {"rest": 61.6, "top2": 38.4}


def test_disclosure_rounding_definition():
    assert disclosure_round(1.234) == 1.2
    assert disclosure_round(61.6) == 61.6
    assert disclosure_round(0.0179) == 0.018
    assert disclosure_round(0.0) == 0.0
    pct = render_percentages(fake_report({"a": 1.234, "b": 1.2}))
    assert pct["a"] == pct["b"]  # both treated as 1.2 mW before normalizing


def test_render_sums_to_100_and_is_pure():
    rng = random.Random(5)
    components = {f"c{i}": rng.uniform(0.01, 80.0) for i in range(145)}
    report = fake_report(components)
    before = dict(report.per_component)
    p1 = render_percentages(report)
    p2 = render_percentages(report)
    assert p1 == p2
    assert report.per_component == before
    assert sum(p1.values()) == pytest.approx(100.0, abs=1e-6)
    assert report.rounding == {"sig_figs": 2, "applied": False}


def test_render_zero_total_rejected():
    with pytest.raises(PowerModelError):
        render_percentages(fake_report({"a": 0.0}))
