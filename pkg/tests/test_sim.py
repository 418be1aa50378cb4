"""Event engine: causality, conservation, determinism, saturation."""

import json
import random

import pytest

from conftest import make_scenario, minimal_doc, random_contention_free_doc
from oracles import closed_form_active_duty
from wearsim import duty_cycles, radio_schedule, run
from wearsim.scenario import scenario_from_dict
from wearsim.sim import SimulationError


def scenario_with_radio(demand_bits_per_s: float, throughput_bps: float = 100e6,
                        max_bandwidth_bps: float = 100e6):
    """Offloaded single-stream scenario with an exact upload demand."""
    doc = minimal_doc()
    doc["sensors"][0].update(width=int(demand_bits_per_s), height=1, channels=1,
                             bit_depth=1, rate_hz=1)
    doc["primitives"][0]["offload_compression"] = 1.0
    doc["placement"] = {"tracker": "offload"}
    doc["devices"].append(
        {
            "id": "radio0",
            "category": "radio",
            "rail": "r0",
            "states": [
                {"name": "idle", "power_mw": 0.0},
                {"name": "maintain", "power_mw": 10.0},
                {"name": "tx", "power_mw": 100.0},
            ],
        }
    )
    doc["radio"] = {
        "id": "radio0",
        "throughput_bps": throughput_bps,
        "maintenance_power_mw": 10.0,
        "tx_energy_per_byte_nj": 50.0,
        "max_bandwidth_bps": max_bandwidth_bps,
    }
    return scenario_from_dict(doc)


# ---------------------------------------------------------------------------
# run


def test_empty_workload_everything_idle():
    doc = minimal_doc(primitives=[], placement={}, duration_s=10.0)
    s = scenario_from_dict(doc)
    trace = run(s)
    assert trace.upload_bytes == 0
    for dev, duties in duty_cycles(trace).items():
        assert duties == {"idle": 1.0}


def test_single_task_duty_and_firings():
    """10 ms of work per 100 ms period: duty 0.10, 10 firings, no misses."""
    s = make_scenario()  # work 1e7 on a 1e9 device, 10 Hz trigger, 1 s
    trace = run(s)
    st = trace.graph_stats["tracker_graph"]
    assert st.firings == 10
    assert st.completed == 10
    assert st.deadline_misses == 0
    assert duty_cycles(trace)["cpu"]["active"] == pytest.approx(0.10, rel=1e-9)
    assert st.max_latency_s == pytest.approx(0.010, rel=1e-9)


def saturated_doc(duration_s: float) -> dict:
    doc = minimal_doc(duration_s=duration_s)
    doc["primitives"][0]["on_device_graph"]["tasks"][0]["work"] = 6.0e7  # 60 ms
    second = json.loads(json.dumps(doc["primitives"][0]))
    second["id"] = "tracker2"
    second["on_device_graph"]["id"] = "tracker2_graph"
    doc["primitives"].append(second)
    doc["placement"]["tracker2"] = "on_device"
    return doc


def test_offered_load_above_one_saturates():
    """Two graphs demanding 60 ms per 100 ms on one device: load 1.2."""
    s = scenario_from_dict(saturated_doc(10.0))
    trace = run(s)
    assert duty_cycles(trace)["cpu"]["active"] == pytest.approx(1.0, abs=1e-6)
    misses = sum(st.deadline_misses for st in trace.graph_stats.values())
    assert misses > 0
    peaks = []
    for duration in (10.0, 20.0, 40.0):
        t = run(scenario_from_dict(saturated_doc(duration)))
        peaks.append(t.timelines["cpu"].queue_peak)
    assert peaks[0] < peaks[1] < peaks[2]


def test_causality_and_fifo_order():
    """Starts respect dependencies; a shared device serves FIFO."""
    doc = minimal_doc()
    doc["primitives"][0]["on_device_graph"]["tasks"] = [
        {"id": "a", "device": "cpu", "work": 2e6},
        {"id": "b", "device": "cpu", "work": 3e6, "deps": ["a"]},
        {"id": "c", "device": "cpu", "work": 1e6, "deps": ["a"]},
        {"id": "d", "device": "cpu", "work": 1e6, "deps": ["b", "c"]},
    ]
    s = scenario_from_dict(doc)
    trace = run(s)
    st = trace.graph_stats["tracker_graph"]
    # diamond: a(2ms) -> b(3ms) queued before c(1ms) by id order -> d(1ms)
    assert st.max_latency_s == pytest.approx(0.007, rel=1e-9)
    assert st.completed == 10


def test_drop_mode_sheds_overlapping_firings():
    doc = saturated_doc(10.0)
    doc["trigger_mode"] = "drop"
    trace = run(scenario_from_dict(doc))
    dropped = sum(st.dropped for st in trace.graph_stats.values())
    fired = sum(st.firings for st in trace.graph_stats.values())
    assert dropped > 0
    assert fired + dropped == 200
    for st in trace.graph_stats.values():
        assert st.completed <= st.firings


def test_memory_overcommit_diagnostic_and_strict():
    doc = minimal_doc()
    doc["devices"].append(
        {
            "id": "ram",
            "category": "memory",
            "rail": "r0",
            "states": [{"name": "idle", "power_mw": 1.0}],
            "service_rate": 1e9,
            "capacity_bytes": 100,
        }
    )
    doc["primitives"][0]["on_device_graph"]["tasks"][0]["memory_footprint_bytes"] = 101
    s = scenario_from_dict(doc)
    trace = run(s)
    assert any("over-committed" in d for d in trace.diagnostics)
    with pytest.raises(SimulationError, match="over-committed"):
        run(s, strict_memory=True)


# ---------------------------------------------------------------------------
# duty_cycles


def test_duty_all_idle():
    s = scenario_from_dict(minimal_doc(primitives=[], placement={}))
    assert duty_cycles(run(s))["cpu"] == {"idle": 1.0}


def test_duty_busy_fraction():
    doc = minimal_doc()
    doc["primitives"][0]["on_device_graph"]["tasks"][0]["work"] = 2e7  # 20 ms @ 10 Hz
    duties = duty_cycles(run(scenario_from_dict(doc)))["cpu"]
    assert duties["active"] == pytest.approx(0.2, rel=1e-9)
    assert duties["idle"] == pytest.approx(0.8, rel=1e-9)
    assert sum(duties.values()) == pytest.approx(1.0, abs=1e-9)


def test_duty_radio_split():
    """6.29 Mbps over a 100 Mbps link: tx 0.0629, maintain the rest."""
    s = scenario_with_radio(demand_bits_per_s=6.29e6)
    duties = duty_cycles(run(s))["radio0"]
    assert duties["tx"] == pytest.approx(0.0629, rel=1e-12)
    assert duties["maintain"] == pytest.approx(0.9371, rel=1e-12)


# ---------------------------------------------------------------------------
# radio_schedule


def test_radio_schedule_zero_demand():
    s = scenario_with_radio(1.0)
    sched = radio_schedule(0.0, s.radio)
    assert sched.tx_duty == 0.0
    assert sched.feasible


def test_radio_schedule_division():
    s = scenario_with_radio(1.0)
    sched = radio_schedule(6.3e6 / 8.0, s.radio)
    assert sched.tx_duty == pytest.approx(0.063, rel=1e-12)


def test_radio_schedule_saturation():
    s = scenario_with_radio(1.0, throughput_bps=1e6, max_bandwidth_bps=1e6)
    sched = radio_schedule(1e6, s.radio)  # 8 Mbps demand on a 1 Mbps link
    assert not sched.feasible
    assert sched.tx_duty == 1.0
    with pytest.raises(ValueError):
        radio_schedule(-1.0, s.radio)


def test_saturated_link_accumulates_backlog():
    s = scenario_with_radio(2e6, throughput_bps=1e6, max_bandwidth_bps=3e6)
    trace = run(s)
    carried = 1e6 / 8 * s.duration_s
    produced = 2e6 / 8 * s.duration_s
    assert trace.upload_bytes == pytest.approx(carried)
    assert trace.radio_backlog_bytes == pytest.approx(produced - carried)
    assert duty_cycles(trace)["radio0"]["tx"] == 1.0


# ---------------------------------------------------------------------------
# invariants


def test_determinism_bit_identical():
    s = scenario_from_dict(saturated_doc(10.0))
    t1, t2 = run(s), run(s)
    assert t1.timelines == t2.timelines
    assert {g: (st.firings, st.completed, st.deadline_misses, st.latencies)
            for g, st in t1.graph_stats.items()} == {
        g: (st.firings, st.completed, st.deadline_misses, st.latencies)
        for g, st in t2.graph_stats.items()
    }


def test_time_conservation(aria2):
    trace = run(aria2)
    for dev, tl in trace.timelines.items():
        assert sum(tl.state_seconds.values()) == pytest.approx(
            trace.duration_s, abs=1e-9
        ), dev
        # intervals tile [0, duration] without gaps
        cursor = 0.0
        for _state, start, end in tl.intervals:
            assert start == cursor
            assert end > start
            cursor = end
        assert cursor == trace.duration_s


def test_data_conservation(aria2):
    trace = run(aria2)
    demand = trace.upload_demand_bytes_per_s
    assert trace.upload_bytes + trace.radio_backlog_bytes == pytest.approx(
        demand * trace.duration_s, rel=1e-12
    )
    assert trace.upload_bytes == trace.timelines[trace.radio_device].bytes_moved


def test_oracle_equivalence_random_scenarios():
    """Duty from the event loop matches the closed-form calculator."""
    for seed in range(25):
        rng = random.Random(seed)
        s = scenario_from_dict(random_contention_free_doc(rng))
        expected = closed_form_active_duty(s)
        duties = duty_cycles(run(s))
        for dev, want in expected.items():
            got = duties[dev].get("active", 0.0)
            if want == 0.0:
                assert got == 0.0
            else:
                assert abs(got - want) <= 1e-9 * want, (seed, dev)


def test_work_scaling_doubles_duty():
    rng = random.Random(99)
    doc = random_contention_free_doc(rng)
    s1 = scenario_from_dict(doc)
    doubled = json.loads(json.dumps(doc))
    for prim in doubled["primitives"]:
        for task in prim["on_device_graph"]["tasks"]:
            task["work"] *= 2
    s2 = scenario_from_dict(doubled)
    d1, d2 = duty_cycles(run(s1)), duty_cycles(run(s2))
    for dev in d1:
        if s1.device(dev).category.value != "compute":
            continue
        assert d2[dev].get("active", 0.0) == pytest.approx(
            2 * d1[dev].get("active", 0.0), rel=1e-12, abs=0.0
        )


def test_taskgraph_work_on_radio_device_rejected():
    s = scenario_with_radio(1e6)
    doc = json.loads(json.dumps(minimal_doc()))
    # bind a task to the radio while demand flows through it
    doc["devices"] = [json.loads(json.dumps(d)) for d in doc["devices"]]
    doc["devices"].append(
        {
            "id": "radio0",
            "category": "radio",
            "rail": "r0",
            "states": [
                {"name": "idle", "power_mw": 0.0},
                {"name": "maintain", "power_mw": 1.0},
                {"name": "tx", "power_mw": 2.0},
            ],
            "service_rate": 1e6,
        }
    )
    doc["radio"] = {
        "id": "radio0",
        "throughput_bps": 1e6,
        "maintenance_power_mw": 1.0,
        "tx_energy_per_byte_nj": 1.0,
        "max_bandwidth_bps": 1e9,
    }
    doc["primitives"][0]["signal_rate_bytes_per_s"] = 10.0
    doc["primitives"][0]["on_device_graph"]["tasks"].append(
        {"id": "t1", "device": "radio0", "work": 100, "deps": ["t0"]}
    )
    with pytest.raises(SimulationError, match="radio"):
        run(scenario_from_dict(doc))
