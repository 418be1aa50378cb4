import json
import random
from pathlib import Path

import pytest

from wearsim import data_path, load_scenario
from wearsim.scenario import Scenario, scenario_from_dict


@pytest.fixture(scope="session")
def aria2() -> Scenario:
    return load_scenario(data_path("aria2_like.scenario"))


@pytest.fixture(scope="session")
def heavytail() -> Scenario:
    return load_scenario(data_path("heavytail_145.scenario"))


@pytest.fixture(scope="session")
def aria2_path() -> Path:
    return data_path("aria2_like.scenario")


@pytest.fixture(scope="session")
def heavytail_path() -> Path:
    return data_path("heavytail_145.scenario")


def minimal_doc(**overrides) -> dict:
    """Smallest valid scenario document; tweak via overrides."""
    doc = {
        "devices": [
            {
                "id": "cpu",
                "category": "compute",
                "states": [
                    {"name": "idle", "power_mw": 1.0},
                    {"name": "active", "power_mw": 10.0},
                ],
                "rail": "r0",
                "service_rate": 1e9,
            },
            {
                "id": "cam",
                "category": "sensor",
                "states": [
                    {"name": "idle", "power_mw": 0.0},
                    {"name": "active", "power_mw": 5.0},
                ],
                "rail": "r0",
            },
        ],
        "rails": [{"id": "r0", "efficiency": 1.0, "parent": "battery"}],
        "sensors": [
            {
                "id": "frames",
                "device": "cam",
                "width": 100,
                "height": 100,
                "channels": 1,
                "bit_depth": 8,
                "rate_hz": 10,
            }
        ],
        "primitives": [
            {
                "id": "tracker",
                "sensors": [{"stream": "frames", "rate_divisor": 1}],
                "signal_rate_bytes_per_s": 0.0,
                "on_device_graph": {
                    "id": "tracker_graph",
                    "trigger": {"stream": "frames", "rate_divisor": 1},
                    "tasks": [{"id": "t0", "device": "cpu", "work": 1.0e7}],
                },
            }
        ],
        "placement": {"tracker": "on_device"},
        "duration_s": 1.0,
        "battery": {"capacity_wh": 3.0, "target_hours": 15.0},
    }
    doc.update(overrides)
    return doc


def make_scenario(**overrides) -> Scenario:
    return scenario_from_dict(json.loads(json.dumps(minimal_doc(**overrides))))


def random_contention_free_doc(rng: random.Random) -> dict:
    """A scenario whose per-device load is light enough that nothing queues.

    Each graph gets private compute devices and a chain whose makespan fits
    well inside its trigger period, so event-driven duty must equal the
    closed-form product of work, firing rate and service rate.
    """
    duration = 10.0
    devices = []
    sensors = []
    primitives = []
    placement = {}
    n_graphs = rng.randint(1, 3)
    for g in range(n_graphs):
        rate = rng.choice([1, 2, 4, 5, 8, 10])
        divisor = rng.choice([1, 2])
        period = divisor / rate
        cam = f"cam{g}"
        devices.append(
            {
                "id": cam,
                "category": "sensor",
                "states": [
                    {"name": "idle", "power_mw": 0.0},
                    {"name": "active", "power_mw": rng.uniform(0.5, 5.0)},
                ],
                "rail": "r0",
            }
        )
        sensors.append(
            {
                "id": f"s{g}",
                "device": cam,
                "width": rng.choice([16, 32, 64]),
                "height": 16,
                "channels": 1,
                "bit_depth": 8,
                "rate_hz": rate,
            }
        )
        n_devs = rng.randint(1, 3)
        dev_ids = []
        for d in range(n_devs):
            service = rng.choice([1e8, 1e9, 2e9])
            dev_ids.append((f"g{g}_dev{d}", service))
            devices.append(
                {
                    "id": f"g{g}_dev{d}",
                    "category": "compute",
                    "states": [
                        {"name": "idle", "power_mw": rng.uniform(0.0, 1.0)},
                        {"name": "active", "power_mw": rng.uniform(5.0, 50.0)},
                    ],
                    "rail": "r0",
                    "service_rate": service,
                }
            )
        tasks = []
        budget = 0.5 * period  # chain makespan stays far below the period
        n_tasks = rng.randint(1, 4)
        for t in range(n_tasks):
            dev_id, service = rng.choice(dev_ids)
            dur = rng.uniform(0.05, 0.9) * budget / n_tasks
            tasks.append(
                {
                    "id": f"t{t}",
                    "device": dev_id,
                    "work": dur * service,
                    **({"deps": [f"t{t - 1}"]} if t else {}),
                }
            )
        primitives.append(
            {
                "id": f"prim{g}",
                "sensors": [{"stream": f"s{g}", "rate_divisor": 1}],
                "signal_rate_bytes_per_s": 0.0,
                "on_device_graph": {
                    "id": f"graph{g}",
                    "trigger": {"stream": f"s{g}", "rate_divisor": divisor},
                    "tasks": tasks,
                },
            }
        )
        placement[f"prim{g}"] = "on_device"
    return {
        "devices": devices,
        "rails": [{"id": "r0", "efficiency": 1.0, "parent": "battery"}],
        "sensors": sensors,
        "primitives": primitives,
        "placement": placement,
        "duration_s": duration,
        "battery": {"capacity_wh": 3.0, "target_hours": 15.0},
    }
