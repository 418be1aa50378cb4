"""Full-system power and performance modeling for always-on wearable devices.

The package is organized as a pipeline:

- :mod:`wearsim.scenario` - declarative architecture + workload model,
  validation, and static derived quantities (bandwidths, budgets, upload
  demand under a placement).
- :mod:`wearsim.sim` - deterministic event-driven execution producing
  per-device duty cycles and byte counters.
- :mod:`wearsim.power` - bottom-up power aggregation including regulator
  losses along the rail tree.
- :mod:`wearsim.dse` - the design-space studies: placement sweep,
  compression sweep with radio fallback, technology-scaling projection,
  heavy-tail (Amdahl) analysis, and budget checks.
- :mod:`wearsim.cli` - the ``wearsim`` command-line front end.

Two reference scenarios ship in ``wearsim/data``: a desk-scale glasses
model (``aria2_like.scenario``) and a 145-component synthetic heavy-tail
model (``heavytail_145.scenario``).
"""

__version__ = "0.1.0"

from importlib import resources as _resources
from pathlib import Path as _Path

from .scenario import (  # noqa: F401
    BATTERY,
    OFFLOAD,
    ON_DEVICE,
    Battery,
    Category,
    Device,
    PowerState,
    Primitive,
    RadioProfile,
    RailNode,
    Scenario,
    ScenarioError,
    SensorDemand,
    SensorStream,
    Task,
    TaskGraph,
    Trigger,
    effective_upload_bytes,
    load_scenario,
    placement_full_offload,
    placement_full_on_device,
    power_budget,
    save_scenario,
    sensor_bandwidth,
    upload_demand,
)
from .sim import (  # noqa: F401
    DeviceTimeline,
    GraphStats,
    SimTrace,
    SimulationError,
    duty_cycles,
    radio_schedule,
    run,
)
from .power import (  # noqa: F401
    PowerModelError,
    PowerReport,
    aggregate,
    battery_draw,
    device_power,
    disclosure_round,
    rail_losses,
    render_percentages,
    round_sig_figs,
)
from .dse import (  # noqa: F401
    AmdahlTable,
    BudgetCheck,
    CombinatorialGuardError,
    CompressionSweep,
    DseError,
    ScalingProjection,
    ScalingTable,
    SweepResult,
    amdahl_analysis,
    amdahl_bound,
    budget_check,
    compression_sweep,
    placement_sweep,
    radio_fallback,
    scaling_projection,
)


def data_path(name: str) -> _Path:
    """Filesystem path of a bundled scenario file."""
    return _Path(str(_resources.files("wearsim") / "data" / name))
