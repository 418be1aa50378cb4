"""Design-space explorations over a scenario.

Covers the studies the simulator exists to answer: where to place each
primitive (on-device vs offload), how far link compression can push system
power toward the maintenance floor, how per-power-type technology scaling
shifts the composition over future process nodes, and how heavy-tailed the
component distribution is (the power analogue of Amdahl's law).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import power as power_mod
from . import sim as sim_mod
from .scenario import (
    ON_DEVICE,
    POWER_TYPES,
    RadioProfile,
    Scenario,
    placement_full_offload,
    power_budget,
    upload_demand,
)

#: Hypothetical link-compression ratios and sensor frame-rate divisors swept
#: by default (applied on top of the scenario's baseline compression).
DEFAULT_COMPRESSION_RATIOS = (1, 2, 4, 8, 16, 32, 64, 128)
DEFAULT_RATE_DIVISORS = (1, 2, 4, 8, 16, 32)

DEFAULT_AMDAHL_THRESHOLDS = (0.1, 0.5, 1.0, 5.0, 10.0, 25.0)

MAX_FREE_PRIMITIVES = 8


class DseError(ValueError):
    pass


class CombinatorialGuardError(DseError):
    """The requested exhaustive sweep is too large to enumerate."""


# ---------------------------------------------------------------------------
# Parallel evaluation plumbing


def _evaluate(args) -> tuple[float, dict[str, float], dict[str, float]]:
    scenario, placement, profile, scale = args
    trace = sim_mod.run(
        scenario, placement=placement, radio_profile=profile, radio_demand_scale=scale
    )
    report = power_mod.aggregate(trace, scenario)
    return report.total_mw, dict(report.per_category), dict(report.per_component)


def _map_jobs(items: list, jobs: int | None) -> list:
    if jobs is None:
        jobs = os.cpu_count() or 1
    if jobs <= 1 or len(items) <= 1:
        return [_evaluate(it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_evaluate, items))


# ---------------------------------------------------------------------------
# Placement sweep


@dataclass
class PlacementRow:
    label: str
    on_device: tuple[str, ...]
    total_mw: float
    per_category: dict[str, float]
    delta_percent: float


@dataclass
class SweepResult:
    rows: list[PlacementRow]
    baseline_total_mw: float

    def row(self, *on_device: str) -> PlacementRow:
        key = tuple(sorted(on_device))
        for r in self.rows:
            if r.on_device == key:
                return r
        raise KeyError(key)


def placement_configs(scenario: Scenario, primitives: list[str]) -> list[tuple[str, ...]]:
    """All on-device subsets of the free primitives, baseline (empty) first."""
    free = sorted(primitives)
    if len(free) > MAX_FREE_PRIMITIVES:
        raise CombinatorialGuardError(
            f"combinatorial guard: {len(free)} free primitives exceed the "
            f"{MAX_FREE_PRIMITIVES}-primitive limit; pass an explicit config list"
        )
    for pid in free:
        prim = scenario.primitive(pid) if pid in {p.id for p in scenario.primitives} else None
        if prim is None:
            raise DseError(f"unknown primitive '{pid}' in sweep subset")
        if prim.forced is not None:
            raise DseError(f"primitive '{pid}' is forced '{prim.forced}'; not sweepable")
    return [
        tuple(p for j, p in enumerate(free) if i >> j & 1) for i in range(2 ** len(free))
    ]


def placement_sweep(
    scenario: Scenario, primitives: list[str] | None = None, jobs: int | None = None
) -> SweepResult:
    """Exhaustively evaluate on/off-device combinations of the free primitives.

    The baseline is full offload; deltas are percent of the baseline total,
    computed from unrounded values.
    """
    if primitives is None:
        primitives = [p.id for p in scenario.primitives if p.forced is None]
    subsets = placement_configs(scenario, primitives)

    base = placement_full_offload(scenario)
    work = []
    for subset in subsets:
        placement = dict(base)
        for pid in subset:
            placement[pid] = ON_DEVICE
        work.append((scenario, placement, None, 1.0))
    results = _map_jobs(work, jobs)

    baseline_total = results[0][0]
    rows = []
    for subset, (total, categories, _components) in zip(subsets, results):
        label = "+".join(subset) if subset else "full_offload"
        delta = 0.0 if not subset else 100.0 * (total - baseline_total) / baseline_total
        rows.append(PlacementRow(label, tuple(sorted(subset)), total, categories, delta))
    return SweepResult(rows=rows, baseline_total_mw=baseline_total)


# ---------------------------------------------------------------------------
# Compression / frame-rate sweep


def radio_fallback(
    demand_bps: float,
    primary: RadioProfile,
    fallback: RadioProfile,
    threshold_bps: float = 1e6,
) -> RadioProfile:
    """Pick the cheaper link for a given demand, falling back below threshold.

    The comparison uses each profile's maintenance power plus its per-byte
    transmit energy at this demand; the fallback is only taken when it is
    both cheaper and able to carry the demand.
    """
    if fallback.max_bandwidth_bps < threshold_bps:
        raise DseError(
            f"fallback '{fallback.id}' max bandwidth is below the {threshold_bps:.0f} b/s "
            "switchover threshold"
        )
    if demand_bps > primary.max_bandwidth_bps and demand_bps > fallback.max_bandwidth_bps:
        raise DseError("demand exceeds both radio profiles' max bandwidth")
    if demand_bps >= threshold_bps:
        return primary
    if demand_bps > fallback.max_bandwidth_bps:
        return primary

    def link_power_mw(profile: RadioProfile) -> float:
        return profile.maintenance_power_mw + (demand_bps / 8.0) * profile.tx_energy_per_byte_nj * 1e-6

    return fallback if link_power_mw(fallback) < link_power_mw(primary) else primary


@dataclass
class CompressionCell:
    ratio: float
    rate_divisor: float
    total_mw: float
    radio_mw: float
    selected_profile: str
    feasible: bool


@dataclass
class CompressionSweep:
    cells: list[CompressionCell]
    ratios: tuple[float, ...]
    rate_divisors: tuple[float, ...]
    baseline_demand_bytes_per_s: float

    def cell(self, ratio: float, divisor: float) -> CompressionCell:
        for c in self.cells:
            if c.ratio == ratio and c.rate_divisor == divisor:
                return c
        raise KeyError((ratio, divisor))


def compression_sweep(
    scenario: Scenario,
    ratios=DEFAULT_COMPRESSION_RATIOS,
    rate_divisors=DEFAULT_RATE_DIVISORS,
    jobs: int | None = None,
) -> CompressionSweep:
    """System power across hypothetical extra compression and frame-rate cuts.

    Runs from the full-offload baseline; each cell scales only the off-device
    link demand (compute power is held fixed), so the grid approaches the
    link-maintenance floor as compression grows.
    """
    if any(r < 1 for r in ratios) or any(d < 1 for d in rate_divisors):
        raise DseError("compression ratios and rate divisors must be >= 1")
    if scenario.radio is None:
        raise DseError("compression sweep needs a radio profile")
    placement = placement_full_offload(scenario)
    demand0 = upload_demand(scenario, placement).total_bytes_per_s

    grid = [(r, d) for r in ratios for d in rate_divisors]
    work = []
    profiles: list[RadioProfile] = []
    for r, d in grid:
        scale = 1.0 / (r * d)
        demand_bps = 8.0 * demand0 * scale
        profile = scenario.radio
        if scenario.fallback_radio is not None:
            profile = radio_fallback(
                demand_bps, scenario.radio, scenario.fallback_radio,
                scenario.fallback_threshold_bps,
            )
        profiles.append(profile)
        work.append((scenario, placement, profile, scale))
    results = _map_jobs(work, jobs)

    cells = []
    for (r, d), profile, (total, _categories, components) in zip(grid, profiles, results):
        demand_bps = 8.0 * demand0 / (r * d)
        cells.append(
            CompressionCell(
                ratio=float(r),
                rate_divisor=float(d),
                total_mw=total,
                radio_mw=components[profile.device_id],
                selected_profile=profile.id,
                feasible=demand_bps <= profile.max_bandwidth_bps,
            )
        )
    return CompressionSweep(
        cells=cells,
        ratios=tuple(float(r) for r in ratios),
        rate_divisors=tuple(float(d) for d in rate_divisors),
        baseline_demand_bytes_per_s=demand0,
    )


# ---------------------------------------------------------------------------
# Technology scaling projection


@dataclass(frozen=True)
class ScalingTable:
    """Per-node multiplicative factors for each power type.

    The defaults are synthetic placeholders that exist to exercise the
    machinery; real studies must supply their own table.
    """

    factors: dict[str, float] = field(
        default_factory=lambda: {
            "digital_dynamic": 0.85,
            "digital_leakage": 0.90,
            "analog": 0.97,
            "rf": 0.98,
        }
    )
    node_cadence_years: float = 2.0

    def __post_init__(self):
        missing = set(POWER_TYPES) - set(self.factors)
        if missing:
            raise DseError(f"scaling table missing power type(s) {sorted(missing)}")
        for k, v in self.factors.items():
            if not (0.0 < v <= 1.0):
                raise DseError(f"scaling factor for '{k}' must be in (0, 1], got {v}")
        if self.node_cadence_years <= 0:
            raise DseError("node cadence must be > 0")


@dataclass
class ScalingRow:
    year: int
    node: int
    per_type_mw: dict[str, float]
    per_component: dict[str, float]
    rail_loss_mw: float
    total_mw: float

    def type_share(self, power_type: str) -> float:
        device_total = sum(self.per_type_mw.values())
        return self.per_type_mw[power_type] / device_total if device_total else 0.0


@dataclass
class ScalingProjection:
    rows: list[ScalingRow]
    table: ScalingTable


def scaling_projection(
    report: power_mod.PowerReport,
    scenario: Scenario,
    table: ScalingTable | None = None,
    horizon_years: int = 8,
) -> ScalingProjection:
    """Project a report forward by process node, one row per year.

    Node index is floor(year / cadence); each device's power scales by its
    decomposition-weighted factors, and regulator losses are recomputed from
    the scaled loads.  Year 0 reproduces the input report exactly.
    """
    table = ScalingTable() if table is None else table
    for dev in scenario.devices:
        if not dev.power_decomposition:
            raise DseError(f"device '{dev.id}' has no power_decomposition; cannot project")

    rows = []
    for year in range(horizon_years + 1):
        node = math.floor(year / table.node_cadence_years)
        per_component: dict[str, float] = {}
        per_type = {t: 0.0 for t in POWER_TYPES}
        for dev in scenario.devices:
            base = report.per_component[dev.id]
            if node == 0:
                scaled = base
                for t in POWER_TYPES:
                    per_type[t] += base * dev.power_decomposition.get(t, 0.0)
            else:
                scaled = 0.0
                for t in POWER_TYPES:
                    part = base * dev.power_decomposition.get(t, 0.0) * table.factors[t] ** node
                    per_type[t] += part
                    scaled += part
            per_component[dev.id] = scaled
        losses = power_mod.rail_losses(per_component, scenario)
        loss_total = sum(losses.values())
        rows.append(
            ScalingRow(
                year=year,
                node=node,
                per_type_mw=per_type,
                per_component=per_component,
                rail_loss_mw=loss_total,
                total_mw=sum(per_component.values()) + loss_total,
            )
        )
    return ScalingProjection(rows=rows, table=table)


# ---------------------------------------------------------------------------
# Amdahl's-limitation analysis


@dataclass
class AmdahlRow:
    threshold_percent: float
    count: int
    cumulative_percent: float


@dataclass
class AmdahlTable:
    rows: list[AmdahlRow]
    bound: float
    improvable_ids: tuple[str, ...]
    improvable_fraction: float


def amdahl_bound(improvable_fraction: float) -> float:
    """Best whole-system improvement when only a fraction f is optimizable."""
    if not (0.0 <= improvable_fraction <= 1.0):
        raise DseError("improvable fraction must be in [0, 1]")
    if improvable_fraction >= 1.0 - 1e-15:
        return math.inf
    return 1.0 / (1.0 - improvable_fraction)


def amdahl_analysis(
    report: power_mod.PowerReport, thresholds=DEFAULT_AMDAHL_THRESHOLDS
) -> AmdahlTable:
    """Cumulative component-power distribution and the improvement bound.

    Works over device components (regulator losses are analyzed separately).
    The default improvable set is everything above the largest threshold that
    still excludes at least one component.
    """
    total = sum(report.per_component.values())
    if total <= 0:
        raise DseError("amdahl analysis needs a positive component total")
    shares = {k: 100.0 * v / total for k, v in report.per_component.items()}

    rows = []
    for t in sorted(thresholds):
        below = [k for k, s in shares.items() if s <= t]
        rows.append(
            AmdahlRow(
                threshold_percent=float(t),
                count=len(below),
                cumulative_percent=sum(shares[k] for k in below),
            )
        )

    max_share = max(shares.values())
    cut = max((t for t in thresholds if t < max_share), default=None)
    if cut is None:
        improvable: tuple[str, ...] = ()
    else:
        improvable = tuple(k for k, s in shares.items() if s > cut)
    fraction = sum(shares[k] for k in improvable) / 100.0
    return AmdahlTable(
        rows=rows,
        bound=amdahl_bound(fraction),
        improvable_ids=improvable,
        improvable_fraction=fraction,
    )


# ---------------------------------------------------------------------------
# Budget checks


@dataclass
class BudgetCheck:
    average_ok: bool
    sustained_ok: bool
    budget_mw: float
    thermal_limit_mw: float
    average_margin_mw: float
    sustained_margin_mw: float


def budget_check(
    report: power_mod.PowerReport,
    scenario: Scenario,
    thermal_limit_mw: float | None = None,
) -> BudgetCheck:
    """Compare a report against the battery-life budget and the thermal ceiling."""
    budget = power_budget(scenario.battery)
    limit = scenario.thermal_limit_mw if thermal_limit_mw is None else thermal_limit_mw
    return BudgetCheck(
        average_ok=report.total_mw <= budget,
        sustained_ok=report.total_mw <= limit,
        budget_mw=budget,
        thermal_limit_mw=limit,
        average_margin_mw=budget - report.total_mw,
        sustained_margin_mw=limit - report.total_mw,
    )
