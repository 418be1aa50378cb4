"""CSV / markdown / SVG emission and the reproducibility manifest.

Column names are part of the tool's contract with downstream tooling; the
writers here are the single place they are spelled out.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

from . import __version__, charts
from .dse import AmdahlTable, BudgetCheck, CompressionSweep, ScalingProjection, SweepResult
from .power import PowerReport, render_percentages
from .scenario import POWER_TYPES, Category, Scenario
from .sim import SimTrace

_RAIL_PREFIX = "rail:"


def _fmt(v: float) -> str:
    return format(v, ".10g")


def write_report_csv(path: Path, report: PowerReport, scenario: Scenario) -> None:
    percents = render_percentages(report) if report.total_mw > 0 else {}
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["component", "category", "mW", "percent"])
        for dev in scenario.devices:
            w.writerow(
                [
                    dev.id,
                    dev.category.value,
                    _fmt(report.per_component[dev.id]),
                    _fmt(percents.get(dev.id, 0.0)),
                ]
            )
        for rail_id, loss in report.per_rail_loss.items():
            w.writerow(
                [
                    _RAIL_PREFIX + rail_id,
                    Category.POWER_DELIVERY.value,
                    _fmt(loss),
                    _fmt(percents.get(rail_id, 0.0)),
                ]
            )


def read_component_powers(path: Path) -> dict[str, float]:
    """Component mW column of a report.csv (regulator-loss rows excluded)."""
    out: dict[str, float] = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            if row["component"].startswith(_RAIL_PREFIX):
                continue
            out[row["component"]] = float(row["mW"])
    return out


def category_rollup(report: PowerReport) -> list[tuple[str, float, float]]:
    rows = []
    for cat, mw in sorted(report.per_category.items(), key=lambda kv: -kv[1]):
        pct = 100.0 * mw / report.total_mw if report.total_mw else 0.0
        rows.append((cat, mw, pct))
    return rows


def write_report_md(
    path: Path, report: PowerReport, scenario: Scenario, check: BudgetCheck
) -> None:
    lines = [
        "# System power report",
        "",
        f"- total: {report.total_mw:.3f} mW (battery draw {report.battery_draw_mw:.3f} mW)",
        f"- battery budget: {check.budget_mw:.1f} mW -> "
        f"{'OK' if check.average_ok else 'EXCEEDED'} (margin {check.average_margin_mw:+.1f} mW)",
        f"- thermal limit: {check.thermal_limit_mw:.0f} mW -> "
        f"{'OK' if check.sustained_ok else 'EXCEEDED'} (margin {check.sustained_margin_mw:+.1f} mW)",
        "",
        "| category | mW | percent |",
        "| --- | ---: | ---: |",
    ]
    for cat, mw, pct in category_rollup(report):
        lines.append(f"| {cat} | {mw:.3f} | {pct:.1f}% |")
    Path(path).write_text("\n".join(lines) + "\n")


def write_composition_svg(path: Path, report: PowerReport, label: str) -> None:
    series = {cat: [mw] for cat, mw, _ in category_rollup(report)}
    Path(path).write_text(
        charts.stacked_bar_svg("System power composition", [label], series)
    )


def write_trace_csv(path: Path, trace: SimTrace) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["device", "state", "start_s", "end_s"])
        for dev, tl in trace.timelines.items():
            for state, start, end in tl.intervals:
                w.writerow([dev, state, _fmt(start), _fmt(end)])
        w.writerow(["device", "bytes_moved"])
        for dev, tl in trace.timelines.items():
            w.writerow([dev, _fmt(tl.bytes_moved)])


def write_placement_csv(path: Path, sweep: SweepResult) -> None:
    categories = sorted({c for row in sweep.rows for c in row.per_category})
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["config", "total_mw", "delta_percent"] + [f"{c}_mw" for c in categories])
        for row in sweep.rows:
            w.writerow(
                [row.label, _fmt(row.total_mw), _fmt(row.delta_percent)]
                + [_fmt(row.per_category.get(c, 0.0)) for c in categories]
            )


def write_placement_svg(path: Path, sweep: SweepResult) -> None:
    categories = sorted({c for row in sweep.rows for c in row.per_category})
    configs = [row.label for row in sweep.rows]
    series = {c: [row.per_category.get(c, 0.0) for row in sweep.rows] for c in categories}
    Path(path).write_text(
        charts.stacked_bar_svg("Placement sweep: power by category", configs, series)
    )


def write_compression_csv(path: Path, sweep: CompressionSweep) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["ratio", "divisor", "total_mw", "radio_mw", "selected_profile"])
        for c in sweep.cells:
            w.writerow(
                [_fmt(c.ratio), _fmt(c.rate_divisor), _fmt(c.total_mw), _fmt(c.radio_mw),
                 c.selected_profile]
            )


def write_compression_svg(path: Path, sweep: CompressionSweep) -> None:
    lines = {
        f"{d:g}x rate cut": [sweep.cell(r, d).total_mw for r in sweep.ratios]
        for d in sweep.rate_divisors
    }
    Path(path).write_text(
        charts.line_grid_svg(
            "System power vs. link compression",
            list(sweep.ratios),
            lines,
            x_label="compression ratio (applied on top of baseline)",
        )
    )


def write_scaling_csv(path: Path, projection: ScalingProjection) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["year", "node"] + [f"{t}_mw" for t in POWER_TYPES]
                   + ["rail_loss_mw", "total_mw"])
        for row in projection.rows:
            w.writerow(
                [row.year, row.node]
                + [_fmt(row.per_type_mw[t]) for t in POWER_TYPES]
                + [_fmt(row.rail_loss_mw), _fmt(row.total_mw)]
            )


def write_scaling_svg(path: Path, projection: ScalingProjection) -> None:
    years = [float(r.year) for r in projection.rows]
    layers = {t: [r.per_type_mw[t] for r in projection.rows] for t in POWER_TYPES}
    Path(path).write_text(
        charts.area_chart_svg(
            "Projected power by type", years, layers, x_label="years from now"
        )
    )


def write_amdahl_csv(path: Path, table: AmdahlTable) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["threshold", "count", "cumulative_percent"])
        for row in table.rows:
            w.writerow([_fmt(row.threshold_percent), row.count, _fmt(row.cumulative_percent)])


def write_manifest(
    out_dir: Path, scenario_path: str | None, argv: list[str], outputs: list[str]
) -> Path:
    manifest = {
        "tool": "wearsim",
        "version": __version__,
        "command": argv,
        "scenario": scenario_path,
        "scenario_sha256": (
            hashlib.sha256(Path(scenario_path).read_bytes()).hexdigest()
            if scenario_path
            else None
        ),
        "outputs": sorted(outputs),
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n")
    return path
