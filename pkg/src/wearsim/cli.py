"""Command-line front end.

Commands: ``validate``, ``simulate``, ``sweep placement|compression``,
``project``, ``amdahl``.  Every command that writes files also writes a
``manifest.json`` recording the scenario content hash, the exact invocation
and the produced files; re-running an identical manifest reproduces
bit-identical CSV output.

Exit codes: 0 success, 1 validation failure, 2 I/O failure, 3 guard/limit.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from pathlib import Path

from . import __version__, dse, power, reports, scenario as scn, sim

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_GUARD = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wearsim",
        description="Full-system power and performance model for wearable devices",
    )
    parser.add_argument("--version", action="version", version=f"wearsim {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", default=None,
                        help="output directory (default: $WEARSIM_OUT or ./wearsim_out)")
    common.add_argument("--duration-s", type=float, default=None,
                        help="override the scenario's simulated duration")
    common.add_argument("--jobs", type=int, default=None,
                        help="parallel sweep workers (default: logical processors)")
    common.add_argument("--strict-memory", action="store_true",
                        help="treat memory over-commitment as an error")
    common.add_argument("--lenient", action="store_true",
                        help="ignore unknown keys in the scenario file")
    common.add_argument("--trace", default=None, metavar="OUT.CSV",
                        help="also dump per-device state intervals")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check a scenario file")
    p.add_argument("path")

    p = sub.add_parser("simulate", parents=[common], help="simulate and write a power report")
    p.add_argument("path")
    p.add_argument("--placement", default=None,
                   help="'full_offload', 'full_on_device', or 'prim=on_device,...' overrides")

    p = sub.add_parser("sweep", parents=[common], help="run a design-space sweep")
    p.add_argument("kind", choices=["placement", "compression"])
    p.add_argument("path")
    p.add_argument("--primitives", default=None,
                   help="comma-separated free primitives (placement sweep)")
    p.add_argument("--ratios", default=None, help="comma-separated compression ratios")
    p.add_argument("--divisors", default=None, help="comma-separated frame-rate divisors")

    p = sub.add_parser("project", parents=[common], help="project power across process nodes")
    p.add_argument("path")
    p.add_argument("--table", default=None, help="JSON scaling-table file")
    p.add_argument("--horizon", type=int, default=8, help="projection horizon in years")

    p = sub.add_parser("amdahl", parents=[common],
                       help="component power distribution and improvement bound")
    p.add_argument("path", help="scenario file or an existing report.csv")
    p.add_argument("--thresholds", default=None, help="comma-separated share thresholds (%%)")
    return parser


def _out_dir(args) -> Path:
    out = args.out_dir or os.environ.get("WEARSIM_OUT") or "wearsim_out"
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _load(args) -> scn.Scenario:
    scenario = scn.load_scenario(args.path, lenient=args.lenient)
    if args.duration_s is not None:
        scenario = dataclasses.replace(scenario, duration_s=args.duration_s)
    return scenario


def _parse_placement(scenario: scn.Scenario, spec: str | None) -> dict[str, str]:
    if spec is None or spec == "scenario":
        return dict(scenario.placement)
    if spec in scn.PLACEMENT_PRESETS:
        return scn.PLACEMENT_PRESETS[spec](scenario)
    placement = dict(scenario.placement)
    for part in spec.split(","):
        pid, _, value = part.partition("=")
        if not value:
            raise scn.ScenarioError(
                f"bad --placement entry '{part}': expected preset or prim=on_device|offload"
            )
        placement[pid.strip()] = value.strip()
    return placement


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _print_summary(report: power.PowerReport, check: dse.BudgetCheck) -> None:
    print(f"total: {report.total_mw:.3f} mW")
    for cat, mw, pct in reports.category_rollup(report):
        print(f"  {cat:<16} {mw:10.3f} mW  {pct:5.1f}%")
    print(
        f"budget {check.budget_mw:.1f} mW: {'OK' if check.average_ok else 'EXCEEDED'} "
        f"(margin {check.average_margin_mw:+.1f} mW); "
        f"thermal {check.thermal_limit_mw:.0f} mW: "
        f"{'OK' if check.sustained_ok else 'EXCEEDED'} "
        f"(margin {check.sustained_margin_mw:+.1f} mW)"
    )


def cmd_validate(args) -> int:
    scn.load_scenario(args.path, lenient=args.lenient)
    print(f"{args.path}: OK")
    return EXIT_OK


def cmd_simulate(args) -> int:
    scenario = _load(args)
    placement = _parse_placement(scenario, args.placement)
    trace = sim.run(scenario, placement=placement, strict_memory=args.strict_memory)
    for msg in trace.diagnostics:
        print(f"warning: {msg}", file=sys.stderr)
    report = power.aggregate(trace, scenario)
    check = dse.budget_check(report, scenario)

    out = _out_dir(args)
    outputs = []
    reports.write_report_csv(out / "report.csv", report, scenario)
    outputs.append("report.csv")
    reports.write_report_md(out / "report.md", report, scenario, check)
    outputs.append("report.md")
    if report.total_mw > 0:
        reports.write_composition_svg(out / "composition.svg", report, Path(args.path).stem)
    else:
        (out / "composition.svg").write_text(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"200\" height=\"40\">"
            "<text x=\"10\" y=\"24\">no power drawn</text></svg>\n"
        )
    outputs.append("composition.svg")
    if args.trace:
        reports.write_trace_csv(Path(args.trace), trace)
    reports.write_manifest(out, args.path, sys.argv[1:], outputs + ["manifest.json"])
    _print_summary(report, check)
    return EXIT_OK


def cmd_sweep(args) -> int:
    scenario = _load(args)
    out = _out_dir(args)
    outputs = []
    if args.kind == "placement":
        primitives = args.primitives.split(",") if args.primitives else None
        sweep = dse.placement_sweep(scenario, primitives=primitives, jobs=args.jobs)
        reports.write_placement_csv(out / "sweep_placement.csv", sweep)
        reports.write_placement_svg(out / "sweep_placement.svg", sweep)
        outputs += ["sweep_placement.csv", "sweep_placement.svg"]
        print(f"baseline (full offload): {sweep.baseline_total_mw:.3f} mW")
        for row in sweep.rows:
            print(f"  {row.label:<24} {row.total_mw:10.3f} mW  {row.delta_percent:+6.2f}%")
    else:
        ratios = _float_list(args.ratios) if args.ratios else dse.DEFAULT_COMPRESSION_RATIOS
        divisors = _float_list(args.divisors) if args.divisors else dse.DEFAULT_RATE_DIVISORS
        sweep = dse.compression_sweep(scenario, ratios, divisors, jobs=args.jobs)
        reports.write_compression_csv(out / "sweep_compression.csv", sweep)
        reports.write_compression_svg(out / "sweep_compression.svg", sweep)
        outputs += ["sweep_compression.csv", "sweep_compression.svg"]
        print(f"{len(sweep.cells)} grid points; "
              f"baseline demand {sweep.baseline_demand_bytes_per_s * 8 / 1e6:.2f} Mbps")
    reports.write_manifest(out, args.path, sys.argv[1:], outputs + ["manifest.json"])
    return EXIT_OK


def cmd_project(args) -> int:
    scenario = _load(args)
    table = dse.ScalingTable()
    if args.table:
        doc = json.loads(Path(args.table).read_text())
        table = dse.ScalingTable(
            factors=doc["factors"],
            node_cadence_years=doc.get("node_cadence_years", 2.0),
        )
    trace = sim.run(scenario, strict_memory=args.strict_memory)
    report = power.aggregate(trace, scenario)
    projection = dse.scaling_projection(report, scenario, table, args.horizon)

    out = _out_dir(args)
    reports.write_scaling_csv(out / "scaling.csv", projection)
    reports.write_scaling_svg(out / "scaling.svg", projection)
    reports.write_manifest(out, args.path, sys.argv[1:],
                           ["scaling.csv", "scaling.svg", "manifest.json"])
    for row in projection.rows:
        print(f"  year {row.year:>2} (node {row.node}): {row.total_mw:9.3f} mW")
    return EXIT_OK


def cmd_amdahl(args) -> int:
    if args.path.endswith(".csv"):
        per_component = reports.read_component_powers(Path(args.path))
        report = power.PowerReport(
            per_component=per_component,
            per_rail_loss={},
            per_category={},
            total_mw=sum(per_component.values()),
            battery_draw_mw=sum(per_component.values()),
            duration_s=0.0,
        )
        scenario_path = None
    else:
        scenario = _load(args)
        trace = sim.run(scenario, strict_memory=args.strict_memory)
        report = power.aggregate(trace, scenario)
        scenario_path = args.path

    thresholds = (
        _float_list(args.thresholds) if args.thresholds else dse.DEFAULT_AMDAHL_THRESHOLDS
    )
    table = dse.amdahl_analysis(report, thresholds)

    out = _out_dir(args)
    reports.write_amdahl_csv(out / "amdahl.csv", table)
    reports.write_manifest(out, scenario_path, sys.argv[1:], ["amdahl.csv", "manifest.json"])
    print("threshold  count  cumulative%")
    for row in table.rows:
        print(f"  <= {row.threshold_percent:5.1f}%  {row.count:5d}  {row.cumulative_percent:8.2f}%")
    bound = "inf" if math.isinf(table.bound) else f"{table.bound:.2f}x"
    print(f"improvable set: {len(table.improvable_ids)} component(s), "
          f"{100 * table.improvable_fraction:.2f}% of power -> bound {bound}")
    return EXIT_OK


_COMMANDS = {
    "validate": cmd_validate,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "project": cmd_project,
    "amdahl": cmd_amdahl,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except dse.CombinatorialGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (scn.ScenarioError, sim.SimulationError, power.PowerModelError, dse.DseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except json.JSONDecodeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    raise SystemExit(main())
