"""Small dependency-free SVG charts for report output.

Charts are built by plain string assembly so identical inputs always yield
byte-identical files (reproducible, diffable, reviewable in CI).
"""

from __future__ import annotations

from . import __version__

# color-blind-safe palette (Okabe-Ito)
PALETTE = (
    "#0072B2", "#E69F00", "#009E73", "#D55E00", "#CC79A7",
    "#56B4E9", "#F0E442", "#999999", "#000000",
)

_STYLE = (
    "  <style>\n"
    "    text { font-family: monospace; font-size: 12px; fill: #24292f; }\n"
    "    .title { font-size: 15px; font-weight: 600; }\n"
    "    .axis { stroke: #24292f; stroke-width: 1; }\n"
    "    .grid { stroke: #24292f; stroke-width: 0.5; opacity: 0.15; }\n"
    "  </style>\n"
)


def _header(width: int, height: int, title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f"<!-- generated by wearsim {__version__} -->",
        _STYLE.rstrip("\n"),
        f'  <text x="16" y="22" class="title">{_esc(title)}</text>',
    ]


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _nice_max(v: float) -> float:
    if v <= 0:
        return 1.0
    mag = 10 ** len(str(int(v)))
    for frac in (0.1, 0.2, 0.25, 0.5, 1.0):
        if v <= frac * mag:
            return frac * mag
    return mag


def _legend(out: list[str], names: list[str], x: float, y: float) -> None:
    for i, name in enumerate(names):
        color = PALETTE[i % len(PALETTE)]
        yy = y + 16 * i
        out.append(f'  <rect x="{x}" y="{yy - 9}" width="10" height="10" fill="{color}"/>')
        out.append(f'  <text x="{x + 16}" y="{yy}">{_esc(name)}</text>')


def stacked_bar_svg(
    title: str,
    configs: list[str],
    series: dict[str, list[float]],
    unit: str = "mW",
    width: int = 900,
) -> str:
    """One stacked bar per configuration, one color per series entry."""
    names = list(series)
    n = max(1, len(configs))
    mt, mb, ml, mr = 44, 70, 60, 170
    height = 360
    cw, ch = width - ml - mr, height - mt - mb
    totals = [sum(series[k][i] for k in names) for i in range(len(configs))]
    vmax = _nice_max(max(totals, default=1.0))
    bar_w = cw / n * 0.7
    gap = cw / n * 0.3

    out = _header(width, height, title)
    out.append(f'  <line x1="{ml}" y1="{mt}" x2="{ml}" y2="{mt + ch}" class="axis"/>')
    out.append(f'  <line x1="{ml}" y1="{mt + ch}" x2="{ml + cw}" y2="{mt + ch}" class="axis"/>')
    for i in range(5):
        v = vmax * (i + 1) / 5
        y = mt + ch - ch * (i + 1) / 5
        out.append(f'  <line x1="{ml}" y1="{y:.2f}" x2="{ml + cw}" y2="{y:.2f}" class="grid"/>')
        out.append(f'  <text x="{ml - 6}" y="{y + 4:.2f}" text-anchor="end">{v:g}</text>')
    out.append(f'  <text x="{ml - 6}" y="{mt + ch + 4}" text-anchor="end">0</text>')
    out.append(f'  <text x="{ml}" y="{mt - 8}">{_esc(unit)}</text>')

    for i, cfg in enumerate(configs):
        x = ml + gap / 2 + (cw / n) * i
        y = mt + ch
        for j, name in enumerate(names):
            v = series[name][i]
            h = ch * v / vmax
            y -= h
            color = PALETTE[j % len(PALETTE)]
            out.append(
                f'  <rect x="{x:.2f}" y="{y:.2f}" width="{bar_w:.2f}" height="{h:.2f}" '
                f'fill="{color}"/>'
            )
        cx = x + bar_w / 2
        out.append(
            f'  <text x="{cx:.2f}" y="{mt + ch + 12}" text-anchor="end" '
            f'transform="rotate(-35 {cx:.2f} {mt + ch + 12})">{_esc(cfg)}</text>'
        )
    _legend(out, names, ml + cw + 14, mt + 12)
    out.append("</svg>")
    return "\n".join(out) + "\n"


def line_grid_svg(
    title: str,
    x_values: list[float],
    lines: dict[str, list[float]],
    x_label: str,
    unit: str = "mW",
    width: int = 760,
) -> str:
    """One polyline per entry over a shared (log2-spaced) x axis."""
    import math

    names = list(lines)
    mt, mb, ml, mr = 44, 46, 60, 150
    height = 360
    cw, ch = width - ml - mr, height - mt - mb
    vmax = _nice_max(max(max(v) for v in lines.values()))
    xs = [math.log2(x) for x in x_values]
    x_lo, x_hi = min(xs), max(xs)
    span = (x_hi - x_lo) or 1.0

    def px(xv: float) -> float:
        return ml + cw * (math.log2(xv) - x_lo) / span

    def py(v: float) -> float:
        return mt + ch - ch * v / vmax

    out = _header(width, height, title)
    out.append(f'  <line x1="{ml}" y1="{mt}" x2="{ml}" y2="{mt + ch}" class="axis"/>')
    out.append(f'  <line x1="{ml}" y1="{mt + ch}" x2="{ml + cw}" y2="{mt + ch}" class="axis"/>')
    for i in range(5):
        v = vmax * (i + 1) / 5
        y = py(v)
        out.append(f'  <line x1="{ml}" y1="{y:.2f}" x2="{ml + cw}" y2="{y:.2f}" class="grid"/>')
        out.append(f'  <text x="{ml - 6}" y="{y + 4:.2f}" text-anchor="end">{v:g}</text>')
    for xv in x_values:
        out.append(
            f'  <text x="{px(xv):.2f}" y="{mt + ch + 16}" text-anchor="middle">{xv:g}</text>'
        )
    out.append(f'  <text x="{ml + cw / 2:.2f}" y="{mt + ch + 34}" text-anchor="middle">'
               f"{_esc(x_label)}</text>")
    out.append(f'  <text x="{ml}" y="{mt - 8}">{_esc(unit)}</text>')

    for j, name in enumerate(names):
        color = PALETTE[j % len(PALETTE)]
        pts = " ".join(f"{px(x):.2f},{py(v):.2f}" for x, v in zip(x_values, lines[name]))
        out.append(f'  <polyline points="{pts}" fill="none" stroke="{color}" stroke-width="2"/>')
    _legend(out, names, ml + cw + 14, mt + 12)
    out.append("</svg>")
    return "\n".join(out) + "\n"


def area_chart_svg(
    title: str,
    x_values: list[float],
    layers: dict[str, list[float]],
    x_label: str,
    unit: str = "mW",
    width: int = 760,
) -> str:
    """Stacked area chart (layers accumulate bottom-up in insertion order)."""
    names = list(layers)
    mt, mb, ml, mr = 44, 46, 60, 170
    height = 360
    cw, ch = width - ml - mr, height - mt - mb
    totals = [sum(layers[k][i] for k in names) for i in range(len(x_values))]
    vmax = _nice_max(max(totals, default=1.0))
    x_lo, x_hi = min(x_values), max(x_values)
    span = (x_hi - x_lo) or 1.0

    def px(xv: float) -> float:
        return ml + cw * (xv - x_lo) / span

    def py(v: float) -> float:
        return mt + ch - ch * v / vmax

    out = _header(width, height, title)
    out.append(f'  <line x1="{ml}" y1="{mt}" x2="{ml}" y2="{mt + ch}" class="axis"/>')
    out.append(f'  <line x1="{ml}" y1="{mt + ch}" x2="{ml + cw}" y2="{mt + ch}" class="axis"/>')
    for i in range(5):
        v = vmax * (i + 1) / 5
        y = py(v)
        out.append(f'  <line x1="{ml}" y1="{y:.2f}" x2="{ml + cw}" y2="{y:.2f}" class="grid"/>')
        out.append(f'  <text x="{ml - 6}" y="{y + 4:.2f}" text-anchor="end">{v:g}</text>')
    for xv in x_values:
        out.append(
            f'  <text x="{px(xv):.2f}" y="{mt + ch + 16}" text-anchor="middle">{xv:g}</text>'
        )
    out.append(f'  <text x="{ml + cw / 2:.2f}" y="{mt + ch + 34}" text-anchor="middle">'
               f"{_esc(x_label)}</text>")
    out.append(f'  <text x="{ml}" y="{mt - 8}">{_esc(unit)}</text>')

    cumulative = [0.0] * len(x_values)
    for j, name in enumerate(names):
        lower = list(cumulative)
        cumulative = [c + v for c, v in zip(cumulative, layers[name])]
        color = PALETTE[j % len(PALETTE)]
        top = " ".join(f"{px(x):.2f},{py(v):.2f}" for x, v in zip(x_values, cumulative))
        bottom = " ".join(
            f"{px(x):.2f},{py(v):.2f}" for x, v in zip(reversed(x_values), reversed(lower))
        )
        out.append(
            f'  <polygon points="{top} {bottom}" fill="{color}" fill-opacity="0.85" '
            f'stroke="none"/>'
        )
    _legend(out, names, ml + cw + 14, mt + 12)
    out.append("</svg>")
    return "\n".join(out) + "\n"
