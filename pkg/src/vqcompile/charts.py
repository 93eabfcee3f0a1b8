"""Static SVG charts written natively: distribution histograms, sweep panels,
and the depth-vs-score plot. Rendering is deterministic (fixed float
formatting, no timestamps) so artifacts are byte-reproducible.
"""
from __future__ import annotations

import json

from .simulator import Distribution

_FONT = 'font-family="Helvetica, Arial, sans-serif"'


def _fmt(v: float) -> str:
    return f"{v:.4f}".rstrip("0").rstrip(".") if v == v else "nan"


def _svg_header(width: int, height: int, config: dict | None) -> list[str]:
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
    ]
    if config is not None:
        lines.append(f"<!-- config: {json.dumps(config, sort_keys=True)} -->")
    lines.append(f'<rect width="{width}" height="{height}" fill="white"/>')
    return lines


def _bar_panel(
    lines: list[str],
    x0: float,
    y0: float,
    width: float,
    height: float,
    labels: list[str],
    values: list[float],
    errors: list[float] | None,
    title: str,
    color: str = "#4878cf",
):
    """Draw one bar panel (with optional symmetric error bars) into `lines`."""
    top = max((v + (e or 0.0) for v, e in zip(values, errors or [0.0] * len(values))), default=1.0)
    top = top if top > 0 else 1.0
    plot_h = height - 46
    plot_w = width - 52
    px, py = x0 + 42, y0 + 24
    lines.append(f'<text x="{_fmt(x0 + width / 2)}" y="{_fmt(y0 + 14)}" {_FONT} font-size="12" '
                 f'text-anchor="middle">{title}</text>')
    lines.append(f'<line x1="{_fmt(px)}" y1="{_fmt(py)}" x2="{_fmt(px)}" y2="{_fmt(py + plot_h)}" '
                 f'stroke="#333" stroke-width="1"/>')
    lines.append(f'<line x1="{_fmt(px)}" y1="{_fmt(py + plot_h)}" x2="{_fmt(px + plot_w)}" '
                 f'y2="{_fmt(py + plot_h)}" stroke="#333" stroke-width="1"/>')
    for frac in (0.0, 0.5, 1.0):
        y = py + plot_h * (1 - frac)
        lines.append(f'<text x="{_fmt(px - 4)}" y="{_fmt(y + 3)}" {_FONT} font-size="8" '
                     f'text-anchor="end">{_fmt(top * frac)}</text>')
    n = len(values)
    if n == 0:
        return
    slot = plot_w / n
    bar_w = slot * 0.7
    for i, (label, v) in enumerate(zip(labels, values)):
        bx = px + i * slot + (slot - bar_w) / 2
        bh = plot_h * v / top
        lines.append(f'<rect x="{_fmt(bx)}" y="{_fmt(py + plot_h - bh)}" width="{_fmt(bar_w)}" '
                     f'height="{_fmt(bh)}" fill="{color}"/>')
        if errors is not None and errors[i] > 0:
            cx = bx + bar_w / 2
            ylo = py + plot_h * (1 - max(v - errors[i], 0) / top)
            yhi = py + plot_h * (1 - min(v + errors[i], top) / top)
            lines.append(f'<line x1="{_fmt(cx)}" y1="{_fmt(ylo)}" x2="{_fmt(cx)}" y2="{_fmt(yhi)}" '
                         f'stroke="#222" stroke-width="1"/>')
        step = max(1, n // 16)
        if i % step == 0:
            lines.append(f'<text x="{_fmt(bx + bar_w / 2)}" y="{_fmt(py + plot_h + 10)}" {_FONT} '
                         f'font-size="7" text-anchor="middle">{label}</text>')


def histogram_svg(dist: Distribution, title: str = "", config: dict | None = None) -> str:
    """Bar chart over all bitstrings (ascending), including zero bins."""
    labels = [format(i, f"0{dist.n_bits}b") for i in range(2**dist.n_bits)]
    values = [dist.prob(b) for b in labels]
    width, height = max(420, 14 * len(labels) + 60), 280
    lines = _svg_header(width, height, config)
    _bar_panel(lines, 0, 0, width, height - 10, labels, values, None, title)
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def sweep_panels_svg(panels: list[dict], config: dict | None = None) -> str:
    """2x2-style grid of bar panels; each panel dict has title/labels/values/errors."""
    cols = 2 if len(panels) > 1 else 1
    rows = (len(panels) + cols - 1) // cols
    pw, ph = 360, 240
    width, height = cols * pw + 20, rows * ph + 20
    lines = _svg_header(width, height, config)
    for i, panel in enumerate(panels):
        x0 = 10 + (i % cols) * pw
        y0 = 10 + (i // cols) * ph
        _bar_panel(
            lines, x0, y0, pw - 10, ph - 10,
            panel["labels"], panel["values"], panel.get("errors"),
            panel["title"], panel.get("color", "#4878cf"),
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def depth_score_svg(series: list[dict], title: str, config: dict | None = None) -> str:
    """Scatter/line plot of score against circuit depth, one polyline per series."""
    width, height = 460, 320
    px, py, plot_w, plot_h = 56, 36, width - 80, height - 90
    xs = [pt[0] for s in series for pt in s["points"]]
    ys = [pt[1] for s in series for pt in s["points"]]
    x_max = max(xs, default=1.0) * 1.08 or 1.0
    y_max = max(ys, default=1.0) * 1.08 or 1.0
    lines = _svg_header(width, height, config)
    lines.append(f'<text x="{_fmt(width / 2)}" y="18" {_FONT} font-size="13" '
                 f'text-anchor="middle">{title}</text>')
    lines.append(f'<line x1="{px}" y1="{py}" x2="{px}" y2="{py + plot_h}" stroke="#333"/>')
    lines.append(f'<line x1="{px}" y1="{py + plot_h}" x2="{px + plot_w}" y2="{py + plot_h}" stroke="#333"/>')
    lines.append(f'<text x="{_fmt(px + plot_w / 2)}" y="{height - 8}" {_FONT} font-size="10" '
                 f'text-anchor="middle">basis circuit depth</text>')
    for frac in (0.0, 0.5, 1.0):
        lines.append(f'<text x="{px - 6}" y="{_fmt(py + plot_h * (1 - frac) + 3)}" {_FONT} font-size="8" '
                     f'text-anchor="end">{_fmt(y_max * frac)}</text>')
        lines.append(f'<text x="{_fmt(px + plot_w * frac)}" y="{py + plot_h + 12}" {_FONT} font-size="8" '
                     f'text-anchor="middle">{_fmt(x_max * frac)}</text>')
    for s in series:
        pts = " ".join(f"{_fmt(px + plot_w * x / x_max)},{_fmt(py + plot_h * (1 - y / y_max))}"
                       for x, y in s["points"])
        lines.append(f'<polyline points="{pts}" fill="none" stroke="{s["color"]}" stroke-width="1.5"/>')
        for x, y in s["points"]:
            lines.append(f'<circle cx="{_fmt(px + plot_w * x / x_max)}" '
                         f'cy="{_fmt(py + plot_h * (1 - y / y_max))}" r="3" fill="{s["color"]}"/>')
    for i, s in enumerate(series):
        ly = py + 12 + 14 * i
        lines.append(f'<rect x="{px + plot_w - 112}" y="{ly - 8}" width="10" height="10" fill="{s["color"]}"/>')
        lines.append(f'<text x="{px + plot_w - 98}" y="{ly}" {_FONT} font-size="10">{s["label"]}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
