import io
import os
import math
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import cairo

from modules.errors import SchemaError
from storage.reports import atomic_write_text, read_csv

# Columns each plot kind reads: (series column or None, x column, y column)
PLOT_SCHEMAS = {
    "growth": ("vertex", "r", "ball_size"),
    "profile": ("method", "n", "min_boundary"),
    "ratio": (None, "size", "eii_ratio"),
}

AXIS_LABELS = {
    "growth": ("r", "|B(v,r)|"),
    "profile": ("n", "min |dA|"),
    "ratio": ("|A|", "|dA| log(2+|A|) / |A|"),
}

# Canvas settings
WIDTH = 720
HEIGHT = 480
MARGIN_LEFT = 80
MARGIN_RIGHT = 30
MARGIN_TOP = 40
MARGIN_BOTTOM = 60
BACKGROUND_COLOR = (1, 1, 1)
AXIS_COLOR = (0.2, 0.2, 0.2)
SERIES_COLORS = [
    (0.12, 0.47, 0.71), (1.0, 0.50, 0.05), (0.17, 0.63, 0.17),
    (0.84, 0.15, 0.16), (0.58, 0.40, 0.74), (0.55, 0.34, 0.29),
]


@dataclass
class PlotData:
    kind: str
    source: str
    x_column: str
    y_column: str
    series: Dict[str, List[Tuple[float, float]]] = field(default_factory=dict)

    @property
    def log_y(self) -> bool:
        return self.kind == "growth"

    @property
    def log_x(self) -> bool:
        return self.kind == "ratio"


def load_plot_data(csv_path: str, kind: str) -> PlotData:
    """
    Read a report CSV for one plot kind

    Raises SchemaError when the kind is unknown, the CSV is empty, or a column is missing.
    """
    if kind not in PLOT_SCHEMAS:
        raise SchemaError(f"Unknown plot kind '{kind}', expected one of {', '.join(PLOT_SCHEMAS)}")
    series_column, x_column, y_column = PLOT_SCHEMAS[kind]
    _, header, rows = read_csv(csv_path)
    if not rows:
        raise SchemaError(f"{csv_path} has no data rows")
    needed = [c for c in (series_column, x_column, y_column) if c]
    missing = [c for c in needed if c not in header]
    if missing:
        raise SchemaError(f"{csv_path} is not a {kind} CSV: missing column(s) {', '.join(missing)}")

    data = PlotData(kind=kind, source=csv_path, x_column=x_column, y_column=y_column)
    for row in rows:
        if row[y_column] in ("undefined", "nan", "inf", ""):
            continue
        try:
            point = (float(row[x_column]), float(row[y_column]))
        except ValueError:
            raise SchemaError(f"Non-numeric {x_column}/{y_column} value in {csv_path}: {row}")
        name = row[series_column] if series_column else y_column
        data.series.setdefault(name, []).append(point)
    if not data.series:
        raise SchemaError(f"{csv_path} has no plottable rows")
    for points in data.series.values():
        points.sort()
    return data


# ======= gnuplot =======

def gnuplot_script(data: PlotData, svg_name: str = None) -> str:
    """Self-contained gnuplot script: the data travels in inline datablocks"""
    x_label, y_label = AXIS_LABELS[data.kind]
    lines = [
        f"# {data.kind} plot of {data.source}",
        f"# columns: {data.x_column} {data.y_column}",
        "set terminal svg size 720,480",
    ]
    if svg_name:
        lines.append(f"set output '{svg_name}'")
    lines.extend([
        f"set xlabel '{x_label}'",
        f"set ylabel '{y_label}'",
        "set key left top",
        "set grid",
    ])
    if data.log_y:
        lines.append("set logscale y")
    if data.log_x:
        lines.append("set logscale x")

    plots = []
    for j, (name, points) in enumerate(sorted(data.series.items())):
        block = f"$series{j}"
        lines.append(f"{block} << EOD")
        lines.extend(f"{x!r} {y!r}" for x, y in points)
        lines.append("EOD")
        plots.append(f"{block} using 1:2 with linespoints title '{name}'")
    lines.append("plot " + ", \\\n     ".join(plots))
    return "\n".join(lines) + "\n"


# ======= Cairo SVG =======

def _axis_transform(values: List[float], log_scale: bool):
    if log_scale:
        values = [math.log10(v) for v in values if v > 0]
    low, high = min(values), max(values)
    if high == low:
        low, high = low - 1, high + 1
    return low, high


def _ticks(low: float, high: float, count: int = 5) -> List[float]:
    step = (high - low) / count
    return [low + step * k for k in range(count + 1)]


def render_svg(data: PlotData) -> str:
    """Render the plot with Cairo and return the SVG document"""
    x_values = [x for points in data.series.values() for x, _ in points]
    y_values = [y for points in data.series.values() for _, y in points]
    x_low, x_high = _axis_transform(x_values, data.log_x)
    y_low, y_high = _axis_transform(y_values, data.log_y)
    plot_width = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_height = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def to_canvas(x, y):
        if data.log_x:
            x = math.log10(x)
        if data.log_y:
            y = math.log10(y)
        cx = MARGIN_LEFT + (x - x_low) / (x_high - x_low) * plot_width
        cy = MARGIN_TOP + plot_height - (y - y_low) / (y_high - y_low) * plot_height
        return cx, cy

    buffer = io.BytesIO()
    surface = cairo.SVGSurface(buffer, WIDTH, HEIGHT)
    ctx = cairo.Context(surface)

    ctx.set_source_rgb(*BACKGROUND_COLOR)
    ctx.paint()

    # Axes
    ctx.set_source_rgb(*AXIS_COLOR)
    ctx.set_line_width(1.0)
    ctx.move_to(MARGIN_LEFT, MARGIN_TOP)
    ctx.line_to(MARGIN_LEFT, MARGIN_TOP + plot_height)
    ctx.line_to(MARGIN_LEFT + plot_width, MARGIN_TOP + plot_height)
    ctx.stroke()

    ctx.select_font_face("Sans", cairo.FONT_SLANT_NORMAL, cairo.FONT_WEIGHT_NORMAL)
    ctx.set_font_size(11)
    for tick in _ticks(x_low, x_high):
        cx = MARGIN_LEFT + (tick - x_low) / (x_high - x_low) * plot_width
        label = f"{10 ** tick:.3g}" if data.log_x else f"{tick:.3g}"
        extents = ctx.text_extents(label)
        ctx.move_to(cx - extents.width / 2, MARGIN_TOP + plot_height + 18)
        ctx.show_text(label)
    for tick in _ticks(y_low, y_high):
        cy = MARGIN_TOP + plot_height - (tick - y_low) / (y_high - y_low) * plot_height
        label = f"{10 ** tick:.3g}" if data.log_y else f"{tick:.3g}"
        extents = ctx.text_extents(label)
        ctx.move_to(MARGIN_LEFT - extents.width - 8, cy + extents.height / 2)
        ctx.show_text(label)

    x_label, y_label = AXIS_LABELS[data.kind]
    ctx.set_font_size(13)
    extents = ctx.text_extents(x_label)
    ctx.move_to(MARGIN_LEFT + plot_width / 2 - extents.width / 2, HEIGHT - 15)
    ctx.show_text(x_label)
    ctx.save()
    ctx.move_to(20, MARGIN_TOP + plot_height / 2 + ctx.text_extents(y_label).width / 2)
    ctx.rotate(-math.pi / 2)
    ctx.show_text(y_label)
    ctx.restore()

    # Series
    for j, (name, points) in enumerate(sorted(data.series.items())):
        color = SERIES_COLORS[j % len(SERIES_COLORS)]
        ctx.set_source_rgb(*color)
        ctx.set_line_width(1.5)
        drawable = [p for p in points if (not data.log_y or p[1] > 0) and (not data.log_x or p[0] > 0)]
        for k, (x, y) in enumerate(drawable):
            cx, cy = to_canvas(x, y)
            if k == 0:
                ctx.move_to(cx, cy)
            else:
                ctx.line_to(cx, cy)
        ctx.stroke()
        for x, y in drawable:
            cx, cy = to_canvas(x, y)
            ctx.arc(cx, cy, 2.5, 0, 2 * math.pi)
            ctx.fill()
        ctx.set_font_size(11)
        ctx.move_to(MARGIN_LEFT + 10, MARGIN_TOP + 14 * (j + 1))
        ctx.show_text(name)

    surface.finish()
    return buffer.getvalue().decode("utf-8")


def emit_plot(csv_path: str, kind: str, out_path: str, svg: bool = True) -> List[str]:
    """
    Write the gnuplot script to out_path and, unless svg is False, the rendered
    SVG next to it (out_path with its extension replaced by .svg).
    Nothing is written when the CSV does not fit the schema.

    Returns the paths written.
    """
    data = load_plot_data(csv_path, kind)
    svg_path = os.path.splitext(out_path)[0] + ".svg"
    document = render_svg(data) if svg else None

    written = [out_path]
    atomic_write_text(out_path, gnuplot_script(data, svg_name=os.path.basename(svg_path)))
    if document is not None:
        atomic_write_text(svg_path, document)
        written.append(svg_path)
    logging.info(f"Plot '{kind}' of {csv_path}: {', '.join(written)}")
    return written
