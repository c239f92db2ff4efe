"""Static SVG figures drawn from the report tables.

Plots never compute: every mark is drawn from a table cell and carries that
cell verbatim in ``data-table``/``data-lang``/``data-column``/``data-value``
attributes (plus ``data-k`` for topic cells), so a figure can be checked
against the CSV it came from.
"""

from __future__ import annotations

import logging
from pathlib import Path
from xml.sax.saxutils import quoteattr, escape

from .report import MEAN, POOLED, VARIANTS, ValidationReport, embedding_rows, sentiment_rows, topic_rows

log = logging.getLogger(__name__)

COLORS = {"original": "#4c72b0", "pivot": "#dd8452", "back": "#55a868"}
LABELS = {"original": "original", "pivot": "pivot (translated)", "back": "backtranslated"}
FONT = 'font-family="sans-serif"'


class _Svg:
    def __init__(self, width: int, height: int, title: str):
        self.width, self.height = width, height
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">',
            f"<title>{escape(title)}</title>",
            f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
            f'<text x="{width / 2:.1f}" y="22" text-anchor="middle" font-size="15" {FONT}>{escape(title)}</text>',
        ]

    def add(self, element: str) -> None:
        self.parts.append(element)

    def text(self, x: float, y: float, s: str, size: int = 11, anchor: str = "middle", fill: str = "black",
             rotate: float | None = None, extra: str = "") -> None:
        tr = f' transform="rotate({rotate:.0f} {x:.1f} {y:.1f})"' if rotate is not None else ""
        self.add(f'<text x="{x:.1f}" y="{y:.1f}" text-anchor="{anchor}" font-size="{size}" fill="{fill}" '
                 f'{FONT}{tr}{extra}>{escape(s)}</text>')

    def render(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _data(table: str, lang: str, column: str, value: str, k: str | None = None) -> str:
    attrs = f" data-table={quoteattr(table)} data-lang={quoteattr(lang)} data-column={quoteattr(column)}"
    if k is not None:
        attrs += f" data-k={quoteattr(k)}"
    return attrs + f" data-value={quoteattr(value)}"


def _y_axis(svg: _Svg, x0: float, y0: float, y1: float, vmax: float, label: str, ticks: int = 5) -> None:
    svg.add(f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>')
    for i in range(ticks + 1):
        v = vmax * i / ticks
        y = y0 - (y0 - y1) * i / ticks
        svg.add(f'<line x1="{x0 - 4}" y1="{y:.1f}" x2="{x0}" y2="{y:.1f}" stroke="black"/>')
        svg.text(x0 - 7, y + 4, f"{v:.2f}", size=10, anchor="end")
    svg.text(16, (y0 + y1) / 2, label, size=12, rotate=-90)


def _legend(svg: _Svg, x: float, y: float, items: list[tuple[str, str]]) -> None:
    for i, (color, label) in enumerate(items):
        svg.add(f'<rect x="{x}" y="{y + 16 * i}" width="10" height="10" fill="{color}"/>')
        svg.text(x + 15, y + 16 * i + 9, label, size=10, anchor="start")


def _bar(svg: _Svg, x: float, w: float, y0: float, scale: float, value: str, color: str, attrs: str) -> float:
    h = float(value) * scale
    svg.add(f'<rect x="{x:.1f}" y="{y0 - h:.1f}" width="{w:.1f}" height="{h:.1f}" fill="{color}"{attrs}/>')
    return y0 - h


def _errbar(svg: _Svg, cx: float, y0: float, scale: float, low: str, high: str, table: str, lang: str,
            variant: str) -> None:
    if not low or not high:
        return
    ylo, yhi = y0 - float(low) * scale, y0 - float(high) * scale
    svg.add(f'<line x1="{cx:.1f}" y1="{ylo:.1f}" x2="{cx:.1f}" y2="{yhi:.1f}" stroke="black"'
            f'{_data(table, lang, f"{variant}_hci99_low", low)}/>')
    svg.add(f'<line x1="{cx - 3:.1f}" y1="{yhi:.1f}" x2="{cx + 3:.1f}" y2="{yhi:.1f}" stroke="black"'
            f'{_data(table, lang, f"{variant}_hci99_high", high)}/>')


def _sentiment_bars(rows: list[dict[str, str]], title: str, table: str = "sentiment") -> str | None:
    rows = [r for r in rows if any(r[f"{v}_median"] for v in VARIANTS)]
    if not rows:
        return None
    group_w = 3 * 22 + 24
    width = max(360, 90 + group_w * len(rows) + 150)
    height = 340
    svg = _Svg(width, height, title)
    x0, y0, y1 = 60.0, height - 60.0, 50.0
    scale = (y0 - y1) / 1.0
    _y_axis(svg, x0, y0, y1, 1.0, "median accuracy")
    svg.add(f'<line x1="{x0}" y1="{y0}" x2="{x0 + group_w * len(rows) + 10}" y2="{y0}" stroke="black"/>')
    for g, row in enumerate(rows):
        gx = x0 + 12 + g * group_w
        for i, v in enumerate(VARIANTS):
            cell = row[f"{v}_median"]
            if not cell:
                continue
            bx = gx + i * 22
            top = _bar(svg, bx, 20, y0, scale, cell, COLORS[v], _data(table, row["lang"], f"{v}_median", cell))
            _errbar(svg, bx + 10, y0, scale, row[f"{v}_hci99_low"], row[f"{v}_hci99_high"], table, row["lang"], v)
            if len(rows) == 1:
                svg.text(bx + 10, top - 6, cell, size=10)
        svg.text(gx + 33, y0 + 16, row["lang"], size=11)
    _legend(svg, x0 + group_w * len(rows) + 24, 60, [(COLORS[v], LABELS[v]) for v in VARIANTS])
    return svg.render()


def _heat(value: float) -> str:
    # white (0) -> dark blue (1)
    r = int(round(247 - value * (247 - 8)))
    g = int(round(251 - value * (251 - 48)))
    b = int(round(255 - value * (255 - 107)))
    return f"#{r:02x}{g:02x}{b:02x}"


def _topic_heatmap(rows: list[dict[str, str]]) -> str | None:
    rows = [r for r in rows if r["lang"] != MEAN and r["K"]]
    if not rows:
        return None
    langs = sorted({r["lang"] for r in rows})
    ks = sorted({r["K"] for r in rows}, key=int)
    cw, ch = 58, 34
    x0, y0 = 70, 60
    width = max(360, x0 + cw * len(ks) + 30)
    height = y0 + ch * len(langs) + 60
    svg = _Svg(width, height, "Backtranslated texts assigned to their original cluster")
    for j, k in enumerate(ks):
        svg.text(x0 + cw * j + cw / 2, y0 - 8, f"K={k}", size=11)
    for i, lang in enumerate(langs):
        svg.text(x0 - 8, y0 + ch * i + ch / 2 + 4, lang, size=11, anchor="end")
    cells = {(r["lang"], r["K"]): r for r in rows}
    for i, lang in enumerate(langs):
        for j, k in enumerate(ks):
            r = cells.get((lang, k))
            if r is None or not r["match_rate"]:
                continue
            x, y = x0 + cw * j, y0 + ch * i
            rate = r["match_rate"]
            svg.add(f'<rect x="{x}" y="{y}" width="{cw - 2}" height="{ch - 2}" fill="{_heat(float(rate))}"'
                    f'{_data("topics", lang, "match_rate", rate, k)}/>')
            ink = "white" if float(rate) > 0.55 else "black"
            svg.text(x + cw / 2 - 1, y + 14, f"{100 * float(rate):.0f}%", size=11, fill=ink)
            null = r["null_mean"]
            svg.text(x + cw / 2 - 1, y + 27, f"null {100 * float(null):.0f}%", size=8, fill=ink,
                     extra=_data("topics", lang, "null_mean", null, k))
    svg.text(width / 2, height - 20, "cell: match rate; small text: permutation null", size=10)
    return svg.render()


def _topic_curve(rows: list[dict[str, str]]) -> str | None:
    rows = sorted((r for r in rows if r["lang"] == MEAN and r["match_rate"]), key=lambda r: int(r["K"]))
    if not rows:
        return None
    width, height = 520, 340
    svg = _Svg(width, height, "Topic recovery by number of clusters")
    x0, y0, y1, x1 = 60.0, height - 60.0, 50.0, width - 150.0
    scale = y0 - y1
    _y_axis(svg, x0, y0, y1, 1.0, "mean match rate")
    svg.add(f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>')
    step = (x1 - x0 - 20) / max(1, len(rows) - 1)
    xs = [x0 + 10 + step * i for i in range(len(rows))] if len(rows) > 1 else [(x0 + x1) / 2]
    for column, color, dash in (("match_rate", "#4c72b0", ""), ("null_mean", "#888888", ' stroke-dasharray="5,3"')):
        pts = " ".join(f"{x:.1f},{y0 - float(r[column]) * scale:.1f}" for x, r in zip(xs, rows))
        svg.add(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="2"{dash}/>')
        for x, r in zip(xs, rows):
            svg.add(f'<circle cx="{x:.1f}" cy="{y0 - float(r[column]) * scale:.1f}" r="3" fill="{color}"'
                    f'{_data("topics", MEAN, column, r[column], r["K"])}/>')
    for x, r in zip(xs, rows):
        svg.text(x, y0 + 16, r["K"], size=10)
    svg.text((x0 + x1) / 2, y0 + 34, "clusters (K)", size=12)
    _legend(svg, x1 + 20, 60, [("#4c72b0", "match rate"), ("#888888", "permutation null")])
    return svg.render()


def _embedding_bars(rows: list[dict[str, str]]) -> str | None:
    rows = [r for r in rows if r["mean_back_distance"]]
    if not rows:
        return None
    vmax = max(max(float(r[c]) for c in ("mean_back_distance", "min_baseline", "mean_baseline")) for r in rows)
    vmax = max(vmax, 1e-9) * 1.15
    bw, gap = 30, 20
    width = max(360, 80 + (bw + gap) * len(rows) + 170)
    height = 340
    svg = _Svg(width, height, "Distance between originals and their backtranslations")
    x0, y0, y1 = 60.0, height - 60.0, 50.0
    scale = (y0 - y1) / vmax
    _y_axis(svg, x0, y0, y1, vmax, "cosine distance")
    svg.add(f'<line x1="{x0}" y1="{y0}" x2="{x0 + (bw + gap) * len(rows) + 10}" y2="{y0}" stroke="black"/>')
    for i, r in enumerate(rows):
        x = x0 + 15 + i * (bw + gap)
        lang = r["lang"]
        _bar(svg, x, bw, y0, scale, r["mean_back_distance"], "#4c72b0",
             _data("embedding", lang, "mean_back_distance", r["mean_back_distance"]))
        for column, color in (("mean_baseline", "black"), ("min_baseline", "#1f77b4")):
            y = y0 - float(r[column]) * scale
            svg.add(f'<line x1="{x - 4:.1f}" y1="{y:.1f}" x2="{x + bw + 4:.1f}" y2="{y:.1f}" stroke="{color}" '
                    f'stroke-width="2"{_data("embedding", lang, column, r[column])}/>')
        svg.text(x + bw / 2, y0 + 16, lang, size=11)
    _legend(svg, x0 + (bw + gap) * len(rows) + 30, 60,
            [("#4c72b0", "original vs backtranslated"), ("black", "mean baseline"), ("#1f77b4", "minimum baseline")])
    return svg.render()


PLOTS = ("sentiment_pooled", "sentiment_languages", "topics_heatmap", "topics_by_k", "embedding_distance")


def emit_plots(report: ValidationReport, out_dir: str | Path) -> dict[str, Path | None]:
    """Write the five figures; a figure whose table section is empty is skipped (``None``)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    s_rows = sentiment_rows(report)
    t_rows = topic_rows(report)
    e_rows = embedding_rows(report)
    rendered = {
        "sentiment_pooled": _sentiment_bars([r for r in s_rows if r["lang"] == POOLED],
                                                 "Sentiment accuracy, all languages pooled"),
        "sentiment_languages": _sentiment_bars([r for r in s_rows if r["lang"] != POOLED],
                                                    "Sentiment accuracy by language"),
        "topics_heatmap": _topic_heatmap(t_rows),
        "topics_by_k": _topic_curve(t_rows),
        "embedding_distance": _embedding_bars(e_rows),
    }
    paths: dict[str, Path | None] = {}
    for name in PLOTS:
        svg = rendered[name]
        path = out / f"{name}.svg"
        if svg is None:
            log.warning("plot %s skipped: no data in its report section", name)
            if path.exists():
                path.unlink()
            paths[name] = None
            continue
        path.write_text(svg, encoding="utf-8")
        paths[name] = path
    return paths
