"""Minimal self-contained SVG plots of sweep results.

Each data point is drawn as one ``<circle class="pt">`` so that plots can be
checked by counting elements. No plotting library is involved.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape

from ..splitting import SplittingSequence
from .runner import read_fields, read_summary, scenario_key

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=80, right=170, top=40, bottom=60)
COLORS = ("#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666")
GODUNOV = (SplittingSequence.GODUNOV_TC.value, SplittingSequence.GODUNOV_CT.value)
TRANSPORT = SplittingSequence.TRANSPORT_ONLY.value


@dataclass
class Series:
    label: str
    points: list[tuple[float, float]] = field(default_factory=list)


def _ticks(lo: float, hi: float, log: bool) -> list[float]:
    if log:
        return [10.0**k for k in range(math.floor(lo), math.ceil(hi) + 1)]
    if hi == lo:
        return [lo]
    step = 10 ** math.floor(math.log10((hi - lo) / 4))
    for mult in (1, 2, 5, 10):
        if (hi - lo) / (step * mult) <= 6:
            step *= mult
            break
    start = math.ceil(lo / step) * step
    n = int(math.floor((hi - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(n)]


def svg_plot(series: list[Series], title: str, xlabel: str, ylabel: str, logx=False, logy=False, lines=True) -> str:
    pts = [p for s in series for p in s.points
           if (not logx or p[0] > 0) and (not logy or p[1] > 0) and all(map(math.isfinite, p))]
    tx = (lambda v: math.log10(v)) if logx else float
    ty = (lambda v: math.log10(v)) if logy else float
    if pts:
        xs, ys = [tx(p[0]) for p in pts], [ty(p[1]) for p in pts]
        x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    else:
        x0, x1, y0, y1 = 0.0, 1.0, 0.0, 1.0
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad_x, pad_y = 0.05 * (x1 - x0), 0.08 * (y1 - y0)
    x0, x1, y0, y1 = x0 - pad_x, x1 + pad_x, y0 - pad_y, y1 + pad_y
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(v):
        return MARGIN["left"] + (tx(v) - x0) / (x1 - x0) * pw

    def py(v):
        return MARGIN["top"] + ph - (ty(v) - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" font-size="15" font-family="sans-serif">{escape(title)}</text>',
        f'<rect x="{MARGIN["left"]}" y="{MARGIN["top"]}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for ticks, is_x, to_axis in ((_ticks(x0, x1, logx), True, tx), (_ticks(y0, y1, logy), False, ty)):
        lo, hi = (x0, x1) if is_x else (y0, y1)
        for t in ticks:
            pos = to_axis(t)
            if not lo <= pos <= hi:
                continue
            text = f"{t:g}"
            if is_x:
                xpix = MARGIN["left"] + (pos - x0) / (x1 - x0) * pw
                out.append(f'<line x1="{xpix:.2f}" y1="{MARGIN["top"] + ph}" x2="{xpix:.2f}" y2="{MARGIN["top"] + ph + 5}" stroke="black"/>')
                out.append(f'<text x="{xpix:.2f}" y="{MARGIN["top"] + ph + 18}" text-anchor="middle" font-size="11" font-family="sans-serif">{text}</text>')
            else:
                ypix = MARGIN["top"] + ph - (pos - y0) / (y1 - y0) * ph
                out.append(f'<line x1="{MARGIN["left"] - 5}" y1="{ypix:.2f}" x2="{MARGIN["left"]}" y2="{ypix:.2f}" stroke="black"/>')
                out.append(f'<text x="{MARGIN["left"] - 8}" y="{ypix + 4:.2f}" text-anchor="end" font-size="11" font-family="sans-serif">{text}</text>')
    out.append(f'<text x="{MARGIN["left"] + pw / 2:.1f}" y="{HEIGHT - 15}" text-anchor="middle" font-size="13" font-family="sans-serif">{escape(xlabel)}</text>')
    out.append(f'<text x="18" y="{MARGIN["top"] + ph / 2:.1f}" text-anchor="middle" font-size="13" font-family="sans-serif" transform="rotate(-90 18 {MARGIN["top"] + ph / 2:.1f})">{escape(ylabel)}</text>')
    if not pts:
        out.append(f'<text x="{MARGIN["left"] + pw / 2:.1f}" y="{MARGIN["top"] + ph / 2:.1f}" text-anchor="middle" font-size="13" fill="gray">no data</text>')
    for i, s in enumerate(series):
        color = COLORS[i % len(COLORS)]
        good = [p for p in s.points if (not logx or p[0] > 0) and (not logy or p[1] > 0) and all(map(math.isfinite, p))]
        if lines and len(good) > 1:
            coords = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in good)
            out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        for x, y in good:
            out.append(f'<circle class="pt" cx="{px(x):.2f}" cy="{py(y):.2f}" r="3" fill="{color}"/>')
        ly = MARGIN["top"] + 14 + 18 * i
        lx = WIDTH - MARGIN["right"] + 12
        out.append(f'<circle cx="{lx}" cy="{ly - 4}" r="4" fill="{color}"/>')
        out.append(f'<text x="{lx + 10}" y="{ly}" font-size="11" font-family="sans-serif">{escape(s.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _profiles(rows, summary_dir: Path, transport: bool) -> list[Series]:
    """One O3 profile per dx, from the first matching row at that dx."""
    chosen = {}
    for r in rows:
        if (r["sequence"] == TRANSPORT) == transport and r["dx_km"] not in chosen:
            chosen[r["dx_km"]] = r
    series = []
    for dx_km, r in sorted(chosen.items()):
        path = summary_dir / f"fields_{scenario_key(dx_km * 1e3, r['dt_s'], r['sequence'])}.csv"
        if not path.exists():
            continue
        x, values = read_fields(path)
        series.append(Series(f"dx={dx_km:g} km", list(zip(x.tolist(), values[:, 2].tolist()))))
    return series


def _by_sequence(rows, xkey, keep) -> list[Series]:
    groups: dict[str, Series] = {}
    for r in rows:
        if keep(r):
            label = r["sequence"]
            groups.setdefault(label, Series(label)).points.append((r[xkey], r["rrms_mean"]))
    for s in groups.values():
        s.points.sort()
    return [groups[k] for k in sorted(groups)]


def _rrms_vs_dx(rows, transport: bool) -> list[Series]:
    """rrms_mean vs dx, one series per (sequence, dt)."""
    groups: dict[str, Series] = {}
    for r in rows:
        if (r["sequence"] == TRANSPORT) != transport:
            continue
        label = f"{r['sequence']} dt={r['dt_s']:g}s"
        groups.setdefault(label, Series(label)).points.append((r["dx_km"], r["rrms_mean"]))
    for s in groups.values():
        s.points.sort()
    return [groups[k] for k in sorted(groups)]


def emit_figures(summary_csv, out_dir=None) -> dict[str, Path]:
    """Write the four result figures next to ``out_dir`` (default: the summary's folder).

    f1: final O3 profiles per dx; f2: rrms_mean vs dx per sequence and dt;
    f3: rrms_mean vs dt for the Godunov orders at dx = 180 km;
    f4: transport-only profiles and rrms_mean vs dx side by side.
    """
    summary_csv = Path(summary_csv)
    rows = read_summary(summary_csv)
    if not rows:
        raise ValueError(f"{summary_csv}: summary has no rows")
    out = Path(out_dir) if out_dir is not None else summary_csv.parent
    out.mkdir(parents=True, exist_ok=True)
    src = summary_csv.parent
    figs = {
        "f1_profiles.svg": svg_plot(_profiles(rows, src, transport=False), "Final O3 profiles", "x (km)", "O3"),
        "f2_rrms_vs_dx.svg": svg_plot(_rrms_vs_dx(rows, transport=False), "Species-mean RRMS vs grid size",
                                      "dx (km)", "RRMS", logx=True, logy=True),
        "f3_rrms_vs_dt.svg": svg_plot(
            _by_sequence(rows, "dt_s", lambda r: r["sequence"] in GODUNOV and abs(r["dx_km"] - 180) < 1e-9),
            "RRMS vs splitting step, dx = 180 km", "dt (s)", "RRMS", logx=True),
    }
    transport_profiles = svg_plot(_profiles(rows, src, transport=True), "Transport only: final O3", "x (km)", "O3")
    transport_rrms = svg_plot(_rrms_vs_dx(rows, transport=True), "Transport only: RRMS vs dx",
                              "dx (km)", "RRMS", logx=True, logy=True)
    figs["f4_transport_only.svg"] = _side_by_side(transport_profiles, transport_rrms)
    paths = {}
    for name, text in figs.items():
        p = out / name
        p.write_text(text)
        paths[name] = p
    return paths


def _side_by_side(left: str, right: str) -> str:
    def inner(s):
        return s.split("\n", 1)[1].rsplit("</svg>", 1)[0]

    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{2 * WIDTH}" height="{HEIGHT}" viewBox="0 0 {2 * WIDTH} {HEIGHT}">\n'
        f'<g>\n{inner(left)}</g>\n<g transform="translate({WIDTH} 0)">\n{inner(right)}</g>\n</svg>\n'
    )


def count_points(svg_text: str) -> int:
    return svg_text.count('class="pt"')
