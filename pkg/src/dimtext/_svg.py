"""Minimal deterministic SVG emission for report plots (no plotting deps)."""

from __future__ import annotations

PALETTE = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
    "#393b79", "#637939", "#8c6d31", "#843c39",
]

_W, _H = 640, 480
_ML, _MR, _MT, _MB = 60, 170, 40, 50


def _fx(x: float) -> float:
    return _ML + x * (_W - _ML - _MR)


def _fy(y: float) -> float:
    return _H - _MB - y * (_H - _MT - _MB)


def _fmt(v: float) -> str:
    return f"{v:.4f}".rstrip("0").rstrip(".")


def line_plot(series, title: str, xlabel: str, ylabel: str) -> str:
    """Polyline plot on the unit square; series = [(label, [(x, y), ...])]."""
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2}" y="20" text-anchor="middle" font-size="14">{title}</text>',
    ]
    for t in (0.0, 0.25, 0.5, 0.75, 1.0):
        parts.append(
            f'<line x1="{_fmt(_fx(t))}" y1="{_fy(0)}" x2="{_fmt(_fx(t))}" '
            f'y2="{_fy(1)}" stroke="#dddddd"/>'
        )
        parts.append(
            f'<line x1="{_fx(0)}" y1="{_fmt(_fy(t))}" x2="{_fx(1)}" '
            f'y2="{_fmt(_fy(t))}" stroke="#dddddd"/>'
        )
        parts.append(
            f'<text x="{_fmt(_fx(t))}" y="{_H - _MB + 16}" text-anchor="middle">{t}</text>'
        )
        parts.append(
            f'<text x="{_ML - 8}" y="{_fmt(_fy(t) + 4)}" text-anchor="end">{t}</text>'
        )
    parts.append(
        f'<text x="{_fx(0.5)}" y="{_H - 10}" text-anchor="middle">{xlabel}</text>'
    )
    parts.append(
        f'<text x="16" y="{_fy(0.5)}" text-anchor="middle" '
        f'transform="rotate(-90 16 {_fy(0.5)})">{ylabel}</text>'
    )
    for i, (label, points) in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        coords = " ".join(f"{_fmt(_fx(x))},{_fmt(_fy(y))}" for x, y in points)
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
            f'points="{coords}"/>'
        )
        ly = _MT + 14 * (i + 1)
        parts.append(
            f'<line x1="{_W - _MR + 10}" y1="{ly - 4}" x2="{_W - _MR + 30}" '
            f'y2="{ly - 4}" stroke="{color}" stroke-width="2"/>'
        )
        parts.append(f'<text x="{_W - _MR + 35}" y="{ly}">{label}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def bar_chart(groups, title: str, ylabel: str) -> str:
    """Grouped bar chart; groups = [(label, {series: value})]."""
    series_names = sorted({name for _, vals in groups for name in vals})
    n_groups = max(1, len(groups))
    n_series = max(1, len(series_names))
    span = (_W - _ML - _MR) / n_groups
    bar_w = span * 0.8 / n_series
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2}" y="20" text-anchor="middle" font-size="14">{title}</text>',
    ]
    for t in (0.0, 0.25, 0.5, 0.75, 1.0):
        parts.append(
            f'<line x1="{_fx(0)}" y1="{_fmt(_fy(t))}" x2="{_fx(1)}" '
            f'y2="{_fmt(_fy(t))}" stroke="#dddddd"/>'
        )
        parts.append(
            f'<text x="{_ML - 8}" y="{_fmt(_fy(t) + 4)}" text-anchor="end">{t}</text>'
        )
    parts.append(
        f'<text x="16" y="{_fy(0.5)}" text-anchor="middle" '
        f'transform="rotate(-90 16 {_fy(0.5)})">{ylabel}</text>'
    )
    for gi, (label, vals) in enumerate(groups):
        x0 = _ML + gi * span + span * 0.1
        for si, name in enumerate(series_names):
            v = max(0.0, min(1.0, float(vals.get(name, 0.0))))
            color = PALETTE[si % len(PALETTE)]
            top = _fy(v)
            parts.append(
                f'<rect x="{_fmt(x0 + si * bar_w)}" y="{_fmt(top)}" '
                f'width="{_fmt(bar_w)}" height="{_fmt(_fy(0) - top)}" fill="{color}"/>'
            )
        parts.append(
            f'<text x="{_fmt(x0 + span * 0.4)}" y="{_H - _MB + 16}" '
            f'text-anchor="middle">{label}</text>'
        )
    for si, name in enumerate(series_names):
        color = PALETTE[si % len(PALETTE)]
        ly = _MT + 14 * (si + 1)
        parts.append(
            f'<rect x="{_W - _MR + 10}" y="{ly - 10}" width="12" height="12" '
            f'fill="{color}"/>'
        )
        parts.append(f'<text x="{_W - _MR + 28}" y="{ly}">{name}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
