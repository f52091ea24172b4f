"""Deterministic report serialization and static SVG charts.

Reports are canonical JSON: sorted keys, two-space indent, a trailing
newline, rationals rendered as "p/q" strings.  Identical configuration and
inputs therefore produce byte-identical files.  Charts are hand-written
SVG bar charts with no timestamps or library fingerprints.
"""

from __future__ import annotations

import json
import os
from fractions import Fraction


def canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_report(out_dir: str, name: str, doc) -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, name)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(doc))
    return path


def fraction_str(x) -> str:
    f = Fraction(x)
    return f"{f.numerator}/{f.denominator}" if f.denominator != 1 else str(f.numerator)


def bar_chart_svg(title: str, labels, values, width: int = 640,
                  height: int = 360) -> str:
    """Minimal deterministic SVG bar chart; values may be Fractions."""
    values = [float(v) for v in values]
    n = max(1, len(values))
    vmax = max([abs(v) for v in values] + [1e-9])
    margin = 48
    plot_w = width - 2 * margin
    plot_h = height - 2 * margin
    bar_w = plot_w / n
    zero_y = margin + plot_h * (vmax / (2 * vmax)) if min(values + [0]) < 0 \
        else margin + plot_h
    scale = (plot_h / (2 * vmax)) if min(values + [0]) < 0 else plot_h / vmax
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="24" text-anchor="middle" '
        f'font-family="monospace" font-size="14">{_esc(title)}</text>',
        f'<line x1="{margin}" y1="{zero_y:.2f}" x2="{width - margin}" '
        f'y2="{zero_y:.2f}" stroke="black" stroke-width="1"/>',
    ]
    for i, (label, v) in enumerate(zip(labels, values)):
        x = margin + i * bar_w
        h = abs(v) * scale
        y = zero_y - h if v >= 0 else zero_y
        parts.append(
            f'<rect x="{x + bar_w * 0.1:.2f}" y="{y:.2f}" '
            f'width="{bar_w * 0.8:.2f}" height="{h:.2f}" fill="#4477aa"/>')
        parts.append(
            f'<text x="{x + bar_w / 2:.2f}" y="{height - margin / 3:.2f}" '
            f'text-anchor="middle" font-family="monospace" font-size="10">'
            f'{_esc(str(label))}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _esc(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;"))


def write_chart(out_dir: str, name: str, title: str, labels, values) -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, name)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(bar_chart_svg(title, labels, values))
    return path
