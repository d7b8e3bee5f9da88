"""Deterministic CSV, JSON and SVG writers."""

from __future__ import annotations

import csv
import io
import json
import math
from xml.sax.saxutils import escape

import numpy as np

from . import __version__
from .errors import DomainError

__all__ = ["format_number", "table_to_csv", "envelope", "dumps_envelope", "svg_plot"]


def format_number(x):
    """Scientific notation with 12 significant digits."""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return f"{float(x):.11e}"


def table_to_csv(columns, rows) -> str:
    """Header plus rows; numbers formatted by :func:`format_number`."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_number(v) for v in row])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    return obj


def envelope(command, config, results, annotations=(), errors=None):
    """Result envelope echoing the effective configuration."""
    return {
        "tool": "zenodecay",
        "version": __version__,
        "command": command,
        "config": _jsonable(config),
        "results": _jsonable(results),
        "annotations": list(annotations),
        "error_estimates": _jsonable(errors or {}),
    }


def dumps_envelope(env) -> str:
    return json.dumps(env, indent=2, sort_keys=True) + "\n"


_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")
_W, _H = 720, 480
_LEFT, _RIGHT, _TOP, _BOTTOM = 80, 30, 40, 60


def _nice_ticks(lo, hi, n=6):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(v) < 1e-12 * step else v)
        v += step
    return ticks


def _axis(values, log):
    v = np.asarray(values, dtype=float)
    if log:
        v = v[v > 0]
        if v.size == 0:
            raise DomainError("log axis needs positive data")
        lo, hi = math.floor(math.log10(v.min())), math.ceil(math.log10(v.max()))
        if hi == lo:
            hi = lo + 1
        ticks = [10.0 ** k for k in range(lo, hi + 1)]
        return float(lo), float(hi), ticks
    lo, hi = float(v.min()), float(v.max())
    if hi == lo:
        lo, hi = lo - 0.5, hi + 0.5
    ticks = _nice_ticks(lo, hi)
    return lo, hi, ticks


def svg_plot(series, title="", xlabel="", ylabel="", log_x=False, log_y=False) -> str:
    """Self-contained SVG line plot.

    Parameters
    ----------
    series : list of (label, x, y)
        One polyline per entry; each needs at least two points.
    """
    if not series:
        raise DomainError("nothing to plot")
    for label, x, y in series:
        if len(x) < 2 or len(x) != len(y):
            raise DomainError(f"series {label!r} needs at least two (x, y) points")
    xs = np.concatenate([np.asarray(s[1], float) for s in series])
    ys = np.concatenate([np.asarray(s[2], float) for s in series])
    x0, x1, xticks = _axis(xs, log_x)
    y0, y1, yticks = _axis(ys, log_y)
    pw, ph = _W - _LEFT - _RIGHT, _H - _TOP - _BOTTOM

    def px(v):
        v = math.log10(v) if log_x else v
        return _LEFT + (v - x0) / (x1 - x0) * pw

    def py(v):
        v = math.log10(v) if log_y else v
        return _TOP + ph - (v - y0) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
           f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
           f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
           f'<rect x="{_LEFT}" y="{_TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    if title:
        out.append(f'<text x="{_W / 2:.1f}" y="22" text-anchor="middle" font-size="14">'
                   f'{escape(title)}</text>')
    for t in xticks:
        if (math.log10(t) if log_x else t) < x0 - 1e-12 or (math.log10(t) if log_x else t) > x1 + 1e-12:
            continue
        x = px(t)
        out.append(f'<line x1="{x:.2f}" y1="{_TOP + ph}" x2="{x:.2f}" y2="{_TOP + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{x:.2f}" y="{_TOP + ph + 18}" text-anchor="middle">{t:.3g}</text>')
    for t in yticks:
        if (math.log10(t) if log_y else t) < y0 - 1e-12 or (math.log10(t) if log_y else t) > y1 + 1e-12:
            continue
        y = py(t)
        out.append(f'<line x1="{_LEFT - 5}" y1="{y:.2f}" x2="{_LEFT}" y2="{y:.2f}" stroke="black"/>')
        out.append(f'<text x="{_LEFT - 8}" y="{y + 4:.2f}" text-anchor="end">{t:.3g}</text>')
    if xlabel:
        out.append(f'<text x="{_LEFT + pw / 2:.1f}" y="{_H - 15}" text-anchor="middle">{escape(xlabel)}</text>')
    if ylabel:
        out.append(f'<text x="18" y="{_TOP + ph / 2:.1f}" text-anchor="middle" '
                   f'transform="rotate(-90 18 {_TOP + ph / 2:.1f})">{escape(ylabel)}</text>')
    for k, (label, x, y) in enumerate(series):
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        keep = np.isfinite(x) & np.isfinite(y)
        if log_x:
            keep &= x > 0
        if log_y:
            keep &= y > 0
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x[keep], y[keep]))
        color = _COLORS[k % len(_COLORS)]
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}">'
                   f'<title>{escape(label)}</title></polyline>')
        ly = _TOP + 16 + 16 * k
        lx = _LEFT + pw - 220
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 24}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 30}" y="{ly}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
