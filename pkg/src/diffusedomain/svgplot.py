"""Minimal self-contained log-log SVG charts.

Hand-rolled so that repeated runs produce byte-identical files; enough for
convergence plots with a fitted-slope annotation.
"""

import math

_W, _H = 640, 480
_ML, _MR, _MT, _MB = 70, 30, 40, 60
_COLORS = ("#1f6fb2", "#c0392b", "#2c8a4b", "#8e44ad", "#b7950b")


def _decades(lo, hi):
    first = math.floor(lo)
    last = math.ceil(hi)
    return [d for d in range(first, last + 1) if lo - 1e-9 <= d <= hi + 1e-9]


def write_loglog_svg(path, series, title="", xlabel="", ylabel=""):
    """Write a log-log chart.

    series: list of (label, xs, ys, slope) with positive data; slope may be
    None, otherwise it is annotated and drawn as a dashed fit line.
    """
    pts = [(math.log10(x), math.log10(y))
           for _, xs, ys, _ in series for x, y in zip(xs, ys)]
    if not pts:
        raise ValueError("nothing to plot")
    lx = [p[0] for p in pts]
    ly = [p[1] for p in pts]
    pad = 0.15
    x0, x1 = min(lx) - pad, max(lx) + pad
    y0, y1 = min(ly) - pad, max(ly) + pad
    if x1 - x0 < 1e-9:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 - y0 < 1e-9:
        y0, y1 = y0 - 0.5, y1 + 0.5

    def sx(v):
        return _ML + (v - x0) / (x1 - x0) * (_W - _ML - _MR)

    def sy(v):
        return _H - _MB - (v - y0) / (y1 - y0) * (_H - _MT - _MB)

    out = []
    out.append(f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
               f'viewBox="0 0 {_W} {_H}">')
    out.append(f'<rect width="{_W}" height="{_H}" fill="white"/>')
    out.append(f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" '
               f'height="{_H - _MT - _MB}" fill="none" stroke="#333"/>')
    if title:
        out.append(f'<text x="{_W / 2:.6g}" y="24" font-size="16" text-anchor="middle" '
                   f'font-family="sans-serif">{title}</text>')

    for d in _decades(x0, x1):
        x = sx(d)
        out.append(f'<line x1="{x:.6g}" y1="{_MT}" x2="{x:.6g}" y2="{_H - _MB}" '
                   f'stroke="#ddd"/>')
        out.append(f'<text x="{x:.6g}" y="{_H - _MB + 18}" font-size="12" '
                   f'text-anchor="middle" font-family="sans-serif">1e{d}</text>')
    for d in _decades(y0, y1):
        y = sy(d)
        out.append(f'<line x1="{_ML}" y1="{y:.6g}" x2="{_W - _MR}" y2="{y:.6g}" '
                   f'stroke="#ddd"/>')
        out.append(f'<text x="{_ML - 6}" y="{y + 4:.6g}" font-size="12" '
                   f'text-anchor="end" font-family="sans-serif">1e{d}</text>')
    if xlabel:
        out.append(f'<text x="{_W / 2:.6g}" y="{_H - 16}" font-size="13" '
                   f'text-anchor="middle" font-family="sans-serif">{xlabel}</text>')
    if ylabel:
        out.append(f'<text x="18" y="{_H / 2:.6g}" font-size="13" text-anchor="middle" '
                   f'font-family="sans-serif" transform="rotate(-90 18 {_H / 2:.6g})">'
                   f'{ylabel}</text>')

    legend_y = _MT + 16
    for k, (label, xs, ys, slope) in enumerate(series):
        color = _COLORS[k % len(_COLORS)]
        path_pts = " ".join(f"{sx(math.log10(x)):.6g},{sy(math.log10(y)):.6g}"
                            for x, y in zip(xs, ys))
        out.append(f'<polyline points="{path_pts}" fill="none" stroke="{color}" '
                   f'stroke-width="1.5"/>')
        for x, y in zip(xs, ys):
            out.append(f'<circle cx="{sx(math.log10(x)):.6g}" '
                       f'cy="{sy(math.log10(y)):.6g}" r="3" fill="{color}"/>')
        if slope is not None and not math.isnan(slope):
            # dashed least-squares line through the data mean
            mx = sum(math.log10(x) for x in xs) / len(xs)
            my = sum(math.log10(y) for y in ys) / len(ys)
            xs_line = (min(math.log10(min(xs)), x0 + pad), max(math.log10(max(xs)), x1 - pad))
            p1 = (sx(xs_line[0]), sy(my + slope * (xs_line[0] - mx)))
            p2 = (sx(xs_line[1]), sy(my + slope * (xs_line[1] - mx)))
            out.append(f'<line x1="{p1[0]:.6g}" y1="{p1[1]:.6g}" x2="{p2[0]:.6g}" '
                       f'y2="{p2[1]:.6g}" stroke="{color}" stroke-dasharray="6,4"/>')
            label = f"{label} (slope {slope:.3f})"
        out.append(f'<rect x="{_ML + 10}" y="{legend_y - 10}" width="12" height="12" '
                   f'fill="{color}"/>')
        out.append(f'<text x="{_ML + 28}" y="{legend_y}" font-size="12" '
                   f'font-family="sans-serif">{label}</text>')
        legend_y += 18

    out.append("</svg>")
    with open(path, "w", newline="\n") as f:
        f.write("\n".join(out) + "\n")
