"""Minimal SVG emission for CDF overlays and rate traces."""

from __future__ import annotations

import math

import numpy as np

from .clt import LatticeLaw, RateStudy, gaussian_cdf

W, H, PAD = 640, 400, 50


def _frame(title: str, xlabel: str, ylabel: str, xr, yr) -> list[str]:
    x0, x1 = xr
    y0, y1 = yr
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
           f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">',
           f'<rect width="{W}" height="{H}" fill="white"/>',
           f'<text x="{W / 2}" y="20" text-anchor="middle" font-size="14">{title}</text>',
           f'<line x1="{PAD}" y1="{H - PAD}" x2="{W - PAD}" y2="{H - PAD}" stroke="black"/>',
           f'<line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{H - PAD}" stroke="black"/>',
           f'<text x="{W / 2}" y="{H - 10}" text-anchor="middle">{xlabel}</text>',
           f'<text x="15" y="{H / 2}" transform="rotate(-90 15 {H / 2})" '
           f'text-anchor="middle">{ylabel}</text>']
    for frac in (0, 0.5, 1):
        xv, yv = x0 + frac * (x1 - x0), y0 + frac * (y1 - y0)
        px, py = PAD + frac * (W - 2 * PAD), H - PAD - frac * (H - 2 * PAD)
        out.append(f'<text x="{px:.1f}" y="{H - PAD + 16}" text-anchor="middle">{xv:.3g}</text>')
        out.append(f'<text x="{PAD - 6}" y="{py + 4:.1f}" text-anchor="end">{yv:.3g}</text>')
    return out


def _mapper(xr, yr):
    def to_px(x, y):
        fx = (x - xr[0]) / (xr[1] - xr[0])
        fy = (y - yr[0]) / (yr[1] - yr[0])
        return PAD + fx * (W - 2 * PAD), H - PAD - fy * (H - 2 * PAD)
    return to_px


def _polyline(pts, color: str, dash: str = "") -> str:
    coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in pts)
    extra = f' stroke-dasharray="{dash}"' if dash else ""
    return f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"{extra}/>'


def cdf_overlay_svg(q: LatticeLaw, title: str = "normalized CDF vs standard normal") -> str:
    """Step function F(x) = P(X <= m + x sigma) against Phi."""
    m, s = float(q.mean), q.sigma
    xs = [(k - m) / s for k in range(len(q.pmf))]
    lo, hi = min(-3.0, xs[0] - 0.5), max(3.0, xs[-1] + 0.5)
    to_px = _mapper((lo, hi), (0.0, 1.0))
    step, acc, prev = [to_px(lo, 0.0)], 0.0, 0.0
    for x, p in zip(xs, q.pmf):
        acc += float(p)
        step += [to_px(x, prev), to_px(x, acc)]
        prev = acc
    step.append(to_px(hi, prev))
    grid = np.linspace(lo, hi, 200)
    normal = [to_px(x, gaussian_cdf(x)) for x in grid]
    body = _frame(title, "x", "F(x)", (lo, hi), (0.0, 1.0))
    body += [_polyline(step, "#1f77b4"), _polyline(normal, "#d62728", "5,3"), "</svg>"]
    return "\n".join(body) + "\n"


def rate_trace_svg(study: RateStudy, title: str = "Kolmogorov distance vs scale") -> str:
    """log-log plot of the distances with the fitted line."""
    lx = [math.log10(s) for s in study.scales]
    ly = [math.log10(k) for k in study.kolmogorov]
    xr = (min(lx) - 0.1, max(lx) + 0.1)
    yr = (min(ly) - 0.2, max(ly) + 0.2)
    to_px = _mapper(xr, yr)
    pts = [to_px(x, y) for x, y in zip(lx, ly)]
    fit = [to_px(x, (study.exponent * x * math.log(10) + study.intercept) / math.log(10))
           for x in xr]
    body = _frame(f"{title} (slope {study.exponent:.3f})", "log10 scale",
                  "log10 distance", xr, yr)
    body += [f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3" fill="#1f77b4"/>' for x, y in pts]
    body += [_polyline(fit, "#d62728", "5,3"), "</svg>"]
    return "\n".join(body) + "\n"


def write_svg(path, svg: str) -> None:
    with open(path, "w") as fh:
        fh.write(svg)

