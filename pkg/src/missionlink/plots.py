"""Static SVG plots: access timeline, per-satellite eCDF, link panels.

The SVG is emitted directly (no plotting library) so output bytes depend
only on the data: identical runs produce identical files.
"""
from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

from .runner import ReportBundle

_FONT = "font-family='Helvetica,Arial,sans-serif'"


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def _ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    """Round tick positions covering [lo, hi] with a 1/2/5 step."""
    if hi <= lo:
        return [lo]
    span = hi - lo
    raw = span / max(target, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * span:
        ticks.append(0.0 if abs(t) < step * 1e-9 else t)
        t += step
    return ticks


class _Panel:
    """One cartesian panel mapped into an SVG pixel rectangle."""

    def __init__(self, x: float, y: float, w: float, h: float,
                 xlim: tuple[float, float], ylim: tuple[float, float]):
        self.x, self.y, self.w, self.h = x, y, w, h
        self.xlim, self.ylim = xlim, ylim

    def px(self, vx: float) -> float:
        x0, x1 = self.xlim
        return self.x + (vx - x0) / (x1 - x0) * self.w

    def py(self, vy: float) -> float:
        y0, y1 = self.ylim
        if y1 == y0:
            return self.y + self.h / 2
        return self.y + self.h - (vy - y0) / (y1 - y0) * self.h

    def frame(self, out: list[str], title: str, xlabel: str, ylabel: str) -> None:
        out.append(
            f"<rect x='{_fmt(self.x)}' y='{_fmt(self.y)}' width='{_fmt(self.w)}'"
            f" height='{_fmt(self.h)}' fill='none' stroke='#444' stroke-width='1'/>"
        )
        out.append(
            f"<text x='{_fmt(self.x + self.w / 2)}' y='{_fmt(self.y - 6)}' {_FONT}"
            f" font-size='12' text-anchor='middle'>{escape(title)}</text>"
        )
        out.append(
            f"<text x='{_fmt(self.x + self.w / 2)}' y='{_fmt(self.y + self.h + 30)}' {_FONT}"
            f" font-size='11' text-anchor='middle'>{escape(xlabel)}</text>"
        )
        out.append(
            f"<text x='{_fmt(self.x - 44)}' y='{_fmt(self.y + self.h / 2)}' {_FONT}"
            f" font-size='11' text-anchor='middle'"
            f" transform='rotate(-90 {_fmt(self.x - 44)} {_fmt(self.y + self.h / 2)})'>"
            f"{escape(ylabel)}</text>"
        )
        for t in _ticks(*self.xlim):
            px = self.px(t)
            out.append(
                f"<line x1='{_fmt(px)}' y1='{_fmt(self.y + self.h)}' x2='{_fmt(px)}'"
                f" y2='{_fmt(self.y + self.h + 4)}' stroke='#444' stroke-width='1'/>"
            )
            out.append(
                f"<text x='{_fmt(px)}' y='{_fmt(self.y + self.h + 16)}' {_FONT}"
                f" font-size='10' text-anchor='middle'>{_fmt(t)}</text>"
            )
        for t in _ticks(*self.ylim):
            py = self.py(t)
            out.append(
                f"<line x1='{_fmt(self.x - 4)}' y1='{_fmt(py)}' x2='{_fmt(self.x)}'"
                f" y2='{_fmt(py)}' stroke='#444' stroke-width='1'/>"
            )
            out.append(
                f"<text x='{_fmt(self.x - 6)}' y='{_fmt(py + 3)}' {_FONT}"
                f" font-size='10' text-anchor='end'>{_fmt(t)}</text>"
            )

    def polyline(self, out: list[str], pts: list[tuple[float, float]], color: str) -> None:
        if len(pts) == 1:
            x, y = pts[0]
            out.append(
                f"<circle cx='{_fmt(self.px(x))}' cy='{_fmt(self.py(y))}' r='2' fill='{color}'/>"
            )
            return
        coords = " ".join(f"{_fmt(self.px(x))},{_fmt(self.py(y))}" for x, y in pts)
        out.append(
            f"<polyline points='{coords}' fill='none' stroke='{color}' stroke-width='1.2'/>"
        )


def _svg(width: float, height: float, body: list[str], title: str) -> str:
    head = [
        "<?xml version='1.0' encoding='UTF-8'?>",
        f"<svg xmlns='http://www.w3.org/2000/svg' version='1.1'"
        f" width='{_fmt(width)}' height='{_fmt(height)}'"
        f" viewBox='0 0 {_fmt(width)} {_fmt(height)}'>",
        f"<rect x='0' y='0' width='{_fmt(width)}' height='{_fmt(height)}' fill='white'/>",
        f"<text x='{_fmt(width / 2)}' y='18' {_FONT} font-size='14'"
        f" text-anchor='middle'>{escape(title)}</text>",
    ]
    return "\n".join(head + body + ["</svg>"]) + "\n"


def timeline_svg(bundle: ReportBundle) -> str:
    """Access/outage bar over the horizon; access filled, outages hatched red."""
    cov = bundle.coverage
    assert cov is not None
    h0, h1 = bundle.horizon
    hours = (h1 - h0) / 3600.0
    panel = _Panel(70, 50, 620, 90, (0.0, hours), (0.0, 1.0))
    body: list[str] = []
    for s, e in cov.union:
        x0 = panel.px((s - h0) / 3600.0)
        x1 = panel.px((e - h0) / 3600.0)
        body.append(
            f"<rect x='{_fmt(x0)}' y='{_fmt(panel.y + 15)}' width='{_fmt(max(x1 - x0, 0.3))}'"
            f" height='60' fill='#2b7a2b'/>"
        )
    for s, e in cov.outages:
        x0 = panel.px((s - h0) / 3600.0)
        x1 = panel.px((e - h0) / 3600.0)
        body.append(
            f"<rect x='{_fmt(x0)}' y='{_fmt(panel.y + 15)}' width='{_fmt(max(x1 - x0, 0.3))}'"
            f" height='60' fill='#c23b3b'/>"
        )
    frame: list[str] = []
    panel.frame(frame, f"access {cov.total_pct:.2f}% of horizon", "time [h]", "")
    legend = [
        f"<rect x='540' y='28' width='12' height='10' fill='#2b7a2b'/>",
        f"<text x='556' y='37' {_FONT} font-size='10'>access</text>",
        f"<rect x='610' y='28' width='12' height='10' fill='#c23b3b'/>",
        f"<text x='626' y='37' {_FONT} font-size='10'>outage</text>",
    ]
    return _svg(760, 200, frame + body + legend, f"{bundle.scenario.name}: access and outage intervals")


def ecdf_svg(bundle: ReportBundle) -> str:
    """eCDF of each satellite's longest access, with the usability threshold."""
    points = bundle.ecdf_points
    assert points is not None
    xs = [d for d, _ in points]
    x_hi = max(xs + [bundle.ecdf_threshold_s or 0.0]) * 1.05
    panel = _Panel(70, 50, 620, 250, (0.0, x_hi), (0.0, 1.0))
    # step curve: jump at every satellite's maximum access duration
    pts: list[tuple[float, float]] = [(0.0, 0.0)]
    prev_f = 0.0
    for d, f in points:
        pts.append((d, prev_f))
        pts.append((d, f))
        prev_f = f
    pts.append((x_hi, prev_f))
    body: list[str] = []
    panel.frame(body, "", "longest single access per satellite [s]", "fraction of satellites")
    panel.polyline(body, pts, "#1f5fa8")
    if bundle.ecdf_threshold_s:
        tx = panel.px(bundle.ecdf_threshold_s)
        body.append(
            f"<line x1='{_fmt(tx)}' y1='{_fmt(panel.y)}' x2='{_fmt(tx)}'"
            f" y2='{_fmt(panel.y + panel.h)}' stroke='#c23b3b' stroke-width='1'"
            f" stroke-dasharray='4 3'/>"
        )
        body.append(
            f"<text x='{_fmt(tx + 4)}' y='{_fmt(panel.y + 12)}' {_FONT} font-size='10'"
            f" fill='#c23b3b'>{_fmt(bundle.ecdf_threshold_s)} s</text>"
        )
    return _svg(760, 360, body, f"{bundle.scenario.name}: eCDF of access duration per satellite")


def _series_segments(samples, field: str, scale: float = 1.0):
    """Contiguous (t_hours, value) runs between service gaps."""
    segments: list[list[tuple[float, float]]] = []
    current: list[tuple[float, float]] = []
    for s in samples:
        if s.serving_sat is None:
            if current:
                segments.append(current)
                current = []
            continue
        current.append((s.t_s / 3600.0, getattr(s, field) * scale))
    if current:
        segments.append(current)
    return segments


def link_panel_svg(bundle: ReportBundle) -> str:
    """Two rows (downlink, uplink) of range / Es/N0 / data-rate panels."""
    series = bundle.link_series
    assert series is not None
    h0, h1 = bundle.horizon
    hours = (h1 - h0) / 3600.0
    specs = [
        ("slant_range_km", 1.0, "range [km]", "#333333"),
        ("esn0_dl_db", 1.0, "downlink Es/N0 [dB]", "#1f5fa8"),
        ("rate_dl_bps", 1e-6, "downlink rate [Mbps]", "#2b7a2b"),
        ("slant_range_km", 1.0, "range [km]", "#333333"),
        ("esn0_ul_db", 1.0, "uplink Es/N0 [dB]", "#a85f1f"),
        ("rate_ul_bps", 1e-6, "uplink rate [Mbps]", "#7a2b7a"),
    ]
    body: list[str] = []
    for idx, (field, scale, label, color) in enumerate(specs):
        row, col = divmod(idx, 3)
        segments = _series_segments(series, field, scale)
        values = [v for seg in segments for _, v in seg]
        if values:
            lo, hi = min(values), max(values)
            pad = 0.05 * (hi - lo) if hi > lo else max(abs(hi), 1.0) * 0.05
            ylim = (lo - pad, hi + pad)
        else:
            ylim = (0.0, 1.0)
        panel = _Panel(80 + col * 330, 60 + row * 250, 250, 170, (0.0, hours), ylim)
        panel.frame(body, label, "time [h]", "")
        for seg in segments:
            panel.polyline(body, seg, color)
    return _svg(1060, 580, body, f"{bundle.scenario.name}: link performance to serving satellite")


def emit_plots(bundle: ReportBundle, outdir: str | Path) -> tuple[list[Path], list[str]]:
    """Write the plots the bundle has data for; report what was skipped."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    warnings: list[str] = []
    if bundle.coverage is not None:
        path = outdir / "coverage_timeline.svg"
        path.write_text(timeline_svg(bundle), encoding="utf-8")
        written.append(path)
    else:
        warnings.append("plot skipped: no coverage series in bundle")
    if bundle.ecdf_points:
        path = outdir / "ecdf.svg"
        path.write_text(ecdf_svg(bundle), encoding="utf-8")
        written.append(path)
    else:
        warnings.append("plot skipped: no ecdf points in bundle")
    if bundle.link_series:
        path = outdir / "link_panel.svg"
        path.write_text(link_panel_svg(bundle), encoding="utf-8")
        written.append(path)
    else:
        warnings.append("plot skipped: no link series in bundle")
    return written, warnings
