"""Deterministic report serialization: same bundle, same bytes.

Formatting rules: seconds, dB, percent and ms carry 2 decimals; km 3
decimals; bit rates are integers; dimensionless fractions 6 decimals.
No timestamps anywhere, so identical runs are byte-identical.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .errors import ComputeError
from .runner import ReportBundle
from .scenario import serialize_scenario


def _f2(x: float | None) -> float | None:
    return None if x is None else round(float(x), 2)


def _f3(x: float | None) -> float | None:
    return None if x is None else round(float(x), 3)


def _f6(x: float | None) -> float | None:
    return None if x is None else round(float(x), 6)


def _summary_block(summary: dict[str, dict[str, float]]) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for fname, stats in summary.items():
        if fname.endswith("_bps"):
            fmt = lambda v: int(round(v))
        elif fname.endswith("_km"):
            fmt = _f3
        else:
            fmt = _f2
        out[fname] = {k: fmt(stats[k]) for k in ("min", "max", "mean")}
    return out


def bundle_to_dict(bundle: ReportBundle) -> dict[str, Any]:
    """JSON-ready dict with a stable key order and fixed number formats."""
    doc: dict[str, Any] = {
        "scenario": {
            "name": bundle.scenario.name,
            "text": serialize_scenario(bundle.scenario),
        },
        "constellation": {
            "name": bundle.constellation.name,
            "satellites": bundle.constellation.satellite_count,
            "min_elevation_deg": _f2(bundle.constellation.min_elevation_deg),
        },
        "mission": {
            "altitude_km": _f3(bundle.scenario.mission.altitude_km),
            "inclination_deg": _f3(bundle.mission_inclination_deg),
            "raan_deg": _f3(bundle.scenario.mission.raan_deg),
            "mean_anomaly_deg": _f3(bundle.scenario.mission.mean_anomaly_deg),
        },
        "horizon": {"start_s": _f2(bundle.horizon[0]), "end_s": _f2(bundle.horizon[1])},
    }
    if bundle.coverage is not None:
        cov = bundle.coverage
        doc["coverage"] = {
            "total_access_s": _f2(cov.total_access_s),
            "total_pct": _f2(cov.total_pct),
            "min_uninterrupted_s": _f2(cov.min_uninterrupted_s),
            "max_uninterrupted_s": _f2(cov.max_uninterrupted_s),
            "access_interval_count": len(cov.union),
            "outage_count": len(cov.outages),
            "outages": [[_f2(s), _f2(e)] for s, e in cov.outages],
        }
    if bundle.ecdf_points is not None:
        doc["ecdf"] = {
            "threshold_s": _f2(bundle.ecdf_threshold_s),
            "useless_fraction": _f6(bundle.useless_fraction),
            "satellites": len(bundle.ecdf_points),
            "points": [[_f2(d), _f6(f)] for d, f in bundle.ecdf_points],
        }
    if bundle.link_series is not None:
        valid = sum(1 for s in bundle.link_series if s.serving_sat is not None)
        doc["link"] = {
            "samples": len(bundle.link_series),
            "samples_with_service": valid,
            "summary": _summary_block(bundle.link_summary or {}),
        }
    if bundle.latency_ms is not None:
        doc["latency"] = {
            "baseline_ms": _f2(bundle.constellation.baseline_latency_ms),
            "saving_ms": _f2(bundle.latency_saving_ms),
            "latency_ms": _f2(bundle.latency_ms),
        }
    doc["provenance"] = bundle.provenance
    return doc


def intervals_csv(bundle: ReportBundle) -> str:
    """Per-satellite access intervals: sat_id, start_s, end_s, duration_s."""
    lines = ["sat_id,start_s,end_s,duration_s"]
    for sat_id in sorted(bundle.per_sat or {}):
        for iv in bundle.per_sat[sat_id]:
            lines.append(
                f"{sat_id},{iv.start_s:.2f},{iv.end_s:.2f},{iv.duration_s:.2f}"
            )
    return "\n".join(lines) + "\n"


def link_csv(bundle: ReportBundle) -> str:
    """Link time series: one sampled row per step."""
    lines = ["t_s,serving_sat,range_km,esn0_dl_db,esn0_ul_db,rate_dl_bps,rate_ul_bps"]
    for s in bundle.link_series or []:
        if s.serving_sat is None:
            lines.append(f"{s.t_s:.2f},,,,,0,0")
        else:
            lines.append(
                f"{s.t_s:.2f},{s.serving_sat},{s.slant_range_km:.3f},"
                f"{s.esn0_dl_db:.2f},{s.esn0_ul_db:.2f},"
                f"{int(round(s.rate_dl_bps))},{int(round(s.rate_ul_bps))}"
            )
    return "\n".join(lines) + "\n"


def write_reports(
    bundle: ReportBundle, outdir: str | Path, formats: tuple[str, ...] = ("json", "csv")
) -> list[Path]:
    """Write report files into outdir; returns the created paths."""
    outdir = Path(outdir)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        written: list[Path] = []
        if "json" in formats:
            path = outdir / "report.json"
            path.write_text(
                json.dumps(bundle_to_dict(bundle), indent=2, allow_nan=False) + "\n",
                encoding="utf-8",
            )
            written.append(path)
        if "csv" in formats and bundle.per_sat is not None:
            path = outdir / "access_intervals.csv"
            path.write_text(intervals_csv(bundle), encoding="utf-8")
            written.append(path)
        if "csv" in formats and bundle.link_series is not None:
            path = outdir / "link_series.csv"
            path.write_text(link_csv(bundle), encoding="utf-8")
            written.append(path)
        return written
    except OSError as exc:
        raise ComputeError(f"cannot write report under {outdir}: {exc}") from exc
