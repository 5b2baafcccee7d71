"""Executes a scenario end to end and assembles the report bundle."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from . import __version__
from .catalog import (
    build_constellation,
    get_terminal,
    load_modcod_table,
    provider_link_presets,
)
from .constants import EARTH_RADIUS_KM
from .errors import ScenarioError
from .link import (
    LinkEndpointParams,
    LinkSample,
    latency_saving,
    link_time_series,
    mission_latency,
)
from .orbits import Constellation, OrbitElements, sso_inclination
from .scenario import Scenario
from .visibility import (
    AccessInterval,
    CoverageReport,
    VisibilityConfig,
    coverage_stats,
    per_satellite_ecdf,
    scan_constellation,
    union_and_outages,
)

Progress = Callable[[str], None]


@dataclass
class ReportBundle:
    """Everything a scenario run produced, ready for serialization."""

    scenario: Scenario
    constellation: Constellation
    mission_elements: OrbitElements
    mission_inclination_deg: float
    horizon: tuple[float, float]
    coverage: CoverageReport | None = None
    per_sat: dict[int, list[AccessInterval]] | None = None
    ecdf_points: list[tuple[float, float]] | None = None
    useless_fraction: float | None = None
    ecdf_threshold_s: float | None = None
    link_series: list[LinkSample] | None = None
    link_summary: dict[str, dict[str, float]] | None = None
    latency_ms: float | None = None
    latency_saving_ms: float | None = None
    warnings: list[str] = field(default_factory=list)
    overrides: tuple[str, ...] = ()
    defaults_used: tuple[str, ...] = ()

    @property
    def provenance(self) -> dict:
        return {
            "tool": "missionlink",
            "version": __version__,
            "defaults_used": list(self.defaults_used),
            "overrides": list(self.overrides),
            "warnings": list(self.warnings),
        }


def mission_orbit(scenario: Scenario) -> tuple[OrbitElements, float]:
    """Mission circular orbit elements and the resolved inclination [deg]."""
    m = scenario.mission
    inc_deg = (
        sso_inclination(m.altitude_km) if m.inclination == "sso" else float(m.inclination)
    )
    el = OrbitElements(
        a_km=EARTH_RADIUS_KM + m.altitude_km,
        eccentricity=0.0,
        inclination_rad=math.radians(inc_deg),
        raan_rad=math.radians(m.raan_deg),
        arg_perigee_rad=0.0,
        mean_anomaly_rad=math.radians(m.mean_anomaly_deg),
        epoch_s=0.0,
    )
    return el, inc_deg


def resolve_link_endpoints(
    scenario: Scenario, constellation: Constellation
) -> tuple[LinkEndpointParams, LinkEndpointParams]:
    """Combine terminal and provider sides into per-direction parameters."""
    link = scenario.link
    if link is None:
        raise ScenarioError("scenario has no [link] section")
    eirp = link.eirp_dbw
    g_over_t = link.g_over_t_db_k
    if link.terminal is not None:
        terminal = get_terminal(link.terminal)
        if eirp is None:
            eirp = terminal.eirp_dbw
        if g_over_t is None:
            if terminal.g_over_t_db_k is None:
                raise ScenarioError(
                    f"terminal {terminal.name!r} has no published G/T; set link.g_over_t_db_k"
                )
            g_over_t = terminal.g_over_t_db_k
    if eirp is None or g_over_t is None:
        raise ScenarioError("link needs a terminal preset or explicit eirp_dbw and g_over_t_db_k")

    downlink, uplink = link.downlink, link.uplink
    if downlink is None or uplink is None:
        preset_name = link.provider or (
            scenario.constellation if isinstance(scenario.constellation, str) else None
        )
        presets = provider_link_presets()
        if preset_name is None or preset_name not in presets:
            raise ScenarioError(
                "link needs inline [link.downlink]/[link.uplink] tables or a provider preset"
            )
        preset = presets[preset_name]
        if downlink is None:
            p = preset["downlink"]
            dl_params = LinkEndpointParams(
                eirp_dbw=p.eirp_dbw,
                g_over_t_db_k=g_over_t,
                frequency_hz=p.frequency_hz,
                bandwidth_hz=p.bandwidth_hz,
                rolloff=link.rolloff,
            )
        if uplink is None:
            p = preset["uplink"]
            ul_params = LinkEndpointParams(
                eirp_dbw=eirp,
                g_over_t_db_k=p.g_over_t_db_k,
                frequency_hz=p.frequency_hz,
                bandwidth_hz=p.bandwidth_hz,
                rolloff=link.rolloff,
            )
    if downlink is not None:
        dl_params = LinkEndpointParams(
            eirp_dbw=downlink.eirp_dbw,
            g_over_t_db_k=g_over_t,
            frequency_hz=downlink.frequency_hz,
            bandwidth_hz=downlink.bandwidth_hz,
            rolloff=link.rolloff,
        )
    if uplink is not None:
        ul_params = LinkEndpointParams(
            eirp_dbw=eirp,
            g_over_t_db_k=uplink.g_over_t_db_k,
            frequency_hz=uplink.frequency_hz,
            bandwidth_hz=uplink.bandwidth_hz,
            rolloff=link.rolloff,
        )
    return dl_params, ul_params


def _summary(values: list[float]) -> dict[str, float]:
    return {
        "min": min(values),
        "max": max(values),
        "mean": sum(values) / len(values),
    }


def summarize_link(series: list[LinkSample]) -> dict[str, dict[str, float]]:
    """Per-field min/max/mean over samples that had a serving satellite."""
    valid = [s for s in series if s.serving_sat is not None]
    if not valid:
        return {}
    return {
        "slant_range_km": _summary([s.slant_range_km for s in valid]),
        "esn0_dl_db": _summary([s.esn0_dl_db for s in valid]),
        "esn0_ul_db": _summary([s.esn0_ul_db for s in valid]),
        "rate_dl_bps": _summary([s.rate_dl_bps for s in valid]),
        "rate_ul_bps": _summary([s.rate_ul_bps for s in valid]),
    }


def run_scenario(
    scenario: Scenario,
    outputs: tuple[str, ...] | None = None,
    workers: int = 1,
    progress: Progress | None = None,
) -> ReportBundle:
    """Run the requested analyses of a scenario and collect the results.

    ``outputs`` defaults to the scenario's own list.  Analyses that
    cannot run with the given configuration (no baseline latency, no
    link section) are skipped with a warning rather than failing, so a
    generic scenario can still produce its coverage numbers.
    """
    say = progress or (lambda _msg: None)
    requested = tuple(outputs) if outputs is not None else scenario.outputs
    constellation = build_constellation(scenario.constellation)
    mission_el, inc_deg = mission_orbit(scenario)
    sim = scenario.simulation
    horizon = (0.0, sim.horizon_s)
    bundle = ReportBundle(
        scenario=scenario,
        constellation=constellation,
        mission_elements=mission_el,
        mission_inclination_deg=inc_deg,
        horizon=horizon,
        overrides=scenario.overrides_applied,
        defaults_used=scenario.defaults_used,
    )
    if scenario.mission.altitude_km >= max(sh.altitude_km for sh in constellation.shells):
        bundle.warnings.append(
            "mission orbits at or above every provider shell; service requires a lower orbit"
        )

    need_coverage = bool({"coverage", "ecdf"} & set(requested))
    if need_coverage:
        say(f"scanning {constellation.satellite_count} satellites over {sim.horizon_s:.0f} s")
        cfg = VisibilityConfig(
            mode=sim.visibility_mode,
            min_elevation_deg=constellation.min_elevation_deg,
            coarse_step_s=sim.coarse_step_s,
            refine_tolerance_s=sim.refine_tolerance_s,
            j2=sim.j2,
        )
        per_sat = scan_constellation(constellation, mission_el, horizon, cfg, workers=workers)
        union, _ = union_and_outages(per_sat, horizon)
        bundle.per_sat = per_sat
        bundle.coverage = coverage_stats(union, per_sat, horizon)
        say(
            f"coverage: total {bundle.coverage.total_access_s:.2f} s"
            f" ({bundle.coverage.total_pct:.2f}%)"
        )
        if "ecdf" in requested:
            bundle.ecdf_threshold_s = sim.ecdf_threshold_s
            try:
                bundle.ecdf_points, bundle.useless_fraction = per_satellite_ecdf(
                    bundle.coverage.per_sat_durations, sim.ecdf_threshold_s
                )
                say(
                    f"ecdf: {100.0 * bundle.useless_fraction:.2f}% of active satellites"
                    f" below {sim.ecdf_threshold_s:.0f} s"
                )
            except ValueError:
                bundle.warnings.append("ecdf skipped: no satellite had any access")

    if "link" in requested:
        if scenario.link is None:
            bundle.warnings.append("link analysis skipped: scenario has no [link] section")
        else:
            dl, ul = resolve_link_endpoints(scenario, constellation)
            table = load_modcod_table(scenario.link.modcod_table)
            say("computing link time series")
            bundle.link_series = link_time_series(
                constellation,
                mission_el,
                horizon,
                scenario.link.step_s,
                dl,
                ul,
                table,
                margin_db=scenario.link.margin_db,
                implementation_loss_db=scenario.link.implementation_loss_db,
                mode=scenario.link.visibility_mode,
                j2=sim.j2,
            )
            bundle.link_summary = summarize_link(bundle.link_series)
            if bundle.link_summary:
                ul_peak = bundle.link_summary["rate_ul_bps"]["max"] / 1e6
                dl_peak = bundle.link_summary["rate_dl_bps"]["max"] / 1e6
                say(f"link: peak rates UL {ul_peak:.2f} Mbps / DL {dl_peak:.2f} Mbps")
            else:
                bundle.warnings.append("link series has no sample with a serving satellite")

    if "latency" in requested:
        if constellation.baseline_latency_ms is None:
            bundle.warnings.append(
                "latency skipped: constellation has no baseline user latency"
            )
        else:
            bundle.latency_ms = mission_latency(
                constellation.baseline_latency_ms, scenario.mission.altitude_km
            )
            bundle.latency_saving_ms = latency_saving(scenario.mission.altitude_km)
            say(f"latency: {bundle.latency_ms:.2f} ms ({bundle.latency_saving_ms:.2f} ms saved)")

    return bundle
