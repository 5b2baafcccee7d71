"""Generates the scenario-format reference page from the code itself.

Run ``python -m missionlink.docgen > docs/scenario_reference.md`` after
changing scenario fields or defaults; a test keeps the checked-in page
in sync.
"""
from __future__ import annotations

from dataclasses import MISSING, fields

from .scenario import DownlinkSide, LinkSpec, MissionSpec, SimulationSpec, UplinkSide

_FIELD_NOTES = {
    "mission.altitude_km": "circular orbit altitude above the 6378.137 km sphere",
    "mission.inclination": 'degrees, or "sso" to derive the sun-synchronous value',
    "mission.raan_deg": "right ascension of the ascending node at t = 0",
    "mission.mean_anomaly_deg": "position along the orbit at t = 0",
    "simulation.horizon_s": "analysis span starting at t = 0",
    "simulation.coarse_step_s": "visibility scan step; accesses shorter than this can be missed",
    "simulation.refine_tolerance_s": "bisection tolerance on access boundaries",
    "simulation.visibility_mode": '"cone" (service cone) or "los-only" (geometric line of sight)',
    "simulation.j2": "apply secular node/perigee drift while propagating",
    "simulation.ecdf_threshold_s": "usability threshold for the per-satellite access eCDF",
    "link.terminal": "terminal preset name supplying transmit EIRP and receive G/T",
    "link.eirp_dbw": "explicit terminal transmit EIRP; overrides the preset",
    "link.g_over_t_db_k": "explicit terminal receive G/T; overrides the preset",
    "link.provider": "provider link preset supplying the space-segment RF parameters",
    "link.step_s": "sample spacing of the link time series",
    "link.visibility_mode": "serving-satellite visibility rule for the link series",
    "link.margin_db": "margin subtracted from Es/N0 before MODCOD selection",
    "link.rolloff": "pulse-shaping roll-off; symbol rate = bandwidth / (1 + rolloff)",
    "link.implementation_loss_db": "flat loss subtracted from both link budgets",
    "link.modcod_table": "path to an alternate MODCOD CSV (default: bundled DVB-S2X set)",
    "link.downlink.eirp_dbw": "provider transmit EIRP",
    "link.downlink.frequency_hz": "downlink carrier frequency",
    "link.downlink.bandwidth_hz": "downlink carrier bandwidth",
    "link.uplink.g_over_t_db_k": "provider receive figure of merit",
    "link.uplink.frequency_hz": "uplink carrier frequency",
    "link.uplink.bandwidth_hz": "uplink carrier bandwidth",
}


def _rows(section: str, cls) -> list[str]:
    rows = []
    for f in fields(cls):
        if f.default is MISSING:
            default = "(required)"
        elif f.default is None:
            default = "(optional)"
        elif isinstance(f.default, bool):
            default = "true" if f.default else "false"
        elif isinstance(f.default, str):
            default = f'"{f.default}"'
        else:
            default = f"{f.default:g}"
        note = _FIELD_NOTES.get(f"{section}.{f.name}", "")
        rows.append(f"| `{f.name}` | {default} | {note} |")
    return rows


def scenario_reference() -> str:
    lines = [
        "# Scenario file reference",
        "",
        "Scenarios are TOML. Unknown keys are rejected with a suggestion;",
        "anything omitted falls back to the default below and is recorded in",
        "the report's provenance block. Values can be overridden from the",
        "command line with `--set section.key=value`.",
        "",
        "Top level: `name` (string, defaults to the file stem) and `outputs`,",
        'an array drawn from `"coverage"`, `"ecdf"`, `"link"`, `"latency"`,',
        '`"plots"` (default: all five).',
        "",
        "## [constellation]",
        "",
        "Either `preset = \"<name>\"` (one of the bundled constellations, see",
        "`missionlink catalog`) or an inline definition:",
        "",
        "| key | default | meaning |",
        "|---|---|---|",
        "| `name` | \"custom\" | label used in reports |",
        "| `min_elevation_deg` | (required) | minimum service elevation defining the nadir cone |",
        "| `baseline_latency_ms` | (optional) | operator ground-user latency; enables the latency output |",
        "| `truncate_to` | (optional) | keep only the first N satellites in build order |",
        "",
        "plus one `[[constellation.shells]]` table per shell:",
        "",
        "| key | default | meaning |",
        "|---|---|---|",
        "| `altitude_km` | (required) | shell altitude |",
        "| `inclination_deg` | (required) | shell inclination |",
        "| `planes` | (required) | number of orbital planes |",
        "| `sats_per_plane` | (required) | satellites per plane |",
        "| `phasing_factor` | 1 (0 if single-plane) | Walker inter-plane phasing |",
        "| `raan_span_deg` | 360 | node spread of the planes |",
        "",
        "## [mission]",
        "",
        "| key | default | meaning |",
        "|---|---|---|",
        *_rows("mission", MissionSpec),
        "",
        "## [simulation]",
        "",
        "| key | default | meaning |",
        "|---|---|---|",
        *_rows("simulation", SimulationSpec),
        "",
        "## [link]",
        "",
        "Optional; without it the link output is skipped with a warning.",
        "",
        "| key | default | meaning |",
        "|---|---|---|",
        *_rows("link", LinkSpec),
        "",
        "`downlink`/`uplink` provider-side tables (used instead of the",
        "`provider` preset when given):",
        "",
        "### [link.downlink]",
        "",
        "| key | default | meaning |",
        "|---|---|---|",
        *_rows("link.downlink", DownlinkSide),
        "",
        "### [link.uplink]",
        "",
        "| key | default | meaning |",
        "|---|---|---|",
        *_rows("link.uplink", UplinkSide),
        "",
    ]
    return "\n".join(lines)


if __name__ == "__main__":
    print(scenario_reference(), end="")
