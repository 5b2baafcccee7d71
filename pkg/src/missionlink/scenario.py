"""Scenario files: parsing, validation, defaults, serialization, overrides.

Scenarios are TOML: one [constellation] (preset name or inline shells),
one [mission], optional [simulation] and [link] sections, and an
``outputs`` list.  Every key is validated; unknown keys are rejected
with a suggestion.  Anything omitted falls back to a documented default
and is recorded for the report's provenance block.
"""
from __future__ import annotations

import difflib
import json
import math
from dataclasses import dataclass, field, fields
from typing import Any, Iterable, Sequence

import tomli

from .errors import ScenarioError
from .orbits import Constellation, Shell

ALLOWED_OUTPUTS = ("coverage", "ecdf", "link", "latency", "plots")
DEFAULT_OUTPUTS = ALLOWED_OUTPUTS


@dataclass(frozen=True)
class MissionSpec:
    """Circular mission orbit; inclination may be explicit or "sso"."""

    altitude_km: float
    inclination: float | str = "sso"
    raan_deg: float = 0.0
    mean_anomaly_deg: float = 0.0


@dataclass(frozen=True)
class SimulationSpec:
    horizon_s: float = 86400.0
    coarse_step_s: float = 10.0
    refine_tolerance_s: float = 0.01
    visibility_mode: str = "cone"
    j2: bool = True
    ecdf_threshold_s: float = 20.0


@dataclass(frozen=True)
class DownlinkSide:
    """Provider-transmit parameters of the service downlink."""

    eirp_dbw: float
    frequency_hz: float
    bandwidth_hz: float


@dataclass(frozen=True)
class UplinkSide:
    """Provider-receive parameters of the service uplink."""

    g_over_t_db_k: float
    frequency_hz: float
    bandwidth_hz: float


@dataclass(frozen=True)
class LinkSpec:
    terminal: str | None = None
    eirp_dbw: float | None = None
    g_over_t_db_k: float | None = None
    provider: str | None = None
    downlink: DownlinkSide | None = None
    uplink: UplinkSide | None = None
    step_s: float = 10.0
    visibility_mode: str = "los-only"
    margin_db: float = 0.0
    rolloff: float = 0.0
    implementation_loss_db: float = 0.0
    modcod_table: str | None = None


@dataclass(frozen=True)
class Scenario:
    """A fully validated scenario; defaults filled, presets not yet resolved."""

    name: str
    constellation: str | Constellation
    mission: MissionSpec
    simulation: SimulationSpec = SimulationSpec()
    link: LinkSpec | None = None
    outputs: tuple[str, ...] = DEFAULT_OUTPUTS
    defaults_used: tuple[str, ...] = field(default=(), compare=False, repr=False)
    overrides_applied: tuple[str, ...] = field(default=(), compare=False, repr=False)


class _Section:
    """Validation helper for one table of the raw TOML document."""

    def __init__(self, raw: dict, path: str, defaults: list[str]):
        self.raw = raw
        self.path = path
        self.defaults = defaults

    def reject_unknown(self, allowed: Iterable[str]) -> None:
        allowed = list(allowed)
        for key in self.raw:
            if key not in allowed:
                hint = difflib.get_close_matches(key, allowed, n=1, cutoff=0.5)
                suggestion = f"; did you mean {hint[0]!r}?" if hint else ""
                raise ScenarioError(f"unknown key {self._name(key)!r}{suggestion}")

    def _name(self, key: str) -> str:
        return f"{self.path}.{key}" if self.path else key

    def get(self, key: str, default: Any = None, required: bool = False) -> Any:
        if key in self.raw:
            return self.raw[key]
        if required:
            raise ScenarioError(f"missing required key {self._name(key)!r}")
        self.defaults.append(f"{self._name(key)}={_literal(default)}")
        return default

    def number(self, key: str, default: float | None = None, required: bool = False) -> Any:
        val = self.get(key, default, required)
        if val is None:
            return None
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise ScenarioError(f"{self._name(key)} must be a number, got {val!r}")
        if not math.isfinite(float(val)):
            raise ScenarioError(f"{self._name(key)} must be finite")
        return float(val)

    def integer(self, key: str, default: int | None = None, required: bool = False) -> Any:
        val = self.get(key, default, required)
        if val is None:
            return None
        if isinstance(val, bool) or not isinstance(val, int):
            raise ScenarioError(f"{self._name(key)} must be an integer, got {val!r}")
        return int(val)

    def string(self, key: str, default: str | None = None, required: bool = False) -> Any:
        val = self.get(key, default, required)
        if val is not None and not isinstance(val, str):
            raise ScenarioError(f"{self._name(key)} must be a string, got {val!r}")
        return val

    def boolean(self, key: str, default: bool | None = None) -> Any:
        val = self.get(key, default)
        if val is not None and not isinstance(val, bool):
            raise ScenarioError(f"{self._name(key)} must be true or false, got {val!r}")
        return val

    def table(self, key: str) -> dict | None:
        val = self.raw.get(key)
        if val is not None and not isinstance(val, dict):
            raise ScenarioError(f"{self._name(key)} must be a table")
        return val


def _literal(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    return repr(value)


def _parse_shell(raw: dict, path: str, defaults: list[str]) -> Shell:
    sec = _Section(raw, path, defaults)
    sec.reject_unknown(
        ["altitude_km", "inclination_deg", "planes", "sats_per_plane", "phasing_factor", "raan_span_deg"]
    )
    planes = sec.integer("planes", required=True)
    try:
        return Shell(
            altitude_km=sec.number("altitude_km", required=True),
            inclination_deg=sec.number("inclination_deg", required=True),
            planes=planes,
            sats_per_plane=sec.integer("sats_per_plane", required=True),
            phasing_factor=sec.integer("phasing_factor", 1 if planes > 1 else 0),
            raan_span_deg=sec.number("raan_span_deg", 360.0),
        )
    except ValueError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc


def _parse_constellation(raw: dict, defaults: list[str]) -> str | Constellation:
    sec = _Section(raw, "constellation", defaults)
    sec.reject_unknown(
        ["preset", "name", "min_elevation_deg", "baseline_latency_ms", "truncate_to", "shells"]
    )
    preset = sec.string("preset") if "preset" in raw else None
    if preset is not None:
        if len(raw) > 1:
            raise ScenarioError("constellation: give either preset or an inline definition, not both")
        return preset
    shells_raw = raw.get("shells")
    if not shells_raw:
        raise ScenarioError("constellation: needs a preset or a non-empty shells array")
    if not isinstance(shells_raw, list) or not all(isinstance(s, dict) for s in shells_raw):
        raise ScenarioError("constellation.shells must be an array of tables")
    shells = tuple(
        _parse_shell(s, f"constellation.shells[{i}]", defaults) for i, s in enumerate(shells_raw)
    )
    truncate = sec.integer("truncate_to") if "truncate_to" in raw else None
    try:
        return Constellation(
            name=sec.string("name", "custom"),
            shells=shells,
            min_elevation_deg=sec.number("min_elevation_deg", required=True),
            baseline_latency_ms=sec.number("baseline_latency_ms")
            if "baseline_latency_ms" in raw
            else None,
            truncate_to=truncate,
        )
    except ValueError as exc:
        raise ScenarioError(f"constellation: {exc}") from exc


def _parse_mission(raw: dict, defaults: list[str]) -> MissionSpec:
    sec = _Section(raw, "mission", defaults)
    sec.reject_unknown(["altitude_km", "inclination", "raan_deg", "mean_anomaly_deg"])
    altitude = sec.number("altitude_km", required=True)
    if altitude <= 0:
        raise ScenarioError("mission.altitude_km must be positive")
    inclination: float | str
    raw_inc = sec.get("inclination", "sso")
    if isinstance(raw_inc, str):
        if raw_inc != "sso":
            raise ScenarioError(f"mission.inclination must be a number in degrees or 'sso', got {raw_inc!r}")
        inclination = "sso"
    elif isinstance(raw_inc, (int, float)) and not isinstance(raw_inc, bool):
        inclination = float(raw_inc)
        if not (0.0 <= inclination <= 180.0):
            raise ScenarioError("mission.inclination must lie in [0, 180] degrees")
    else:
        raise ScenarioError(f"mission.inclination must be a number in degrees or 'sso', got {raw_inc!r}")
    return MissionSpec(
        altitude_km=altitude,
        inclination=inclination,
        raan_deg=sec.number("raan_deg", 0.0),
        mean_anomaly_deg=sec.number("mean_anomaly_deg", 0.0),
    )


def _parse_simulation(raw: dict, defaults: list[str]) -> SimulationSpec:
    sec = _Section(raw, "simulation", defaults)
    sec.reject_unknown(
        ["horizon_s", "coarse_step_s", "refine_tolerance_s", "visibility_mode", "j2", "ecdf_threshold_s"]
    )
    spec = SimulationSpec(
        horizon_s=sec.number("horizon_s", 86400.0),
        coarse_step_s=sec.number("coarse_step_s", 10.0),
        refine_tolerance_s=sec.number("refine_tolerance_s", 0.01),
        visibility_mode=sec.string("visibility_mode", "cone"),
        j2=sec.boolean("j2", True),
        ecdf_threshold_s=sec.number("ecdf_threshold_s", 20.0),
    )
    if spec.horizon_s <= 0:
        raise ScenarioError("simulation.horizon_s must be positive")
    if spec.visibility_mode not in ("cone", "los-only"):
        raise ScenarioError(
            f"simulation.visibility_mode must be 'cone' or 'los-only', got {spec.visibility_mode!r}"
        )
    if spec.coarse_step_s <= 0:
        raise ScenarioError("simulation.coarse_step_s must be positive")
    if not (0 < spec.refine_tolerance_s < spec.coarse_step_s):
        raise ScenarioError("simulation.refine_tolerance_s must lie in (0, coarse_step_s)")
    if spec.ecdf_threshold_s < 0:
        raise ScenarioError("simulation.ecdf_threshold_s must be non-negative")
    return spec


def _parse_link(raw: dict, defaults: list[str]) -> LinkSpec:
    sec = _Section(raw, "link", defaults)
    sec.reject_unknown(
        [
            "terminal", "eirp_dbw", "g_over_t_db_k", "provider", "downlink", "uplink",
            "step_s", "visibility_mode", "margin_db", "rolloff",
            "implementation_loss_db", "modcod_table",
        ]
    )
    downlink = None
    dl_raw = sec.table("downlink")
    if dl_raw is not None:
        dsec = _Section(dl_raw, "link.downlink", defaults)
        dsec.reject_unknown(["eirp_dbw", "frequency_hz", "bandwidth_hz"])
        downlink = DownlinkSide(
            eirp_dbw=dsec.number("eirp_dbw", required=True),
            frequency_hz=dsec.number("frequency_hz", required=True),
            bandwidth_hz=dsec.number("bandwidth_hz", required=True),
        )
    uplink = None
    ul_raw = sec.table("uplink")
    if ul_raw is not None:
        usec = _Section(ul_raw, "link.uplink", defaults)
        usec.reject_unknown(["g_over_t_db_k", "frequency_hz", "bandwidth_hz"])
        uplink = UplinkSide(
            g_over_t_db_k=usec.number("g_over_t_db_k", required=True),
            frequency_hz=usec.number("frequency_hz", required=True),
            bandwidth_hz=usec.number("bandwidth_hz", required=True),
        )
    spec = LinkSpec(
        terminal=sec.string("terminal") if "terminal" in raw else None,
        eirp_dbw=sec.number("eirp_dbw") if "eirp_dbw" in raw else None,
        g_over_t_db_k=sec.number("g_over_t_db_k") if "g_over_t_db_k" in raw else None,
        provider=sec.string("provider") if "provider" in raw else None,
        downlink=downlink,
        uplink=uplink,
        step_s=sec.number("step_s", 10.0),
        visibility_mode=sec.string("visibility_mode", "los-only"),
        margin_db=sec.number("margin_db", 0.0),
        rolloff=sec.number("rolloff", 0.0),
        implementation_loss_db=sec.number("implementation_loss_db", 0.0),
        modcod_table=(sec.string("modcod_table") or None) if "modcod_table" in raw else None,
    )
    if spec.step_s <= 0:
        raise ScenarioError("link.step_s must be positive")
    if spec.visibility_mode not in ("cone", "los-only"):
        raise ScenarioError(
            f"link.visibility_mode must be 'cone' or 'los-only', got {spec.visibility_mode!r}"
        )
    if spec.rolloff < 0:
        raise ScenarioError("link.rolloff must be >= 0")
    return spec


def _apply_override(raw: dict, assignment: str) -> None:
    if "=" not in assignment:
        raise ScenarioError(f"override {assignment!r} must look like section.key=value")
    dotted, _, literal = assignment.partition("=")
    dotted = dotted.strip()
    if not dotted:
        raise ScenarioError(f"override {assignment!r} has an empty key")
    try:
        value = tomli.loads(f"v = {literal.strip()}")["v"]
    except tomli.TOMLDecodeError:
        value = literal.strip()  # bare words become strings
    node = raw
    parts = dotted.split(".")
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise ScenarioError(f"override {dotted!r} descends into a non-table value")
    node[parts[-1]] = value


def parse_scenario(
    text: str, name: str = "scenario", overrides: Sequence[str] = ()
) -> Scenario:
    """Parse and validate scenario TOML, applying dotted-path overrides.

    Overrides (e.g. ``link.margin_db=1.0``) land on the raw document
    before validation, so they obey exactly the same rules as file
    content.
    """
    try:
        raw = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ScenarioError(f"scenario syntax error: {exc}") from exc
    for assignment in overrides:
        _apply_override(raw, assignment)

    defaults: list[str] = []
    top = _Section(raw, "", defaults)
    top.reject_unknown(["name", "constellation", "mission", "simulation", "link", "outputs"])
    if "constellation" not in raw or not isinstance(raw["constellation"], dict):
        raise ScenarioError("missing required [constellation] section")
    if "mission" not in raw or not isinstance(raw["mission"], dict):
        raise ScenarioError("missing required [mission] section")

    outputs_raw = top.get("outputs", list(DEFAULT_OUTPUTS))
    if not isinstance(outputs_raw, list) or not all(isinstance(o, str) for o in outputs_raw):
        raise ScenarioError("outputs must be an array of strings")
    for o in outputs_raw:
        if o not in ALLOWED_OUTPUTS:
            hint = difflib.get_close_matches(o, ALLOWED_OUTPUTS, n=1, cutoff=0.5)
            suggestion = f"; did you mean {hint[0]!r}?" if hint else ""
            raise ScenarioError(f"unknown output {o!r}{suggestion}")

    link = _parse_link(raw["link"], defaults) if isinstance(raw.get("link"), dict) else None
    if raw.get("link") is not None and not isinstance(raw["link"], dict):
        raise ScenarioError("link must be a table")

    scenario = Scenario(
        name=top.string("name", name),
        constellation=_parse_constellation(raw["constellation"], defaults),
        mission=_parse_mission(raw["mission"], defaults),
        simulation=_parse_simulation(raw["simulation"], defaults)
        if isinstance(raw.get("simulation"), dict)
        else _parse_simulation({}, defaults),
        link=link,
        outputs=tuple(outputs_raw),
        defaults_used=tuple(defaults),
        overrides_applied=tuple(overrides),
    )
    _check_presets_exist(scenario)
    return scenario


def _check_presets_exist(scenario: Scenario) -> None:
    # deferred import: the catalog pulls in orbit/link types, not this module
    from .catalog import constellation_presets, provider_link_presets, terminal_presets

    if isinstance(scenario.constellation, str):
        if scenario.constellation not in constellation_presets():
            known = ", ".join(sorted(constellation_presets()))
            raise ScenarioError(
                f"unknown constellation preset {scenario.constellation!r} (known: {known})"
            )
    link = scenario.link
    if link is None:
        return
    if link.terminal is not None and link.terminal not in terminal_presets():
        known = ", ".join(sorted(terminal_presets()))
        raise ScenarioError(f"unknown terminal preset {link.terminal!r} (known: {known})")
    if link.provider is not None and link.provider not in provider_link_presets():
        known = ", ".join(sorted(provider_link_presets()))
        raise ScenarioError(f"unknown provider link preset {link.provider!r} (known: {known})")


# --- serialization ---------------------------------------------------------


def _toml_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return repr(value)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {value!r}")


def _emit_table(lines: list[str], header: str, entries: dict[str, Any]) -> None:
    lines.append(f"[{header}]")
    for key, value in entries.items():
        if value is not None:
            lines.append(f"{key} = {_toml_value(value)}")
    lines.append("")


def serialize_scenario(scenario: Scenario) -> str:
    """Deterministic TOML text; parse_scenario(serialize_scenario(s)) == s."""
    lines: list[str] = [f"name = {_toml_value(scenario.name)}"]
    lines.append(f"outputs = {_toml_value(list(scenario.outputs))}")
    lines.append("")
    if isinstance(scenario.constellation, str):
        _emit_table(lines, "constellation", {"preset": scenario.constellation})
    else:
        c = scenario.constellation
        _emit_table(
            lines,
            "constellation",
            {
                "name": c.name,
                "min_elevation_deg": c.min_elevation_deg,
                "baseline_latency_ms": c.baseline_latency_ms,
                "truncate_to": c.truncate_to,
            },
        )
        for shell in c.shells:
            lines.append("[[constellation.shells]]")
            for f in fields(shell):
                lines.append(f"{f.name} = {_toml_value(getattr(shell, f.name))}")
            lines.append("")
    m = scenario.mission
    _emit_table(
        lines,
        "mission",
        {
            "altitude_km": m.altitude_km,
            "inclination": m.inclination,
            "raan_deg": m.raan_deg,
            "mean_anomaly_deg": m.mean_anomaly_deg,
        },
    )
    s = scenario.simulation
    _emit_table(
        lines,
        "simulation",
        {f.name: getattr(s, f.name) for f in fields(s)},
    )
    if scenario.link is not None:
        lk = scenario.link
        _emit_table(
            lines,
            "link",
            {
                "terminal": lk.terminal,
                "eirp_dbw": lk.eirp_dbw,
                "g_over_t_db_k": lk.g_over_t_db_k,
                "provider": lk.provider,
                "step_s": lk.step_s,
                "visibility_mode": lk.visibility_mode,
                "margin_db": lk.margin_db,
                "rolloff": lk.rolloff,
                "implementation_loss_db": lk.implementation_loss_db,
                "modcod_table": lk.modcod_table,
            },
        )
        if lk.downlink is not None:
            _emit_table(
                lines,
                "link.downlink",
                {f.name: getattr(lk.downlink, f.name) for f in fields(lk.downlink)},
            )
        if lk.uplink is not None:
            _emit_table(
                lines,
                "link.uplink",
                {f.name: getattr(lk.uplink, f.name) for f in fields(lk.uplink)},
            )
    return "\n".join(lines).rstrip() + "\n"
