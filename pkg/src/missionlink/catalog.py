"""Bundled catalog data: constellation presets, terminals, MODCOD tables.

Everything here is plain data shipped with the package; the JSON/CSV
files can be edited or swapped without code changes.
"""
from __future__ import annotations

import csv
import json
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .errors import CatalogError
from .link import LinkEndpointParams, ModCodEntry, TerminalPreset, validate_modcod_table
from .orbits import Constellation, Shell


def _data_text(filename: str) -> str:
    return resources.files("missionlink.data").joinpath(filename).read_text(encoding="utf-8")


def _shell_from_record(rec: dict) -> Shell:
    return Shell(
        altitude_km=float(rec["altitude_km"]),
        inclination_deg=float(rec["inclination_deg"]),
        planes=int(rec["planes"]),
        sats_per_plane=int(rec["sats_per_plane"]),
        phasing_factor=int(rec.get("phasing_factor", 0)),
        raan_span_deg=float(rec.get("raan_span_deg", 360.0)),
    )


@lru_cache(maxsize=1)
def constellation_presets() -> dict[str, Constellation]:
    """All bundled constellation presets, keyed by name."""
    raw = json.loads(_data_text("constellations.json"))
    presets: dict[str, Constellation] = {}
    for name, rec in raw.items():
        if name.startswith("_"):
            continue
        lat = rec.get("baseline_latency_ms")
        presets[name] = Constellation(
            name=name,
            shells=tuple(_shell_from_record(s) for s in rec["shells"]),
            min_elevation_deg=float(rec["min_elevation_deg"]),
            baseline_latency_ms=None if lat is None else float(lat),
            truncate_to=rec.get("truncate_to"),
        )
    return presets


def build_constellation(preset: str | Constellation) -> Constellation:
    """Resolve a preset name to its Constellation, or pass one through."""
    if isinstance(preset, Constellation):
        return preset
    presets = constellation_presets()
    if preset not in presets:
        known = ", ".join(sorted(presets))
        raise CatalogError(f"unknown constellation preset {preset!r} (known: {known})")
    return presets[preset]


@lru_cache(maxsize=1)
def terminal_presets() -> dict[str, TerminalPreset]:
    """Bundled COTS terminal presets, keyed by product name."""
    raw = json.loads(_data_text("terminals.json"))
    presets: dict[str, TerminalPreset] = {}
    for name, rec in raw.items():
        if name.startswith("_"):
            continue
        gt = rec.get("g_over_t_db_k")
        presets[name] = TerminalPreset(
            name=name,
            eirp_dbw=float(rec["eirp_dbw"]),
            g_over_t_db_k=None if gt is None else float(gt),
            band=rec["band"],
            mass_kg=float(rec["mass_kg"]),
            steering=rec["steering"],
        )
    return presets


def get_terminal(name: str) -> TerminalPreset:
    presets = terminal_presets()
    if name not in presets:
        known = ", ".join(sorted(presets))
        raise CatalogError(f"unknown terminal preset {name!r} (known: {known})")
    return presets[name]


@lru_cache(maxsize=1)
def provider_link_presets() -> dict[str, dict[str, LinkEndpointParams]]:
    """Partial endpoint parameters of bundled provider service links.

    The returned LinkEndpointParams carry the provider-side numbers; the
    terminal contributes the missing transmit EIRP (uplink) and receive
    G/T (downlink) when a scenario is resolved.
    """
    raw = json.loads(_data_text("provider_links.json"))
    presets: dict[str, dict[str, LinkEndpointParams]] = {}
    for name, rec in raw.items():
        if name.startswith("_"):
            continue
        dl, ul = rec["downlink"], rec["uplink"]
        presets[name] = {
            "downlink": LinkEndpointParams(
                eirp_dbw=float(dl["eirp_dbw"]),
                g_over_t_db_k=0.0,
                frequency_hz=float(dl["frequency_hz"]),
                bandwidth_hz=float(dl["bandwidth_hz"]),
            ),
            "uplink": LinkEndpointParams(
                eirp_dbw=0.0,
                g_over_t_db_k=float(ul["g_over_t_db_k"]),
                frequency_hz=float(ul["frequency_hz"]),
                bandwidth_hz=float(ul["bandwidth_hz"]),
            ),
        }
    return presets


def load_modcod_table(path: str | Path | None = None) -> tuple[ModCodEntry, ...]:
    """MODCOD table from a CSV file, default the bundled DVB-S2X set.

    CSV columns: name, spectral_efficiency, esn0_threshold_db; lines
    starting with '#' are comments.  The table must be sorted by
    threshold with strictly increasing spectral efficiency.
    """
    if path is None:
        text = _data_text("modcods_dvbs2x.csv")
    else:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise CatalogError(f"cannot read MODCOD table {path}: {exc}") from exc
    rows = [line for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]
    entries = []
    for rec in csv.DictReader(rows):
        try:
            entries.append(
                ModCodEntry(
                    name=rec["name"].strip(),
                    spectral_efficiency=float(rec["spectral_efficiency"]),
                    esn0_threshold_db=float(rec["esn0_threshold_db"]),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CatalogError(f"malformed MODCOD record {rec!r}: {exc}") from exc
    table = tuple(entries)
    validate_modcod_table(table)
    return table
