"""Slant-range link budgets, adaptive MODCOD selection, data rates, latency.

Both transmission directions are described by a LinkEndpointParams: the
transmit side contributes EIRP, the receive side G/T, and the carrier
frequency/bandwidth set the path loss and symbol rate.  Es/N0 follows
the standard budget

    Es/N0 = EIRP + G/T - FSPL(d, f) - 10*log10(k) - 10*log10(Rs)

with the symbol rate Rs = bandwidth / (1 + rolloff).
"""
from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .constants import BOLTZMANN_TERM_DB, EARTH_RADIUS_KM, SPEED_OF_LIGHT_KM_S
from .orbits import Constellation, EciState, OrbitElements, propagate
from . import visibility as vis


@dataclass(frozen=True)
class LinkEndpointParams:
    """RF parameters of one transmit -> receive direction."""

    eirp_dbw: float
    g_over_t_db_k: float
    frequency_hz: float
    bandwidth_hz: float
    rolloff: float = 0.0

    def __post_init__(self) -> None:
        if self.frequency_hz <= 0 or self.bandwidth_hz <= 0:
            raise ValueError("frequency and bandwidth must be positive")
        if self.rolloff < 0:
            raise ValueError("rolloff must be >= 0")

    @property
    def symbol_rate_hz(self) -> float:
        return self.bandwidth_hz / (1.0 + self.rolloff)


@dataclass(frozen=True)
class ModCodEntry:
    """One modulation-and-coding point: efficiency and its ideal Es/N0 threshold."""

    name: str
    spectral_efficiency: float
    esn0_threshold_db: float

    def __post_init__(self) -> None:
        if self.spectral_efficiency <= 0:
            raise ValueError(f"spectral efficiency of {self.name} must be positive")


@dataclass(frozen=True)
class TerminalPreset:
    """A COTS terminal: transmit EIRP, receive G/T, and physical traits."""

    name: str
    eirp_dbw: float
    g_over_t_db_k: float | None
    band: str
    mass_kg: float
    steering: str

    def __post_init__(self) -> None:
        if self.eirp_dbw <= 0 or self.mass_kg <= 0:
            raise ValueError("terminal EIRP and mass must be positive")


@dataclass(frozen=True)
class LinkSample:
    """One instant of the link time series; NaN fields mean no serving satellite."""

    t_s: float
    serving_sat: int | None
    slant_range_km: float
    esn0_dl_db: float
    esn0_ul_db: float
    rate_dl_bps: float
    rate_ul_bps: float


def validate_modcod_table(table: Sequence[ModCodEntry]) -> None:
    """Reject tables that are not a strictly increasing efficiency/threshold frontier."""
    if not table:
        raise ValueError("MODCOD table is empty")
    for prev, cur in zip(table, table[1:]):
        if cur.esn0_threshold_db <= prev.esn0_threshold_db:
            raise ValueError(
                f"MODCOD thresholds not strictly increasing at {cur.name}"
            )
        if cur.spectral_efficiency <= prev.spectral_efficiency:
            raise ValueError(
                f"MODCOD efficiency not strictly increasing at {cur.name}"
            )


def fspl(distance_km: float, frequency_hz: float) -> float:
    """Free-space path loss 20*log10(4*pi*d*f/c) [dB]."""
    if distance_km <= 0 or frequency_hz <= 0:
        raise ValueError("distance and frequency must be positive")
    d_m = distance_km * 1e3
    c_m = SPEED_OF_LIGHT_KM_S * 1e3
    return 20.0 * math.log10(4.0 * math.pi * d_m * frequency_hz / c_m)


def es_n0(link: LinkEndpointParams, distance_km: float) -> float:
    """Es/N0 [dB] of one direction at the given slant range."""
    return (
        link.eirp_dbw
        + link.g_over_t_db_k
        - fspl(distance_km, link.frequency_hz)
        + BOLTZMANN_TERM_DB
        - 10.0 * math.log10(link.symbol_rate_hz)
    )


def max_los_range(h_sip_km: float, h_mission_km: float) -> float:
    """Longest line-of-sight slant range [km]: both satellites at the Earth limb."""
    if not h_sip_km > h_mission_km > 0:
        raise ValueError("need provider altitude > mission altitude > 0")
    r_sip = EARTH_RADIUS_KM + h_sip_km
    r_mis = EARTH_RADIUS_KM + h_mission_km
    return math.sqrt(r_sip**2 - EARTH_RADIUS_KM**2) + math.sqrt(r_mis**2 - EARTH_RADIUS_KM**2)


def select_modcod(
    esn0_db: float, table: Sequence[ModCodEntry], margin_db: float = 0.0
) -> ModCodEntry | None:
    """Highest-efficiency entry whose threshold fits under esn0 - margin.

    An Es/N0 exactly at a threshold qualifies that entry (closed
    boundary).  Returns None when even the most robust entry does not
    fit, i.e. the link carries no data.
    """
    validate_modcod_table(table)
    budget = esn0_db - margin_db
    idx = bisect_right([e.esn0_threshold_db for e in table], budget)
    if idx == 0:
        return None
    return table[idx - 1]


def data_rate(mc: ModCodEntry, bandwidth_hz: float, rolloff: float = 0.0) -> float:
    """Information rate [bit/s] of an entry on the given carrier."""
    return mc.spectral_efficiency * bandwidth_hz / (1.0 + rolloff)


def serving_satellite(
    provider_states: Mapping[int, EciState],
    mission: EciState,
    cfg: vis.VisibilityConfig,
    alpha_rad: float,
) -> int | None:
    """Nearest visible provider satellite at one instant; ties go to the lowest id."""
    best_id: int | None = None
    best_range = math.inf
    for sat_id in sorted(provider_states):
        state = provider_states[sat_id]
        if not vis.is_visible(state, mission, cfg, alpha_rad):
            continue
        rng = float(np.linalg.norm(state.position_km - mission.position_km))
        if rng < best_range:
            best_id, best_range = sat_id, rng
    return best_id


def mission_latency(baseline_ms: float, h_mission_km: float) -> float:
    """User latency [ms] for a mission at altitude h instead of on the ground.

    Both user-side legs of the round trip shrink by the mission altitude,
    so the saving is 4*h/c relative to the operator's ground-user figure.
    """
    if baseline_ms <= 0 or h_mission_km <= 0:
        raise ValueError("baseline latency and mission altitude must be positive")
    saving = 4.0 * h_mission_km / SPEED_OF_LIGHT_KM_S * 1e3
    result = baseline_ms - saving
    if result <= 0:
        raise ValueError(
            f"latency model out of range: saving {saving:.2f} ms exceeds baseline {baseline_ms} ms"
        )
    return result


def latency_saving(h_mission_km: float) -> float:
    """Round-trip latency saving [ms] of a mission at altitude h vs a ground user."""
    return 4.0 * h_mission_km / SPEED_OF_LIGHT_KM_S * 1e3


def score_mission(scores: Sequence[int]) -> int:
    """Sum of the three 1..3 benefit scores (data rate, availability, latency)."""
    if len(scores) != 3:
        raise ValueError("exactly three scores expected")
    for s in scores:
        if s not in (1, 2, 3):
            raise ValueError(f"score {s} outside 1..3")
    return int(sum(scores))


def link_time_series(
    constellation: Constellation,
    mission: OrbitElements,
    horizon: tuple[float, float],
    step_s: float,
    downlink: LinkEndpointParams,
    uplink: LinkEndpointParams,
    modcod_table: Sequence[ModCodEntry],
    margin_db: float = 0.0,
    implementation_loss_db: float = 0.0,
    mode: str = "los-only",
    min_elevation_deg: float | None = None,
    j2: bool = True,
) -> list[LinkSample]:
    """Sampled link performance to the serving satellite over the horizon.

    At each step the serving satellite is the nearest visible one under
    the chosen visibility mode (los-only by default: the full geometric
    range swing drives the Es/N0 profile).  Samples without any visible
    satellite carry NaN Es/N0 and zero rates.
    """
    validate_modcod_table(modcod_table)
    if step_s <= 0:
        raise ValueError("step_s must be positive")
    cfg = vis.VisibilityConfig(
        mode=mode,
        min_elevation_deg=constellation.min_elevation_deg
        if min_elevation_deg is None
        else min_elevation_deg,
        coarse_step_s=step_s,
        refine_tolerance_s=min(0.01, step_s / 2),
        j2=j2,
    )
    times = vis._time_grid(horizon[0], horizon[1], step_s)
    n = len(times)
    els = constellation.orbit_elements()
    all_circular = mission.eccentricity == 0.0 and all(e.eccentricity == 0.0 for e in els)
    best_range = np.full(n, np.inf)
    best_id = np.full(n, -1, dtype=int)
    if all_circular:
        mis_track = vis._circular_track(mission, j2)
        mis_units = vis._track_units(mis_track, times)
        for sat_id, el in enumerate(els):
            alpha = vis.cone_half_angle(el.a_km - EARTH_RADIUS_KM, cfg.min_elevation_deg)
            cos_thr = vis._cos_threshold(cfg.mode, el.a_km, mission.a_km, alpha)
            if cos_thr is None:
                continue
            units = vis._track_units(vis._circular_track(el, j2), times)
            cos_theta = np.einsum("ij,ij->i", units, mis_units)
            rng = np.sqrt(
                el.a_km**2 + mission.a_km**2 - 2.0 * el.a_km * mission.a_km * cos_theta
            )
            better = (cos_theta >= cos_thr) & (rng < best_range)
            best_range[better] = rng[better]
            best_id[better] = sat_id
    else:
        alphas = [
            vis.cone_half_angle(el.a_km - EARTH_RADIUS_KM, cfg.min_elevation_deg) for el in els
        ]
        for k, t in enumerate(times):
            mis_state = propagate(mission, float(t), j2)
            for sat_id, el in enumerate(els):
                state = propagate(el, float(t), j2)
                if not vis.is_visible(state, mis_state, cfg, alphas[sat_id]):
                    continue
                rng = float(np.linalg.norm(state.position_km - mis_state.position_km))
                if rng < best_range[k]:
                    best_id[k] = sat_id
                    best_range[k] = rng

    thresholds = [e.esn0_threshold_db for e in modcod_table]
    samples: list[LinkSample] = []
    for k in range(n):
        if best_id[k] < 0:
            samples.append(
                LinkSample(
                    t_s=float(times[k]),
                    serving_sat=None,
                    slant_range_km=math.nan,
                    esn0_dl_db=math.nan,
                    esn0_ul_db=math.nan,
                    rate_dl_bps=0.0,
                    rate_ul_bps=0.0,
                )
            )
            continue
        rng = float(best_range[k])
        esn0_dl = es_n0(downlink, rng) - implementation_loss_db
        esn0_ul = es_n0(uplink, rng) - implementation_loss_db
        rate_dl = rate_ul = 0.0
        idx = bisect_right(thresholds, esn0_dl - margin_db)
        if idx > 0:
            rate_dl = data_rate(modcod_table[idx - 1], downlink.bandwidth_hz, downlink.rolloff)
        idx = bisect_right(thresholds, esn0_ul - margin_db)
        if idx > 0:
            rate_ul = data_rate(modcod_table[idx - 1], uplink.bandwidth_hz, uplink.rolloff)
        samples.append(
            LinkSample(
                t_s=float(times[k]),
                serving_sat=int(best_id[k]),
                slant_range_km=rng,
                esn0_dl_db=esn0_dl,
                esn0_ul_db=esn0_ul,
                rate_dl_bps=rate_dl,
                rate_ul_bps=rate_ul,
            )
        )
    return samples
