"""Service-cone visibility, access-interval extraction, and coverage statistics.

A provider satellite serves the mission when the mission sits inside the
provider's nadir cone (half-angle set by the operator's minimum ground
elevation), below the provider, with a clear line of sight.  A pure
line-of-sight mode is also available for link-budget work.

Interval extraction scans a coarse time grid and refines every boundary
by bisection.  Accesses strictly shorter than the coarse step can be
missed entirely; pick the step accordingly (the presets here use 10 s,
or 1 s for low-gap constellations).
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .constants import EARTH_RADIUS_KM
from .orbits import Constellation, EciState, OrbitElements, j2_secular_rates, mean_motion, propagate

Interval = tuple[float, float]


@dataclass(frozen=True)
class VisibilityConfig:
    """Knobs of the visibility predicate and of the interval scan."""

    mode: str = "cone"  # "cone" or "los-only"
    min_elevation_deg: float = 0.0
    coarse_step_s: float = 10.0
    refine_tolerance_s: float = 0.01
    j2: bool = True

    def __post_init__(self) -> None:
        if self.mode not in ("cone", "los-only"):
            raise ValueError(f"visibility mode {self.mode!r} not one of 'cone', 'los-only'")
        if self.coarse_step_s <= 0:
            raise ValueError("coarse_step_s must be positive")
        if not (0 < self.refine_tolerance_s < self.coarse_step_s):
            raise ValueError("refine_tolerance_s must lie in (0, coarse_step_s)")


@dataclass(frozen=True)
class AccessInterval:
    """One contiguous visibility window to a single provider satellite."""

    sat_id: int
    start_s: float
    end_s: float

    def __post_init__(self) -> None:
        if self.end_s <= self.start_s:
            raise ValueError(f"interval end {self.end_s} must exceed start {self.start_s}")

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s


@dataclass(frozen=True)
class CoverageReport:
    """Constellation-level coverage numbers over one horizon."""

    horizon_s: float
    total_access_s: float
    total_pct: float
    min_uninterrupted_s: float | None
    max_uninterrupted_s: float | None
    union: tuple[Interval, ...]
    outages: tuple[Interval, ...]
    per_sat_durations: dict[int, list[float]] = field(repr=False, default_factory=dict)


def cone_half_angle(h_sip_km: float, min_elevation_deg: float) -> float:
    """Half-angle [rad] of the nadir service cone of a satellite at h_sip.

    The cone reaches the ground exactly at the minimum service elevation;
    at 90 deg elevation it collapses onto the nadir ray.
    """
    if h_sip_km <= 0:
        raise ValueError("provider altitude must be positive")
    if not (0.0 <= min_elevation_deg <= 90.0):
        raise ValueError("min elevation must lie in [0, 90]")
    ratio = EARTH_RADIUS_KM / (EARTH_RADIUS_KM + h_sip_km)
    return math.asin(ratio * math.cos(math.radians(min_elevation_deg)))


def los_clear(p1: np.ndarray, p2: np.ndarray) -> bool:
    """True when the segment p1 -> p2 does not intersect the Earth sphere."""
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    d = p2 - p1
    dd = float(d @ d)
    if dd == 0.0:
        return float(np.linalg.norm(p1)) > EARTH_RADIUS_KM
    t = -float(p1 @ d) / dd
    if t <= 0.0 or t >= 1.0:
        return True  # closest approach of the line lies outside the segment
    closest = p1 + t * d
    return float(np.linalg.norm(closest)) > EARTH_RADIUS_KM


def is_visible(
    sip: EciState, mission: EciState, cfg: VisibilityConfig, alpha_rad: float
) -> bool:
    """Visibility predicate between one provider satellite and the mission.

    Cone mode requires the mission below the provider, inside the nadir
    cone of half-angle alpha, with clear line of sight; los-only mode
    drops the cone condition.
    """
    if sip.t_s != mission.t_s:
        raise ValueError(f"mismatched epochs: {sip.t_s} vs {mission.t_s}")
    r_sip = float(np.linalg.norm(sip.position_km))
    r_mis = float(np.linalg.norm(mission.position_km))
    if r_mis >= r_sip:
        return False
    if cfg.mode == "cone":
        sep = mission.position_km - sip.position_km
        sep_norm = float(np.linalg.norm(sep))
        cos_beta = -float(sip.position_km @ sep) / (r_sip * sep_norm)
        if cos_beta < math.cos(alpha_rad):
            return False
    return los_clear(sip.position_km, mission.position_km)


# --------------------------------------------------------------------------
# Fast path for pairs of circular orbits.
#
# For circular orbits both radii are constant, so the full predicate
# reduces to a threshold on the geocentric separation angle theta:
#   cone:     theta <= theta1, the angle at which the cone edge meets the
#             mission sphere on the near side (line of sight is then
#             automatically clear);
#   los-only: theta <= acos(Re/r_sip) + acos(Re/r_mission).
# This equivalence is exercised against is_visible in the test suite.
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class _CircularTrack:
    """Linear-angle model of a circular orbit, optionally with J2 drift."""

    radius_km: float
    inclination_rad: float
    raan0_rad: float
    raan_rate: float
    u0_rad: float  # argument of latitude at epoch
    u_rate: float
    epoch_s: float


def _circular_track(el: OrbitElements, j2: bool) -> _CircularTrack:
    n = mean_motion(el.a_km)
    raan_rate = 0.0
    argp_rate = 0.0
    if j2:
        raan_rate, argp_rate = j2_secular_rates(el.a_km, el.inclination_rad)
    return _CircularTrack(
        radius_km=el.a_km,
        inclination_rad=el.inclination_rad,
        raan0_rad=el.raan_rad,
        raan_rate=raan_rate,
        u0_rad=el.arg_perigee_rad + el.mean_anomaly_rad,
        u_rate=n + argp_rate,
        epoch_s=el.epoch_s,
    )


def _track_units(track: _CircularTrack, times: np.ndarray) -> np.ndarray:
    """Unit position vectors of the track at each time, shape (N, 3)."""
    dt = times - track.epoch_s
    u = track.u0_rad + track.u_rate * dt
    raan = track.raan0_rad + track.raan_rate * dt
    cu, su = np.cos(u), np.sin(u)
    cr, sr = np.cos(raan), np.sin(raan)
    ci = math.cos(track.inclination_rad)
    si = math.sin(track.inclination_rad)
    out = np.empty(times.shape + (3,))
    out[..., 0] = cr * cu - sr * ci * su
    out[..., 1] = sr * cu + cr * ci * su
    out[..., 2] = si * su
    return out


def _cos_threshold(mode: str, r_sip: float, r_mission: float, alpha_rad: float) -> float | None:
    """cos(theta) visibility threshold for circular orbits; None if never visible."""
    if r_mission >= r_sip:
        return None
    if mode == "cone":
        p = r_sip * math.sin(alpha_rad)
        if p >= r_mission:
            # Cone edge misses the mission sphere; cannot happen while the
            # mission orbits above the Earth surface, guarded for safety.
            return None
        d_near = r_sip * math.cos(alpha_rad) - math.sqrt(r_mission**2 - p**2)
        cos_theta = (r_sip**2 + r_mission**2 - d_near**2) / (2.0 * r_sip * r_mission)
    else:
        theta = math.acos(EARTH_RADIUS_KM / r_sip) + math.acos(EARTH_RADIUS_KM / r_mission)
        cos_theta = math.cos(theta)
    return cos_theta


def _scalar_unit(track: _CircularTrack, t: float) -> tuple[float, float, float]:
    dt = t - track.epoch_s
    u = track.u0_rad + track.u_rate * dt
    raan = track.raan0_rad + track.raan_rate * dt
    cu, su = math.cos(u), math.sin(u)
    cr, sr = math.cos(raan), math.sin(raan)
    ci, si = math.cos(track.inclination_rad), math.sin(track.inclination_rad)
    return (cr * cu - sr * ci * su, sr * cu + cr * ci * su, si * su)


def _scalar_cos_theta(sip: _CircularTrack, mis: _CircularTrack, t: float) -> float:
    a = _scalar_unit(sip, t)
    b = _scalar_unit(mis, t)
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _time_grid(start_s: float, end_s: float, step_s: float) -> np.ndarray:
    n = int(math.floor((end_s - start_s) / step_s))
    grid = start_s + step_s * np.arange(n + 1)
    if grid[-1] < end_s - 1e-9:
        grid = np.append(grid, end_s)
    else:
        grid[-1] = end_s
    return grid


def _refine_boundary(
    predicate: Callable[[float], bool], lo: float, hi: float, tol: float
) -> float:
    """Bisect a predicate sign change in (lo, hi) down to tol; returns midpoint."""
    p_lo = predicate(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if predicate(mid) == p_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _extract_intervals(
    grid: np.ndarray,
    pred: np.ndarray,
    predicate: Callable[[float], bool],
    tol: float,
    sat_id: int,
) -> list[AccessInterval]:
    if not pred.any():
        return []
    intervals: list[AccessInterval] = []
    edges = np.nonzero(pred[:-1] != pred[1:])[0]
    boundaries = [_refine_boundary(predicate, float(grid[k]), float(grid[k + 1]), tol) for k in edges]
    start: float | None = float(grid[0]) if pred[0] else None
    for k, b in zip(edges, boundaries):
        if pred[k]:  # falling edge
            if start is not None and b > start:
                intervals.append(AccessInterval(sat_id=sat_id, start_s=start, end_s=b))
            start = None
        else:  # rising edge
            start = b
    if start is not None and float(grid[-1]) > start:
        intervals.append(AccessInterval(sat_id=sat_id, start_s=start, end_s=float(grid[-1])))
    return intervals


def access_intervals(
    provider: OrbitElements,
    mission: OrbitElements,
    horizon: Interval,
    cfg: VisibilityConfig,
    alpha_rad: float,
    sat_id: int = 0,
) -> list[AccessInterval]:
    """Visibility windows of one provider satellite over the horizon.

    Scans at cfg.coarse_step_s, bisects each predicate sign change down
    to cfg.refine_tolerance_s, and returns sorted, disjoint, maximal
    intervals clipped to the horizon.
    """
    start_s, end_s = horizon
    if end_s <= start_s:
        raise ValueError("horizon end must exceed start")
    grid = _time_grid(start_s, end_s, cfg.coarse_step_s)
    if provider.eccentricity == 0.0 and mission.eccentricity == 0.0:
        sip_track = _circular_track(provider, cfg.j2)
        mis_track = _circular_track(mission, cfg.j2)
        cos_thr = _cos_threshold(cfg.mode, provider.a_km, mission.a_km, alpha_rad)
        if cos_thr is None:
            return []
        mis_units = _track_units(mis_track, grid)
        return _intervals_circular(sip_track, mis_track, cos_thr, grid, cfg, sat_id, mis_units)
    # Generic (eccentric) fallback: scalar propagation at every grid point.
    def predicate(t: float) -> bool:
        return is_visible(propagate(provider, t, cfg.j2), propagate(mission, t, cfg.j2), cfg, alpha_rad)

    pred = np.fromiter((predicate(float(t)) for t in grid), dtype=bool, count=len(grid))
    return _extract_intervals(grid, pred, predicate, cfg.refine_tolerance_s, sat_id)


def _intervals_circular(
    sip_track: _CircularTrack,
    mis_track: _CircularTrack,
    cos_thr: float,
    grid: np.ndarray,
    cfg: VisibilityConfig,
    sat_id: int,
    mis_units: np.ndarray,
) -> list[AccessInterval]:
    sip_units = _track_units(sip_track, grid)
    cos_theta = np.einsum("ij,ij->i", sip_units, mis_units)
    pred = cos_theta >= cos_thr

    def predicate(t: float) -> bool:
        return _scalar_cos_theta(sip_track, mis_track, t) >= cos_thr

    return _extract_intervals(grid, pred, predicate, cfg.refine_tolerance_s, sat_id)


def _scan_range(
    constellation: Constellation,
    mission: OrbitElements,
    horizon: Interval,
    cfg: VisibilityConfig,
    sat_range: tuple[int, int] | None = None,
) -> dict[int, list[AccessInterval]]:
    """Access intervals for a contiguous id range of provider satellites."""
    els = constellation.orbit_elements()
    lo, hi = sat_range if sat_range is not None else (0, len(els))
    grid = _time_grid(horizon[0], horizon[1], cfg.coarse_step_s)
    mission_circular = mission.eccentricity == 0.0
    mis_units = None
    if mission_circular:
        mis_track = _circular_track(mission, cfg.j2)
        mis_units = _track_units(mis_track, grid)
    result: dict[int, list[AccessInterval]] = {}
    for sat_id in range(lo, hi):
        el = els[sat_id]
        alpha = cone_half_angle(el.a_km - EARTH_RADIUS_KM, cfg.min_elevation_deg)
        if mission_circular and el.eccentricity == 0.0:
            cos_thr = _cos_threshold(cfg.mode, el.a_km, mission.a_km, alpha)
            if cos_thr is None:
                result[sat_id] = []
                continue
            result[sat_id] = _intervals_circular(
                _circular_track(el, cfg.j2), mis_track, cos_thr, grid, cfg, sat_id, mis_units
            )
        else:
            result[sat_id] = access_intervals(el, mission, horizon, cfg, alpha, sat_id)
    return result


def scan_constellation(
    constellation: Constellation,
    mission: OrbitElements,
    horizon: Interval,
    cfg: VisibilityConfig,
    workers: int = 1,
) -> dict[int, list[AccessInterval]]:
    """Access intervals of every provider satellite against the mission.

    Satellites are independent; with workers > 1 the id space is split
    across processes and reassembled in id order, so the result does not
    depend on scheduling.
    """
    n = constellation.satellite_count
    if workers <= 1 or n < 4:
        return _scan_range(constellation, mission, horizon, cfg)
    bounds = np.linspace(0, n, workers + 1).astype(int)
    chunks = [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    result: dict[int, list[AccessInterval]] = {}
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_scan_range, constellation, mission, horizon, cfg, chunk)
            for chunk in chunks
        ]
        for fut in futures:
            result.update(fut.result())
    return {sat_id: result[sat_id] for sat_id in sorted(result)}


def union_and_outages(
    per_sat: Mapping[int, Sequence[AccessInterval]], horizon: Interval
) -> tuple[list[Interval], list[Interval]]:
    """Merge per-satellite windows into constellation access and its complement.

    Touching intervals merge: service handed from one satellite to the
    next without a gap counts as uninterrupted.  Union and outage lengths
    sum to the horizon length.
    """
    start_s, end_s = horizon
    spans = sorted(
        (max(iv.start_s, start_s), min(iv.end_s, end_s))
        for ivs in per_sat.values()
        for iv in ivs
        if iv.end_s > start_s and iv.start_s < end_s
    )
    union: list[Interval] = []
    for s, e in spans:
        if union and s <= union[-1][1]:
            if e > union[-1][1]:
                union[-1] = (union[-1][0], e)
        else:
            union.append((s, e))
    return union, complement(union, horizon)


def complement(union: Sequence[Interval], horizon: Interval) -> list[Interval]:
    """Outage intervals: the horizon minus a sorted disjoint union."""
    start_s, end_s = horizon
    out: list[Interval] = []
    cursor = start_s
    for s, e in union:
        if s > cursor:
            out.append((cursor, s))
        cursor = max(cursor, e)
    if cursor < end_s:
        out.append((cursor, end_s))
    return out


def coverage_stats(
    union: Sequence[Interval],
    per_sat: Mapping[int, Sequence[AccessInterval]],
    horizon: Interval,
) -> CoverageReport:
    """Coverage report over one horizon from the merged access union."""
    start_s, end_s = horizon
    horizon_len = end_s - start_s
    durations = [e - s for s, e in union]
    total = float(sum(durations))
    return CoverageReport(
        horizon_s=horizon_len,
        total_access_s=total,
        total_pct=100.0 * total / horizon_len,
        min_uninterrupted_s=min(durations) if durations else None,
        max_uninterrupted_s=max(durations) if durations else None,
        union=tuple(union),
        outages=tuple(complement(union, horizon)),
        per_sat_durations={
            sat_id: [iv.duration_s for iv in ivs] for sat_id, ivs in sorted(per_sat.items())
        },
    )


def per_satellite_ecdf(
    per_sat_durations: Mapping[int, Iterable[float]], threshold_s: float = 20.0
) -> tuple[list[tuple[float, float]], float]:
    """eCDF of each satellite's longest single access, and the useless fraction.

    Satellites that never see the mission over the horizon are excluded
    from the population, so fractions refer to satellites that do take
    part in coverage.  The useless fraction counts satellites whose best
    access is still shorter than the threshold (too short to set up a
    link).  Raises ValueError when no satellite had any access.
    """
    maxima = sorted(
        max(d) for d in (list(ds) for ds in per_sat_durations.values()) if d
    )
    if not maxima:
        raise ValueError("no satellite had any access over the horizon")
    n = len(maxima)
    points = [(float(d), (i + 1) / n) for i, d in enumerate(maxima)]
    useless = sum(1 for d in maxima if d < threshold_s) / n
    return points, useless
