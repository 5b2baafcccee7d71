"""Keplerian orbit types, Walker shell generation, and two-body + J2 propagation.

Time is a plain float: seconds on a continuous scale, offset from an
arbitrary scenario epoch at t = 0.  Catalog orbits are circular; the
propagator still handles 0 <= e < 1 for completeness.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import EARTH_RADIUS_KM, J2, MU_KM3_S2, SUN_SYNC_NODE_RATE_RAD_S

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class OrbitElements:
    """Keplerian state of one satellite at a reference epoch."""

    a_km: float
    eccentricity: float
    inclination_rad: float
    raan_rad: float
    arg_perigee_rad: float
    mean_anomaly_rad: float
    epoch_s: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a_km) and self.a_km > EARTH_RADIUS_KM):
            raise ValueError(f"semi-major axis {self.a_km} km must exceed {EARTH_RADIUS_KM} km")
        if not (0.0 <= self.eccentricity < 1.0):
            raise ValueError(f"eccentricity {self.eccentricity} outside [0, 1)")


@dataclass(frozen=True)
class Shell:
    """One Walker-style shell: evenly spaced planes of evenly spaced satellites."""

    altitude_km: float
    inclination_deg: float
    planes: int
    sats_per_plane: int
    phasing_factor: int = 0
    raan_span_deg: float = 360.0

    def __post_init__(self) -> None:
        if self.planes < 1 or self.sats_per_plane < 1:
            raise ValueError("planes and sats_per_plane must be >= 1")
        if not (0 <= self.phasing_factor < self.planes):
            raise ValueError(f"phasing_factor {self.phasing_factor} outside [0, {self.planes})")

    @property
    def count(self) -> int:
        return self.planes * self.sats_per_plane


@dataclass(frozen=True)
class Constellation:
    """A named set of shells plus the service constraints of the operator.

    ``truncate_to`` caps the satellite count: shells are materialized in
    declared order, planes in order, satellites in order within each
    plane, and the list is cut at that many entries.  Used for partially
    deployed systems.
    """

    name: str
    shells: tuple[Shell, ...]
    min_elevation_deg: float
    baseline_latency_ms: float | None = None
    truncate_to: int | None = None

    def __post_init__(self) -> None:
        if not (0.0 <= self.min_elevation_deg < 90.0):
            raise ValueError(f"min_elevation_deg {self.min_elevation_deg} outside [0, 90)")
        if self.truncate_to is not None and self.truncate_to > self.shell_count:
            raise ValueError("truncate_to exceeds the shell capacity")

    @property
    def shell_count(self) -> int:
        return sum(s.count for s in self.shells)

    @property
    def satellite_count(self) -> int:
        return self.truncate_to if self.truncate_to is not None else self.shell_count

    def orbit_elements(self, epoch_s: float = 0.0) -> list[OrbitElements]:
        """Elements for every satellite, in the deterministic build order."""
        els: list[OrbitElements] = []
        for shell in self.shells:
            els.extend(build_shell(shell, epoch_s))
        return els[: self.truncate_to] if self.truncate_to is not None else els


@dataclass(frozen=True)
class EciState:
    """Earth-centered inertial position/velocity at time t."""

    position_km: np.ndarray
    velocity_km_s: np.ndarray
    t_s: float


def mean_motion(a_km: float) -> float:
    """Two-body mean motion sqrt(mu/a^3) [rad/s].

    Accepts any finite a >= Earth radius (the boundary itself is a valid
    limiting case).
    """
    if not math.isfinite(a_km) or a_km < EARTH_RADIUS_KM:
        raise ValueError(f"semi-major axis {a_km} km out of range (>= {EARTH_RADIUS_KM})")
    return math.sqrt(MU_KM3_S2 / a_km**3)


def j2_secular_rates(a_km: float, inclination_rad: float) -> tuple[float, float]:
    """Secular (raan_dot, argp_dot) [rad/s] from J2 for a circular orbit."""
    n = mean_motion(a_km)
    k = J2 * n * (EARTH_RADIUS_KM / a_km) ** 2
    raan_dot = -1.5 * k * math.cos(inclination_rad)
    argp_dot = 0.75 * k * (5.0 * math.cos(inclination_rad) ** 2 - 1.0)
    return raan_dot, argp_dot


def sso_inclination(altitude_km: float) -> float:
    """Inclination [deg] giving a sun-synchronous node rate at this altitude.

    Solves -1.5*J2*n*(Re/a)^2 * cos(i) = node rate for a circular orbit.
    Raises ValueError when no inclination can achieve the required rate.
    """
    if not (0.0 < altitude_km < 6000.0):
        raise ValueError(f"altitude {altitude_km} km outside (0, 6000) for the circular-orbit model")
    a = EARTH_RADIUS_KM + altitude_km
    n = mean_motion(a)
    cos_i = -SUN_SYNC_NODE_RATE_RAD_S / (1.5 * J2 * n * (EARTH_RADIUS_KM / a) ** 2)
    if abs(cos_i) > 1.0:
        raise ValueError(f"no sun-synchronous inclination exists at {altitude_km} km")
    return math.degrees(math.acos(cos_i))


def build_shell(shell: Shell, epoch_s: float = 0.0) -> list[OrbitElements]:
    """Circular orbit elements for every satellite of a shell.

    Plane p gets raan = p * raan_span/planes; satellite s of plane p gets
    mean anomaly 2*pi*s/sats_per_plane + 2*pi*F*p/(planes*sats_per_plane).
    Output is plane-major: all satellites of plane 0, then plane 1, ...
    """
    a = EARTH_RADIUS_KM + shell.altitude_km
    inc = math.radians(shell.inclination_deg)
    raan_step = math.radians(shell.raan_span_deg) / shell.planes
    phase_step = TWO_PI * shell.phasing_factor / (shell.planes * shell.sats_per_plane)
    els = []
    for p in range(shell.planes):
        raan = (p * raan_step) % TWO_PI
        for s in range(shell.sats_per_plane):
            m0 = (TWO_PI * s / shell.sats_per_plane + p * phase_step) % TWO_PI
            els.append(
                OrbitElements(
                    a_km=a,
                    eccentricity=0.0,
                    inclination_rad=inc,
                    raan_rad=raan,
                    arg_perigee_rad=0.0,
                    mean_anomaly_rad=m0,
                    epoch_s=epoch_s,
                )
            )
    return els


def solve_kepler(mean_anomaly: float, eccentricity: float, tol: float = 1e-12) -> float:
    """Eccentric anomaly from Kepler's equation by Newton iteration."""
    if eccentricity == 0.0:
        return mean_anomaly
    m = math.remainder(mean_anomaly, TWO_PI)
    e_anom = m if eccentricity < 0.8 else math.pi
    for _ in range(64):
        delta = (e_anom - eccentricity * math.sin(e_anom) - m) / (
            1.0 - eccentricity * math.cos(e_anom)
        )
        e_anom -= delta
        if abs(delta) < tol:
            break
    return e_anom


def propagate(el: OrbitElements, t_s: float, j2: bool = True) -> EciState:
    """Two-body state at time t, optionally with J2 secular angle drift.

    With j2 enabled the node and argument of perigee advance linearly at
    their secular rates before the position is evaluated; the in-plane
    motion stays two-body.
    """
    if not math.isfinite(t_s):
        raise ValueError("time must be finite")
    if el.eccentricity >= 1.0:
        raise ValueError("only elliptic orbits (e < 1) are supported")
    dt = t_s - el.epoch_s
    n = mean_motion(el.a_km)
    raan = el.raan_rad
    argp = el.arg_perigee_rad
    if j2:
        raan_dot, argp_dot = j2_secular_rates(el.a_km, el.inclination_rad)
        raan += raan_dot * dt
        argp += argp_dot * dt
    m_anom = el.mean_anomaly_rad + n * dt
    ecc = el.eccentricity
    e_anom = solve_kepler(m_anom, ecc)
    cos_e, sin_e = math.cos(e_anom), math.sin(e_anom)
    r = el.a_km * (1.0 - ecc * cos_e)
    # Perifocal coordinates; for e = 0 these reduce to a*(cos M, sin M).
    sqrt_1me2 = math.sqrt(1.0 - ecc * ecc)
    x_pf = el.a_km * (cos_e - ecc)
    y_pf = el.a_km * sqrt_1me2 * sin_e
    speed_factor = math.sqrt(MU_KM3_S2 * el.a_km) / r
    vx_pf = -speed_factor * sin_e
    vy_pf = speed_factor * sqrt_1me2 * cos_e

    cr, sr = math.cos(raan), math.sin(raan)
    ci, si = math.cos(el.inclination_rad), math.sin(el.inclination_rad)
    cw, sw = math.cos(argp), math.sin(argp)
    # Rz(raan) * Rx(i) * Rz(argp)
    r11 = cr * cw - sr * ci * sw
    r12 = -cr * sw - sr * ci * cw
    r21 = sr * cw + cr * ci * sw
    r22 = -sr * sw + cr * ci * cw
    r31 = si * sw
    r32 = si * cw
    position = np.array(
        [r11 * x_pf + r12 * y_pf, r21 * x_pf + r22 * y_pf, r31 * x_pf + r32 * y_pf]
    )
    velocity = np.array(
        [r11 * vx_pf + r12 * vy_pf, r21 * vx_pf + r22 * vy_pf, r31 * vx_pf + r32 * vy_pf]
    )
    return EciState(position_km=position, velocity_km_s=velocity, t_s=t_s)
