"""missionlink: can a low-orbit space mission ride a broadband mega-constellation?

Deterministic desk-scale simulator: constellation construction and
propagation, service-cone visibility and access intervals, DVB-S2X link
budgets and data-rate profiles, and the user-latency model.
"""
from .constants import EARTH_RADIUS_KM, MU_KM3_S2, SPEED_OF_LIGHT_KM_S
from .errors import CatalogError, ComputeError, MissionLinkError, ScenarioError
from .orbits import (
    Constellation,
    EciState,
    OrbitElements,
    Shell,
    build_shell,
    mean_motion,
    propagate,
    sso_inclination,
)
from .catalog import (
    build_constellation,
    constellation_presets,
    get_terminal,
    load_modcod_table,
    provider_link_presets,
    terminal_presets,
)
from .visibility import (
    AccessInterval,
    CoverageReport,
    VisibilityConfig,
    access_intervals,
    cone_half_angle,
    coverage_stats,
    is_visible,
    los_clear,
    per_satellite_ecdf,
    scan_constellation,
    union_and_outages,
)
from .link import (
    LinkEndpointParams,
    LinkSample,
    ModCodEntry,
    TerminalPreset,
    data_rate,
    es_n0,
    fspl,
    latency_saving,
    link_time_series,
    max_los_range,
    mission_latency,
    score_mission,
    select_modcod,
    serving_satellite,
)

__version__ = "0.1.0"
