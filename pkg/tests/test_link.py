import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from missionlink.catalog import load_modcod_table, provider_link_presets, terminal_presets
from missionlink.constants import EARTH_RADIUS_KM
from missionlink.errors import CatalogError
from missionlink.link import (
    LinkEndpointParams,
    ModCodEntry,
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
from missionlink.orbits import Constellation, EciState, OrbitElements, Shell
from missionlink.visibility import VisibilityConfig, cone_half_angle

RE = EARTH_RADIUS_KM

# service-link endpoints used across the link tests: MEO provider at
# 8062 km, high-performance Ka terminal on a 700 km mission
DL = LinkEndpointParams(eirp_dbw=49.7, g_over_t_db_k=13.0, frequency_hz=20e9, bandwidth_hz=100e6)
UL = LinkEndpointParams(eirp_dbw=46.0, g_over_t_db_k=7.0, frequency_hz=30e9, bandwidth_hz=4e6)
NADIR_GAP_KM = 7362.0


class TestFspl:
    def test_meo_gap_at_20ghz(self):
        assert fspl(NADIR_GAP_KM, 20e9) == pytest.approx(195.8, abs=0.05)

    def test_distance_doubling_adds_exactly_6db(self):
        delta = fspl(2 * NADIR_GAP_KM, 20e9) - fspl(NADIR_GAP_KM, 20e9)
        assert delta == pytest.approx(20 * math.log10(2.0), abs=1e-9)

    def test_frequency_scaling_identity(self):
        delta = fspl(NADIR_GAP_KM, 30e9) - fspl(NADIR_GAP_KM, 20e9)
        assert delta == pytest.approx(20 * math.log10(1.5), abs=1e-9)
        assert fspl(NADIR_GAP_KM, 30e9) == pytest.approx(199.3, abs=0.05)

    def test_domain(self):
        with pytest.raises(ValueError):
            fspl(0.0, 20e9)
        with pytest.raises(ValueError):
            fspl(100.0, -1.0)


class TestEsN0:
    def test_downlink_at_nadir_gap(self):
        assert es_n0(DL, NADIR_GAP_KM) == pytest.approx(15.49, abs=0.05)

    def test_uplink_at_nadir_gap(self):
        assert es_n0(UL, NADIR_GAP_KM) == pytest.approx(16.25, abs=0.05)

    def test_dynamic_range_over_los_envelope(self):
        d_max = max_los_range(8062.0, 700.0)
        spread = es_n0(UL, NADIR_GAP_KM) - es_n0(UL, d_max)
        assert 6.5 <= spread <= 6.8

    def test_rolloff_raises_esn0(self):
        shaped = LinkEndpointParams(
            eirp_dbw=46.0, g_over_t_db_k=7.0, frequency_hz=30e9, bandwidth_hz=4e6, rolloff=0.2
        )
        gain = es_n0(shaped, NADIR_GAP_KM) - es_n0(UL, NADIR_GAP_KM)
        assert gain == pytest.approx(10 * math.log10(1.2), abs=1e-9)


@settings(max_examples=80, deadline=None)
@given(
    d1=st.floats(min_value=100.0, max_value=50000.0),
    factor=st.floats(min_value=1.01, max_value=10.0),
    eirp=st.floats(min_value=0.0, max_value=80.0),
    gt=st.floats(min_value=-20.0, max_value=30.0),
    bump=st.floats(min_value=0.1, max_value=20.0),
)
def test_es_n0_monotonicity(d1, factor, eirp, gt, bump):
    base = LinkEndpointParams(eirp_dbw=eirp, g_over_t_db_k=gt, frequency_hz=20e9, bandwidth_hz=1e6)
    assert es_n0(base, d1 * factor) < es_n0(base, d1)
    hotter = LinkEndpointParams(
        eirp_dbw=eirp + bump, g_over_t_db_k=gt, frequency_hz=20e9, bandwidth_hz=1e6
    )
    assert es_n0(hotter, d1) == pytest.approx(es_n0(base, d1) + bump, abs=1e-9)
    keener = LinkEndpointParams(
        eirp_dbw=eirp, g_over_t_db_k=gt + bump, frequency_hz=20e9, bandwidth_hz=1e6
    )
    assert es_n0(keener, d1) == pytest.approx(es_n0(base, d1) + bump, abs=1e-9)


class TestMaxLosRange:
    def test_meo_to_leo(self):
        assert max_los_range(8062.0, 700.0) == pytest.approx(16024.3, abs=0.5)

    def test_ground_terminal_limit(self):
        almost_ground = max_los_range(8062.0, 1e-6)
        assert almost_ground == pytest.approx(
            math.sqrt((RE + 8062.0) ** 2 - RE**2), rel=1e-4
        )

    def test_equal_altitudes_rejected(self):
        with pytest.raises(ValueError):
            max_los_range(700.0, 700.0)


class TestModCodTable:
    def test_bundled_table_is_a_frontier(self):
        table = load_modcod_table()
        assert len(table) >= 25
        for prev, cur in zip(table, table[1:]):
            assert cur.esn0_threshold_db > prev.esn0_threshold_db
            assert cur.spectral_efficiency > prev.spectral_efficiency

    def test_span_covers_manual_acm_range(self):
        table = load_modcod_table()
        assert table[0].esn0_threshold_db < 0.0
        assert table[-1].esn0_threshold_db > 19.0
        assert table[-1].spectral_efficiency > 5.5


class TestSelectModcod:
    TABLE = load_modcod_table()

    def _oracle(self, esn0, margin=0.0):
        eligible = [e for e in self.TABLE if e.esn0_threshold_db <= esn0 - margin]
        if not eligible:
            return None
        best_se = max(e.spectral_efficiency for e in eligible)
        ties = [e for e in eligible if e.spectral_efficiency == best_se]
        return min(ties, key=lambda e: e.esn0_threshold_db)

    def test_below_lowest_threshold(self):
        assert select_modcod(-10.0, self.TABLE) is None

    def test_exact_threshold_qualifies(self):
        entry = self.TABLE[5]
        assert select_modcod(entry.esn0_threshold_db, self.TABLE) is entry

    def test_against_linear_scan_over_grid(self):
        for esn0 in np.arange(-5.0, 21.0, 0.03):
            assert select_modcod(float(esn0), self.TABLE) == self._oracle(float(esn0))

    def test_margin_shifts_selection(self):
        entry = self.TABLE[10]
        at = entry.esn0_threshold_db
        assert select_modcod(at, self.TABLE, margin_db=0.0) is entry
        assert select_modcod(at, self.TABLE, margin_db=0.5) is not entry
        assert select_modcod(at, self.TABLE, margin_db=0.5) == self._oracle(at, 0.5)

    def test_empty_table_rejected(self):
        with pytest.raises(ValueError):
            select_modcod(10.0, [])

    def test_unsorted_table_rejected(self):
        bad = (
            ModCodEntry("b", 2.0, 5.0),
            ModCodEntry("a", 1.0, 1.0),
        )
        with pytest.raises(ValueError):
            select_modcod(10.0, bad)


class TestDataRate:
    def test_arithmetic_identity(self):
        mc = ModCodEntry("test", 2.0, 0.0)
        assert data_rate(mc, 100e6, 0.0) == pytest.approx(200e6)

    def test_rolloff_shrinks_rate(self):
        mc = ModCodEntry("test", 2.0, 0.0)
        assert data_rate(mc, 100e6, 0.25) == pytest.approx(160e6)

    def test_rate_is_step_function_of_esn0(self):
        table = load_modcod_table()
        eps = 1e-9
        last_rate = 0.0
        for entry in table:
            below = select_modcod(entry.esn0_threshold_db - eps, table)
            at = select_modcod(entry.esn0_threshold_db, table)
            rate_below = data_rate(below, 4e6) if below else 0.0
            rate_at = data_rate(at, 4e6)
            assert rate_at > rate_below  # a jump exactly at the threshold
            assert rate_below >= last_rate  # nondecreasing between jumps
            last_rate = rate_at


class TestServingSatellite:
    CFG = VisibilityConfig(mode="los-only", min_elevation_deg=5.0)
    ALPHA = cone_half_angle(8062.0, 5.0)

    @staticmethod
    def state(pos, t=0.0):
        return EciState(position_km=np.asarray(pos, float), velocity_km_s=np.zeros(3), t_s=t)

    def test_single_visible(self):
        states = {7: self.state([RE + 8062, 0, 0])}
        mission = self.state([RE + 700, 0, 0])
        assert serving_satellite(states, mission, self.CFG, self.ALPHA) == 7

    def test_nearest_wins(self):
        mission = self.state([RE + 700, 0, 0])
        near = self.state([RE + 8062, 0, 0])
        far_pos = (RE + 8062) * np.array([math.cos(0.5), math.sin(0.5), 0.0])
        states = {1: self.state(far_pos), 2: near}
        assert serving_satellite(states, mission, self.CFG, self.ALPHA) == 2

    def test_tie_breaks_to_lowest_id(self):
        mission = self.state([RE + 700, 0, 0])
        a = (RE + 8062) * np.array([math.cos(0.3), math.sin(0.3), 0.0])
        b = (RE + 8062) * np.array([math.cos(0.3), -math.sin(0.3), 0.0])
        states = {5: self.state(a), 3: self.state(b)}
        assert serving_satellite(states, mission, self.CFG, self.ALPHA) == 3

    def test_none_visible(self):
        mission = self.state([RE + 700, 0, 0])
        states = {0: self.state([-(RE + 8062), 0, 0])}
        assert serving_satellite(states, mission, self.CFG, self.ALPHA) is None


class TestMissionLatency:
    def test_leo_constellation_user(self):
        assert mission_latency(100.0, 660.0) == pytest.approx(91.2, abs=0.05)

    def test_meo_constellation_user(self):
        assert mission_latency(150.0, 660.0) == pytest.approx(141.2, abs=0.05)

    def test_saving_at_660(self):
        assert latency_saving(660.0) == pytest.approx(8.8, abs=0.05)

    def test_saving_at_300(self):
        assert latency_saving(300.0) == pytest.approx(4.0, abs=0.05)

    def test_formula_exact(self):
        assert mission_latency(100.0, 660.0) == pytest.approx(
            100.0 - 4 * 660.0 / 299792.458 * 1e3, abs=1e-12
        )

    def test_higher_missions_save_more(self):
        assert mission_latency(100.0, 300.0) > mission_latency(100.0, 660.0)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            mission_latency(5.0, 600.0)
        with pytest.raises(ValueError):
            mission_latency(0.0, 600.0)


class TestScoreMission:
    @pytest.mark.parametrize(
        "scores,total",
        [((3, 3, 3), 9), ((1, 1, 1), 3), ((3, 3, 1), 7)],
    )
    def test_reference_sums(self, scores, total):
        assert score_mission(scores) == total

    def test_validation(self):
        with pytest.raises(ValueError):
            score_mission((0, 1, 1))
        with pytest.raises(ValueError):
            score_mission((1, 1))


def _single_meo_provider():
    return Constellation(
        name="one-sat",
        shells=(
            Shell(altitude_km=8062, inclination_deg=0, planes=1, sats_per_plane=1, raan_span_deg=0),
        ),
        min_elevation_deg=5.0,
        baseline_latency_ms=150.0,
    )


def _mission(alt=700.0):
    return OrbitElements(
        a_km=RE + alt, eccentricity=0.0, inclination_rad=math.radians(98.19),
        raan_rad=0.0, arg_perigee_rad=0.0, mean_anomaly_rad=0.0,
    )


class TestLinkTimeSeries:
    TABLE = load_modcod_table()

    def test_range_respects_geometric_bounds(self):
        series = link_time_series(
            _single_meo_provider(), _mission(), (0.0, 86400.0), 10.0, DL, UL, self.TABLE
        )
        valid = [s for s in series if s.serving_sat is not None]
        assert valid
        d_max = max_los_range(8062.0, 700.0)
        for s in valid:
            assert NADIR_GAP_KM - 1.0 <= s.slant_range_km <= d_max + 1.0

    def test_gap_samples_have_zero_rate(self):
        series = link_time_series(
            _single_meo_provider(), _mission(), (0.0, 86400.0), 10.0, DL, UL, self.TABLE
        )
        gaps = [s for s in series if s.serving_sat is None]
        assert gaps, "a single provider satellite must leave service gaps"
        for s in gaps:
            assert s.rate_dl_bps == 0.0 and s.rate_ul_bps == 0.0
            assert math.isnan(s.esn0_dl_db) and math.isnan(s.esn0_ul_db)

    def test_weak_terminal_never_beats_strong_one(self):
        ul_weak = LinkEndpointParams(
            eirp_dbw=36.4, g_over_t_db_k=7.0, frequency_hz=30e9, bandwidth_hz=4e6
        )
        strong = link_time_series(
            _single_meo_provider(), _mission(), (0.0, 43200.0), 30.0, DL, UL, self.TABLE
        )
        weak = link_time_series(
            _single_meo_provider(), _mission(), (0.0, 43200.0), 30.0, DL, ul_weak, self.TABLE
        )
        for s, w in zip(strong, weak):
            assert (s.serving_sat is None) == (w.serving_sat is None)
            if s.serving_sat is not None:
                assert w.esn0_ul_db == pytest.approx(s.esn0_ul_db - (46.0 - 36.4), abs=1e-9)
                assert w.rate_ul_bps <= s.rate_ul_bps

    def test_implementation_loss_shifts_both_links(self):
        plain = link_time_series(
            _single_meo_provider(), _mission(), (0.0, 3600.0), 60.0, DL, UL, self.TABLE
        )
        lossy = link_time_series(
            _single_meo_provider(), _mission(), (0.0, 3600.0), 60.0, DL, UL, self.TABLE,
            implementation_loss_db=2.5,
        )
        for p, l in zip(plain, lossy):
            if p.serving_sat is not None:
                assert l.esn0_dl_db == pytest.approx(p.esn0_dl_db - 2.5, abs=1e-9)
                assert l.esn0_ul_db == pytest.approx(p.esn0_ul_db - 2.5, abs=1e-9)

    def test_rates_match_modcod_selection(self):
        series = link_time_series(
            _single_meo_provider(), _mission(), (0.0, 43200.0), 60.0, DL, UL, self.TABLE
        )
        for s in series:
            if s.serving_sat is None:
                continue
            mc_dl = select_modcod(s.esn0_dl_db, self.TABLE)
            expect_dl = data_rate(mc_dl, 100e6) if mc_dl else 0.0
            assert s.rate_dl_bps == pytest.approx(expect_dl)
            mc_ul = select_modcod(s.esn0_ul_db, self.TABLE)
            expect_ul = data_rate(mc_ul, 4e6) if mc_ul else 0.0
            assert s.rate_ul_bps == pytest.approx(expect_ul)

    def test_serving_range_lower_bound_is_altitude_gap(self):
        # with several satellites the served range can never undershoot
        # the nadir altitude gap
        ring = Constellation(
            name="ring",
            shells=(
                Shell(altitude_km=8062, inclination_deg=0, planes=1, sats_per_plane=44, raan_span_deg=0),
            ),
            min_elevation_deg=5.0,
        )
        series = link_time_series(ring, _mission(), (0.0, 21600.0), 30.0, DL, UL, self.TABLE)
        for s in series:
            if s.serving_sat is not None:
                assert s.slant_range_km >= NADIR_GAP_KM - 1.0


class TestCatalogPresets:
    def test_terminal_params(self):
        presets = terminal_presets()
        ka100 = presets["ThinPack Ka100"]
        assert (ka100.eirp_dbw, ka100.g_over_t_db_k) == (46.0, 13.0)
        nanosat = presets["Nanosat"]
        assert nanosat.g_over_t_db_k == 2.2
        assert presets["Nightingale I"].g_over_t_db_k is None

    def test_provider_link_preset(self):
        links = provider_link_presets()
        dl = links["o3b-mpower-60"]["downlink"]
        ul = links["o3b-mpower-60"]["uplink"]
        assert (dl.eirp_dbw, dl.frequency_hz, dl.bandwidth_hz) == (49.7, 20e9, 100e6)
        assert (ul.g_over_t_db_k, ul.frequency_hz, ul.bandwidth_hz) == (7.0, 30e9, 4e6)

    def test_malformed_modcod_file(self, tmp_path):
        bad = tmp_path / "table.csv"
        bad.write_text("name,spectral_efficiency,esn0_threshold_db\nQPSK,abc,1.0\n")
        with pytest.raises(CatalogError):
            load_modcod_table(bad)
