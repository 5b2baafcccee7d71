import json

import pytest

from missionlink.reports import bundle_to_dict, intervals_csv, link_csv, write_reports
from missionlink.runner import run_scenario
from missionlink.scenario import parse_scenario

TINY_COVERAGE = """
name = "tiny"
outputs = ["coverage", "ecdf", "latency"]

[constellation]
name = "mini-meo"
min_elevation_deg = 5.0
baseline_latency_ms = 150.0

[[constellation.shells]]
altitude_km = 8062.0
inclination_deg = 0.0
planes = 1
sats_per_plane = 4
phasing_factor = 0
raan_span_deg = 0.0

[mission]
altitude_km = 700.0
inclination = 0.0

[simulation]
horizon_s = 21600.0
coarse_step_s = 10.0
"""

TINY_LINK = """
name = "tiny-link"
outputs = ["link"]

[constellation]
name = "mini-meo"
min_elevation_deg = 5.0

[[constellation.shells]]
altitude_km = 8062.0
inclination_deg = 0.0
planes = 1
sats_per_plane = 1
phasing_factor = 0
raan_span_deg = 0.0

[mission]
altitude_km = 700.0
inclination = "sso"

[simulation]
horizon_s = 21600.0

[link]
terminal = "ThinPack Ka100"
provider = "o3b-mpower-60"
step_s = 60.0
"""


@pytest.fixture(scope="module")
def coverage_bundle():
    return run_scenario(parse_scenario(TINY_COVERAGE))


@pytest.fixture(scope="module")
def link_bundle():
    return run_scenario(parse_scenario(TINY_LINK))


class TestBundleDict:
    def test_number_formatting(self, coverage_bundle):
        doc = bundle_to_dict(coverage_bundle)
        pct = doc["coverage"]["total_pct"]
        assert pct == round(pct, 2)
        for d, f in doc["ecdf"]["points"]:
            assert d == round(d, 2) and f == round(f, 6)

    def test_latency_block(self, coverage_bundle):
        doc = bundle_to_dict(coverage_bundle)
        assert doc["latency"]["baseline_ms"] == 150.0
        assert doc["latency"]["saving_ms"] == 9.34  # 4*700/c in ms, 2 decimals
        assert doc["latency"]["latency_ms"] == pytest.approx(140.66)

    def test_link_summary_ordering(self, link_bundle):
        doc = bundle_to_dict(link_bundle)
        for stats in doc["link"]["summary"].values():
            assert stats["min"] <= stats["mean"] <= stats["max"]

    def test_rates_serialized_as_integers(self, link_bundle):
        doc = bundle_to_dict(link_bundle)
        for k in ("min", "max", "mean"):
            assert isinstance(doc["link"]["summary"]["rate_dl_bps"][k], int)

    def test_all_numeric_fields_finite(self, link_bundle, coverage_bundle):
        for bundle in (link_bundle, coverage_bundle):
            text = json.dumps(bundle_to_dict(bundle), allow_nan=False)
            assert "NaN" not in text

    def test_provenance_echoes_defaults(self, coverage_bundle):
        doc = bundle_to_dict(coverage_bundle)
        prov = doc["provenance"]
        assert prov["tool"] == "missionlink"
        assert any(d.startswith("simulation.refine_tolerance_s") for d in prov["defaults_used"])


class TestCsv:
    def test_intervals_csv_schema(self, coverage_bundle):
        text = intervals_csv(coverage_bundle)
        lines = text.strip().split("\n")
        assert lines[0] == "sat_id,start_s,end_s,duration_s"
        assert len(lines) > 1
        sat_id, start, end, dur = lines[1].split(",")
        assert float(end) > float(start)
        assert float(dur) == pytest.approx(float(end) - float(start), abs=0.02)

    def test_link_csv_gap_rows(self, link_bundle):
        text = link_csv(link_bundle)
        lines = text.strip().split("\n")
        assert lines[0] == "t_s,serving_sat,range_km,esn0_dl_db,esn0_ul_db,rate_dl_bps,rate_ul_bps"
        gap_rows = [l for l in lines[1:] if ",,,," in l]
        assert gap_rows, "single-satellite geometry must produce gap rows"
        for row in gap_rows:
            assert row.endswith(",0,0")


class TestWriteReports:
    def test_byte_identical_across_runs(self, tmp_path):
        scenario = parse_scenario(TINY_COVERAGE)
        a = write_reports(run_scenario(scenario), tmp_path / "a")
        b = write_reports(run_scenario(scenario), tmp_path / "b")
        assert [p.name for p in a] == [p.name for p in b]
        for pa, pb in zip(a, b):
            assert pa.read_bytes() == pb.read_bytes()

    def test_full_coverage_pct_is_100_00(self, tmp_path):
        text = TINY_COVERAGE.replace("sats_per_plane = 4", "sats_per_plane = 44").replace(
            "inclination = 0.0", "inclination = 0.0\nmean_anomaly_deg = 4.0"
        )
        bundle = run_scenario(parse_scenario(text))
        doc = bundle_to_dict(bundle)
        # equatorial mission under an equatorial ring: continuous service
        assert doc["coverage"]["total_pct"] == 100.0
        assert doc["coverage"]["outage_count"] == 0

    def test_empty_union_reports_null_extremes(self):
        text = TINY_COVERAGE.replace("altitude_km = 700.0", "altitude_km = 8062.0")
        bundle = run_scenario(parse_scenario(text))
        doc = bundle_to_dict(bundle)
        assert doc["coverage"]["total_pct"] == 0.0
        assert doc["coverage"]["min_uninterrupted_s"] is None
        assert doc["coverage"]["max_uninterrupted_s"] is None
        assert "ecdf" not in doc
        assert any("mission orbits at or above" in w for w in bundle.warnings)

    def test_report_json_parses_back(self, tmp_path, link_bundle):
        paths = write_reports(link_bundle, tmp_path)
        doc = json.loads((tmp_path / "report.json").read_text())
        assert doc["link"]["samples"] == len(link_bundle.link_series)
        assert {p.name for p in paths} == {"report.json", "link_series.csv"}
