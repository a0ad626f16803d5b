import dataclasses
import math

import pytest
from fastapi.testclient import TestClient

from qstsim import __version__
from qstsim.model import reference_params
from qstsim.scenario import config_from_dict, run_scenario, sweep


@pytest.fixture(scope="module")
def client():
    from qstsim.service import app

    return TestClient(app)


@pytest.fixture
def wire_config():
    return {
        "params": dataclasses.asdict(reference_params()),
        "backend": "all",
        "theta_list": ["pi/4"],
        "sample_count": 101,
        "rel_tol": 1e-11,
        "abs_tol": 1e-13,
    }


class TestHealthAndReference:
    def test_health(self, client):
        body = client.get("/health").json()
        assert body == {"status": "ok", "version": __version__}

    def test_reference_config_is_loadable(self, client):
        body = client.get("/configs/reference").json()
        config = config_from_dict(body)
        assert config.params.kappa == 1000.0
        assert len(config.theta_list) == 4


class TestSimulate:
    def test_matches_direct_run(self, client, wire_config):
        response = client.post("/simulate", json={"config": wire_config})
        assert response.status_code == 200
        body = response.json()
        direct = run_scenario(config_from_dict(wire_config))
        assert body["report"]["t_star_formula"] == pytest.approx(direct.t_star_formula)
        assert body["report"]["max_delta"] == pytest.approx(direct.max_delta(), rel=1e-9)
        assert len(body["series"]) == 4  # one per backend
        series = body["series"][0]
        assert set(series["populations"].keys()) == {"P0", "P1", "P2", "P3"}
        assert len(series["times"]) == 101

    def test_series_can_be_skipped(self, client, wire_config):
        body = client.post(
            "/simulate", json={"config": wire_config, "include_series": False}
        ).json()
        assert body["series"] == []

    def test_validation_errors_are_422(self, client, wire_config):
        bad = dict(wire_config, backend="bogus")
        assert client.post("/simulate", json={"config": bad}).status_code == 422
        bad = dict(wire_config, params={**wire_config["params"], "oops": 1})
        assert client.post("/simulate", json={"config": bad}).status_code == 422

    def test_domain_errors_are_400(self, client, wire_config):
        bad = dict(wire_config, params={**wire_config["params"], "omega1": 0.0})
        response = client.post("/simulate", json={"config": bad})
        assert response.status_code == 400
        assert "omega1" in response.json()["detail"]


class TestCompare:
    def test_within_tolerance_flag(self, client, wire_config):
        body = client.post(
            "/compare", json={"config": wire_config, "tolerance": 1e-6}
        ).json()
        assert body["within_tolerance"] is True
        strict = client.post(
            "/compare", json={"config": wire_config, "tolerance": 1e-12}
        ).json()
        assert strict["within_tolerance"] is False
        assert strict["report"]["max_delta"] > 1e-12


class TestSweepEndpoint:
    def test_rows_match_core(self, client, wire_config):
        payload = {
            "config": wire_config,
            "axis": "omega2",
            "start": 0.0078,
            "stop": 0.0086,
            "steps": 5,
        }
        body = client.post("/sweep", json=payload).json()
        core_rows = sweep(config_from_dict(wire_config), "omega2", 0.0078, 0.0086, 5)
        assert body["axis"] == "omega2"
        assert len(body["rows"]) == 5
        for wire_row, row in zip(body["rows"], core_rows):
            assert wire_row["value"] == pytest.approx(row.value)
            assert wire_row["transfer_time"] == pytest.approx(row.transfer_time)
            assert wire_row["resonant"] == row.resonant

    def test_invalid_axis_is_400(self, client, wire_config):
        payload = {
            "config": wire_config,
            "axis": "not_a_param",
            "start": 0.0,
            "stop": 1.0,
            "steps": 3,
        }
        assert client.post("/sweep", json=payload).status_code == 400


class TestCalibrateEndpoint:
    def test_returns_recovered_constants(self, client, wire_config):
        payload = {
            "config": wire_config,
            "target_fidelity": 0.990,
            "target_theta": "pi/4",
        }
        body = client.post("/calibrate", json=payload).json()
        assert body["k1"] == body["k2"] > 0
        assert body["achieved_fidelity"] == pytest.approx(0.990, abs=1e-4)
        assert body["target_theta"] == pytest.approx(math.pi / 4)
        assert len(body["fidelities"]) == 4
        assert not body["clamped"]
