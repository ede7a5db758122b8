import numpy as np
import pytest
from fastapi.testclient import TestClient

from rirkit import run_scene
from rirkit.scene import scene_from_dict
from rirkit.service import app

from test_scene import scene_dict


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def test_health(client):
    resp = client.get("/health")
    assert resp.status_code == 200
    assert resp.json() == {"status": "ok"}


class TestValidateEndpoint:
    def test_valid_scene(self, client):
        resp = client.post("/scenes/validate", json={"scene": scene_dict()})
        assert resp.status_code == 200
        assert resp.json() == {"valid": True, "errors": []}

    def test_invalid_scene_reports_errors(self, client):
        d = scene_dict()
        d["sources"][0]["position"] = [9.0, 1.0, 1.0]
        resp = client.post("/scenes/validate", json={"scene": d})
        assert resp.status_code == 200
        body = resp.json()
        assert body["valid"] is False
        assert any("sources[0].position" in e for e in body["errors"])


class TestRenderEndpoint:
    def test_render_matches_library(self, client):
        resp = client.post("/render", json={"scene": scene_dict()})
        assert resp.status_code == 200
        body = resp.json()
        assert len(body["pairs"]) == 1
        pair = body["pairs"][0]
        assert (pair["source"], pair["microphone"]) == (0, 0)
        assert pair["sampling_rate"] == 16000.0
        pairs, manifest = run_scene(scene_from_dict(scene_dict()))
        assert np.allclose(pair["taps"], pairs[0]["impulse_response"].taps, atol=1e-12)
        assert body["manifest"]["input_sha256"] == manifest["input_sha256"]

    def test_invalid_scene_is_422(self, client):
        d = scene_dict()
        del d["render"]
        resp = client.post("/render", json={"scene": d})
        assert resp.status_code == 422

    def test_degenerate_anchor_is_500(self, client):
        d = scene_dict()
        # x-anchor collinear with the z-anchor axis -> unresolvable frame
        d["sources"][0]["a_x"] = [3.2, 3.2, 1.0]
        resp = client.post("/render", json={"scene": d})
        assert resp.status_code == 500

    def test_worker_count_is_bounded(self, client):
        resp = client.post("/render", json={"scene": scene_dict(), "workers": 0})
        assert resp.status_code == 422

    def test_workers_do_not_change_results(self, client):
        a = client.post("/render", json={"scene": scene_dict(), "workers": 1}).json()
        b = client.post("/render", json={"scene": scene_dict(), "workers": 4}).json()
        assert a["pairs"][0]["taps"] == b["pairs"][0]["taps"]


class TestPatternPlotEndpoint:
    def test_cardioid_plot(self, client):
        resp = client.post(
            "/patterns/plot",
            json={
                "pattern": {"type": "cardioid"},
                "frequencies": [1000.0],
                "resolution_deg": 90.0,
            },
        )
        assert resp.status_code == 200
        rows = resp.json()["rows"]
        assert len(rows) == 4
        gains = {t: g for _, t, g in rows}
        assert gains[0.0] == pytest.approx(1.0)
        assert gains[90.0] == pytest.approx(0.5)
        assert gains[180.0] == pytest.approx(0.0, abs=1e-12)

    def test_frequency_above_nyquist_is_422(self, client):
        resp = client.post(
            "/patterns/plot",
            json={"pattern": {"type": "cardioid"}, "frequencies": [9000.0]},
        )
        assert resp.status_code == 422

    def test_unknown_pattern_is_422(self, client):
        resp = client.post(
            "/patterns/plot",
            json={"pattern": {"type": "laser"}, "frequencies": [1000.0]},
        )
        assert resp.status_code == 422
