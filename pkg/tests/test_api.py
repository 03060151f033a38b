import math

import pytest
from fastapi.testclient import TestClient
from pytest import approx

from app import app


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def test_home(client):
    response = client.get("/parshare/")
    assert response.status_code == 200
    assert "hesrpt" in response.json()["policies"]
    assert response.headers["X-Run-Id"]


def test_run_id_header_is_echoed(client):
    response = client.get("/parshare/", headers={"X-Run-Id": "run-123"})
    assert response.headers["X-Run-Id"] == "run-123"


def test_allocate_hesrpt(client):
    response = client.post(
        "/policy/allocate",
        json={"policy": "hesrpt", "sizes": [1.0, 1.0], "n_servers": 10, "speedup": "power:p=0.5"},
    )
    assert response.status_code == 200
    body = response.json()
    assert body["policy"] == "hesrpt"
    assert {item["job_id"]: item["theta"] for item in body["allocation"]} == approx({0: 0.25, 1: 0.75})


def test_allocate_knee_without_alpha_is_rejected(client):
    response = client.post(
        "/policy/allocate",
        json={"policy": "knee", "sizes": [1.0], "n_servers": 10, "speedup": "power:p=0.5"},
    )
    assert response.status_code == 400


def test_allocate_unknown_policy(client):
    response = client.post(
        "/policy/allocate",
        json={"policy": "lifo", "sizes": [1.0], "n_servers": 10, "speedup": "power:p=0.5"},
    )
    assert response.status_code == 400
    assert "srpt" in response.json()["allowed"]


def test_allocate_closed_form_needs_power_law(client):
    response = client.post(
        "/policy/allocate",
        json={"policy": "hesrpt", "sizes": [2.0, 1.0], "n_servers": 10, "speedup": "amdahl:f=0.9"},
    )
    assert response.status_code == 422


def test_closed_form(client):
    response = client.post("/policy/closed_form", json={"sizes": [1, 2], "p": 0.5, "n_servers": 1})
    assert response.status_code == 200
    body = response.json()
    assert body["sizes"] == [2, 1]
    assert body["hesrpt_total_flow_time"] == approx(2 + math.sqrt(3))
    assert body["hesrpt_mean_flow_time"] == approx((2 + math.sqrt(3)) / 2)
    assert body["omega"] == approx([0.0, 1 / 3])
    assert body["helrpt_makespan"] == approx(math.sqrt(5))
    assert body["helrpt_allocation"] == approx([0.8, 0.2])


def test_closed_form_near_linear_speedup(client):
    response = client.post("/policy/closed_form", json={"sizes": [2, 1], "p": 0.999999, "n_servers": 1})
    assert response.status_code == 200
    body = response.json()
    assert body["omega"] == [0.0, 0.0]
    assert body["hesrpt_total_flow_time"] == approx(4.0, rel=1e-5)


def test_closed_form_rejects_bad_exponent(client):
    response = client.post("/policy/closed_form", json={"sizes": [1], "p": 1.0, "n_servers": 1})
    assert response.status_code == 400


def test_closed_form_rejects_empty_sizes(client):
    response = client.post("/policy/closed_form", json={"sizes": [], "p": 0.5, "n_servers": 1})
    assert response.status_code == 400


def test_simulation_run(client):
    response = client.post(
        "/simulation/run",
        json={"policy": "equi", "sizes": [1.0, 1.0], "n_servers": 1, "speedup": "power:p=0.5"},
    )
    assert response.status_code == 200
    body = response.json()
    assert body["totals"]["total_flow_time"] == approx(2 * math.sqrt(2))
    assert len(body["phases"]) == 1


def test_simulation_scaled_run(client):
    response = client.post(
        "/simulation/run",
        json={
            "policy": "srpt",
            "sizes": [1.0],
            "n_servers": 4,
            "speedup": "power:p=0.5",
            "beta": 0.5,
            "record_phases": False,
        },
    )
    assert response.status_code == 200
    body = response.json()
    assert body["beta"] == 0.5
    assert body["phases"] == []
    assert body["totals"]["makespan"] == approx(1 / math.sqrt(2))


def test_simulation_rejects_bad_speedup(client):
    response = client.post(
        "/simulation/run",
        json={"policy": "equi", "sizes": [1.0], "n_servers": 1, "speedup": "power:p=2"},
    )
    assert response.status_code == 400


def test_simulation_rejects_bad_beta(client):
    response = client.post(
        "/simulation/run",
        json={"policy": "equi", "sizes": [1.0], "n_servers": 1, "speedup": "power:p=0.5", "beta": 1.0},
    )
    assert response.status_code == 400


def test_speedup_fit(client):
    points = [{"cores": k, "speedup": k**0.82} for k in (1, 2, 4, 8)]
    response = client.post("/speedup/fit", json={"points": points})
    assert response.status_code == 200
    assert response.json()["p"] == approx(0.82, abs=1e-9)
    assert response.json()["clamped"] is False


def test_speedup_fit_renormalized(client):
    points = [{"cores": k, "speedup": 2 * k**0.6} for k in (2, 4, 8, 16)]
    response = client.post("/speedup/fit", json={"points": points, "base_cores": 2})
    assert response.status_code == 200
    assert response.json()["p"] == approx(0.6, abs=1e-9)


def test_speedup_fit_rejects_single_point(client):
    response = client.post("/speedup/fit", json={"points": [{"cores": 1, "speedup": 1}]})
    assert response.status_code == 400


def test_oracle_grid_search(client):
    response = client.post(
        "/oracle/grid_search", json={"sizes": [1, 1], "speedup": "power:p=0.5", "grid_step": 0.01}
    )
    assert response.status_code == 200
    assert response.json()["best_split"] == approx(0.75)


def test_oracle_rejects_large_instances(client):
    response = client.post(
        "/oracle/grid_search", json={"sizes": [4, 3, 2, 1], "speedup": "power:p=0.5"}
    )
    assert response.status_code == 422
    assert response.json()["max_jobs"] == 3


def test_oracle_rejects_coarse_grid(client):
    response = client.post(
        "/oracle/grid_search", json={"sizes": [1, 1], "speedup": "power:p=0.5", "grid_step": 0.1}
    )
    assert response.status_code == 400
