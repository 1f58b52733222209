import numpy as np
import pytest
from fastapi.testclient import TestClient

from volterra_choquet.service import app

client = TestClient(app)


def test_health():
    assert client.get("/health").json() == {"status": "ok"}


def test_integrate_endpoint():
    r = client.post(
        "/integrate",
        json={"function": {"type": "preset", "name": "one"}, "capacity": {"distortion": "exp-saturation"}},
    )
    assert r.status_code == 200
    body = r.json()
    assert body["value"] == pytest.approx(1 - np.exp(-1), abs=1e-9)
    assert body["converged"] is True


def test_integrate_window_and_quadrature():
    r = client.post(
        "/integrate",
        json={
            "function": {"type": "pwl", "nodes": [0, 1], "values": [1, 1]},
            "capacity": {"distortion": "power", "p": 0.5},
            "window": [0.0, 0.25],
            "quadrature": {"tolerance": 1e-7},
        },
    )
    assert r.status_code == 200
    assert r.json()["value"] == pytest.approx(0.5, abs=1e-7)


def test_invalid_specs_are_400_or_422():
    r = client.post(
        "/integrate",
        json={"function": {"type": "preset", "name": "nope"}, "capacity": {"distortion": "exp-saturation"}},
    )
    assert r.status_code == 400
    r = client.post(
        "/integrate",
        json={"function": {"type": "mystery"}, "capacity": {"distortion": "exp-saturation"}},
    )
    assert r.status_code == 422
    r = client.post(
        "/integrate",
        json={"function": {"type": "preset", "name": "one"}, "capacity": {"distortion": "cubic"}},
    )
    assert r.status_code == 400


def test_volterra_endpoint():
    r = client.post(
        "/volterra",
        json={
            "function": {"type": "preset", "name": "one"},
            "capacity": {"distortion": "exp-saturation"},
            "grid_size": 17,
        },
    )
    assert r.status_code == 200
    body = r.json()
    xs, values = np.asarray(body["xs"]), np.asarray(body["values"])
    assert xs.size == 17 and values[0] == 0.0
    assert np.max(np.abs(values - (1 - np.exp(-xs)))) <= 1e-9


def test_orbit_endpoint_includes_closed_forms():
    r = client.post(
        "/orbit",
        json={"capacity": {"distortion": "exp-saturation"}, "n": 2, "grid_size": 33},
    )
    body = r.json()
    assert len(body["iterates"]) == 3
    assert len(body["closed_forms"]) == 2
    got = np.asarray(body["iterates"][1])
    ref = np.asarray(body["closed_forms"][0])
    assert np.max(np.abs(got - ref)) <= 1e-6
    # closed forms only exist for the exp-saturation distortion
    r2 = client.post("/orbit", json={"capacity": {"distortion": "identity"}, "n": 1, "grid_size": 9})
    assert r2.json()["closed_forms"] is None


def test_norm_endpoint():
    r = client.post(
        "/norm",
        json={
            "function": {"type": "preset", "name": "one"},
            "p": 2,
            "capacity": {"distortion": "exp-saturation"},
        },
    )
    assert r.json()["lp_norm"] == pytest.approx(np.sqrt(1 - np.exp(-1)), abs=1e-9)


def test_opnorm_endpoint():
    r = client.post("/opnorm", json={"grid_size": 128, "iterations": 60})
    body = r.json()
    assert body["reference"] == pytest.approx(2 / np.pi, abs=1e-12)
    assert abs(body["estimate"] - body["reference"]) <= 5e-3


def test_check_endpoint():
    r = client.post("/check", json={"suite": "translation", "seed": 3, "samples": 15})
    body = r.json()
    assert body["ok"] is True and body["violation_count"] == 0
    r = client.post("/check", json={"suite": "nope", "seed": 3, "samples": 15})
    assert r.status_code == 400


def test_span_endpoint():
    r = client.post(
        "/span",
        json={
            "targets": [{"name": "square", "function": {"type": "preset", "name": "square", "n_nodes": 129}}],
            "n_max": 4,
            "capacity": {"distortion": "exp-saturation"},
            "grid_size": 129,
        },
    )
    rows = r.json()["rows"]
    assert [row["n"] for row in rows] == [0, 1, 2, 3, 4]
    assert rows[-1]["residual"] < rows[0]["residual"]
    assert all(row["target"] == "square" for row in rows)


def test_step_function_over_the_wire():
    r = client.post(
        "/integrate",
        json={
            "function": {"type": "step", "nodes": [0, 1 / 3, 2 / 3, 1], "values": [3, 1, 2]},
            "capacity": {"distortion": "power", "p": 0.5},
        },
    )
    assert r.json()["value"] == pytest.approx(1 + np.sqrt(2 / 3) + np.sqrt(1 / 3), abs=1e-9)
