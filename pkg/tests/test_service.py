"""HTTP surface: request/response shapes, error mapping, cache behaviour."""

import math

import pytest
from fastapi.testclient import TestClient

from bergnum.service.app import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def test_health(client):
    resp = client.get("/healthz")
    assert resp.status_code == 200
    assert resp.json()["status"] == "ok"


def test_classify_standard(client):
    resp = client.post("/weights/classify",
                       json={"weight": "std:alpha=0", "k_max": 10})
    assert resp.status_code == 200
    body = resp.json()
    assert body["verdicts"]["upper_doubling"] == "yes"
    assert body["verdicts"]["two_sided"] == "yes"
    assert body["constants"]["C_hat"] == pytest.approx(2.0)


def test_classify_exponential(client):
    resp = client.post("/weights/classify", json={"weight": "exp:c=1"})
    body = resp.json()
    assert body["verdicts"]["upper_doubling"] == "no"
    assert body["verdicts"]["moment_ratio"] == "yes"


def test_classify_counterexample(client):
    resp = client.post("/weights/classify",
                       json={"weight": "counterexample:default"})
    body = resp.json()
    assert body["verdicts"]["upper_doubling"] == "yes"
    assert body["verdicts"]["reverse_doubling"] == "no"


def test_classify_structured_weight(client):
    resp = client.post("/weights/classify",
                       json={"weight": {"kind": "standard",
                                        "params": {"alpha": 1.0}}})
    assert resp.status_code == 200
    assert resp.json()["verdicts"]["two_sided"] == "yes"


def test_unknown_weight_maps_to_422(client):
    resp = client.post("/weights/classify", json={"weight": "bogus:1"})
    assert resp.status_code == 422
    assert resp.json()["kind"] == "ConfigError"


def test_kernel_norm_endpoint(client):
    resp = client.post("/compute/kernel-norm",
                       json={"weight": "std:alpha=0", "nu": "std:alpha=0",
                             "p": 2.0, "N": 0, "z": [0.0, 0.5]})
    rows = resp.json()["rows"]
    assert rows[0]["norm"] == pytest.approx(1.0, rel=1e-8)
    assert rows[1]["norm"] == pytest.approx(1 / (1 - 0.25) ** 2, rel=1e-7)
    assert rows[1]["bound"] is not None


def test_project_endpoint(client):
    resp = client.post("/compute/project",
                       json={"weight": "std:alpha=0", "symbol": "conj_z",
                             "n_max": 6})
    body = resp.json()
    assert max(abs(c) for c in body["coefficients_re"]) < 1e-10
    assert max(abs(c) for c in body["coefficients_im"]) < 1e-10


def test_v_transform_endpoint(client):
    resp = client.post("/compute/v-transform",
                       json={"weight": "std:alpha=0", "nu": "power:beta=1",
                             "symbol": "const:1", "z_re": [0.0, 0.3]})
    body = resp.json()
    assert body["values_re"][0] == pytest.approx(3.0, rel=1e-10)
    assert body["values_re"][1] == pytest.approx(2.1, rel=1e-10)


def test_hankel_norm_endpoint(client):
    resp = client.post("/compute/hankel-norm",
                       json={"weight": "std:alpha=0", "symbol": "z", "d": 2})
    body = resp.json()
    assert body["kind"] == "exact_p2"
    assert body["value"] == pytest.approx(math.sqrt(0.5), abs=1e-12)
    resp3 = client.post("/compute/hankel-norm",
                        json={"weight": "std:alpha=0", "symbol": "z",
                              "p": 3.0, "d": 2, "trials": 5})
    body3 = resp3.json()
    assert body3["kind"] == "monte_carlo_lower_bound"
    assert 0 < body3["value"]


def test_bmo_endpoint(client):
    resp = client.post("/compute/bmo",
                       json={"weight": "std:alpha=0", "symbol": "const:1",
                             "p": 2.0, "r": 1.0, "lattice_level": 4})
    body = resp.json()
    assert body["bmo"] < 1e-10
    assert body["ba"] == pytest.approx(1.0, abs=1e-9)


def test_bmo_degenerate_maps_to_409(client):
    resp = client.post("/compute/bmo",
                       json={"weight": "counterexample:default",
                             "symbol": "re_z", "p": 2.0, "r": 0.5,
                             "lattice_level": 4})
    # every disc that meets only gaps is degenerate; the report tolerates
    # some degenerate points, so either a partial report or a 409 is valid,
    # but a fixed small radius with the default lattice keeps some mass
    assert resp.status_code in (200, 409)


def test_experiments_endpoints(client):
    resp = client.get("/experiments")
    assert len(resp.json()["experiments"]) == 11
    run = client.post("/experiments/exp_counterexample/run", json={})
    assert run.status_code == 200
    assert run.json()["verdict"] == "pass"


def test_unknown_experiment_via_http(client):
    resp = client.post("/experiments/exp_nope/run", json={})
    assert resp.status_code == 400


def test_extra_keys_rejected(client):
    resp = client.post("/weights/classify",
                       json={"weight": "std:alpha=0", "bogus": 1})
    assert resp.status_code == 422
