import pytest
from fastapi.testclient import TestClient

from matprobe_sidecar.service import ServiceConfig, create_app


@pytest.fixture(scope="module")
def client(tiny_checkpoint):
    app = create_app(ServiceConfig(model=tiny_checkpoint))
    with TestClient(app) as c:
        yield c


def test_fill_mask_top5_conformance(client):
    response = client.post(
        "/v1/fill-mask", json={"text": "a battery consists of <mask>.", "top_k": 5}
    )
    assert response.status_code == 200
    payload = response.json()
    assert "model" in payload
    predictions = payload["predictions"]
    assert len(predictions) == 5
    probs = [p["probability"] for p in predictions]
    assert probs == sorted(probs, reverse=True)
    assert all(0.0 < p <= 1.0 for p in probs)
    assert sum(probs) <= 1.0 + 1e-6
    assert all(isinstance(p["token"], str) for p in predictions)
    # tokens come back whitespace-stripped
    assert all(p["token"] == p["token"].strip() for p in predictions)


def test_fill_mask_top_k_1(client):
    response = client.post("/v1/fill-mask", json={"text": "a lamp is made of <mask>.", "top_k": 1})
    assert response.status_code == 200
    assert len(response.json()["predictions"]) == 1


def test_fill_mask_deterministic(client):
    body = {"text": "a battery consists of <mask>.", "top_k": 5}
    first = client.post("/v1/fill-mask", json=body).json()
    second = client.post("/v1/fill-mask", json=body).json()
    assert first == second


def test_missing_mask_400(client):
    response = client.post("/v1/fill-mask", json={"text": "no mask at all.", "top_k": 5})
    assert response.status_code == 400


def test_double_mask_400(client):
    response = client.post(
        "/v1/fill-mask", json={"text": "<mask> and <mask>.", "top_k": 5}
    )
    assert response.status_code == 400


def test_too_long_413(client):
    response = client.post(
        "/v1/fill-mask",
        json={"text": "word " * 300 + "<mask>.", "top_k": 5},
    )
    assert response.status_code == 413


def test_not_loaded_503(tiny_checkpoint):
    app = create_app(ServiceConfig(model=tiny_checkpoint), load=False)
    with TestClient(app) as client:
        response = client.post(
            "/v1/fill-mask", json={"text": "a battery consists of <mask>.", "top_k": 5}
        )
        assert response.status_code == 503
        assert client.get("/v1/info").status_code == 503


def test_info_endpoint(client, tiny_checkpoint):
    payload = client.get("/v1/info").json()
    assert payload == {
        "model": tiny_checkpoint,
        "mask_token": "<mask>",
        "max_top_k": 50,
    }


def test_top_k_clamped_to_max(tiny_checkpoint):
    app = create_app(ServiceConfig(model=tiny_checkpoint, max_top_k=3))
    with TestClient(app) as client:
        response = client.post(
            "/v1/fill-mask", json={"text": "a battery consists of <mask>.", "top_k": 10}
        )
        assert len(response.json()["predictions"]) == 3
