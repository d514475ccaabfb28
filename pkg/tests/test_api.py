import base64
import json

import pytest
from fastapi.testclient import TestClient

from api.watermark import decode_image, encode_image
from codec import keystream
from errors import InputError
from main import app


@pytest.fixture(scope="module")
def client():
    return TestClient(app)


def test_decode_rejects_garbage():
    with pytest.raises(InputError):
        decode_image("not base64!!")
    with pytest.raises(InputError):
        decode_image(base64.b64encode(b"plain bytes").decode())


def test_embed_and_extract(client, cover):
    resp = client.post("/api/embed", json={"image": encode_image(cover), "key": "beef", "payload_len": 16})
    body = resp.json()
    assert resp.status_code == 200 and body["is_success"], body
    assert body["report"]["plan"]["blocks_approx"] == 256

    resp = client.post("/api/extract", json={"image": body["image"], "key": "beef", "payload_len": 16})
    body = resp.json()
    assert body["is_success"], body
    assert body["bits"] == keystream(0xBEEF, 16).to_text()
    assert len(body["confidences"]["margin"]) == 16


def test_embed_failure_is_reported(client, cover):
    resp = client.post("/api/embed", json={"image": encode_image(cover), "key": "1", "payload_len": 100000})
    assert resp.status_code == 200
    assert resp.json()["is_success"] is False
    resp = client.post("/api/embed", json={"image": "%%%", "key": "1"})
    assert resp.json()["is_success"] is False


def test_invalid_request_is_rejected(client, cover):
    resp = client.post("/api/embed", json={"image": encode_image(cover), "key": "1", "payload_len": 0})
    assert resp.status_code == 422


def test_attack_endpoint(client, cover):
    resp = client.post("/api/attack", json={"image": encode_image(cover), "spec": "rotate:0"})
    body = resp.json()
    assert body["is_success"]
    assert (decode_image(body["image"]).samples == cover.samples).all()
    assert client.post("/api/attack", json={"image": encode_image(cover), "spec": "blur"}).json()["is_success"] is False


def test_attack_runs_off_the_event_loop(client, cover, monkeypatch):
    import api.watermark as endpoints

    calls = []
    original = endpoints.run_in_threadpool

    async def recording(func, *args, **kwargs):
        calls.append(func.__name__)
        return await original(func, *args, **kwargs)

    monkeypatch.setattr(endpoints, "run_in_threadpool", recording)
    resp = client.post("/api/attack", json={"image": encode_image(cover), "spec": "median:3"})
    assert resp.json()["is_success"]
    assert calls == ["apply_attack"]


def test_evaluate_endpoint(client, cover):
    resp = client.post("/api/evaluate", json={"image": encode_image(cover), "keys": ["1", "2"],
                                              "attacks": ["jpeg:90"], "payload_len": 16})
    body = resp.json()
    assert body["is_success"], body
    assert len(body["report"]["rows"]) == 4
    assert body["report"]["rows"][0]["ber"] == 0


def test_evaluate_websocket_streams_rows(client, cover):
    with client.websocket_connect("/api/evaluate") as ws:
        ws.send_json({"image": encode_image(cover), "keys": ["1", "2"], "attacks": ["median:3"],
                      "payload_len": 16})
        events = []
        while True:
            event = json.loads(ws.receive_text())
            events.append(event)
            if event["done"]:
                break
    rows = [e["row"] for e in events[:-1]]
    assert [r["attack"] for r in rows] == ["none", "median:3", "none", "median:3"]
    assert events[-1]["is_success"]
    assert len(events[-1]["report"]["rows"]) == 4
