import base64
import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from tanglescan import SceneSpec, WireSpec, generate_scene
from tanglescan.raster import encode_ppm
from tanglescan.service import app

client = TestClient(app)


def scene_spec_dict():
    return {
        "width": 160,
        "height": 120,
        "noise_sigma": 1.0,
        "background": {"color": [200, 200, 200], "style": "flat"},
        "wires": [
            {"points": [[20, 20], [140, 100]], "thickness": 5.0, "color": [30, 30, 60]},
            {"points": [[20, 100], [140, 20]], "thickness": 6.0, "color": [150, 90, 60]},
        ],
    }


def b64_ppm(width=64, height=64, value=128):
    arr = np.full((height, width, 3), value, dtype=np.uint8)
    from tanglescan import RgbImage

    return base64.b64encode(encode_ppm(RgbImage.from_array(arr))).decode("ascii")


def test_health():
    body = client.get("/health").json()
    assert body["status"] == "ok"
    assert "version" in body


def test_detect_blank_image_returns_empty_tangles():
    resp = client.post("/detect", json={"image_b64": b64_ppm()})
    assert resp.status_code == 200
    assert json.loads(resp.content) == {"tangles": []}


def test_detect_rejects_bad_base64():
    resp = client.post("/detect", json={"image_b64": "@@not-base64@@"})
    assert resp.status_code == 400


def test_detect_rejects_unknown_config_key():
    resp = client.post(
        "/detect", json={"image_b64": b64_ppm(), "config": {"bogus.key": 1}}
    )
    assert resp.status_code == 400


def test_detect_response_is_byte_stable():
    spec = scene_spec_dict()
    synth = client.post("/synth", json={"spec": spec, "seed": 3}).json()
    payload = {"image_b64": synth["image_b64"]}
    first = client.post("/detect", json=payload).content
    second = client.post("/detect", json=payload).content
    assert first == second


def test_synth_returns_image_and_truth():
    resp = client.post("/synth", json={"spec": scene_spec_dict(), "seed": 5})
    assert resp.status_code == 200
    body = resp.json()
    raw = base64.b64decode(body["image_b64"])
    assert raw.startswith(b"P6")
    assert body["truth"]["width"] == 160
    assert len(body["truth"]["crossings"]) == 1
    assert body["truth"]["crossings"][0]["over"] == 1


def test_synth_rejects_bad_spec():
    resp = client.post("/synth", json={"spec": {"width": 10}})
    assert resp.status_code == 400


def test_annotate_returns_detection_and_image():
    synth = client.post("/synth", json={"spec": scene_spec_dict(), "seed": 7}).json()
    resp = client.post(
        "/annotate", json={"image_b64": synth["image_b64"], "format": "png"}
    )
    assert resp.status_code == 200
    body = resp.json()
    assert json.loads(body["detection"])["tangles"] is not None
    assert base64.b64decode(body["image_b64"]).startswith(b"\x89PNG")


def test_eval_scores_detection_json():
    synth = client.post("/synth", json={"spec": scene_spec_dict(), "seed": 11}).json()
    detection = client.post("/detect", json={"image_b64": synth["image_b64"]}).json()
    resp = client.post(
        "/eval",
        json={"detections": detection, "truth": synth["truth"], "match_radius": 10.0},
    )
    assert resp.status_code == 200
    body = resp.json()
    total = body["tp"] + body["tn"] + body["fp"] + body["fn"]
    assert abs(total - 1.0) <= 1e-9
    assert 0.0 <= body["accuracy"] <= 1.0


def test_bench_aggregates_scenes():
    scenes = [{"spec": scene_spec_dict(), "seed": s, "name": f"s{s}"} for s in (1, 2)]
    resp = client.post("/bench", json={"scenes": scenes, "match_radius": 10.0})
    assert resp.status_code == 200
    body = resp.json()
    assert [row["name"] for row in body["scenes"]] == ["s1", "s2"]
    assert 0.0 <= body["aggregate"]["accuracy"] <= 1.0


def test_bench_requires_scenes():
    assert client.post("/bench", json={"scenes": []}).status_code == 400
