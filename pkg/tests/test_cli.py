import json
from pathlib import Path

import numpy as np
import pytest

from tanglescan import RgbImage, load_image, save_image
from tanglescan.cli import main

SCENE = {
    "width": 160,
    "height": 120,
    "noise_sigma": 1.0,
    "background": {"color": [200, 200, 200], "style": "flat"},
    "wires": [
        {"points": [[20, 20], [140, 100]], "thickness": 5.0, "color": [30, 30, 60]},
        {"points": [[20, 100], [140, 20]], "thickness": 6.0, "color": [150, 90, 60]},
    ],
}


@pytest.fixture()
def scene_files(tmp_path):
    spec = tmp_path / "scene.json"
    spec.write_text(json.dumps(SCENE))
    image = tmp_path / "scene.ppm"
    truth = tmp_path / "truth.json"
    rc = main(["synth", "--spec", str(spec), "--seed", "3",
               "--out-image", str(image), "--out-truth", str(truth)])
    assert rc == 0
    return spec, image, truth


def test_synth_writes_image_and_truth(scene_files):
    _, image, truth = scene_files
    img = load_image(image)
    assert (img.width, img.height) == (160, 120)
    body = json.loads(truth.read_text())
    assert len(body["crossings"]) == 1


def test_detect_writes_canonical_json(tmp_path, scene_files):
    _, image, _ = scene_files
    out = tmp_path / "det.json"
    assert main(["detect", str(image), "--out", str(out)]) == 0
    body = json.loads(out.read_text())
    assert "tangles" in body
    for t in body["tangles"]:
        assert list(t) == ["x", "y", "over_patch", "confidence"]
        assert list(t["over_patch"]) == ["direction", "window", "patch_id"]


def test_detect_twice_is_byte_identical(tmp_path, scene_files):
    _, image, _ = scene_files
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["detect", str(image), "--out", str(out1)]) == 0
    assert main(["detect", str(image), "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_detect_missing_image_is_exit_1(tmp_path):
    assert main(["detect", str(tmp_path / "gone.ppm")]) == 1


def test_detect_bad_config_is_exit_1(tmp_path, scene_files):
    _, image, _ = scene_files
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("nonsense.key = 1")
    assert main(["detect", str(image), "--config", str(cfg)]) == 1


def test_detect_with_annotation(tmp_path, scene_files):
    _, image, _ = scene_files
    out = tmp_path / "det.json"
    marked = tmp_path / "marked.png"
    assert main(["detect", str(image), "--out", str(out), "--annotate", str(marked)]) == 0
    assert marked.read_bytes().startswith(b"\x89PNG")
    img = load_image(marked)
    assert (img.width, img.height) == (160, 120)


def test_eval_round_trip(tmp_path, scene_files, capsys):
    _, image, truth = scene_files
    det = tmp_path / "det.json"
    assert main(["detect", str(image), "--out", str(det)]) == 0
    assert main(["eval", "--detections", str(det), "--truth", str(truth)]) == 0
    body = json.loads(capsys.readouterr().out)
    assert abs(body["tp"] + body["tn"] + body["fp"] + body["fn"] - 1.0) <= 1e-9


def test_bench_prints_rate_rows(tmp_path, capsys):
    scenes = tmp_path / "scenes"
    scenes.mkdir()
    for seed in (1, 2):
        body = dict(SCENE)
        body["seed"] = seed
        (scenes / f"scene{seed}.json").write_text(json.dumps(body))
    assert main(["bench", "--scenes", str(scenes)]) == 0
    out = capsys.readouterr().out
    assert "OVERALL" in out
    assert "scene1" in out and "scene2" in out


def test_bench_empty_dir_is_exit_1(tmp_path):
    empty = tmp_path / "none"
    empty.mkdir()
    assert main(["bench", "--scenes", str(empty)]) == 1


def test_config_file_changes_pipeline(tmp_path, scene_files):
    _, image, _ = scene_files
    cfg = tmp_path / "t.cfg"
    cfg.write_text("window.min_patch_pixels = 10000\n")  # absurd floor: no patches
    out = tmp_path / "det.json"
    assert main(["detect", str(image), "--config", str(cfg), "--out", str(out)]) == 0
    assert json.loads(out.read_text()) == {"tangles": []}
