"""HTTP service exposing the detection pipeline.

Endpoints:

* ``GET  /health``   -- liveness + version
* ``POST /detect``   -- image in, canonical detection JSON document out
* ``POST /annotate`` -- detection JSON plus the cross-hair annotated image
* ``POST /synth``    -- render a scene spec, return image + ground truth
* ``POST /eval``     -- score a detection JSON against a truth JSON
* ``POST /bench``    -- generate/detect/score a batch of scenes in-process

Images travel base64-encoded (PPM or PNG bytes). /detect returns the
canonical serialization as the raw response body so clients can persist it
byte-identically.
"""

from __future__ import annotations

import base64
import binascii
from statistics import mean

from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__
from .config import PipelineConfig, config_from_mapping
from .errors import InputError
from .evaluate import evaluate
from .pipeline import detection_json, detections_from_dict, run_pipeline
from .raster import annotate, decode_image, encode_image
from .scanner import windows
from .synth import generate_scene, spec_from_dict, truth_from_dict, truth_to_dict

app = FastAPI(title="tanglescan", version=__version__)


@app.exception_handler(InputError)
async def input_error_handler(_request: Request, exc: InputError):
    return JSONResponse(status_code=400, content={"detail": str(exc)})


class DetectRequest(BaseModel):
    image_b64: str
    config: dict = Field(default_factory=dict)
    workers: int = 1


class AnnotateRequest(DetectRequest):
    format: str = "ppm"  # ppm | png


class AnnotateResponse(BaseModel):
    detection: str
    image_b64: str


class SynthRequest(BaseModel):
    spec: dict
    seed: int | None = None
    format: str = "ppm"


class SynthResponse(BaseModel):
    image_b64: str
    truth: dict


class EvalRequest(BaseModel):
    detections: dict
    truth: dict
    match_radius: float = 10.0
    config: dict = Field(default_factory=dict)


class RatesModel(BaseModel):
    tp: float
    tn: float
    fp: float
    fn: float
    accuracy: float


class BenchScene(BaseModel):
    spec: dict
    seed: int | None = None
    name: str = ""


class BenchRequest(BaseModel):
    scenes: list[BenchScene]
    config: dict = Field(default_factory=dict)
    match_radius: float = 10.0
    workers: int = 1


class BenchSceneResult(RatesModel):
    name: str
    detections: int


class BenchResponse(BaseModel):
    scenes: list[BenchSceneResult]
    aggregate: RatesModel


def _decode_b64_image(payload: str):
    try:
        raw = base64.b64decode(payload, validate=True)
    except (binascii.Error, ValueError) as exc:
        raise InputError(f"image_b64 is not valid base64: {exc}") from exc
    return decode_image(raw)


def _config(mapping: dict) -> PipelineConfig:
    return config_from_mapping(mapping)


def _check_format(fmt: str) -> str:
    if fmt not in ("ppm", "png"):
        raise InputError(f"unknown image format {fmt!r} (use ppm or png)")
    return fmt


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.post("/detect")
def detect(req: DetectRequest) -> Response:
    image = _decode_b64_image(req.image_b64)
    tangles = run_pipeline(image, _config(req.config), workers=req.workers)
    return Response(content=detection_json(tangles), media_type="application/json")


@app.post("/annotate", response_model=AnnotateResponse)
def annotate_endpoint(req: AnnotateRequest):
    fmt = _check_format(req.format)
    image = _decode_b64_image(req.image_b64)
    tangles = run_pipeline(image, _config(req.config), workers=req.workers)
    marked = annotate(image, tangles)
    return AnnotateResponse(
        detection=detection_json(tangles),
        image_b64=base64.b64encode(encode_image(marked, fmt)).decode("ascii"),
    )


@app.post("/synth", response_model=SynthResponse)
def synth(req: SynthRequest):
    fmt = _check_format(req.format)
    image, truth = generate_scene(spec_from_dict(req.spec, seed=req.seed))
    return SynthResponse(
        image_b64=base64.b64encode(encode_image(image, fmt)).decode("ascii"),
        truth=truth_to_dict(truth),
    )


@app.post("/eval", response_model=RatesModel)
def eval_endpoint(req: EvalRequest):
    detections = detections_from_dict(req.detections)
    truth = truth_from_dict(req.truth)
    cfg = _config(req.config)
    rects = windows(truth.width, truth.height, cfg.window_w, cfg.window_h, cfg.window_stride)
    rates = evaluate(detections, truth, rects, match_radius=req.match_radius)
    return RatesModel(**rates.as_dict())


@app.post("/bench", response_model=BenchResponse)
def bench(req: BenchRequest):
    if not req.scenes:
        raise InputError("bench needs at least one scene")
    cfg = _config(req.config)
    results = []
    for i, scene in enumerate(req.scenes):
        image, truth = generate_scene(spec_from_dict(scene.spec, seed=scene.seed))
        tangles = run_pipeline(image, cfg, workers=req.workers)
        rects = windows(truth.width, truth.height, cfg.window_w, cfg.window_h, cfg.window_stride)
        rates = evaluate(tangles, truth, rects, match_radius=req.match_radius)
        results.append(
            BenchSceneResult(
                name=scene.name or f"scene-{i}",
                detections=len(tangles),
                **rates.as_dict(),
            )
        )
    aggregate = RatesModel(
        tp=mean(r.tp for r in results),
        tn=mean(r.tn for r in results),
        fp=mean(r.fp for r in results),
        fn=mean(r.fn for r in results),
        accuracy=mean(r.accuracy for r in results),
    )
    return BenchResponse(scenes=results, aggregate=aggregate)
