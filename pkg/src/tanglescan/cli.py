"""Command-line client for the tanglescan service.

Every subcommand talks to the HTTP API: against a remote server when
--server is given, otherwise against an in-process instance of the app
(no network, same code path). `serve` starts the service with uvicorn.
"""

from __future__ import annotations

import argparse
import base64
import json
import sys
from pathlib import Path

import httpx

from . import __version__
from .config import load_config
from .errors import FileNotFoundInputError, InputError

EXIT_OK = 0
EXIT_BAD_INPUT = 1
EXIT_INTERNAL = 2


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    # in-process bridge to the ASGI app: same code path as a real server
    from fastapi.testclient import TestClient

    from .service import app  # imported lazily; fastapi startup is not free

    return TestClient(app, raise_server_exceptions=False)


def _post(client: httpx.Client, path: str, payload: dict) -> httpx.Response:
    resp = client.post(path, json=payload)
    if resp.status_code == 400:
        raise InputError(resp.json().get("detail", resp.text))
    resp.raise_for_status()
    return resp


def _read_bytes(path: str, kind: str) -> bytes:
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundInputError(f"no such {kind} file: {path}")
    return p.read_bytes()


def _read_json(path: str, kind: str) -> dict:
    try:
        return json.loads(_read_bytes(path, kind))
    except json.JSONDecodeError as exc:
        raise InputError(f"bad JSON in {kind} file {path}: {exc}") from exc


def _config_mapping(path: str | None) -> dict:
    if path is None:
        return {}
    return load_config(path).as_mapping()  # parse locally for early errors


def _fmt_for(path: str) -> str:
    return "png" if path.lower().endswith(".png") else "ppm"


def _write_output(data: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(data)
        if not data.endswith("\n"):
            sys.stdout.write("\n")
    else:
        Path(out).write_bytes(data.encode("utf-8"))


def cmd_detect(args) -> int:
    image_b64 = base64.b64encode(_read_bytes(args.image, "image")).decode("ascii")
    payload = {
        "image_b64": image_b64,
        "config": _config_mapping(args.config),
        "workers": args.workers,
    }
    with _client(args.server) as client:
        if args.annotate:
            payload["format"] = _fmt_for(args.annotate)
            body = _post(client, "/annotate", payload).json()
            Path(args.annotate).write_bytes(base64.b64decode(body["image_b64"]))
            _write_output(body["detection"], args.out)
        else:
            resp = _post(client, "/detect", payload)
            _write_output(resp.text, args.out)
    return EXIT_OK


def cmd_synth(args) -> int:
    payload = {
        "spec": _read_json(args.spec, "scene spec"),
        "seed": args.seed,
        "format": _fmt_for(args.out_image),
    }
    with _client(args.server) as client:
        body = _post(client, "/synth", payload).json()
    Path(args.out_image).write_bytes(base64.b64decode(body["image_b64"]))
    Path(args.out_truth).write_text(json.dumps(body["truth"], indent=2) + "\n")
    return EXIT_OK


def cmd_eval(args) -> int:
    payload = {
        "detections": _read_json(args.detections, "detections"),
        "truth": _read_json(args.truth, "truth"),
        "match_radius": args.match_radius,
        "config": _config_mapping(args.config),
    }
    with _client(args.server) as client:
        body = _post(client, "/eval", payload).json()
    sys.stdout.write(json.dumps(body, indent=2) + "\n")
    return EXIT_OK


def cmd_bench(args) -> int:
    scene_dir = Path(args.scenes)
    if not scene_dir.is_dir():
        raise FileNotFoundInputError(f"no such scene directory: {args.scenes}")
    specs = sorted(scene_dir.glob("*.json"))
    if not specs:
        raise InputError(f"no *.json scene specs in {args.scenes}")
    payload = {
        "scenes": [
            {"spec": _read_json(str(p), "scene spec"), "name": p.stem} for p in specs
        ],
        "config": _config_mapping(args.config),
        "match_radius": args.match_radius,
        "workers": args.workers,
    }
    with _client(args.server) as client:
        body = _post(client, "/bench", payload).json()
    header = f"{'scene':<24} {'TP':>6} {'TN':>6} {'FP':>6} {'FN':>6} {'Acc':>6} {'dets':>5}"
    print(header)
    for row in body["scenes"]:
        print(
            f"{row['name']:<24} {row['tp']:>6.3f} {row['tn']:>6.3f} "
            f"{row['fp']:>6.3f} {row['fn']:>6.3f} {row['accuracy']:>6.3f} {row['detections']:>5}"
        )
    agg = body["aggregate"]
    print(
        f"{'OVERALL':<24} {agg['tp']:>6.3f} {agg['tn']:>6.3f} "
        f"{agg['fp']:>6.3f} {agg['fn']:>6.3f} {agg['accuracy']:>6.3f}"
    )
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tanglescan",
        description="Detect wire tangles in images: position, over-wire, confidence.",
    )
    parser.add_argument("--version", action="version", version=f"tanglescan {__version__}")
    parser.add_argument(
        "--server",
        default=None,
        help="base URL of a running tanglescan service (default: run in-process)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="detect tangles in an image")
    p.add_argument("image", help="input image (PPM P6 or PNG)")
    p.add_argument("--config", help="key/value config file")
    p.add_argument("--out", help="write detection JSON here (default: stdout)")
    p.add_argument("--annotate", help="also write a cross-hair annotated image here")
    p.add_argument("--workers", type=int, default=1, help="threads across the 8 masks")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("synth", help="render a synthetic scene with ground truth")
    p.add_argument("--spec", required=True, help="scene spec JSON file")
    p.add_argument("--seed", type=int, default=None, help="RNG seed (overrides spec)")
    p.add_argument("--out-image", required=True, help="output image path (.ppm or .png)")
    p.add_argument("--out-truth", required=True, help="output ground-truth JSON path")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("eval", help="score detections against ground truth")
    p.add_argument("--detections", required=True, help="detection JSON file")
    p.add_argument("--truth", required=True, help="ground-truth JSON file")
    p.add_argument("--match-radius", type=float, default=10.0)
    p.add_argument("--config", help="config file (window grid must match detect)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="synth+detect+eval over a directory of scene specs")
    p.add_argument("--scenes", required=True, help="directory of scene spec *.json files")
    p.add_argument("--config", help="key/value config file")
    p.add_argument("--match-radius", type=float, default=10.0)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except httpx.HTTPStatusError as exc:
        print(f"error: service returned {exc.response.status_code}: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT if exc.response.status_code < 500 else EXIT_INTERNAL
    except httpx.TransportError as exc:
        print(f"error: cannot reach service: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except Exception as exc:  # noqa: BLE001 - final CLI guard
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
