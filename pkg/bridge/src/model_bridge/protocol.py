"""Wire protocol: newline-delimited JSON, one object per line, UTF-8.

Requests:
  {"type": "hello"}
  {"type": "predict", "request_id": <any>, "target": <int>,
   "included": [<int> strictly ascending]}

Responses:
  {"type": "hello", "version": 1, "task": {...}, "reentrant": <bool>,
   "attribute_dim": <int>}
  {"type": "prediction", "request_id": <echo>, "values": [<float>...]
   [, "per_node": [[<float>...], ...]]}
  {"type": "error", "request_id": <echo or null>, "message": <str>}

Adapter exceptions become error objects and the loop keeps serving;
only transport close (EOF) ends a session. Floats are serialized by the
json module, which round-trips IEEE doubles exactly.
"""

from __future__ import annotations

import json
import math
from typing import IO

from .adapters import ModelAdapter

PROTOCOL_VERSION = 1


def _error(request_id, message: str) -> dict:
    return {"type": "error", "request_id": request_id, "message": message}


def handle_request(adapter: ModelAdapter, line: str) -> dict:
    """Map one request line to one response object. Never raises."""
    try:
        request = json.loads(line)
    except json.JSONDecodeError as exc:
        return _error(None, f"malformed JSON: {exc}")
    if not isinstance(request, dict):
        return _error(None, "request must be a JSON object")

    kind = request.get("type")
    if kind == "hello":
        return {
            "type": "hello",
            "version": PROTOCOL_VERSION,
            "task": adapter.task,
            "reentrant": bool(adapter.reentrant),
            "attribute_dim": int(adapter.attribute_dim),
        }
    if kind != "predict":
        return _error(request.get("request_id"), f"unknown request type {kind!r}")

    request_id = request.get("request_id")
    missing = [key for key in ("request_id", "target", "included") if key not in request]
    if missing:
        return _error(request_id, f"missing fields: {', '.join(missing)}")
    target = request["target"]
    included = request["included"]
    if not isinstance(target, int) or isinstance(target, bool):
        return _error(request_id, "target must be an integer event id")
    if not isinstance(included, list) or not all(
        isinstance(i, int) and not isinstance(i, bool) for i in included
    ):
        return _error(request_id, "included must be a list of integer event ids")
    if any(a >= b for a, b in zip(included, included[1:])):
        return _error(request_id, "included ids must be strictly ascending")

    try:
        values, per_node = adapter.predict(included, target)
    except Exception as exc:  # adapter faults must not kill the session
        return _error(request_id, f"{type(exc).__name__}: {exc}")

    values = [float(v) for v in values]
    if not all(math.isfinite(v) for v in values):
        return _error(request_id, "adapter produced non-finite values")
    response = {"type": "prediction", "request_id": request_id, "values": values}
    if per_node is not None:
        response["per_node"] = [[float(v) for v in row] for row in per_node]
    return response


def serve(adapter: ModelAdapter, reader: IO[str], writer: IO[str]) -> None:
    """Answer requests line by line until the input stream closes."""
    for line in reader:
        if not line.strip():
            continue
        writer.write(json.dumps(handle_request(adapter, line)) + "\n")
        writer.flush()
