"""Client for out-of-process models speaking newline-delimited JSON.

Endpoint syntax:
  ``bridge:cmd:<command line>``  spawn a child process, talk over its stdio
  ``bridge:tcp:<host>:<port>``   connect to a listening stream socket

One request is in flight at a time unless the handshake declares the
server reentrant; a lock serializes calls either way since responses are
matched to requests purely by order plus an echoed request_id.
"""

from __future__ import annotations

import json
import os
import select
import shlex
import socket
import subprocess
import threading
import time
from typing import Iterable, Optional

import numpy as np

from .errors import BridgeError
from .events import EventStore
from .oracle import Prediction, TaskKind

PROTOCOL_VERSION = 1
TIMEOUT_ENV_VAR = "STX_BRIDGE_TIMEOUT_MS"
DEFAULT_TIMEOUT_MS = 30000


def _timeout_seconds() -> float:
    raw = os.environ.get(TIMEOUT_ENV_VAR, "")
    try:
        ms = int(raw) if raw else DEFAULT_TIMEOUT_MS
    except ValueError:
        ms = DEFAULT_TIMEOUT_MS
    return ms / 1000.0


class _LineChannel:
    """Blocking line reader/writer with a deadline, over any file descriptor."""

    def __init__(self, read_fd: int, write_fd: int, timeout: float):
        self._read_fd = read_fd
        self._write_fd = write_fd
        self._timeout = timeout
        self._buffer = b""

    def send_line(self, text: str) -> None:
        data = text.encode("utf-8") + b"\n"
        while data:
            sent = os.write(self._write_fd, data)
            data = data[sent:]

    def recv_line(self) -> str:
        deadline = time.monotonic() + self._timeout
        while b"\n" not in self._buffer:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise BridgeError("timed out waiting for bridge reply")
            ready, _, _ = select.select([self._read_fd], [], [], remaining)
            if not ready:
                raise BridgeError("timed out waiting for bridge reply")
            chunk = os.read(self._read_fd, 65536)
            if not chunk:
                raise BridgeError("bridge closed the connection")
            self._buffer += chunk
        line, self._buffer = self._buffer.split(b"\n", 1)
        return line.decode("utf-8")


class BridgeOracle:
    """ModelOracle backed by a wire-protocol server."""

    def __init__(self, endpoint: str):
        self._lock = threading.Lock()
        self._proc: Optional[subprocess.Popen] = None
        self._sock: Optional[socket.socket] = None
        self._request_id = 0
        timeout = _timeout_seconds()
        if endpoint.startswith("bridge:cmd:"):
            command = endpoint[len("bridge:cmd:"):]
            try:
                self._proc = subprocess.Popen(
                    shlex.split(command),
                    stdin=subprocess.PIPE,
                    stdout=subprocess.PIPE,
                )
            except OSError as exc:
                raise BridgeError(f"cannot spawn bridge command: {exc}") from None
            assert self._proc.stdin and self._proc.stdout
            self._channel = _LineChannel(
                self._proc.stdout.fileno(), self._proc.stdin.fileno(), timeout
            )
        elif endpoint.startswith("bridge:tcp:"):
            rest = endpoint[len("bridge:tcp:"):]
            host, _, port = rest.rpartition(":")
            try:
                self._sock = socket.create_connection((host, int(port)), timeout)
            except (OSError, ValueError) as exc:
                raise BridgeError(f"cannot connect to {rest}: {exc}") from None
            fd = self._sock.fileno()
            self._channel = _LineChannel(fd, fd, timeout)
        else:
            raise BridgeError(f"bad bridge endpoint {endpoint!r}")
        self._handshake()

    def _roundtrip(self, request: dict) -> dict:
        self._channel.send_line(json.dumps(request))
        line = self._channel.recv_line()
        try:
            reply = json.loads(line)
        except json.JSONDecodeError:
            raise BridgeError(f"malformed bridge reply: {line!r}") from None
        if reply.get("type") == "error":
            raise BridgeError(f"bridge error: {reply.get('message')}")
        return reply

    def _handshake(self) -> None:
        reply = self._roundtrip({"type": "hello"})
        if reply.get("type") != "hello":
            raise BridgeError(f"unexpected handshake reply: {reply}")
        if reply.get("version") != PROTOCOL_VERSION:
            raise BridgeError(f"unsupported protocol version {reply.get('version')}")
        try:
            self.task = TaskKind.from_wire(reply["task"])
        except (KeyError, ValueError) as exc:
            raise BridgeError(f"bad task in handshake: {exc}") from None
        self.reentrant = bool(reply.get("reentrant", False))
        self.attribute_dim = reply.get("attribute_dim")

    def predict(
        self, store: EventStore, included: Iterable[int], target_event_id: int
    ) -> Prediction:
        with self._lock:
            self._request_id += 1
            request_id = self._request_id
            reply = self._roundtrip(
                {
                    "type": "predict",
                    "request_id": request_id,
                    "target": int(target_event_id),
                    "included": sorted(int(i) for i in included),
                }
            )
        if reply.get("type") != "prediction":
            raise BridgeError(f"unexpected reply type {reply.get('type')!r}")
        if reply.get("request_id") != request_id:
            raise BridgeError(
                f"request_id mismatch: sent {request_id}, got {reply.get('request_id')}"
            )
        try:
            values = np.asarray(reply["values"], dtype=float)
            per_node = reply.get("per_node")
            if per_node is not None:
                per_node = [np.asarray(v, dtype=float) for v in per_node]
            return Prediction(task=self.task, values=values, per_node=per_node)
        except (KeyError, TypeError, ValueError) as exc:
            raise BridgeError(f"bad prediction payload: {exc}") from None

    def close(self) -> None:
        if self._sock is not None:
            self._sock.close()
        if self._proc is not None:
            if self._proc.stdin:
                self._proc.stdin.close()
            self._proc.terminate()
            try:
                self._proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._proc.kill()

    def __enter__(self) -> "BridgeOracle":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()
