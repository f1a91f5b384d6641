"""Command-line entry point for serving a model adapter.

Examples:
  python3 -m model_bridge --model planted:d.model.json --stdio
  python3 -m model_bridge --model planted:d.model.json --tcp 127.0.0.1:9100
"""

from __future__ import annotations

import argparse
import io
import socketserver
import sys

from .adapters import ModelAdapter, PlantedAdapter
from .protocol import serve


def resolve_adapter(descriptor: str) -> ModelAdapter:
    scheme, _, rest = descriptor.partition(":")
    if scheme == "planted" and rest:
        return PlantedAdapter.from_file(rest)
    raise ValueError(
        f"unknown model descriptor {descriptor!r}; expected planted:<model.json>"
    )


def serve_stdio(adapter: ModelAdapter) -> None:
    serve(adapter, sys.stdin, sys.stdout)


def serve_tcp(adapter: ModelAdapter, host: str, port: int) -> None:
    class Handler(socketserver.StreamRequestHandler):
        def handle(self):
            reader = io.TextIOWrapper(self.rfile, encoding="utf-8")
            writer = io.TextIOWrapper(self.wfile, encoding="utf-8")
            try:
                serve(adapter, reader, writer)
            finally:
                # hand the raw streams back so socketserver can close them
                reader.detach()
                writer.detach()

    class Server(socketserver.ThreadingTCPServer):
        allow_reuse_address = True
        daemon_threads = True

    with Server((host, port), Handler) as server:
        server.serve_forever()


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="model_bridge", description="Serve a model over NDJSON"
    )
    parser.add_argument("--model", required=True, help="adapter descriptor")
    transport = parser.add_mutually_exclusive_group(required=True)
    transport.add_argument("--stdio", action="store_true")
    transport.add_argument("--tcp", metavar="HOST:PORT")
    args = parser.parse_args(argv)

    try:
        adapter = resolve_adapter(args.model)
    except (ValueError, OSError) as exc:
        print(f"model_bridge: {exc}", file=sys.stderr)
        return 2

    if args.stdio:
        serve_stdio(adapter)
        return 0
    host, _, port = args.tcp.rpartition(":")
    try:
        serve_tcp(adapter, host or "127.0.0.1", int(port))
    except (ValueError, OSError) as exc:
        print(f"model_bridge: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
