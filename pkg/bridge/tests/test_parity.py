"""Criterion 8: bridge-served explanations match in-process explanations.

Runs the explainer CLI as a subprocess in both modes so the two components
interact only through their public interfaces (files, flags, the wire).
"""

import json
import socket
import subprocess
import sys
import threading
import time


def run_explain(dataset, model_arg, seed):
    proc = subprocess.run(
        [
            sys.executable, "-m", "tgexplain", "explain",
            "--data", str(dataset), "--model", model_arg,
            "--target", "60", "--hops", "2", "--size", "6", "--stages", "3",
            "--lambda", "0.1", "--iters", "200", "--seed", str(seed),
        ],
        check=True,
        capture_output=True,
        text=True,
    )
    return json.loads(proc.stdout)


def test_criterion_8_bridge_parity(synth_dataset):
    started = time.monotonic()
    model_path = synth_dataset.parent / "d.model.json"
    bridge_arg = (
        f"bridge:cmd:{sys.executable} -m model_bridge "
        f"--model planted:{model_path} --stdio"
    )
    for seed in range(10):
        local = run_explain(synth_dataset, "builtin:planted", seed)
        remote = run_explain(synth_dataset, bridge_arg, seed)
        assert remote["event_ids"] == local["event_ids"], f"seed {seed}"
        assert remote["objective"] == local["objective"], f"seed {seed}"
    elapsed = time.monotonic() - started
    print(
        "PASS criterion 8: identical event_ids over 10 seeds, in-process vs "
        f"bridge ({elapsed:.1f}s)"
    )


def test_criterion_8_every_response_echoes_request_id(synth_dataset):
    model_path = synth_dataset.parent / "d.model.json"
    proc = subprocess.Popen(
        [
            sys.executable, "-m", "model_bridge",
            "--model", f"planted:{model_path}", "--stdio",
        ],
        stdin=subprocess.PIPE,
        stdout=subprocess.PIPE,
        text=True,
    )
    try:
        requests = [
            {"type": "predict", "request_id": rid, "target": 60,
             "included": [0, rid % 7 + 1]}
            for rid in range(1, 30)
        ]
        requests.append({"type": "predict", "request_id": 99, "included": [5]})
        for req in requests:
            proc.stdin.write(json.dumps(req) + "\n")
        proc.stdin.flush()
        for req in requests:
            reply = json.loads(proc.stdout.readline())
            assert reply["request_id"] == req["request_id"]
            expected = "error" if "target" not in req else "prediction"
            assert reply["type"] == expected
    finally:
        proc.stdin.close()
        proc.wait(timeout=5)


def test_tcp_transport_round_trip(synth_dataset):
    from model_bridge.__main__ import resolve_adapter, serve_tcp

    model_path = synth_dataset.parent / "d.model.json"
    adapter = resolve_adapter(f"planted:{model_path}")
    with socket.socket() as probe:
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]
    server = threading.Thread(
        target=serve_tcp, args=(adapter, "127.0.0.1", port), daemon=True
    )
    server.start()
    deadline = time.monotonic() + 5
    while True:
        try:
            conn = socket.create_connection(("127.0.0.1", port), timeout=1)
            break
        except OSError:
            if time.monotonic() > deadline:
                raise
            time.sleep(0.05)
    with conn, conn.makefile("rw", encoding="utf-8") as stream:
        stream.write(json.dumps({"type": "hello"}) + "\n")
        stream.write(
            json.dumps(
                {"type": "predict", "request_id": 1, "target": 60, "included": []}
            )
            + "\n"
        )
        stream.flush()
        hello = json.loads(stream.readline())
        prediction = json.loads(stream.readline())
    assert hello["version"] == 1
    assert prediction == {
        "type": "prediction",
        "request_id": 1,
        "values": [json.loads(model_path.read_text())["bias"]],
    }
