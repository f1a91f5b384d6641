import json
import subprocess
import sys

import pytest


@pytest.fixture
def planted_model(tmp_path):
    """Hand-written model sidecar: 4 events, one pair, known terms."""
    model = {
        "bias": 1.5,
        "t_k": 10.0,
        "target": 4,
        "task": {"kind": "entity-regression", "dim": 1},
        "attribute_dim": 4,
        "event_terms": {"0": 0.25, "1": 0.0, "2": 0.75, "3": 0.0},
        "pair_terms": [[1, 3, 2.0]],
    }
    path = tmp_path / "m.model.json"
    path.write_text(json.dumps(model))
    return path, model


@pytest.fixture(scope="session")
def synth_dataset(tmp_path_factory):
    """Dataset plus sidecars produced by the explainer CLI (separate process)."""
    out = tmp_path_factory.mktemp("data") / "d.jsonl"
    subprocess.run(
        [
            sys.executable, "-m", "tgexplain", "synth",
            "--events", "60", "--nodes", "12", "--planted", "3", "--pairs", "1",
            "--seed", "1", "--out", str(out),
        ],
        check=True,
        capture_output=True,
    )
    return out
