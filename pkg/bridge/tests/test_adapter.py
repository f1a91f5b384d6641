import json
import math

import pytest

from model_bridge import PlantedAdapter
from model_bridge.__main__ import resolve_adapter


class TestPlantedAdapter:
    def test_empty_inclusion_returns_bias(self, planted_model):
        path, model = planted_model
        adapter = PlantedAdapter.from_file(str(path))
        values, per_node = adapter.predict([], 4)
        assert values == [model["bias"]]
        assert per_node is None

    def test_full_inclusion_matches_hand_sum(self, planted_model):
        path, model = planted_model
        adapter = PlantedAdapter.from_file(str(path))
        values, _ = adapter.predict([0, 1, 2, 3], 4)
        expected = model["bias"] + math.fsum(model["event_terms"].values()) + 2.0
        assert values[0] == pytest.approx(expected, abs=1e-12)

    def test_pair_requires_both_members(self, planted_model):
        path, model = planted_model
        adapter = PlantedAdapter.from_file(str(path))
        only_one, _ = adapter.predict([1], 4)
        both, _ = adapter.predict([1, 3], 4)
        assert only_one == [model["bias"]]  # events 1 and 3 have zero terms
        assert both == [model["bias"] + 2.0]

    def test_duplicate_and_unordered_input_tolerated(self, planted_model):
        path, _ = planted_model
        adapter = PlantedAdapter.from_file(str(path))
        assert adapter.predict([2, 0, 2], 4) == adapter.predict([0, 2], 4)

    def test_unknown_event_raises(self, planted_model):
        path, _ = planted_model
        adapter = PlantedAdapter.from_file(str(path))
        with pytest.raises(ValueError, match="99"):
            adapter.predict([99], 4)

    def test_task_and_flags_from_sidecar(self, planted_model):
        path, model = planted_model
        adapter = PlantedAdapter.from_file(str(path))
        assert adapter.task == model["task"]
        assert adapter.attribute_dim == model["attribute_dim"]
        assert adapter.reentrant is True

    def test_matches_generated_sidecar(self, synth_dataset):
        """Adapter output equals an independent evaluation of the sidecar terms."""
        model_path = synth_dataset.parent / "d.model.json"
        model = json.loads(model_path.read_text())
        adapter = PlantedAdapter.from_file(str(model_path))
        all_ids = sorted(int(k) for k in model["event_terms"])
        values, _ = adapter.predict(all_ids, model["target"])
        expected = (
            model["bias"]
            + math.fsum(model["event_terms"].values())
            + math.fsum(t for _, _, t in model["pair_terms"])
        )
        assert values[0] == pytest.approx(expected, abs=1e-9)


class TestResolveAdapter:
    def test_planted_descriptor(self, planted_model):
        path, _ = planted_model
        assert isinstance(resolve_adapter(f"planted:{path}"), PlantedAdapter)

    def test_unknown_descriptor_rejected(self):
        with pytest.raises(ValueError):
            resolve_adapter("tgn:checkpoint.pt")
