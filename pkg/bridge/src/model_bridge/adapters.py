"""Model adapters: anything with a task, flags, and a predict method.

An adapter wraps one resident model instance. The serve loop only needs:

  task: dict           wire encoding of the prediction task
  reentrant: bool      whether concurrent predict calls are safe
  attribute_dim: int   event attribute dimensionality of the training data
  predict(included, target) -> (values, per_node | None)

``values`` must be the model's raw (pre-activation) outputs.
"""

from __future__ import annotations

import json
from typing import Optional, Protocol, Sequence, runtime_checkable


@runtime_checkable
class ModelAdapter(Protocol):
    task: dict
    reentrant: bool
    attribute_dim: int

    def predict(
        self, included: Sequence[int], target: int
    ) -> tuple[list[float], Optional[list[list[float]]]]:
        ...


class PlantedAdapter:
    """Exact reimplementation of the reference planted model from its sidecar.

    The sidecar stores per-event and per-pair additive terms, so prediction
    is bias + sum of included event terms + terms of fully-included pairs.
    The event-term sum uses numpy over a dense array indexed by sorted ids,
    matching the in-process reference bit for bit.
    """

    reentrant = True  # pure function of the included set

    def __init__(self, model: dict):
        import numpy as np

        self.task = dict(model["task"])
        self.attribute_dim = int(model.get("attribute_dim", 0))
        self._bias = float(model["bias"])
        self._event_terms = {int(k): float(v) for k, v in model["event_terms"].items()}
        self._pair_terms = [(int(i), int(j), float(t)) for i, j, t in model["pair_terms"]]
        n = max(self._event_terms) + 1 if self._event_terms else 0
        self._terms = np.zeros(n)
        for eid, term in self._event_terms.items():
            self._terms[eid] = term
        self._np = np

    @classmethod
    def from_file(cls, path: str) -> "PlantedAdapter":
        with open(path) as fp:
            return cls(json.load(fp))

    def predict(
        self, included: Sequence[int], target: int
    ) -> tuple[list[float], None]:
        ids = sorted(set(int(i) for i in included))
        for eid in ids:
            if eid not in self._event_terms:
                raise ValueError(f"unknown event id {eid}")
        present = frozenset(ids)
        value = self._bias + float(self._np.sum(self._terms[ids]))
        for i, j, term in self._pair_terms:
            if i in present and j in present:
                value += term
        return [value], None


class ConstantAdapter:
    """Always answers with a fixed vector; used for protocol tests."""

    def __init__(self, values: Sequence[float], task: Optional[dict] = None,
                 reentrant: bool = False, attribute_dim: int = 0):
        self.task = task or {"kind": "entity-binary"}
        self.reentrant = reentrant
        self.attribute_dim = attribute_dim
        self._values = [float(v) for v in values]

    def predict(
        self, included: Sequence[int], target: int
    ) -> tuple[list[float], None]:
        return list(self._values), None
